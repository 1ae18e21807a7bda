#pragma once

#include <map>
#include <string>
#include <vector>

#include "clonecover/ideals.hpp"

namespace clonecover {

// Which eligible tuple the selection takes from a wasteful preimage.
enum class AllocatorPolicy { LargestMinY, SmallestMinY };

struct ChoiceKey {
  MTuple c;
  Point value;
  friend auto operator<=>(const ChoiceKey&, const ChoiceKey&) = default;
};

// Output of the width-1 selection over a family of wasteful functions.
struct SelectionResult {
  TupleSet a;                           // the chosen tuples; width <= 1
  std::map<ChoiceKey, MTuple> chosen;   // (c, d) -> u^{c,d}
  std::map<MTuple, PointFn> wasteful;   // the input family w_c
  std::map<MTuple, PointFn> g_primes;   // w'_c, injective
  std::map<MTuple, TupleFn> h_parts;    // h_c, ranges inside A
};

// Picks one representative per (c, value) whose component y-coordinates are
// disjoint from every other representative, and whose singleton preimage is
// bounded by theta. Keys are visited in order, values by (line, column).
// Throws ContractViolation if some value of the family is not wasteful at
// theta and AdmissibilityError when a preimage has no eligible tuple left.
SelectionResult countable_selection(const std::map<MTuple, PointFn>& wasteful_family, Nat theta,
                                    AllocatorPolicy policy = AllocatorPolicy::LargestMinY);

struct StrongDecomposition {
  IndexSet s;
  PointFn g_prime;
  TupleFn h;
  SelectionResult selection;
  std::map<Index, CiCertificate> h_certificates;  // per component of h
};

// g = g' o h with g' inside g, every fiber g'_{uc} (c over S) thrifty at
// theta, and h certified in C_I componentwise.
StrongDecomposition strong_decompose(const PointFn& g, const IndexSet& s, Nat theta,
                                     AllocatorPolicy policy = AllocatorPolicy::LargestMinY);

struct DecompositionTrace {
  Nat theta = 0;
  PointFn g;                                // g^0
  std::vector<StrongDecomposition> stages;  // stage i holds S_i, g^i, h^i
  PointFn g_prime;                          // g^k
  TupleFn h;                                // h^k o ... o h^1
};

// Applies strong_decompose over every S of M, by size then lexicographically.
DecompositionTrace hereditary_decompose(const PointFn& g, Nat theta,
                                        AllocatorPolicy policy = AllocatorPolicy::LargestMinY);

// Composition of the stage maps, h^k o ... o h^1; identity on dom(g) when
// there are no stages.
TupleFn compose_stages(const DecompositionTrace& trace);

struct CheckResult {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct VerificationReport {
  std::vector<CheckResult> checks;
  bool pass() const;
  void add(std::string name, bool ok, std::string detail = {});
};

// Re-derives every invariant of the trace from its stored data.
VerificationReport verify_decomposition(const PointFn& g, const DecompositionTrace& trace);

}  // namespace clonecover
