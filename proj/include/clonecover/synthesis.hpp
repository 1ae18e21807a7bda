#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "clonecover/decomposition.hpp"
#include "clonecover/term.hpp"

namespace clonecover {

// n (+) k = n^2 + k, injective on {(n, k) : k < n}. Throws ContractViolation
// when k >= n.
Nat oplus(Nat n, Nat k);

// Inverse of oplus on its range.
std::optional<std::pair<Nat, Nat>> oplus_decode(Nat code);

// ---------------------------------------------------------------------------
// Unary reduction

struct UnaryReduction {
  PointFn unary;                   // f(g_1, ..., g_n), arity {1}
  std::vector<std::size_t> choice;  // candidate indices; empty if f was kept
  IdealVerdict evidence;           // the failing C_I check
};

// Searches candidate tuples in lexicographic order for a composite
// f(g_1, ..., g_n) whose C_I fragment check fails at `width_threshold`.
// A unary f failing the check is returned unchanged. Every candidate must be
// unary and C_I certified.
UnaryReduction reduce_to_unary(const PointFn& f, const std::vector<PointFn>& candidates,
                               Nat width_threshold);

// The composite x -> f(g_1(x), ..., g_n(x)).
PointFn unary_composite(const PointFn& f, const std::vector<const PointFn*>& parts);

// ---------------------------------------------------------------------------
// Normalization of the witness

struct NormalizedWitness {
  PointFn f_star;  // unary
  Nat horizon = 0;
  std::map<Point, Point> r;                   // normalized domain point -> f-domain point
  std::map<Nat, Nat> l_line;                  // f-codomain line -> normalized line
  std::map<std::pair<Nat, Nat>, Nat> l_row;   // (f-codomain line, x) -> normalized x
};

// Relabels a point of f's codomain; nullopt where L is undefined.
std::optional<Point> apply_l(const NormalizedWitness& w, const Point& p);

// Builds R and L such that f_star = L o f o R satisfies
// f_star((0 | n (+) k)) = (k | n) for all k < n < horizon, and fixes
// f_star((0|0)) through a spare preimage point. Throws AdmissibilityError
// naming the first n without a suitable codomain line.
NormalizedWitness normalize_f(const PointFn& f_unary, Nat horizon);

// ---------------------------------------------------------------------------
// P*(M), K-tables, h-family and Q

struct PStarIndex {
  IndexSet m;
  std::vector<std::pair<IndexSet, Index>> pairs;

  std::size_t slot(const IndexSet& s, Index j) const;
  std::string label(std::size_t slot) const;
};

PStarIndex pstar(const IndexSet& m);

using KTables = std::map<FiberKey, KTable>;

// K_{q_{uc}} for every S other than M and every occurring key c.
KTables build_k_tables(const PointFn& q, Nat theta);

// h^{S,j}(c u z) = (0 | K (+) z_j^y) when z_j^y < K = K_{q_{uc}}(q(c u z)^y).
PointFn build_h(const PointFn& q, const IndexSet& s, Index j, const KTables& k_tables);

// Q(u, v) = q(u) when v_{S,j} = f_star(h^{S,j}(u)) at every slot where
// h^{S,j}(u) is defined; slots where it is undefined impose no constraint.
class QFunction {
 public:
  QFunction() = default;
  QFunction(PointFn q, PStarIndex index, std::vector<PointFn> h_family, PointFn f_star,
            KTables k_tables);

  const PointFn& q() const { return q_; }
  const PStarIndex& index() const { return index_; }
  const std::vector<PointFn>& h_family() const { return h_family_; }
  const PointFn& f_star() const { return f_star_; }
  const KTables& k_tables() const { return k_tables_; }
  Index m() const { return static_cast<Index>(index_.m.size()); }

  // Required v_{S,j} per slot; nullopt marks an unconstrained slot.
  std::vector<std::optional<Point>> required(const MTuple& u) const;

  std::optional<Point> operator()(const MTuple& u, const MTuple& v) const;

  // The v the assembled term feeds to Q: f_star(h-bar^{S,j}(u)) at every slot.
  MTuple fed_slots(const MTuple& u) const;

  // Q's graph on the tuples the term reaches: (u, fed_slots(u)) -> q(u).
  PointFn materialize() const;

 private:
  PointFn q_;
  PStarIndex index_;
  std::vector<PointFn> h_family_;
  PointFn f_star_;
  KTables k_tables_;
};

// Graph of Q restricted to the tuples the term evaluates it at.
PointFn build_Q(const QFunction& q_fn);

struct SynthesisResult {
  PStarIndex index;
  KTables k_tables;
  std::vector<PointFn> h_family;  // ordered as index.pairs
  QFunction q_fn;
  PointFn q_graph;                // materialized Q
  TermBundle term;                // term for q
};

// Builds the h-family, Q and the term for a hereditarily thrifty q.
SynthesisResult synthesize_q(const PointFn& q, const NormalizedWitness& witness, Nat theta);

// Term Q-bar(x_1..x_m, f_star(h-bar^{S,j}(x)) for (S,j) in P*(M)), with
// C_I atoms bar-extended over dom(q).
TermBundle assemble_term(const PointFn& q, const PointFn& f_star, const PStarIndex& index,
                         const std::vector<PointFn>& h_family, const PointFn& q_graph);

// ---------------------------------------------------------------------------
// Width bound for Q

// One factor per coordinate i of M and one per slot of P*(M).
struct FactorFamily {
  std::vector<PointSet> coords;
  std::vector<PointSet> slots;
};

// Adds (0|n) for every needed line the set misses. Throws ContractViolation
// if b has width > 1.
PointSet complete_width1(const PointSet& b, const std::set<Nat>& lines_needed);

// Completes every factor so the selectors used by main_lemma_certify never
// hit an empty line: slots meet every K value, coordinates meet every
// x-coordinate of their slot factors.
FactorFamily complete_factors(const FactorFamily& family, const QFunction& q_fn);

// Q[A] for the product A of the factors.
PointSet q_image(const QFunction& q_fn, const FactorFamily& family);

struct MainLemmaReport {
  Nat width = 0;
  Nat bound = 0;
  Nat witness_line = 0;
  bool pass = true;
  PointSet image;
};

Nat factorial(Nat m);

// width(Q[A]) <= m! for a family of width-1 factors. Throws
// ContractViolation if some factor is wider.
MainLemmaReport verify_main_lemma(const QFunction& q_fn, const FactorFamily& family);

struct CertificationStep {
  IndexSet s;  // {pi(1), ..., pi(j-1)}
  Index index = 0;  // pi(j)
  Nat k = 0;
  Nat b = 0;
  Nat a = 0;
};

struct UniquenessCertificate {
  Nat line = 0;
  std::vector<Index> pi;
  std::vector<CertificationStep> steps;
  std::optional<MTuple> candidate;  // c^m, absent when the recursion stops early
  std::vector<MTuple> qualifying;    // every u meeting the hypotheses
  bool pass = true;
};

// Runs the k_j, b_j, a_j recursion along pi and checks that every qualifying
// u (Q(u, v) on `line`, y-coordinates ordered along pi) equals the candidate.
// Factors must be width 1 and completed; an empty selector throws
// ContractViolation.
UniquenessCertificate main_lemma_certify(const QFunction& q_fn, const FactorFamily& family,
                                         Nat line, const std::vector<Index>& pi);

struct QCiReport {
  Nat w = 0;
  Nat r_size = 0;  // |M| + |P*(M)|
  Nat observed = 0;
  Nat bound = 0;
  bool slices_checked = false;  // every width-1 slice product checked against m!
  bool pass = true;
};

// For width-<=w factors: observed width(Q[A]) against w^{|R|} * m!, and,
// when the number of slice products is at most `slice_limit`, the m! bound on
// every product of width-1 slices.
QCiReport verify_Q_in_CI(const QFunction& q_fn, const FactorFamily& product, Nat w,
                         std::size_t slice_limit = 4096);

// ---------------------------------------------------------------------------
// End to end

struct SynthesisOptions {
  Nat theta = 1;
  Nat horizon = 2;
  Nat width_threshold = 0;
  AllocatorPolicy policy = AllocatorPolicy::LargestMinY;
};

struct SynthesisBundle {
  UnaryReduction reduction;
  NormalizedWitness witness;
  DecompositionTrace trace;
  SynthesisResult synthesis;  // for q = g'
  TermBundle term;            // for g
};

// Writes g as a term over the witness and certified C_I atoms. Errors are
// rethrown as StageError tagged with the failing stage.
SynthesisBundle end_to_end_synthesize(const PointFn& g, const PointFn& f,
                                      const std::vector<PointFn>& candidates,
                                      const SynthesisOptions& options);

}  // namespace clonecover
