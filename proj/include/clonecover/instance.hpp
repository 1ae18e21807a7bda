#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clonecover/decomposition.hpp"

namespace clonecover {

// What the generator planted so every choice step of the construction can
// succeed on the finite fragment.
struct Admissibility {
  Nat wasteful_surplus = 0;            // spare landing tuples per wasteful class
  Nat width_threshold = 0;             // C_I check threshold for the unary search
  std::vector<Nat> witness_lines;      // f-codomain line planted for n = 1..N-1
  std::vector<std::size_t> planted;    // candidate indices of the unary witness; empty if f is unary

  friend bool operator==(const Admissibility&, const Admissibility&) = default;
};

struct Instance {
  Index m = 1;
  Nat horizon = 2;
  Nat theta = 1;
  Nat ceiling = 6;  // every coordinate lies below this
  std::uint64_t seed = 0;
  std::string profile;
  PointFn g;
  PointFn f;
  std::vector<PointFn> candidates;
  Admissibility admissibility;

  friend bool operator==(const Instance&, const Instance&) = default;
};

inline constexpr const char* kProfiles[] = {"mixed", "all-thrifty", "projection", "empty"};

struct GenOptions {
  Index m = 2;
  Nat horizon = 8;
  Nat theta = 0;  // 0 selects ceil(horizon / 2)
  std::uint64_t seed = 1;
  std::string profile = "mixed";
  Nat surplus = 1;
  Nat max_domain = 300;
};

Nat default_theta(Nat horizon);

// Deterministic in its options. Throws ContractViolation for unsupported
// parameters and AdmissibilityError when the profile cannot be met.
Instance generate_instance(const GenOptions& options);

// Checks that every choice step of the construction succeeds on the
// instance: coordinate ceiling, 1 <= theta < N, the unary witness search,
// the normalization at N and a dry run of the hereditary decomposition.
VerificationReport check_admissibility(const Instance& instance);

}  // namespace clonecover
