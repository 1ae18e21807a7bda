#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "clonecover/instance.hpp"
#include "clonecover/rng.hpp"
#include "clonecover/synthesis.hpp"

namespace clonecover {

struct StageCheck {
  std::string stage;
  std::string name;
  bool pass = true;
  std::string detail;
};

struct Report {
  std::uint64_t seed = 0;
  Index m = 0;
  Nat horizon = 0;
  Nat theta = 0;
  Nat domain_size = 0;
  std::vector<StageCheck> checks;
  std::optional<TermStats> term_stats;
  std::optional<std::string> error;     // stage-tagged error that stopped the run
  std::map<std::string, double> timing_ms;  // filled only on request

  bool pass() const;
  void add(const std::string& stage, const VerificationReport& r);
  void add(std::string stage, std::string name, bool ok, std::string detail = {});
};

struct PipelineOptions {
  std::size_t factor_families = 6;  // random width-1 families for the m! bound
  Nat q_ci_width = 2;
  bool timing = false;
};

struct PipelineResult {
  Report report;
  std::optional<SynthesisBundle> bundle;
};

// Admissibility, synthesis and every verification, collected in one report.
PipelineResult run_pipeline(const Instance& inst, const PipelineOptions& options = {});

// A random family of width-1 factors drawn from the points Q actually
// reaches, then completed for the main-lemma recursion.
FactorFamily random_factor_family(const QFunction& q_fn, Rng& rng);

// Union of two random families: factors of width at most 2.
FactorFamily random_width2_family(const QFunction& q_fn, Rng& rng);

// Main-lemma bound plus per-(line, permutation) uniqueness for every line
// met by Q[A].
VerificationReport check_main_lemma(const QFunction& q_fn, const FactorFamily& family);

// h^{S,j} ranges lie in {0} x omega and have width at most 1.
VerificationReport check_h_family(const SynthesisResult& s);

// Re-verifies a term against an instance without any trace: structure,
// atom certificates, the (*) shape of the witness atom and pointwise
// equality with g on dom(g). Failures name the offending tuples.
VerificationReport verify_term(const Instance& inst, const TermBundle& term);

}  // namespace clonecover
