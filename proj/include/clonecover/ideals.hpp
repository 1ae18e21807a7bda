#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "clonecover/partial_fn.hpp"

namespace clonecover {

struct WidthCertificate {
  Nat width = 0;
  Nat witness_line = 0;
  std::map<Nat, Nat> per_line_counts;
};

// Largest number of points sharing a line.
WidthCertificate width(const PointSet& points);

// Maximum width of the projections of a tuple set onto its components.
Nat tuple_set_width(const TupleSet& tuples);

struct BoundCertificate {
  Nat k = 0;  // least k with the set inside B^M_k
};

// Least k such that every tuple has a component with y-coordinate below k.
// Sets of 0-ary tuples are bounded by convention (k = 0).
BoundCertificate least_bound(const TupleSet& tuples);

enum class Verdict { Thrifty, Wasteful };

template <class V>
struct ValueClass {
  Nat bound = 0;
  Verdict verdict = Verdict::Thrifty;
};

// Preimage bounds per value, split into the thrifty and wasteful parts of
// the domain at threshold theta.
template <class V>
struct ThriftyReport {
  Nat theta = 0;
  std::map<V, ValueClass<V>> per_value;
  TupleSet wasteful_domain;  // W_p
  TupleSet thrifty_domain;   // T_p

  bool all_thrifty() const { return wasteful_domain.empty(); }
};

template <class V>
ThriftyReport<V> classify_preimages(const PartialFn<V>& p, Nat theta) {
  if (theta < 1) throw ContractViolation("threshold must be at least 1");
  ThriftyReport<V> report;
  report.theta = theta;
  std::map<V, TupleSet> preimages;
  for (auto& [u, v] : p) preimages[v].insert(u);
  for (auto& [v, pre] : preimages) {
    ValueClass<V> cls;
    cls.bound = least_bound(pre).k;
    cls.verdict = cls.bound <= theta ? Verdict::Thrifty : Verdict::Wasteful;
    auto& side = cls.verdict == Verdict::Thrifty ? report.thrifty_domain : report.wasteful_domain;
    side.insert(pre.begin(), pre.end());
    report.per_value.emplace(v, cls);
  }
  return report;
}

// Restriction of p to its thrifty and wasteful parts.
template <class V>
std::pair<PartialFn<V>, PartialFn<V>> split_thrifty(const PartialFn<V>& p, Nat theta) {
  auto report = classify_preimages(p, theta);
  return {p.restricted(report.thrifty_domain), p.restricted(report.wasteful_domain)};
}

using KTable = std::map<Nat, Nat>;

// K_t(n) for every line n met by ran(t). Throws ContractViolation when t is
// not thrifty at theta.
KTable k_table(const PointFn& t, Nat theta);

struct FiberKey {
  IndexSet s;
  MTuple c;
  friend auto operator<=>(const FiberKey&, const FiberKey&) = default;
};

struct HereditaryFailure {
  IndexSet s;
  MTuple c;
  Point value;
  Nat bound = 0;
};

struct HereditaryReport {
  Nat theta = 0;
  bool pass = true;
  std::map<FiberKey, ThriftyReport<Point>> fibers;
  std::optional<HereditaryFailure> failure;  // first failing (S, c, value)
};

// Checks every fiber q_{uc}, for every S and every occurring key c.
HereditaryReport is_hereditarily_thrifty(const PointFn& q, Nat theta);

enum class IdealKind { CIFragment, CJFragment };

struct IdealVerdict {
  IdealKind kind = IdealKind::CIFragment;
  std::vector<TupleSet> test_family;
  std::vector<Nat> image_widths;
  Nat bound_claimed = 0;
  bool pass = true;
};

// Fragment surrogate for membership in C_I: every test set is mapped to a
// set of width at most `bound`.
IdealVerdict ci_fragment_check(const PointFn& p, const std::vector<TupleSet>& test_sets, Nat bound);

// Fragment surrogate for C_J: every test set's image meets each line in at
// most `bound` points. Same computation as the C_I surrogate, different claim.
IdealVerdict cj_fragment_check(const PointFn& p, const std::vector<TupleSet>& test_sets, Nat bound);

// Greedy partition of a tuple set into sets of width 1, taken in tuple
// order. Used as C_I test families.
std::vector<TupleSet> width1_slices(const TupleSet& tuples);

// Width-1 slices of a point set: slice r holds the r-th point of each line.
std::vector<PointSet> width1_slices(const PointSet& points);

// Evidence that a point-valued partial function lies in C_I.
struct CiCertificate {
  enum class Kind {
    Projection,       // p(u) = u_k everywhere
    Width1Range,      // ran(p) has width at most 1
    ProjectionUnion,  // p(u) = u_k on part of dom(p), width-1 range on the rest
    MainLemma,        // Q-atoms; backed by the main-lemma width report
  };
  Kind kind = Kind::Width1Range;
  Index projection = 0;
  std::string note;
};

std::string to_string(CiCertificate::Kind kind);

// Re-checks a locally checkable certificate against the graph. MainLemma
// certificates are not locally checkable and return true.
bool check_certificate(const PointFn& p, const CiCertificate& cert);

// Finds the strongest local certificate for p, if any. `preferred` is the
// projection index tried first.
std::optional<CiCertificate> certify_ci(const PointFn& p, Index preferred);

}  // namespace clonecover
