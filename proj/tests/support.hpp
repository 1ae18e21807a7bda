#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "clonecover/ideals.hpp"
#include "clonecover/rng.hpp"

// Hand-rolled generators and brute-force oracles shared by the test binaries.
namespace testkit {

using namespace clonecover;

inline Point random_point(Rng& rng, Nat bound) { return Point{rng.below(bound), rng.below(bound)}; }

inline MTuple random_tuple(Rng& rng, const IndexSet& idx, Nat bound) {
  std::vector<Point> pts;
  for (std::size_t i = 0; i < idx.size(); ++i) pts.push_back(random_point(rng, bound));
  return MTuple(idx, std::move(pts));
}

inline PointSet random_points(Rng& rng, std::size_t n, Nat bound) {
  PointSet out;
  for (std::size_t i = 0; i < n; ++i) out.insert(random_point(rng, bound));
  return out;
}

inline TupleSet random_tuples(Rng& rng, const IndexSet& idx, std::size_t n, Nat bound) {
  TupleSet out;
  for (std::size_t i = 0; i < n; ++i) out.insert(random_tuple(rng, idx, bound));
  return out;
}

inline PointFn random_point_fn(Rng& rng, const IndexSet& arity, std::size_t n, Nat bound,
                               Nat value_bound) {
  PointFn out(arity);
  for (std::size_t i = 0; i < n; ++i) {
    MTuple u = random_tuple(rng, arity, bound);
    if (!out.defined_at(u)) out.insert(u, random_point(rng, value_bound));
  }
  return out;
}

inline TupleFn random_tuple_fn(Rng& rng, const IndexSet& arity, const IndexSet& codomain,
                               std::size_t n, Nat bound) {
  TupleFn out(arity, codomain);
  for (std::size_t i = 0; i < n; ++i) {
    MTuple u = random_tuple(rng, arity, bound);
    if (!out.defined_at(u)) out.insert(u, random_tuple(rng, codomain, bound));
  }
  return out;
}

// Random nonempty subset of {1..m}, or any subset when allow_empty.
inline IndexSet random_subset(Rng& rng, Index m, bool allow_empty = true) {
  for (;;) {
    std::vector<Index> v;
    for (Index i = 1; i <= m; ++i)
      if (rng.chance(1, 2)) v.push_back(i);
    if (allow_empty || !v.empty()) return IndexSet(v);
  }
}

// Width by scanning all points once per line met.
inline Nat naive_width(const PointSet& pts) {
  std::set<Nat> lines;
  for (const auto& p : pts) lines.insert(p.y);
  Nat best = 0;
  for (Nat line : lines) {
    Nat n = 0;
    for (const auto& q : pts) n += q.y == line;
    best = std::max(best, n);
  }
  return best;
}

// Least k with every tuple inside B_k, found by trying k = 0, 1, 2, ...
inline Nat naive_least_bound(const TupleSet& tuples) {
  if (tuples.empty()) return 0;
  for (Nat k = 0;; ++k) {
    bool inside = true;
    for (const auto& u : tuples) {
      bool some = false;
      for (const auto& p : u.entries()) some = some || p.y < k;
      if (!some && !u.entries().empty()) {
        inside = false;
        break;
      }
    }
    if (inside) return k;
  }
}

// K_t(n) for every line met by ran(t), straight from the definition.
inline std::map<Nat, Nat> naive_k_table(const PointFn& t) {
  std::map<Nat, Nat> out;
  std::set<Nat> lines;
  for (auto& [u, v] : t) lines.insert(v.y);
  for (Nat n : lines) {
    TupleSet pre;
    for (auto& [u, v] : t)
      if (v.y == n) pre.insert(u);
    out[n] = naive_least_bound(pre);
  }
  return out;
}

}  // namespace testkit
