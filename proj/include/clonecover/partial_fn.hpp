#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "clonecover/error.hpp"
#include "clonecover/tuple.hpp"

namespace clonecover {

// A finitely supported partial function from tuples over `arity` into
// either points (V = Point) or tuples over a fixed codomain index set
// (V = MTuple). Undefined results are reported as std::nullopt.
template <class V>
class PartialFn {
  static_assert(std::is_same_v<V, Point> || std::is_same_v<V, MTuple>);

 public:
  using Value = V;
  using Graph = std::map<MTuple, V>;
  static constexpr bool kTupleValued = std::is_same_v<V, MTuple>;

  PartialFn() = default;
  explicit PartialFn(IndexSet arity, IndexSet codomain = {})
      : arity_(std::move(arity)), codomain_(std::move(codomain)) {}
  PartialFn(IndexSet arity, Graph graph, IndexSet codomain = {})
      : arity_(std::move(arity)), codomain_(std::move(codomain)) {
    for (auto& [u, v] : graph) check_entry(u, v);
    graph_ = std::move(graph);
  }

  const IndexSet& arity() const { return arity_; }
  // Index set of the values; empty for point-valued functions.
  const IndexSet& codomain() const { return codomain_; }
  const Graph& graph() const { return graph_; }
  std::size_t size() const { return graph_.size(); }
  bool empty() const { return graph_.empty(); }
  auto begin() const { return graph_.begin(); }
  auto end() const { return graph_.end(); }

  // Adds u -> v. Re-adding an identical entry is a no-op; a conflicting
  // value for an existing key is a collision.
  void insert(const MTuple& u, const V& v) {
    check_entry(u, v);
    auto [it, fresh] = graph_.emplace(u, v);
    if (!fresh && it->second != v)
      throw DomainCollision("conflicting values at " + u.to_string());
  }

  bool defined_at(const MTuple& u) const { return graph_.count(u) != 0; }

  std::optional<V> operator()(const MTuple& u) const {
    if (u.index_set() != arity_)
      throw StructuralError("tuple over " + u.index_set().to_string() +
                            " given to function of arity " + arity_.to_string());
    auto it = graph_.find(u);
    if (it == graph_.end()) return std::nullopt;
    return it->second;
  }

  TupleSet domain() const {
    TupleSet out;
    for (auto& [u, v] : graph_) out.insert(out.end(), u);
    return out;
  }

  std::set<V> range() const {
    std::set<V> out;
    for (auto& [u, v] : graph_) out.insert(v);
    return out;
  }

  TupleSet preimage(const V& value) const {
    TupleSet out;
    for (auto& [u, v] : graph_)
      if (v == value) out.insert(out.end(), u);
    return out;
  }

  PartialFn restricted(const TupleSet& keep) const {
    PartialFn out(arity_, codomain_);
    for (auto& [u, v] : graph_)
      if (keep.count(u)) out.graph_.emplace_hint(out.graph_.end(), u, v);
    return out;
  }

  // Graph inclusion.
  bool subset_of(const PartialFn& other) const {
    if (arity_ != other.arity_) return false;
    for (auto& [u, v] : graph_) {
      auto it = other.graph_.find(u);
      if (it == other.graph_.end() || it->second != v) return false;
    }
    return true;
  }

  friend bool operator==(const PartialFn&, const PartialFn&) = default;

 private:
  void check_entry(const MTuple& u, const V& v) const {
    if (u.index_set() != arity_)
      throw StructuralError("domain tuple over " + u.index_set().to_string() +
                            " in function of arity " + arity_.to_string());
    if constexpr (kTupleValued) {
      if (v.index_set() != codomain_)
        throw StructuralError("value over " + v.index_set().to_string() +
                              " in function with codomain " + codomain_.to_string());
    }
  }

  IndexSet arity_;
  IndexSet codomain_;
  Graph graph_;
};

using PointFn = PartialFn<Point>;
using TupleFn = PartialFn<MTuple>;

inline std::string to_string(const MTuple& t) { return t.to_string(); }

// outer o inner: defined at u iff inner(u) is defined and lies in dom(outer).
template <class W>
PartialFn<W> compose(const PartialFn<W>& outer, const TupleFn& inner) {
  if (inner.codomain() != outer.arity())
    throw StructuralError("cannot compose: inner codomain " + inner.codomain().to_string() +
                          " vs outer arity " + outer.arity().to_string());
  PartialFn<W> out(inner.arity(), outer.codomain());
  for (auto& [u, mid] : inner) {
    if (auto w = outer(mid)) out.insert(u, *w);
  }
  return out;
}

// Union of functions with pairwise disjoint domains.
template <class V>
PartialFn<V> disjoint_union(std::span<const PartialFn<V>> parts) {
  if (parts.empty()) return {};
  PartialFn<V> out(parts.front().arity(), parts.front().codomain());
  for (const auto& p : parts) {
    if (p.arity() != out.arity() || p.codomain() != out.codomain())
      throw StructuralError("disjoint_union over mismatched arities");
    for (auto& [u, v] : p) {
      if (out.defined_at(u)) throw DomainCollision("domains overlap at " + u.to_string());
      out.insert(u, v);
    }
  }
  return out;
}

template <class V>
PartialFn<V> disjoint_union(const std::vector<PartialFn<V>>& parts) {
  return disjoint_union(std::span<const PartialFn<V>>(parts));
}

// Given g contained in g' o h', returns h = h' restricted to dom(g), so that
// g' o h = g exactly.
template <class V>
TupleFn shrink_inner(const PartialFn<V>& g, const PartialFn<V>& g_prime, const TupleFn& h_prime) {
  TupleFn h(h_prime.arity(), h_prime.codomain());
  for (auto& [u, v] : g) {
    auto mid = h_prime(u);
    std::optional<V> w = mid ? g_prime(*mid) : std::nullopt;
    if (!w || *w != v)
      throw ContractViolation("g disagrees with g' o h' at " + u.to_string());
    h.insert(u, *mid);
  }
  return h;
}

// Total extension of p to `universe`, sending new tuples to (0|0).
PointFn bar_extend(const PointFn& p, const TupleSet& universe);

// (c*g)(c u z) = g(z).
template <class V>
PartialFn<V> star_fn(const MTuple& c, const PartialFn<V>& g) {
  if (!c.index_set().disjoint_from(g.arity()))
    throw StructuralError("star: index sets " + c.index_set().to_string() + " and " +
                          g.arity().to_string() + " overlap");
  PartialFn<V> out(c.index_set().united(g.arity()), g.codomain());
  for (auto& [z, v] : g) out.insert(c.joined(z), v);
  return out;
}

// (c#g)(c u z) = c u g(z), for g from T-tuples to T-tuples.
TupleFn hash_fn(const MTuple& c, const TupleFn& g);

// p_{uc}(z) = p(z u c), a function of the indices outside S.
template <class V>
PartialFn<V> fiber(const PartialFn<V>& g, const IndexSet& s, const MTuple& c) {
  if (!s.subset_of(g.arity()))
    throw StructuralError("fiber: " + s.to_string() + " not inside " + g.arity().to_string());
  if (c.index_set() != s) throw StructuralError("fiber: key tuple not indexed by S");
  IndexSet t = g.arity().minus(s);
  PartialFn<V> out(t, g.codomain());
  for (auto& [u, v] : g)
    if (u.restricted(s) == c) out.insert(u.restricted(t), v);
  return out;
}

// The S-projections of dom(g), i.e. the fiber keys that actually occur.
template <class V>
TupleSet fiber_keys(const PartialFn<V>& g, const IndexSet& s) {
  TupleSet out;
  for (auto& [u, v] : g) out.insert(u.restricted(s));
  return out;
}

// Identity on a set of tuples over `arity`.
TupleFn identity_on(const IndexSet& arity, const TupleSet& tuples);

// The component function pi_i o h.
PointFn component(const TupleFn& h, Index i);

// Is p injective on its domain?
template <class V>
bool is_injective(const PartialFn<V>& p) {
  return p.range().size() == p.size();
}

}  // namespace clonecover
