#include <algorithm>

#include "clonecover/partial_fn.hpp"

namespace clonecover {

std::vector<IndexSet> subsets_by_size(const IndexSet& m) {
  const auto& elems = m.elements();
  const std::size_t n = elems.size();
  if (n >= 32) throw StructuralError("index set too large to enumerate subsets");
  std::vector<IndexSet> out;
  out.reserve(std::size_t{1} << n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<Index> s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) s.push_back(elems[i]);
    out.emplace_back(std::move(s));
  }
  std::stable_sort(out.begin(), out.end(), [](const IndexSet& a, const IndexSet& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a.elements() < b.elements();
  });
  return out;
}

MTuple::MTuple(IndexSet index, std::vector<Point> entries)
    : index_(std::move(index)), entries_(std::move(entries)) {
  if (index_.size() != entries_.size())
    throw StructuralError("tuple over " + index_.to_string() + " given " +
                          std::to_string(entries_.size()) + " entries");
}

MTuple::MTuple(std::vector<Point> entries)
    : index_(IndexSet::range(static_cast<Index>(entries.size()))), entries_(std::move(entries)) {}

MTuple MTuple::joined(const MTuple& other) const {
  if (!index_.disjoint_from(other.index_))
    throw StructuralError("joining tuples over overlapping index sets " + index_.to_string() +
                          " and " + other.index_.to_string());
  IndexSet idx = index_.united(other.index_);
  std::vector<Point> entries;
  entries.reserve(idx.size());
  for (Index i : idx) entries.push_back(index_.contains(i) ? at(i) : other.at(i));
  return MTuple(std::move(idx), std::move(entries));
}

MTuple MTuple::restricted(const IndexSet& s) const {
  if (!s.subset_of(index_))
    throw StructuralError("restricting tuple over " + index_.to_string() + " to " + s.to_string());
  std::vector<Point> entries;
  entries.reserve(s.size());
  for (Index i : s) entries.push_back(at(i));
  return MTuple(s, std::move(entries));
}

Nat MTuple::min_y() const {
  Nat best = ~Nat{0};
  for (const auto& p : entries_) best = std::min(best, p.y);
  return best;
}

std::string MTuple::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(index_.elements()[i]) + ":" + clonecover::to_string(entries_[i]);
  }
  return s + ")";
}

TupleSet star_set(const MTuple& c, const TupleSet& a) {
  TupleSet out;
  for (const auto& z : a) out.insert(c.joined(z));
  return out;
}

PointSet project(const TupleSet& tuples, Index i) {
  PointSet out;
  for (const auto& u : tuples) out.insert(u.at(i));
  return out;
}

PointFn bar_extend(const PointFn& p, const TupleSet& universe) {
  PointFn out(p.arity());
  for (auto& [u, v] : p) {
    if (!universe.count(u))
      throw ContractViolation("bar_extend: " + u.to_string() + " lies outside the universe");
  }
  for (const auto& u : universe) {
    auto v = p(u);
    out.insert(u, v ? *v : kOrigin);
  }
  return out;
}

TupleFn hash_fn(const MTuple& c, const TupleFn& g) {
  if (g.arity() != g.codomain())
    throw StructuralError("hash: g must map " + g.arity().to_string() + "-tuples to themselves");
  if (!c.index_set().disjoint_from(g.arity()))
    throw StructuralError("hash: index sets " + c.index_set().to_string() + " and " +
                          g.arity().to_string() + " overlap");
  IndexSet m = c.index_set().united(g.arity());
  TupleFn out(m, m);
  for (auto& [z, w] : g) out.insert(c.joined(z), c.joined(w));
  return out;
}

TupleFn identity_on(const IndexSet& arity, const TupleSet& tuples) {
  TupleFn out(arity, arity);
  for (const auto& u : tuples) out.insert(u, u);
  return out;
}

PointFn component(const TupleFn& h, Index i) {
  if (!h.codomain().contains(i))
    throw StructuralError("component " + std::to_string(i) + " outside " + h.codomain().to_string());
  PointFn out(h.arity());
  for (auto& [u, w] : h) out.insert(u, w.at(i));
  return out;
}

}  // namespace clonecover
