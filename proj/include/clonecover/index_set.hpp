#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "clonecover/error.hpp"

namespace clonecover {

using Index = std::uint32_t;

// A finite set of positive indices, kept sorted and duplicate free.
class IndexSet {
 public:
  IndexSet() = default;
  IndexSet(std::initializer_list<Index> init) : IndexSet(std::vector<Index>(init)) {}
  explicit IndexSet(std::vector<Index> elements) : elements_(std::move(elements)) {
    std::sort(elements_.begin(), elements_.end());
    elements_.erase(std::unique(elements_.begin(), elements_.end()), elements_.end());
    if (!elements_.empty() && elements_.front() == 0)
      throw StructuralError("index sets hold positive indices only");
  }

  // {1, ..., m}
  static IndexSet range(Index m) {
    std::vector<Index> v(m);
    for (Index i = 0; i < m; ++i) v[i] = i + 1;
    return IndexSet(std::move(v));
  }

  std::size_t size() const { return elements_.size(); }
  bool empty() const { return elements_.empty(); }
  const std::vector<Index>& elements() const { return elements_; }
  auto begin() const { return elements_.begin(); }
  auto end() const { return elements_.end(); }

  bool contains(Index i) const {
    return std::binary_search(elements_.begin(), elements_.end(), i);
  }
  // Position of i within the sorted elements; i must be a member.
  std::size_t position(Index i) const {
    auto it = std::lower_bound(elements_.begin(), elements_.end(), i);
    if (it == elements_.end() || *it != i)
      throw StructuralError("index " + std::to_string(i) + " not in " + to_string());
    return static_cast<std::size_t>(it - elements_.begin());
  }

  bool subset_of(const IndexSet& other) const {
    return std::includes(other.elements_.begin(), other.elements_.end(), elements_.begin(),
                         elements_.end());
  }
  bool disjoint_from(const IndexSet& other) const {
    std::vector<Index> common;
    std::set_intersection(elements_.begin(), elements_.end(), other.elements_.begin(),
                          other.elements_.end(), std::back_inserter(common));
    return common.empty();
  }

  IndexSet united(const IndexSet& other) const {
    std::vector<Index> out;
    std::set_union(elements_.begin(), elements_.end(), other.elements_.begin(),
                   other.elements_.end(), std::back_inserter(out));
    return IndexSet(std::move(out));
  }
  IndexSet minus(const IndexSet& other) const {
    std::vector<Index> out;
    std::set_difference(elements_.begin(), elements_.end(), other.elements_.begin(),
                        other.elements_.end(), std::back_inserter(out));
    return IndexSet(std::move(out));
  }

  std::string to_string() const {
    std::string s = "{";
    for (std::size_t i = 0; i < elements_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(elements_[i]);
    }
    return s + "}";
  }

  friend auto operator<=>(const IndexSet&, const IndexSet&) = default;

 private:
  std::vector<Index> elements_;
};

// All subsets of m, ordered by cardinality and then lexicographically.
std::vector<IndexSet> subsets_by_size(const IndexSet& m);

}  // namespace clonecover
