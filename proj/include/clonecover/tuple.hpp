#pragma once

#include <compare>
#include <set>
#include <string>
#include <vector>

#include "clonecover/index_set.hpp"
#include "clonecover/point.hpp"

namespace clonecover {

// A total map from a finite index set to grid points.
class MTuple {
 public:
  MTuple() = default;
  MTuple(IndexSet index, std::vector<Point> entries);
  // Tuple over {1, ..., entries.size()}.
  explicit MTuple(std::vector<Point> entries);

  const IndexSet& index_set() const { return index_; }
  const std::vector<Point>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  const Point& at(Index i) const { return entries_[index_.position(i)]; }

  // Union with a tuple over a disjoint index set.
  MTuple joined(const MTuple& other) const;
  // Restriction to a subset of the index set.
  MTuple restricted(const IndexSet& s) const;

  // Smallest y-coordinate among the components; only meaningful when nonempty.
  Nat min_y() const;

  std::string to_string() const;

  friend auto operator<=>(const MTuple&, const MTuple&) = default;
  friend bool operator==(const MTuple&, const MTuple&) = default;

 private:
  IndexSet index_;
  std::vector<Point> entries_;
};

using TupleSet = std::set<MTuple>;

// c*A: the set {c u z : z in A}.
TupleSet star_set(const MTuple& c, const TupleSet& a);

// The i-th projection of a tuple set, as a set of points.
PointSet project(const TupleSet& tuples, Index i);

}  // namespace clonecover
