#pragma once

#include <compare>
#include <cstdint>
#include <ostream>
#include <set>
#include <string>

namespace clonecover {

using Nat = std::uint64_t;

// A point (x|y) of the grid omega x omega. The y-coordinate names the line
// the point lies on, the x-coordinate its column within that line.
struct Point {
  Nat x = 0;
  Nat y = 0;

  friend auto operator<=>(const Point&, const Point&) = default;
};

inline constexpr Point kOrigin{0, 0};

// Orders points by (line, column).
struct LineOrder {
  bool operator()(const Point& a, const Point& b) const {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  }
};

using PointSet = std::set<Point>;

inline std::string to_string(const Point& p) {
  return "(" + std::to_string(p.x) + "|" + std::to_string(p.y) + ")";
}

inline std::ostream& operator<<(std::ostream& os, const Point& p) {
  return os << to_string(p);
}

}  // namespace clonecover
