#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "ifsq/error.hpp"

namespace ifsq {

using Point = std::vector<double>;

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    acc += d * d;
  }
  return std::sqrt(acc);
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    acc += d * d;
  }
  return acc;
}

inline double max_distance(std::span<const double> a, std::span<const double> b) {
  double out = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) out = std::max(out, std::abs(a[k] - b[k]));
  return out;
}

/// Finite point set in R^d.
struct PointCloud {
  std::size_t dimension = 1;
  std::vector<Point> points;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
};

/// Closed axis-aligned box.
struct Box {
  Point lower;
  Point upper;

  Box() = default;
  Box(Point lo, Point hi) : lower(std::move(lo)), upper(std::move(hi)) {
    detail::require_input(lower.size() == upper.size() && !lower.empty(),
                          "box bounds must have equal non-zero dimension");
    for (std::size_t k = 0; k < lower.size(); ++k) {
      detail::require_input(lower[k] <= upper[k], "box lower bound exceeds upper bound");
    }
  }

  static Box interval(double lo, double hi) { return Box({lo}, {hi}); }

  std::size_t dimension() const noexcept { return lower.size(); }

  bool contains(std::span<const double> x, double slack = 0.0) const {
    for (std::size_t k = 0; k < lower.size(); ++k) {
      if (x[k] < lower[k] - slack || x[k] > upper[k] + slack) return false;
    }
    return true;
  }

  double diameter() const { return euclidean_distance(lower, upper); }

  Point center() const {
    Point c(lower.size());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = 0.5 * (lower[k] + upper[k]);
    return c;
  }

  std::vector<Point> corners() const {
    const std::size_t d = lower.size();
    std::vector<Point> out;
    out.reserve(std::size_t{1} << d);
    for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
      Point c(d);
      for (std::size_t k = 0; k < d; ++k) c[k] = (mask >> k) & 1U ? upper[k] : lower[k];
      out.push_back(std::move(c));
    }
    return out;
  }

  /// Cartesian product this x other.
  Box times(const Box& other) const {
    Point lo = lower;
    Point hi = upper;
    lo.insert(lo.end(), other.lower.begin(), other.lower.end());
    hi.insert(hi.end(), other.upper.begin(), other.upper.end());
    return Box(std::move(lo), std::move(hi));
  }
};

}  // namespace ifsq
