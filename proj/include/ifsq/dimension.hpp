#pragma once

// Moran-type root solvers, dimension bounds, box counting and the
// per-system dimension report.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ifsq/code_space.hpp"
#include "ifsq/error.hpp"
#include "ifsq/geometry.hpp"
#include "ifsq/ifs.hpp"
#include "ifsq/quantization.hpp"

namespace ifsq {

inline constexpr int kRootIterations = 200;
inline constexpr double kRootResidual = 1e-12;

namespace detail {

inline void check_ratios(std::span<const double> ratios) {
  require_input(ratios.size() >= 2, "at least 2 ratios are required");
  for (double c : ratios) {
    require_input(std::isfinite(c) && c > 0.0 && c < 1.0, "ratios must lie in (0, 1)");
  }
}

// Root of a strictly decreasing g on [lo, hi] with g(lo) > 0 > g(hi).
template <class G>
double bisect_decreasing(G g, double lo, double hi) {
  for (int it = 0; it < kRootIterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double v = g(mid);
    if (std::abs(v) <= kRootResidual * 1e-3 || mid == lo || mid == hi) return mid;
    (v > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// The unique s > 0 with sum_i c_i^s = 1.
inline double solve_moran(std::span<const double> ratios) {
  detail::check_ratios(ratios);
  auto g = [&](double s) {
    double acc = 0.0;
    for (double c : ratios) acc += std::pow(c, s);
    return acc - 1.0;
  };
  double hi = 1.0;
  while (g(hi) > 0.0) {
    hi *= 2.0;
    detail::require(hi < 1e6, ErrorKind::numerical, "Moran bracket did not close");
  }
  const double s = detail::bisect_decreasing(g, 0.0, hi);
  detail::require(std::abs(g(s)) <= kRootResidual, ErrorKind::numerical,
                  "Moran root residual above tolerance");
  return s;
}

inline double solve_moran(std::initializer_list<double> ratios) {
  return solve_moran(std::span<const double>(ratios.begin(), ratios.size()));
}

/// The unique l > 0 with sum_i (p_i c_i^r)^(l/(r+l)) = 1, solved for
/// theta = l/(r+l) in (0, 1).
inline double solve_qdim_exponent(std::span<const double> probs, std::span<const double> ratios,
                                  double r) {
  validate_probability_vector(probs);
  detail::check_ratios(ratios);
  detail::require_input(probs.size() == ratios.size(), "probs and ratios differ in length");
  detail::require_input(std::isfinite(r) && r > 0.0, "r must be positive");
  std::vector<double> a(probs.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = probs[i] * std::pow(ratios[i], r);
  auto g = [&](double theta) {
    double acc = 0.0;
    for (double v : a) acc += std::pow(v, theta);
    return acc - 1.0;
  };
  const double theta = detail::bisect_decreasing(g, 0.0, 1.0);
  detail::require(std::abs(g(theta)) <= kRootResidual, ErrorKind::numerical,
                  "quantization exponent residual above tolerance");
  return r * theta / (1.0 - theta);
}

struct ExponentBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// (k_r, l_r) from the lower and upper Lipschitz constants.
inline ExponentBounds qdim_bounds(const IFSystem& wifs, double r) {
  const auto& probs = wifs.require_probs();
  return {solve_qdim_exponent(probs, wifs.lower_lips(), r),
          solve_qdim_exponent(probs, wifs.upper_lips(), r)};
}

/// (s1, s2): Moran roots of min(lower_F, lower_G) and max(upper_F, upper_G).
inline ExponentBounds graph_dim_bounds(const IFSystem& f, const IFSystem& g) {
  detail::require_input(f.size() == g.size(), "graph bounds need equal map counts");
  std::vector<double> lo(f.size());
  std::vector<double> hi(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    lo[i] = std::min(f.map(i).lower_lip(), g.map(i).lower_lip());
    hi[i] = std::max(f.map(i).upper_lip(), g.map(i).upper_lip());
  }
  return {solve_moran(lo), solve_moran(hi)};
}

inline ExponentBounds moran_hausdorff_bounds(const IFSystem& h) {
  return {solve_moran(h.lower_lips()), solve_moran(h.upper_lips())};
}

/// delta_0 * 2^-k for k = 0..count-1.
inline std::vector<double> dyadic_scales(double delta0, std::size_t count) {
  std::vector<double> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(std::ldexp(delta0, -static_cast<int>(k)));
  return out;
}

struct BoxCountFit {
  std::vector<double> scales;
  std::vector<std::size_t> counts;
  double slope = 0.0;
  double r_squared = 0.0;
};

namespace detail {

struct CellHash {
  std::size_t operator()(const std::vector<std::int64_t>& v) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (std::int64_t x : v) {
      h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

inline std::vector<std::int64_t> cell_of(const Point& x, double delta) {
  std::vector<std::int64_t> key(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    key[k] = static_cast<std::int64_t>(std::floor(x[k] / delta));
  }
  return key;
}

inline std::size_t occupied_cells(const PointCloud& cloud, double delta) {
  std::unordered_set<std::vector<std::int64_t>, CellHash> cells;
  cells.reserve(cloud.size());
  for (const Point& x : cloud.points) cells.insert(cell_of(x, delta));
  return cells.size();
}

// Largest nearest-neighbour distance, answered only up to `cap`: returns
// true iff every point has another point within distance `cap`.
inline bool resolved_at(const PointCloud& cloud, double cap) {
  if (cloud.size() < 2) return false;
  std::unordered_map<std::vector<std::int64_t>, std::vector<std::size_t>, CellHash> grid;
  for (std::size_t i = 0; i < cloud.size(); ++i) grid[cell_of(cloud.points[i], cap)].push_back(i);
  const std::size_t d = cloud.dimension;
  std::size_t neighbours = 1;
  for (std::size_t k = 0; k < d; ++k) neighbours *= 3;
  const double cap2 = cap * cap;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto base = cell_of(cloud.points[i], cap);
    bool found = false;
    for (std::size_t code = 0; code < neighbours && !found; ++code) {
      auto key = base;
      std::size_t rest = code;
      for (std::size_t k = 0; k < d; ++k) {
        key[k] += static_cast<std::int64_t>(rest % 3) - 1;
        rest /= 3;
      }
      const auto it = grid.find(key);
      if (it == grid.end()) continue;
      for (std::size_t j : it->second) {
        if (j != i && squared_distance(cloud.points[i], cloud.points[j]) <= cap2) {
          found = true;
          break;
        }
      }
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace detail

/// Least-squares slope of log N_delta against -log delta over grid-aligned
/// boxes. Scales must halve successively. Unless `resolution` is given, the
/// cloud must have a neighbour within the smallest scale around every point;
/// an explicit resolution must not exceed that scale.
inline BoxCountFit box_dimension_estimate(const PointCloud& cloud,
                                          const std::vector<double>& scales,
                                          std::optional<double> resolution = {}) {
  detail::require(scales.size() >= 4, ErrorKind::invalid_scale, "at least 4 scales are required");
  for (std::size_t k = 0; k < scales.size(); ++k) {
    detail::require(scales[k] > 0.0 && std::isfinite(scales[k]), ErrorKind::invalid_scale,
                    "scales must be positive");
    if (k > 0) {
      detail::require(std::abs(scales[k] / scales[k - 1] - 0.5) <= 1e-12, ErrorKind::invalid_scale,
                      "scales must halve successively");
    }
  }
  detail::require_input(cloud.size() >= 2, "box counting needs at least 2 points");
  const double finest = scales.back();
  if (resolution) {
    detail::require(*resolution <= finest, ErrorKind::invalid_scale,
                    "cloud resolution is coarser than the smallest scale");
  } else {
    detail::require(detail::resolved_at(cloud, finest), ErrorKind::invalid_scale,
                    "cloud is coarser than the smallest scale");
  }
  BoxCountFit fit;
  fit.scales = scales;
  std::vector<double> xs;
  std::vector<double> ys;
  for (double delta : scales) {
    const std::size_t count = detail::occupied_cells(cloud, delta);
    fit.counts.push_back(count);
    xs.push_back(-std::log(delta));
    ys.push_back(std::log(static_cast<double>(count)));
  }
  const LineFit line = least_squares(xs, ys);
  fit.slope = line.slope;
  fit.r_squared = line.r_squared;
  return fit;
}

/// 1/(2 + 1/r); tends to 1/2 as r grows.
inline double countable_example_qdim(double r) {
  detail::require_input(std::isfinite(r) && r > 0.0, "r must be positive");
  return 1.0 / (2.0 + 1.0 / r);
}

struct ProductQDim {
  double product = 0.0;  // D_r of the product measure
  double first = 0.0;    // D_r of mu_p
  double second = 0.0;   // D_r of mu_q
  bool strict() const noexcept { return product > std::max(first, second); }
};

/// Quantization exponents of mu_p, mu_q and their product when every map of
/// both systems is a similarity with the common ratio c.
inline ProductQDim product_qdim_check(std::span<const double> p, std::span<const double> q,
                                      double c, double r) {
  validate_probability_vector(p);
  validate_probability_vector(q);
  const std::vector<double> cp(p.size(), c);
  const std::vector<double> cq(q.size(), c);
  std::vector<double> pq;
  for (double a : p) {
    for (double b : q) pq.push_back(a * b);
  }
  const std::vector<double> cpq(pq.size(), c);
  return {solve_qdim_exponent(pq, cpq, r), solve_qdim_exponent(p, cp, r),
          solve_qdim_exponent(q, cq, r)};
}

inline ProductQDim product_qdim_check(const IFSystem& f, const IFSystem& g, double r) {
  const double c = f.map(0).upper_lip();
  auto common = [c](const IFSystem& s) {
    if (!s.all_similarities()) return false;
    for (const auto& m : s.maps()) {
      if (std::abs(m.upper_lip() - c) > 1e-12) return false;
    }
    return true;
  };
  detail::require(common(f) && common(g), ErrorKind::unsupported_input,
                  "product quantization needs one common similarity ratio for every map");
  return product_qdim_check(f.require_probs(), g.require_probs(), c, r);
}

/// Moran roots are bounds; box and quantization slopes are estimates.
struct DimensionReport {
  std::string system;
  double r = 2.0;
  Separation separation = Separation::none;
  double moran_lower = 0.0;
  double moran_upper = 0.0;
  std::optional<double> qdim_lower;
  std::optional<double> qdim_upper;
  std::optional<double> box_estimate;
  std::optional<double> box_r_squared;
  std::optional<double> empirical_qdim;
  std::optional<double> empirical_r_squared;
};

inline DimensionReport dimension_report(const IFSystem& h, double r) {
  DimensionReport rep;
  rep.system = h.name();
  rep.r = r;
  rep.separation = h.declared_separation();
  const ExponentBounds moran = moran_hausdorff_bounds(h);
  rep.moran_lower = moran.lower;
  rep.moran_upper = moran.upper;
  if (h.probs()) {
    const ExponentBounds q = qdim_bounds(h, r);
    rep.qdim_lower = q.lower;
    rep.qdim_upper = q.upper;
  }
  return rep;
}

}  // namespace ifsq
