#pragma once

// Tops addresses, fractal transformations and graph sampling.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ifsq/code_space.hpp"
#include "ifsq/error.hpp"
#include "ifsq/ifs.hpp"

namespace ifsq {

struct TopsResult {
  CodePrefix code;
  /// The point after the K inverse steps.
  Point residual_point;
  /// True when every branch decision used exact 1-D image intervals.
  bool certified = false;
  /// Steps at which the point sat outside every branch and was snapped back.
  std::size_t snapped_steps = 0;
};

struct TopsOptions {
  /// Branch-membership tolerance. Defaults to 1e-9 in interval mode and to
  /// twice the branch-cloud resolution otherwise.
  std::optional<double> tol;
  /// Points per branch cloud in cloud mode (rounded down to a power of N).
  std::size_t cloud_points = 1 << 14;
};

/// Computes depth-K prefixes of the maximal address of points of the
/// attractor by descending greedily into the largest admissible branch.
///
/// 1-D affine systems whose hull images do not overlap use the exact image
/// intervals f_i(hull) and are certified. Everything else tests membership
/// against a precomputed cloud per branch, snapping the current point to the
/// nearest cloud point of the chosen branch before inverting.
class TopsSolver {
 public:
  explicit TopsSolver(const IFSystem& f, TopsOptions options = {}) : f_(f) {
    for (const auto& m : f_.maps()) {
      detail::require(m.has_inverse(), ErrorKind::unsupported_input,
                      "tops computation needs an inverse for every map");
    }
    interval_mode_ = f_.dimension() == 1 && f_.all_affine() && f_.hull() &&
                     check_interval_separation(f_) != IntervalSeparation::overlapping;
    if (interval_mode_) {
      intervals_ = image_intervals(f_);
      tol_ = options.tol.value_or(1e-9);
    } else {
      detail::require_input(f_.hull().has_value(), "cloud-mode tops needs a hull");
      std::size_t depth = 1;
      while (std::pow(static_cast<double>(f_.size()), static_cast<double>(depth + 1)) <=
             static_cast<double>(options.cloud_points)) {
        ++depth;
      }
      PointCloud all = attractor_sample(f_, depth, f_.default_seed());
      const std::size_t per_branch = all.size() / f_.size();
      branches_.resize(f_.size());
      for (std::size_t i = 0; i < f_.size(); ++i) {
        branches_[i].assign(all.points.begin() + static_cast<long>(i * per_branch),
                            all.points.begin() + static_cast<long>((i + 1) * per_branch));
      }
      resolution_ = std::pow(f_.max_upper_lip(), static_cast<double>(depth)) *
                    f_.hull()->diameter();
      tol_ = std::max(options.tol.value_or(0.0), 2.0 * resolution_);
    }
  }

  bool certified() const noexcept { return interval_mode_; }
  double tolerance() const noexcept { return tol_; }

  TopsResult operator()(const Point& x, std::size_t depth) const {
    detail::require_input(x.size() == f_.dimension(), "point dimension mismatch");
    if (f_.hull()) {
      detail::require(f_.hull()->contains(x, tol_), ErrorKind::address_failure,
                      "point lies outside the hull");
    }
    const int n = static_cast<int>(f_.size());
    std::vector<int> symbols;
    symbols.reserve(depth);
    Point current = x;
    std::size_t snapped = 0;
    for (std::size_t step = 0; step < depth; ++step) {
      std::size_t chosen = f_.size();
      double nearest = std::numeric_limits<double>::infinity();
      std::size_t nearest_branch = 0;
      for (std::size_t i = f_.size(); i-- > 0;) {
        const double d = branch_distance(i, current);
        if (d <= tol_) {
          chosen = i;
          break;
        }
        if (d < nearest) {
          nearest = d;
          nearest_branch = i;
        }
      }
      if (chosen == f_.size()) {
        if (nearest > 10.0 * tol_) {
          throw Error(ErrorKind::address_failure,
                      "no branch contains the point at step " + std::to_string(step + 1) +
                          " (distance " + std::to_string(nearest) + ")");
        }
        chosen = nearest_branch;
        ++snapped;
      }
      current = f_.map(chosen).inverse(snap(chosen, current));
      if (interval_mode_) {
        current[0] = std::clamp(current[0], f_.hull()->lower[0], f_.hull()->upper[0]);
      }
      symbols.push_back(static_cast<int>(chosen) + 1);
    }
    return {CodePrefix{Word(n, std::move(symbols)), TailConvention::repeat_last},
            std::move(current), interval_mode_, snapped};
  }

 private:
  double branch_distance(std::size_t i, const Point& x) const {
    if (interval_mode_) {
      const auto [lo, hi] = intervals_[i];
      return std::max({lo - x[0], x[0] - hi, 0.0});
    }
    double best = std::numeric_limits<double>::infinity();
    for (const Point& p : branches_[i]) best = std::min(best, squared_distance(p, x));
    return std::sqrt(best);
  }

  Point snap(std::size_t i, const Point& x) const {
    if (interval_mode_) return {std::clamp(x[0], intervals_[i].first, intervals_[i].second)};
    const Point* best = &branches_[i].front();
    double best_d = std::numeric_limits<double>::infinity();
    for (const Point& p : branches_[i]) {
      const double d = squared_distance(p, x);
      if (d < best_d) {
        best_d = d;
        best = &p;
      }
    }
    return *best;
  }

  IFSystem f_;
  bool interval_mode_ = false;
  std::vector<std::pair<double, double>> intervals_;
  std::vector<std::vector<Point>> branches_;
  double resolution_ = 0.0;
  double tol_ = 1e-9;
};

/// Depth-K prefix of the maximal address of x.
inline TopsResult tops_code(const IFSystem& f, const Point& x, std::size_t depth,
                            std::optional<double> tol = {}) {
  return TopsSolver(f, {tol})(x, depth);
}

/// phi_G(tops_F(x)) at depth K; the code tail is resolved to the fixed point
/// of its repeated map in G.
inline Point transform_point(const IFSystem& f, const IFSystem& g, const Point& x,
                             std::size_t depth, std::optional<double> tol = {}) {
  detail::require_input(f.size() == g.size(), "fractal transformation needs equal map counts");
  const TopsResult tops = tops_code(f, x, depth, tol);
  return address_point(g, tops.code, tail_fixed_point(g, tops.code)).point;
}

struct GraphSample {
  /// Points (x, T(x)) in the product space, in input order.
  PointCloud graph;
  /// Input indices whose address computation failed.
  std::vector<std::size_t> failures;
};

inline GraphSample graph_sample(const IFSystem& f, const IFSystem& g, const PointCloud& xs,
                                std::size_t depth, std::optional<double> tol = {},
                                std::size_t threads = 1) {
  detail::require_input(f.size() == g.size(), "fractal transformation needs equal map counts");
  detail::require_input(xs.dimension == f.dimension(), "input cloud dimension mismatch");
  const TopsSolver tops(f, {tol});
  std::vector<std::optional<Point>> images(xs.size());
  detail::parallel_for(xs.size(), threads, [&](std::size_t i) {
    try {
      const TopsResult t = tops(xs.points[i], depth);
      Point y = address_point(g, t.code, tail_fixed_point(g, t.code)).point;
      Point z = xs.points[i];
      z.insert(z.end(), y.begin(), y.end());
      images[i] = std::move(z);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::address_failure) throw;
    }
  });
  GraphSample out{{f.dimension() + g.dimension(), {}}, {}};
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (images[i]) {
      out.graph.points.push_back(std::move(*images[i]));
    } else {
      out.failures.push_back(i);
    }
  }
  return out;
}

}  // namespace ifsq
