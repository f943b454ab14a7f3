#pragma once

// Empirical approximations of invariant measures: chaos-game sampling, box
// masses, invariance and product-measure residuals, and the countable example.

#include <algorithm>
#include <boost/math/special_functions/trigamma.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "ifsq/error.hpp"
#include "ifsq/geometry.hpp"
#include "ifsq/ifs.hpp"
#include "ifsq/rng.hpp"

namespace ifsq {

/// Weighted point cloud; weights sum to 1.
struct EmpiricalMeasure {
  std::size_t dimension = 1;
  std::vector<Point> points;
  std::vector<double> weights;

  std::size_t size() const noexcept { return points.size(); }

  static EmpiricalMeasure uniform(std::size_t dimension, std::vector<Point> points) {
    detail::require_input(!points.empty(), "a measure needs at least one point");
    const double w = 1.0 / static_cast<double>(points.size());
    std::vector<double> weights(points.size(), w);
    return {dimension, std::move(points), std::move(weights)};
  }

  /// Tolerance on the total mass; summing 10^8 equal weights drifts well
  /// past the 1e-12 used for probability vectors.
  static constexpr double kMassTolerance = 1e-9;

  void validate() const {
    detail::require_input(points.size() == weights.size(), "points and weights differ in length");
    detail::require_input(!points.empty(), "empty measure");
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      detail::require_input(points[i].size() == dimension, "point dimension mismatch");
      detail::require_input(weights[i] >= 0.0, "negative weight");
      total += weights[i];
    }
    detail::require_input(std::abs(total - 1.0) <= kMassTolerance, "weights must sum to 1");
  }

  PointCloud cloud() const { return {dimension, points}; }
};

inline constexpr std::size_t kDefaultBurnIn = 64;
inline constexpr std::size_t kMaxChaosSamples = 100'000'000;

/// Random iteration x <- f_I(x), I ~ probs, from the hull center. The first
/// `burn_in` iterates are discarded; the rest get weight 1/n.
inline EmpiricalMeasure chaos_game(const IFSystem& wifs, std::size_t n_samples,
                                   std::size_t burn_in, std::uint64_t seed,
                                   std::uint64_t stream = 0) {
  const auto& probs = wifs.require_probs();
  detail::require_input(n_samples >= 1, "n_samples must be at least 1");
  detail::require(n_samples <= kMaxChaosSamples, ErrorKind::resource,
                  "chaos game sample count exceeds cap " + std::to_string(kMaxChaosSamples));
  Rng rng(seed, stream);
  const std::vector<double> cumulative = cumulative_sums(probs);
  Point x = wifs.default_seed();
  std::vector<Point> kept;
  kept.reserve(n_samples);
  for (std::size_t k = 0; k < burn_in + n_samples; ++k) {
    x = wifs.map(rng.categorical(cumulative))(x);
    if (k >= burn_in) kept.push_back(x);
  }
  return EmpiricalMeasure::uniform(wifs.dimension(), std::move(kept));
}

/// Atoms f_w(x0) for all words of length `depth`, weighted by p_w. The default
/// seed is the fixed point of the first map, so every atom lies on the attractor.
inline EmpiricalMeasure cylinder_measure(const IFSystem& wifs, std::size_t depth,
                                         std::optional<Point> seed = {}) {
  const auto& probs = wifs.require_probs();
  const Point x0 = seed ? *seed : wifs.map(0).fixed_point(wifs.default_seed());
  PointCloud atoms = attractor_sample(wifs, depth, x0);
  std::vector<double> weights{1.0};
  for (std::size_t k = 0; k < depth; ++k) {
    std::vector<double> next;
    next.reserve(weights.size() * probs.size());
    for (double p : probs) {
      for (double w : weights) next.push_back(p * w);
    }
    weights = std::move(next);
  }
  double total = 0.0;
  for (double w : weights) total += w;
  for (double& w : weights) w /= total;
  return {wifs.dimension(), std::move(atoms.points), std::move(weights)};
}

/// Mass of the closed box.
inline double measure_of_box(const EmpiricalMeasure& m, const Box& b) {
  detail::require_input(b.dimension() == m.dimension, "box dimension mismatch");
  double mass = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (b.contains(m.points[i])) mass += m.weights[i];
  }
  return mass;
}

/// Smallest closed-ball mass centred at a support point.
inline double min_ball_mass(const EmpiricalMeasure& m, double radius) {
  double best = std::numeric_limits<double>::infinity();
  if (m.dimension == 1) {
    std::vector<std::size_t> order(m.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return m.points[a][0] < m.points[b][0]; });
    std::vector<double> xs(order.size());
    std::vector<double> prefix(order.size() + 1, 0.0);
    for (std::size_t k = 0; k < order.size(); ++k) {
      xs[k] = m.points[order[k]][0];
      prefix[k + 1] = prefix[k] + m.weights[order[k]];
    }
    for (std::size_t k = 0; k < xs.size(); ++k) {
      if (m.weights[order[k]] <= 0.0) continue;
      const auto lo = std::lower_bound(xs.begin(), xs.end(), xs[k] - radius) - xs.begin();
      const auto hi = std::upper_bound(xs.begin(), xs.end(), xs[k] + radius) - xs.begin();
      best = std::min(best, prefix[static_cast<std::size_t>(hi)] - prefix[static_cast<std::size_t>(lo)]);
    }
    return best;
  }
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m.weights[i] <= 0.0) continue;
    double mass = 0.0;
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (euclidean_distance(m.points[i], m.points[j]) <= radius) mass += m.weights[j];
    }
    best = std::min(best, mass);
  }
  return best;
}

enum class ResidualMode { automatic, preimage, pushforward };

/// max over boxes of |m(B) - sum_i p_i m(f_i^{-1}(B))|. Preimage mode maps
/// the box back through 1-D affine maps; pushforward mode counts the mass of
/// points x with f_i(x) in B, which works for any map.
inline double invariance_residual(const EmpiricalMeasure& m, const IFSystem& wifs,
                                  const std::vector<Box>& boxes,
                                  ResidualMode mode = ResidualMode::automatic) {
  const auto& probs = wifs.require_probs();
  detail::require_input(m.dimension == wifs.dimension(), "measure/system dimension mismatch");
  const bool affine_1d = wifs.dimension() == 1 && wifs.all_affine();
  if (mode == ResidualMode::automatic) {
    mode = affine_1d ? ResidualMode::preimage : ResidualMode::pushforward;
  }
  detail::require(mode != ResidualMode::preimage || affine_1d, ErrorKind::unsupported_input,
                  "preimage mode needs 1-D affine maps");

  std::vector<std::vector<Point>> pushed;
  if (mode == ResidualMode::pushforward) {
    for (const auto& f : wifs.maps()) {
      std::vector<Point> img;
      img.reserve(m.size());
      for (const Point& x : m.points) img.push_back(f(x));
      pushed.push_back(std::move(img));
    }
  }

  double worst = 0.0;
  for (const Box& b : boxes) {
    double mixed = 0.0;
    for (std::size_t i = 0; i < wifs.size(); ++i) {
      double mass = 0.0;
      if (mode == ResidualMode::preimage) {
        const AffinePart& a = *wifs.map(i).affine_part();
        const double slope = a.linear(0, 0);
        const double off = a.offset(0);
        const double u = (b.lower[0] - off) / slope;
        const double v = (b.upper[0] - off) / slope;
        mass = measure_of_box(m, Box::interval(std::min(u, v), std::max(u, v)));
      } else {
        for (std::size_t j = 0; j < m.size(); ++j) {
          if (b.contains(pushed[i][j])) mass += m.weights[j];
        }
      }
      mixed += probs[i] * mass;
    }
    worst = std::max(worst, std::abs(measure_of_box(m, b) - mixed));
  }
  return worst;
}

/// max over (A, B) of |m_FxG(A x B) - m_F(A) m_G(B)| with the three measures
/// sampled on independent streams of one seed.
inline double product_measure_residual(const IFSystem& f, const IFSystem& g,
                                       const std::vector<Box>& boxes_a,
                                       const std::vector<Box>& boxes_b, std::size_t n_samples,
                                       std::uint64_t seed, std::size_t burn_in = kDefaultBurnIn) {
  const IFSystem fg = full_product(f, g);
  const EmpiricalMeasure joint = chaos_game(fg, n_samples, burn_in, seed, 0);
  const EmpiricalMeasure mf = chaos_game(f, n_samples, burn_in, seed, 1);
  const EmpiricalMeasure mg = chaos_game(g, n_samples, burn_in, seed, 2);
  double worst = 0.0;
  for (const Box& a : boxes_a) {
    const double pa = measure_of_box(mf, a);
    for (const Box& b : boxes_b) {
      const double pb = measure_of_box(mg, b);
      worst = std::max(worst, std::abs(measure_of_box(joint, a.times(b)) - pa * pb));
    }
  }
  return worst;
}

/// Closed dyadic boxes [k w, (k+1) w]^d covering [0, 1]^d, w = 1/cells.
inline std::vector<Box> dyadic_boxes(std::size_t cells, std::size_t dimension = 1) {
  std::vector<Box> out;
  const double w = 1.0 / static_cast<double>(cells);
  std::size_t total = 1;
  for (std::size_t k = 0; k < dimension; ++k) total *= cells;
  for (std::size_t idx = 0; idx < total; ++idx) {
    Point lo(dimension);
    Point hi(dimension);
    std::size_t rest = idx;
    for (std::size_t k = 0; k < dimension; ++k) {
      const std::size_t c = rest % cells;
      rest /= cells;
      lo[k] = static_cast<double>(c) * w;
      hi[k] = static_cast<double>(c + 1) * w;
    }
    out.emplace_back(std::move(lo), std::move(hi));
  }
  return out;
}

struct CountableExample {
  /// Atoms x_m = (1/m + 1/(m+1))/2, m = 1..M, weights proportional to 1/m^2.
  EmpiricalMeasure measure;
  /// Mass the untruncated measure puts on atoms beyond M.
  double tail_mass = 0.0;
};

inline CountableExample countable_example_measure(std::size_t atoms) {
  detail::require_input(atoms >= 2, "the countable example needs at least 2 atoms");
  std::vector<Point> points;
  std::vector<double> weights;
  double partial = 0.0;
  for (std::size_t m = atoms; m >= 1; --m) partial += 1.0 / (static_cast<double>(m) * m);
  for (std::size_t m = 1; m <= atoms; ++m) {
    const double md = static_cast<double>(m);
    points.push_back({0.5 * (1.0 / md + 1.0 / (md + 1.0))});
    weights.push_back(1.0 / (md * md) / partial);
  }
  const double gamma = 6.0 / (std::numbers::pi * std::numbers::pi);
  const double tail = gamma * boost::math::trigamma(static_cast<double>(atoms) + 1.0);
  return {{1, std::move(points), std::move(weights)}, tail};
}

}  // namespace ifsq
