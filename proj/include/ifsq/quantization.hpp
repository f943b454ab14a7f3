#pragma once

// Order-r quantization of empirical measures: Voronoi assignment, distortion,
// Lloyd iteration, the exact 1-D dynamic program and quantization-dimension
// regression.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "ifsq/detail/parallel.hpp"
#include "ifsq/error.hpp"
#include "ifsq/geometry.hpp"
#include "ifsq/ifs.hpp"
#include "ifsq/measure.hpp"
#include "ifsq/rng.hpp"

namespace ifsq {

struct Quantizer {
  std::vector<Point> centers;
  double order = 2.0;
  /// sum_j w_j min_a |x_j - a|^r
  double distortion = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  /// Distortion after the initial assignment and after each outer iteration.
  std::vector<double> history;
  std::size_t restart = 0;
};

namespace detail {

inline double power_r(double squared, double r) {
  if (r == 2.0) return squared;
  if (r == 1.0) return std::sqrt(squared);
  return std::pow(squared, 0.5 * r);
}

// Nearest-center lookup. 1-D uses a sorted copy of the centers; ties go to
// the lowest center index in every case.
class NearestCenter {
 public:
  explicit NearestCenter(const std::vector<Point>& centers) : centers_(centers) {
    detail::require_input(!centers.empty(), "at least one center is required");
    one_d_ = centers.front().size() == 1;
    if (!one_d_) return;
    order_.resize(centers.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      return centers[a][0] < centers[b][0] || (centers[a][0] == centers[b][0] && a < b);
    });
    xs_.resize(order_.size());
    run_start_.resize(order_.size());
    for (std::size_t k = 0; k < order_.size(); ++k) {
      xs_[k] = centers[order_[k]][0];
      run_start_[k] = (k > 0 && xs_[k] == xs_[k - 1]) ? run_start_[k - 1] : k;
    }
  }

  /// (index, squared distance)
  std::pair<std::size_t, double> operator()(const Point& x) const {
    if (one_d_) {
      const auto pos = static_cast<std::size_t>(std::lower_bound(xs_.begin(), xs_.end(), x[0]) -
                                                xs_.begin());
      std::size_t best = centers_.size();
      double best_d = std::numeric_limits<double>::infinity();
      auto consider = [&](std::size_t k) {
        const std::size_t idx = order_[run_start_[k]];
        const double diff = x[0] - xs_[k];
        const double d = diff * diff;
        if (d < best_d || (d == best_d && idx < best)) {
          best_d = d;
          best = idx;
        }
      };
      if (pos < xs_.size()) consider(pos);
      if (pos > 0) consider(pos - 1);
      return {best, best_d};
    }
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < centers_.size(); ++a) {
      const double d = squared_distance(x, centers_[a]);
      if (d < best_d) {
        best_d = d;
        best = a;
      }
    }
    return {best, best_d};
  }

 private:
  const std::vector<Point>& centers_;
  bool one_d_ = false;
  std::vector<std::size_t> order_;
  std::vector<double> xs_;
  std::vector<std::size_t> run_start_;
};

struct Assignment {
  std::vector<std::size_t> labels;
  std::vector<double> costs;  // w_j * d_j^r
  double total = 0.0;
};

inline Assignment assign(const EmpiricalMeasure& m, const std::vector<Point>& centers, double r,
                         std::size_t threads) {
  const NearestCenter nearest(centers);
  Assignment out;
  out.labels.resize(m.size());
  out.costs.resize(m.size());
  parallel_for(m.size(), threads, [&](std::size_t j) {
    const auto [a, d2] = nearest(m.points[j]);
    out.labels[j] = a;
    out.costs[j] = m.weights[j] * power_r(d2, r);
  });
  // Fixed-order sum keeps the total independent of the thread count.
  for (double c : out.costs) out.total += c;
  return out;
}

inline double cell_cost(const EmpiricalMeasure& m, const std::vector<std::size_t>& members,
                        const Point& a, double r) {
  double acc = 0.0;
  for (std::size_t j : members) acc += m.weights[j] * power_r(squared_distance(m.points[j], a), r);
  return acc;
}

// Minimizer (or descent step) for sum_j w_j |x_j - a|^r over one cell.
inline Point update_center(const EmpiricalMeasure& m, const std::vector<std::size_t>& members,
                           const Point& current, double r) {
  const std::size_t d = m.dimension;
  double total_w = 0.0;
  for (std::size_t j : members) total_w += m.weights[j];
  if (total_w <= 0.0) return current;

  if (r == 2.0) {
    Point mean(d, 0.0);
    for (std::size_t j : members) {
      for (std::size_t k = 0; k < d; ++k) mean[k] += m.weights[j] * m.points[j][k];
    }
    for (double& v : mean) v /= total_w;
    return mean;
  }
  if (r == 1.0 && d == 1) {
    std::vector<std::size_t> sorted = members;
    std::sort(sorted.begin(), sorted.end(),
              [&](std::size_t a, std::size_t b) { return m.points[a][0] < m.points[b][0]; });
    double acc = 0.0;
    for (std::size_t j : sorted) {
      acc += m.weights[j];
      if (acc >= 0.5 * total_w) return m.points[j];
    }
    return m.points[sorted.back()];
  }

  // Damped Weiszfeld-type descent: a <- sum w d^{r-2} x / sum w d^{r-2},
  // halving the step until the cell cost decreases.
  Point a = current;
  double cost = cell_cost(m, members, a, r);
  for (int step = 0; step < 50; ++step) {
    Point num(d, 0.0);
    double den = 0.0;
    for (std::size_t j : members) {
      const double dist = std::max(euclidean_distance(m.points[j], a), 1e-300);
      const double coef = m.weights[j] * std::pow(dist, r - 2.0);
      if (!std::isfinite(coef)) continue;
      for (std::size_t k = 0; k < d; ++k) num[k] += coef * m.points[j][k];
      den += coef;
    }
    if (den <= 0.0 || !std::isfinite(den)) break;
    Point target(d);
    for (std::size_t k = 0; k < d; ++k) target[k] = num[k] / den;
    bool improved = false;
    double t = 1.0;
    for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
      Point trial(d);
      for (std::size_t k = 0; k < d; ++k) trial[k] = a[k] + t * (target[k] - a[k]);
      const double c = cell_cost(m, members, trial, r);
      if (c < cost) {
        const double gain = cost - c;
        a = std::move(trial);
        cost = c;
        improved = gain > 1e-10 * cost;
        break;
      }
    }
    if (!improved) break;
  }
  return a;
}

inline std::vector<Point> distinct_support(const EmpiricalMeasure& m) {
  std::vector<Point> pts;
  for (std::size_t j = 0; j < m.size(); ++j) {
    if (m.weights[j] > 0.0) pts.push_back(m.points[j]);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

// D^r-weighted seeding: first center by mass, then proportional to
// w_j * dist(x_j, chosen)^r.
inline std::vector<Point> seed_centers(const EmpiricalMeasure& m, std::size_t n, double r,
                                       Rng& rng) {
  std::vector<Point> centers;
  centers.push_back(m.points[rng.categorical(cumulative_sums(m.weights))]);
  std::vector<double> d2(m.size());
  for (std::size_t j = 0; j < m.size(); ++j) d2[j] = squared_distance(m.points[j], centers[0]);
  std::vector<double> score(m.size());
  while (centers.size() < n) {
    for (std::size_t j = 0; j < m.size(); ++j) score[j] = m.weights[j] * power_r(d2[j], r);
    const std::vector<double> cumulative = cumulative_sums(score);
    if (!(cumulative.back() > 0.0)) break;
    const Point& next = m.points[rng.categorical(cumulative)];
    centers.push_back(next);
    for (std::size_t j = 0; j < m.size(); ++j) {
      d2[j] = std::min(d2[j], squared_distance(m.points[j], next));
    }
  }
  return centers;
}

inline std::vector<Point> dedup_centers(std::vector<Point> centers) {
  std::vector<Point> out;
  for (Point& c : centers) {
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(std::move(c));
  }
  return out;
}

}  // namespace detail

/// Index of the nearest center per support point; ties go to the lowest index.
inline std::vector<std::size_t> voronoi_assign(const EmpiricalMeasure& m,
                                               const std::vector<Point>& centers,
                                               std::size_t threads = 1) {
  return detail::assign(m, centers, 1.0, threads).labels;
}

inline double distortion(const EmpiricalMeasure& m, const std::vector<Point>& centers, double r,
                         std::size_t threads = 1) {
  detail::require_input(r > 0.0, "order r must be positive");
  return detail::assign(m, centers, r, threads).total;
}

/// Largest distance from a support point to its nearest center.
inline double quantizer_mesh(const EmpiricalMeasure& m, const std::vector<Point>& centers) {
  const detail::NearestCenter nearest(centers);
  double worst = 0.0;
  for (std::size_t j = 0; j < m.size(); ++j) {
    if (m.weights[j] > 0.0) worst = std::max(worst, nearest(m.points[j]).second);
  }
  return std::sqrt(worst);
}

struct LloydOptions {
  std::size_t max_iters = 200;
  double rel_tol = 1e-9;
  std::size_t restarts = 8;
  /// Center relocation rounds applied to the best restart.
  std::size_t max_relocations = 256;
  std::size_t threads = 1;
};

namespace detail {

struct LloydRun {
  std::vector<Point> centers;
  Assignment assignment;
  std::vector<double> history;
  std::size_t iterations = 0;
  bool converged = false;
};

inline std::vector<std::vector<std::size_t>> cells_of(const Assignment& asg, std::size_t n) {
  std::vector<std::vector<std::size_t>> cells(n);
  for (std::size_t j = 0; j < asg.labels.size(); ++j) cells[asg.labels[j]].push_back(j);
  return cells;
}

inline std::vector<double> cell_costs(const Assignment& asg, std::size_t n) {
  std::vector<double> out(n, 0.0);
  for (std::size_t j = 0; j < asg.labels.size(); ++j) out[asg.labels[j]] += asg.costs[j];
  return out;
}

// Support point of the cell farthest from its center.
inline std::size_t farthest_member(const EmpiricalMeasure& m, const std::vector<std::size_t>& cell,
                                   const Point& center) {
  std::size_t far = cell.front();
  double far_d = -1.0;
  for (std::size_t j : cell) {
    const double d = squared_distance(m.points[j], center);
    if (m.weights[j] > 0.0 && d > far_d) {
      far_d = d;
      far = j;
    }
  }
  return far;
}

// Plain Lloyd iteration from the given centers. The distortion recorded
// after each outer iteration never increases.
inline LloydRun lloyd_run(const EmpiricalMeasure& m, std::vector<Point> centers, double r,
                          const LloydOptions& opt) {
  LloydRun run;
  run.centers = std::move(centers);
  run.assignment = assign(m, run.centers, r, opt.threads);
  run.history.push_back(run.assignment.total);
  const std::size_t n = run.centers.size();
  for (std::size_t it = 0; it < opt.max_iters; ++it) {
    const double before = run.assignment.total;
    std::vector<Point> previous = run.centers;

    // Empty cells take over the farthest point of the costliest cell.
    bool reseeded = false;
    std::vector<std::vector<std::size_t>> cells = cells_of(run.assignment, n);
    for (std::size_t a = 0; a < n; ++a) {
      if (!cells[a].empty()) continue;
      const std::vector<double> costs = cell_costs(run.assignment, n);
      const auto worst = static_cast<std::size_t>(
          std::max_element(costs.begin(), costs.end()) - costs.begin());
      if (!(costs[worst] > 0.0)) break;
      run.centers[a] = m.points[farthest_member(m, cells[worst], run.centers[worst])];
      run.assignment = assign(m, run.centers, r, opt.threads);
      cells = cells_of(run.assignment, n);
      reseeded = true;
    }

    for (std::size_t a = 0; a < n; ++a) {
      if (!cells[a].empty()) run.centers[a] = update_center(m, cells[a], run.centers[a], r);
    }
    Assignment next = assign(m, run.centers, r, opt.threads);
    ++run.iterations;
    if (next.total > before) {
      // Only rounding can get here; keep the previous configuration.
      run.centers = std::move(previous);
      run.assignment = assign(m, run.centers, r, opt.threads);
      run.converged = true;
      break;
    }
    run.assignment = std::move(next);
    run.history.push_back(run.assignment.total);
    if (!reseeded && before - run.assignment.total <= opt.rel_tol * before) {
      run.converged = true;
      break;
    }
  }
  return run;
}

// Increase in distortion if center a were deleted, for every a.
inline std::vector<double> removal_costs(const EmpiricalMeasure& m,
                                         const std::vector<Point>& centers,
                                         const Assignment& asg, double r) {
  std::vector<double> out(centers.size(), 0.0);
  for (std::size_t j = 0; j < m.size(); ++j) {
    if (m.weights[j] <= 0.0) continue;
    double second = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < centers.size(); ++a) {
      if (a != asg.labels[j]) second = std::min(second, squared_distance(m.points[j], centers[a]));
    }
    out[asg.labels[j]] += m.weights[j] * power_r(second, r) - asg.costs[j];
  }
  return out;
}

// 1-D variant: the second-nearest center is a neighbour in sorted order.
inline std::vector<double> removal_costs_1d(const EmpiricalMeasure& m,
                                            const std::vector<Point>& centers,
                                            const Assignment& asg, double r) {
  std::vector<std::size_t> order(centers.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return centers[a][0] < centers[b][0]; });
  std::vector<std::size_t> rank(centers.size());
  for (std::size_t k = 0; k < order.size(); ++k) rank[order[k]] = k;
  std::vector<double> out(centers.size(), 0.0);
  for (std::size_t j = 0; j < m.size(); ++j) {
    if (m.weights[j] <= 0.0) continue;
    const std::size_t k = rank[asg.labels[j]];
    double second = std::numeric_limits<double>::infinity();
    const double x = m.points[j][0];
    if (k > 0) second = std::min(second, std::abs(x - centers[order[k - 1]][0]));
    if (k + 1 < order.size()) second = std::min(second, std::abs(x - centers[order[k + 1]][0]));
    out[asg.labels[j]] += m.weights[j] * power_r(second * second, r) - asg.costs[j];
  }
  return out;
}

}  // namespace detail

/// Best of several seeded Lloyd runs, followed by center relocation on the
/// winner. Each run alternates nearest-center assignment with per-cell
/// updates (weighted mean for r = 2, weighted median for 1-D r = 1, damped
/// descent otherwise); an empty cell takes over the farthest point of the
/// costliest cell. A relocation round moves the center that is cheapest to
/// delete onto the farthest point of the costliest cell and reruns Lloyd; it
/// is kept only if the distortion drops. `history` lists the distortion of
/// every Lloyd iteration of the winning run and then of every accepted
/// relocation, so it never increases. For r < 1 the result is heuristic and
/// `converged` stays false.
inline Quantizer lloyd_quantize(const EmpiricalMeasure& m, std::size_t n, double r,
                                std::uint64_t seed, const LloydOptions& opt = {}) {
  detail::require_input(n >= 1, "n must be at least 1");
  detail::require_input(r > 0.0, "order r must be positive");
  m.validate();

  std::vector<Point> support = detail::distinct_support(m);
  if (n >= support.size()) {
    Quantizer q;
    q.order = r;
    q.centers = std::move(support);
    q.distortion = distortion(m, q.centers, r, opt.threads);
    q.history = {q.distortion};
    q.converged = true;
    return q;
  }

  std::optional<detail::LloydRun> best;
  std::size_t best_restart = 0;
  for (std::size_t restart = 0; restart < std::max<std::size_t>(1, opt.restarts); ++restart) {
    Rng rng(seed, restart);
    detail::LloydRun run = detail::lloyd_run(m, detail::seed_centers(m, n, r, rng), r, opt);
    if (!best || run.assignment.total < best->assignment.total) {
      best = std::move(run);
      best_restart = restart;
    }
  }

  detail::LloydRun& cur = *best;
  for (std::size_t round = 0; round < opt.max_relocations && n >= 2; ++round) {
    const std::vector<double> removal =
        m.dimension == 1 ? detail::removal_costs_1d(m, cur.centers, cur.assignment, r)
                         : detail::removal_costs(m, cur.centers, cur.assignment, r);
    const std::vector<double> costs = detail::cell_costs(cur.assignment, n);
    const auto drop = static_cast<std::size_t>(
        std::min_element(removal.begin(), removal.end()) - removal.begin());
    std::size_t grow = n;
    for (std::size_t a = 0; a < n; ++a) {
      if (a != drop && (grow == n || costs[a] > costs[grow])) grow = a;
    }
    if (!(costs[grow] > 0.0)) break;
    const auto cells = detail::cells_of(cur.assignment, n);
    std::vector<Point> trial = cur.centers;
    trial[drop] = m.points[detail::farthest_member(m, cells[grow], cur.centers[grow])];
    detail::LloydRun next = detail::lloyd_run(m, std::move(trial), r, opt);
    if (!(next.assignment.total < cur.assignment.total * (1.0 - 1e-12))) break;
    const std::size_t iterations = cur.iterations + next.iterations;
    std::vector<double> history = std::move(cur.history);
    history.push_back(next.assignment.total);
    cur = std::move(next);
    cur.iterations = iterations;
    cur.history = std::move(history);
  }

  Quantizer q;
  q.order = r;
  q.restart = best_restart;
  q.centers = detail::dedup_centers(std::move(cur.centers));
  q.distortion = cur.history.back();
  q.history = std::move(cur.history);
  q.iterations = cur.iterations;
  q.converged = r >= 1.0 && cur.converged;
  return q;
}

inline constexpr std::size_t kExactAtomBudget = 5000;

namespace detail {

// Sorted, merged atoms of a 1-D measure with prefix sums, plus optimal
// single-center costs of contiguous atom ranges.
class IntervalCosts {
 public:
  IntervalCosts(const EmpiricalMeasure& m, double r) : r_(r) {
    std::vector<std::pair<double, double>> atoms;
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (m.weights[j] > 0.0) atoms.emplace_back(m.points[j][0], m.weights[j]);
    }
    std::sort(atoms.begin(), atoms.end());
    for (const auto& [x, w] : atoms) {
      if (!x_.empty() && x_.back() == x) {
        w_.back() += w;
      } else {
        x_.push_back(x);
        w_.push_back(w);
      }
    }
    pw_.assign(x_.size() + 1, 0.0);
    pwx_.assign(x_.size() + 1, 0.0);
    pwx2_.assign(x_.size() + 1, 0.0);
    for (std::size_t k = 0; k < x_.size(); ++k) {
      pw_[k + 1] = pw_[k] + w_[k];
      pwx_[k + 1] = pwx_[k] + w_[k] * x_[k];
      pwx2_[k + 1] = pwx2_[k] + w_[k] * x_[k] * x_[k];
    }
  }

  std::size_t size() const noexcept { return x_.size(); }
  double x(std::size_t k) const { return x_[k]; }

  /// Optimal center for atoms [i, j].
  double center(std::size_t i, std::size_t j) const {
    const double total = pw_[j + 1] - pw_[i];
    if (r_ == 2.0) return (pwx_[j + 1] - pwx_[i]) / total;
    if (r_ == 1.0) return x_[median_index(i, j)];
    // Golden-section search; the cost is strictly convex in a for r > 1.
    constexpr double kInvPhi = 0.6180339887498949;
    double lo = x_[i];
    double hi = x_[j];
    double c = hi - kInvPhi * (hi - lo);
    double d = lo + kInvPhi * (hi - lo);
    double fc = direct_cost(i, j, c);
    double fd = direct_cost(i, j, d);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
      if (fc < fd) {
        hi = d;
        d = c;
        fd = fc;
        c = hi - kInvPhi * (hi - lo);
        fc = direct_cost(i, j, c);
      } else {
        lo = c;
        c = d;
        fc = fd;
        d = lo + kInvPhi * (hi - lo);
        fd = direct_cost(i, j, d);
      }
    }
    return 0.5 * (lo + hi);
  }

  /// Cost used inside the dynamic program (closed forms for r = 1, 2).
  double fast_cost(std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    if (r_ == 2.0) {
      const double w = pw_[j + 1] - pw_[i];
      const double s = pwx_[j + 1] - pwx_[i];
      return std::max(0.0, (pwx2_[j + 1] - pwx2_[i]) - s * s / w);
    }
    if (r_ == 1.0) {
      const std::size_t t = median_index(i, j);
      const double med = x_[t];
      const double left = med * (pw_[t + 1] - pw_[i]) - (pwx_[t + 1] - pwx_[i]);
      const double right = (pwx_[j + 1] - pwx_[t + 1]) - med * (pw_[j + 1] - pw_[t + 1]);
      return std::max(0.0, left + right);
    }
    return direct_cost(i, j, center(i, j));
  }

  /// sum_{k=i..j} w_k |x_k - a|^r by direct summation.
  double direct_cost(std::size_t i, std::size_t j, double a) const {
    double acc = 0.0;
    for (std::size_t k = i; k <= j; ++k) {
      const double diff = std::abs(x_[k] - a);
      acc += w_[k] * (r_ == 1.0 ? diff : r_ == 2.0 ? diff * diff : std::pow(diff, r_));
    }
    return acc;
  }

 private:
  std::size_t median_index(std::size_t i, std::size_t j) const {
    const double half = 0.5 * (pw_[j + 1] + pw_[i]);
    const auto it = std::lower_bound(pw_.begin() + static_cast<long>(i) + 1,
                                     pw_.begin() + static_cast<long>(j) + 2, half);
    return static_cast<std::size_t>(it - pw_.begin()) - 1;
  }

  double r_;
  std::vector<double> x_, w_, pw_, pwx_, pwx2_;
};

// Layered dynamic program over contiguous cells with divide-and-conquer
// split search (optimal split points are monotone for r >= 1).
class ExactSolver1d {
 public:
  ExactSolver1d(const EmpiricalMeasure& m, double r, std::size_t n_max) : costs_(m, r) {
    const std::size_t atoms = costs_.size();
    layers_ = std::min(n_max, atoms);
    const double inf = std::numeric_limits<double>::infinity();
    value_.assign(layers_ + 1, std::vector<double>(atoms, inf));
    split_.assign(layers_ + 1, std::vector<std::size_t>(atoms, 0));
    for (std::size_t j = 0; j < atoms; ++j) value_[1][j] = costs_.fast_cost(0, j);
    for (std::size_t k = 2; k <= layers_; ++k) solve_layer(k, k - 1, atoms - 1, k - 1, atoms - 1);
  }

  std::size_t atoms() const noexcept { return costs_.size(); }

  /// Optimal centers for n cells (n clipped to the atom count).
  std::vector<Point> centers(std::size_t n) const {
    const std::size_t atoms = costs_.size();
    if (n >= atoms) {
      std::vector<Point> out;
      for (std::size_t k = 0; k < atoms; ++k) out.push_back({costs_.x(k)});
      return out;
    }
    std::vector<Point> out(n);
    std::size_t j = atoms - 1;
    for (std::size_t k = n; k >= 1; --k) {
      const std::size_t i = k == 1 ? 0 : split_[k][j];
      out[k - 1] = {costs_.center(i, j)};
      if (k > 1) j = i - 1;
    }
    return out;
  }

  /// Distortion of the optimal n-cell partition, summed directly.
  double value(std::size_t n) const {
    const std::size_t atoms = costs_.size();
    if (n >= atoms) return 0.0;
    double total = 0.0;
    std::size_t j = atoms - 1;
    for (std::size_t k = n; k >= 1; --k) {
      const std::size_t i = k == 1 ? 0 : split_[k][j];
      total += costs_.direct_cost(i, j, costs_.center(i, j));
      if (k > 1) j = i - 1;
    }
    return total;
  }

 private:
  void solve_layer(std::size_t k, std::size_t jl, std::size_t jr, std::size_t optl,
                   std::size_t optr) {
    if (jl > jr) return;
    const std::size_t mid = jl + (jr - jl) / 2;
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_i = std::max(optl, k - 1);
    for (std::size_t i = std::max(optl, k - 1); i <= std::min(optr, mid); ++i) {
      const double v = value_[k - 1][i - 1] + costs_.fast_cost(i, mid);
      if (v < best) {
        best = v;
        best_i = i;
      }
    }
    value_[k][mid] = best;
    split_[k][mid] = best_i;
    if (mid > jl) solve_layer(k, jl, mid - 1, optl, best_i);
    solve_layer(k, mid + 1, jr, best_i, optr);
  }

  IntervalCosts costs_;
  std::size_t layers_ = 0;
  std::vector<std::vector<double>> value_;
  std::vector<std::vector<std::size_t>> split_;
};

inline void check_exact_input(const EmpiricalMeasure& m, double r) {
  detail::require(m.dimension == 1, ErrorKind::unsupported_input,
                  "the exact quantizer handles 1-D measures only");
  detail::require(r >= 1.0, ErrorKind::unsupported_input,
                  "the exact quantizer needs r >= 1 (cell costs are not convex below)");
  detail::require(m.size() <= kExactAtomBudget, ErrorKind::resource,
                  "exact quantizer atom budget of " + std::to_string(kExactAtomBudget) +
                      " exceeded");
}

}  // namespace detail

/// Optimal n-point quantizer of a discrete 1-D measure (r >= 1).
inline Quantizer exact_quantize_1d(const EmpiricalMeasure& m, std::size_t n, double r) {
  detail::require_input(n >= 1, "n must be at least 1");
  detail::check_exact_input(m, r);
  m.validate();
  const detail::ExactSolver1d solver(m, r, n);
  Quantizer q;
  q.order = r;
  q.centers = solver.centers(n);
  q.distortion = solver.value(n);
  q.history = {q.distortion};
  q.converged = true;
  return q;
}

/// V_{n,r} for n = 1..n_max from one dynamic program.
inline std::vector<double> exact_distortion_curve_1d(const EmpiricalMeasure& m, std::size_t n_max,
                                                     double r) {
  detail::require_input(n_max >= 1, "n_max must be at least 1");
  detail::check_exact_input(m, r);
  m.validate();
  const detail::ExactSolver1d solver(m, r, n_max);
  std::vector<double> out;
  for (std::size_t n = 1; n <= n_max; ++n) out.push_back(solver.value(n));
  return out;
}

enum class QuantizerKind { lloyd, exact_1d };

struct QDimFit {
  std::vector<std::size_t> n_grid;
  /// e_{n,r} = V_{n,r}^{1/r} per grid entry.
  std::vector<double> errors;
  std::vector<double> distortions;
  /// Least-squares slope of log n against -log e_{n,r} over the fitted range.
  double slope = 0.0;
  double r_squared = 0.0;
  std::size_t first_fitted = 0;
};

struct QDimOptions {
  QuantizerKind solver = QuantizerKind::lloyd;
  /// Drop the smallest n from the regression.
  bool discard_first = true;
  LloydOptions lloyd;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

inline LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

/// Estimates D_r as the regression slope of log n on -log e_{n,r}.
inline QDimFit estimate_qdim(const EmpiricalMeasure& m, double r,
                             const std::vector<std::size_t>& n_grid, std::uint64_t seed,
                             const QDimOptions& opt = {}) {
  detail::require(n_grid.size() >= 2, ErrorKind::invalid_grid, "n grid needs at least 2 values");
  for (std::size_t k = 0; k < n_grid.size(); ++k) {
    detail::require(n_grid[k] >= 1 && (k == 0 || n_grid[k] > n_grid[k - 1]),
                    ErrorKind::invalid_grid, "n grid must be strictly increasing and positive");
  }
  QDimFit fit;
  fit.n_grid = n_grid;
  if (opt.solver == QuantizerKind::exact_1d) {
    const std::vector<double> curve = exact_distortion_curve_1d(m, n_grid.back(), r);
    for (std::size_t n : n_grid) fit.distortions.push_back(curve[n - 1]);
  } else {
    for (std::size_t n : n_grid) {
      fit.distortions.push_back(lloyd_quantize(m, n, r, seed, opt.lloyd).distortion);
    }
  }
  for (std::size_t k = 0; k < n_grid.size(); ++k) {
    detail::require(fit.distortions[k] > 0.0, ErrorKind::invalid_grid,
                    "zero quantization error at n = " + std::to_string(n_grid[k]) +
                        " (n reaches the support size)");
    fit.errors.push_back(std::pow(fit.distortions[k], 1.0 / r));
  }
  fit.first_fitted = opt.discard_first ? 1 : 0;
  detail::require(n_grid.size() - fit.first_fitted >= 2, ErrorKind::invalid_grid,
                  "fewer than 2 grid points remain for the fit");
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t k = fit.first_fitted; k < n_grid.size(); ++k) {
    xs.push_back(-std::log(fit.errors[k]));
    ys.push_back(std::log(static_cast<double>(n_grid[k])));
  }
  const LineFit line = least_squares(xs, ys);
  fit.slope = line.slope;
  fit.r_squared = line.r_squared;
  return fit;
}

/// Geometric grid first, first*ratio, ... up to last inclusive.
inline std::vector<std::size_t> geometric_grid(std::size_t first, std::size_t last,
                                               std::size_t ratio = 2) {
  std::vector<std::size_t> out;
  for (std::size_t n = first; n <= last; n *= ratio) out.push_back(n);
  return out;
}

struct DistortionCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds(double slack = 1e-12) const { return lhs <= rhs + slack; }
};

/// lhs = V_{n,r}(m o f^{-1}), rhs = c^r V_{n,r}(m) with c the upper constant
/// of f, both from the exact 1-D quantizer.
inline DistortionCheck pushforward_distortion_check(const EmpiricalMeasure& m,
                                                    const ContractionMap& f, std::size_t n,
                                                    double r) {
  detail::require_input(f.dimension() == m.dimension, "map/measure dimension mismatch");
  EmpiricalMeasure pushed = m;
  for (Point& x : pushed.points) x = f(x);
  return {exact_quantize_1d(pushed, n, r).distortion,
          std::pow(f.upper_lip(), r) * exact_quantize_1d(m, n, r).distortion};
}

/// lhs = V_{sum n_i, r}(sum s_i m_i), rhs = sum s_i V_{n_i, r}(m_i).
inline DistortionCheck mixture_distortion_check(
    const std::vector<std::pair<EmpiricalMeasure, double>>& components,
    const std::vector<std::size_t>& allocations, double r) {
  detail::require_input(!components.empty() && components.size() == allocations.size(),
                        "one allocation per component is required");
  EmpiricalMeasure mixture{components.front().first.dimension, {}, {}};
  double total_s = 0.0;
  std::size_t total_n = 0;
  double rhs = 0.0;
  for (std::size_t i = 0; i < components.size(); ++i) {
    const auto& [mu, s] = components[i];
    detail::require_input(s > 0.0, "mixture weights must be positive");
    total_s += s;
    total_n += allocations[i];
    for (std::size_t j = 0; j < mu.size(); ++j) {
      mixture.points.push_back(mu.points[j]);
      mixture.weights.push_back(s * mu.weights[j]);
    }
    rhs += s * exact_quantize_1d(mu, allocations[i], r).distortion;
  }
  detail::require_input(std::abs(total_s - 1.0) <= 1e-12, "mixture weights must sum to 1");
  return {exact_quantize_1d(mixture, total_n, r).distortion, rhs};
}

}  // namespace ifsq
