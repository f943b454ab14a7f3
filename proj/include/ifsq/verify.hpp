#pragma once

// The acceptance suite: one function per criterion, shared by the acceptance
// test binary and `ifsq verify`.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ifsq/code_space.hpp"
#include "ifsq/dimension.hpp"
#include "ifsq/fractal_transform.hpp"
#include "ifsq/ifs.hpp"
#include "ifsq/measure.hpp"
#include "ifsq/quantization.hpp"
#include "ifsq/rng.hpp"

namespace ifsq::verify {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double time_limit = 0.0;
};

struct Options {
  std::uint64_t seed = 2024;
  std::size_t threads = 1;
};

inline CriterionResult begin(int id, std::string name) {
  CriterionResult res;
  res.id = id;
  res.name = std::move(name);
  return res;
}

namespace detail {

class Notes {
 public:
  template <class T>
  Notes& operator()(const std::string& key, const T& value) {
    if (!text_.str().empty()) text_ << ' ';
    text_ << key << '=' << value;
    return *this;
  }
  std::string str() const { return text_.str(); }

 private:
  std::ostringstream text_;
};

inline bool within(double value, double target, double tol) {
  return std::abs(value - target) <= tol;
}

inline std::vector<double> random_probs(Rng& rng, std::size_t n) {
  std::vector<double> p(n);
  double total = 0.0;
  for (double& v : p) {
    v = 0.05 + rng.uniform();
    total += v;
  }
  for (double& v : p) v /= total;
  // Push the rounding residue into the last entry so the sum is 1 to 1 ulp.
  double head = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) head += p[i];
  p.back() = 1.0 - head;
  return p;
}

}  // namespace detail

inline const double kLog2Log3 = std::log(2.0) / std::log(3.0);

inline CriterionResult solvers(const Options&) {
  CriterionResult res = begin(1, "moran and exponent solvers");
  detail::Notes notes;
  bool ok = true;
  const double s = solve_moran({1.0 / 3.0, 1.0 / 3.0});
  ok = ok && detail::within(s, kLog2Log3, 1e-9);
  const std::vector<double> half{0.5, 0.5};
  const std::vector<double> third{1.0 / 3.0, 1.0 / 3.0};
  const double l = solve_qdim_exponent(half, third, 2.0);
  ok = ok && detail::within(l, kLog2Log3, 1e-9);
  notes("moran", s)("l2", l);
  // p_i = c_i^s0 makes l_r = s0 for every r.
  const std::vector<double> ratios{0.2, 0.45};
  const double s0 = solve_moran(ratios);
  std::vector<double> p{std::pow(0.2, s0), 0.0};
  p[1] = 1.0 - p[0];
  double worst = 0.0;
  for (double r : {0.5, 1.0, 2.0, 5.0}) {
    worst = std::max(worst, std::abs(solve_qdim_exponent(p, ratios, r) - s0));
  }
  ok = ok && worst <= 1e-9;
  notes("identity_err", worst);
  res.passed = ok;
  res.detail = notes.str();
  res.time_limit = 1.0;
  return res;
}

inline CriterionResult countable(const Options&) {
  CriterionResult res = begin(2, "countable example slopes");
  const CountableExample ex = countable_example_measure(2000);
  const std::vector<std::size_t> grid = geometric_grid(2, 256);
  QDimOptions opt;
  opt.solver = QuantizerKind::exact_1d;
  detail::Notes notes;
  bool ok = true;
  for (double r : {1.0, 2.0}) {
    const QDimFit fit = estimate_qdim(ex.measure, r, grid, 0, opt);
    const double target = countable_example_qdim(r);
    ok = ok && detail::within(fit.slope, target, 0.08);
    notes("slope_r" + std::to_string(static_cast<int>(r)), fit.slope)("target", target);
  }
  res.passed = ok;
  res.detail = notes.str();
  res.time_limit = 300.0;
  return res;
}

inline CriterionResult cantor(const Options& o) {
  CriterionResult res = begin(3, "cantor quantization dimension");
  const IFSystem c3 = builtin::cantor3();
  const EmpiricalMeasure m = chaos_game(c3, 100'000, kDefaultBurnIn, o.seed);
  QDimOptions opt;
  opt.lloyd.threads = o.threads;
  const QDimFit fit = estimate_qdim(m, 2.0, geometric_grid(4, 256), o.seed, opt);
  const ExponentBounds b = qdim_bounds(c3, 2.0);
  res.passed = fit.slope >= 0.571 && fit.slope <= 0.691 &&
               detail::within(b.lower, kLog2Log3, 1e-9) &&
               detail::within(b.upper, kLog2Log3, 1e-9);
  res.detail = detail::Notes()("slope", fit.slope)("k2", b.lower)("l2", b.upper).str();
  res.time_limit = 300.0;
  return res;
}

inline CriterionResult two_sided(const Options& o) {
  CriterionResult res = begin(4, "two-sided quantization bound");
  const IFSystem pc = builtin::perturbed_cantor();
  const EmpiricalMeasure m = chaos_game(pc, 100'000, kDefaultBurnIn, o.seed);
  QDimOptions opt;
  opt.lloyd.threads = o.threads;
  const QDimFit fit = estimate_qdim(m, 1.0, geometric_grid(4, 256), o.seed, opt);
  const ExponentBounds b = qdim_bounds(pc, 1.0);
  res.passed = fit.slope >= b.lower - 0.08 && fit.slope <= b.upper + 0.08;
  res.detail = detail::Notes()("slope", fit.slope)("k1", b.lower)("l1", b.upper).str();
  res.time_limit = 600.0;
  return res;
}

/// Depth of the tops codes used for graph points; inputs stay at depth 12.
inline constexpr std::size_t kGraphCodeDepth = 48;

inline GraphSample benchmark_graph(std::size_t threads) {
  const IFSystem f = builtin::binary();
  const IFSystem g = builtin::third_two_thirds();
  const PointCloud xs = attractor_sample(f, 12, f.map(0).fixed_point(f.default_seed()));
  return graph_sample(f, g, xs, kGraphCodeDepth, {}, threads);
}

inline CriterionResult graph_attractor(const Options& o) {
  CriterionResult res = begin(5, "graph equals product attractor");
  const IFSystem h = diagonal_product(builtin::binary(), builtin::third_two_thirds());
  const GraphSample gs = benchmark_graph(o.threads);
  const PointCloud attractor = attractor_sample(h, 12, h.map(0).fixed_point(h.default_seed()));
  const double d = hausdorff_distance(gs.graph, attractor, o.threads);
  res.passed = gs.failures.empty() && d <= 4.0 * std::ldexp(1.0, -12);
  res.detail =
      detail::Notes()("hausdorff", d)("limit", 4.0 * std::ldexp(1.0, -12))("failures",
                                                                          gs.failures.size())
          .str();
  res.time_limit = 60.0;
  return res;
}

inline CriterionResult graph_sandwich(const Options& o) {
  CriterionResult res = begin(6, "graph dimension sandwich");
  const GraphSample gs = benchmark_graph(o.threads);
  const BoxCountFit fit = box_dimension_estimate(gs.graph, dyadic_scales(0.25, 5));
  const ExponentBounds b = graph_dim_bounds(builtin::binary(), builtin::third_two_thirds());
  res.passed = fit.slope >= b.lower - 0.08 && fit.slope <= b.upper + 0.08;
  res.detail = detail::Notes()("box", fit.slope)("s1", b.lower)("s2", b.upper).str();
  res.time_limit = 120.0;
  return res;
}

inline CriterionResult product_measure(const Options& o) {
  CriterionResult res = begin(7, "product invariant measure");
  const IFSystem b = builtin::binary();
  const std::vector<Box> boxes = dyadic_boxes(4);
  const double resid = product_measure_residual(b, b, boxes, boxes, 1'000'000, o.seed);
  const IFSystem q = builtin::binary({1.0 / 3.0, 2.0 / 3.0});
  const EmpiricalMeasure mq = chaos_game(q, 1'000'000, kDefaultBurnIn, o.seed, 3);
  const double half = measure_of_box(mq, Box::interval(0.0, 0.5));
  res.passed = resid <= 0.01 && detail::within(half, 1.0 / 3.0, 0.01);
  res.detail = detail::Notes()("residual", resid)("mu_q_half", half).str();
  return res;
}

inline CriterionResult product_quantization(const Options& o) {
  CriterionResult res = begin(8, "product quantization strict inequality");
  const std::vector<double> half{0.5, 0.5};
  const ProductQDim pinned = product_qdim_check(half, half, 1.0 / 3.0, 2.0);
  bool ok = detail::within(pinned.product, 2.0 * kLog2Log3, 1e-9) &&
            detail::within(pinned.first, kLog2Log3, 1e-9) &&
            pinned.product - std::max(pinned.first, pinned.second) >= 0.5;
  Rng rng(o.seed, 8);
  std::size_t strict = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + rng.next_u64() % 3;
    const std::size_t m = 2 + rng.next_u64() % 3;
    const std::vector<double> p = detail::random_probs(rng, n);
    const std::vector<double> q = detail::random_probs(rng, m);
    // Similarities of ratio c with N c <= 1 keep the open set condition.
    const double c = (0.05 + 0.9 * rng.uniform()) / static_cast<double>(std::max(n, m));
    const double r = 0.5 + 4.5 * rng.uniform();
    if (product_qdim_check(p, q, c, r).strict()) ++strict;
  }
  ok = ok && strict == 20;
  res.passed = ok;
  res.detail =
      detail::Notes()("D2", pinned.product)("factor", pinned.first)("random_strict", strict)
          .str();
  return res;
}

namespace detail {

struct Benchmark {
  std::string name;
  EmpiricalMeasure measure;
};

inline std::vector<Benchmark> lloyd_benchmarks(std::uint64_t seed) {
  std::vector<Benchmark> out;
  std::vector<Point> grid;
  for (int k = 0; k < 2000; ++k) grid.push_back({(k + 0.5) / 2000.0});
  out.push_back({"uniform", EmpiricalMeasure::uniform(1, std::move(grid))});
  out.push_back({"cantor", chaos_game(builtin::cantor3(), 20'000, kDefaultBurnIn, seed, 10)});
  out.push_back({"perturbed",
                 chaos_game(builtin::perturbed_cantor(), 20'000, kDefaultBurnIn, seed, 11)});
  out.push_back({"countable", countable_example_measure(500).measure});
  out.push_back({"product2d", chaos_game(full_product(builtin::binary(), builtin::cantor3()),
                                         3'000, kDefaultBurnIn, seed, 12)});
  return out;
}

inline std::vector<EmpiricalMeasure> oracle_suite() {
  std::vector<EmpiricalMeasure> out;
  out.push_back(countable_example_measure(300).measure);
  out.push_back(cylinder_measure(builtin::cantor3({0.3, 0.7}), 8));
  out.push_back(cylinder_measure(builtin::perturbed_cantor(), 8));
  std::vector<Point> grid;
  for (int k = 0; k < 200; ++k) grid.push_back({k / 199.0});
  out.push_back(EmpiricalMeasure::uniform(1, std::move(grid)));
  return out;
}

}  // namespace detail

inline CriterionResult properties(const Options& o) {
  CriterionResult res = begin(9, "property suites");
  detail::Notes notes;
  bool ok = true;

  // Lloyd monotonicity and the mesh lower bound on every produced quantizer.
  std::size_t runs = 0;
  std::size_t lloyd_bad = 0;
  std::size_t mesh_bad = 0;
  LloydOptions lopt;
  lopt.threads = o.threads;
  for (const auto& bench : detail::lloyd_benchmarks(o.seed)) {
    for (double r : {0.5, 1.0, 2.0}) {
      for (std::size_t n : {2, 8, 32}) {
        const Quantizer q = lloyd_quantize(bench.measure, n, r, o.seed, lopt);
        ++runs;
        for (std::size_t t = 1; t < q.history.size(); ++t) {
          if (q.history[t] > q.history[t - 1]) ++lloyd_bad;
        }
        const double mesh = quantizer_mesh(bench.measure, q.centers);
        const double bound =
            std::pow(mesh / 2.0, r) * min_ball_mass(bench.measure, mesh / 2.0);
        if (bound > q.distortion * (1.0 + 1e-12) + 1e-300) ++mesh_bad;
      }
    }
  }
  ok = ok && lloyd_bad == 0 && mesh_bad == 0;
  notes("lloyd_runs", runs)("lloyd_increases", lloyd_bad)("mesh_violations", mesh_bad);

  // Mass identity over the antichain.
  Rng rng(o.seed, 9);
  double mass_err = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<double> p = detail::random_probs(rng, 2 + rng.next_u64() % 3);
    const double pmin = *std::min_element(p.begin(), p.end());
    const double eps = pmin * std::pow(10.0, -3.0 * rng.uniform());
    double total = 0.0;
    for (const Word& w : gamma_antichain(p, eps).words) total += word_probability(w, p);
    mass_err = std::max(mass_err, std::abs(total - 1.0));
  }
  ok = ok && mass_err <= 1e-12;
  notes("antichain_mass_err", mass_err);

  // Distortion inequalities through the exact oracle.
  const std::vector<EmpiricalMeasure> suite = detail::oracle_suite();
  const std::vector<ContractionMap> maps{ContractionMap::similarity(0.5, {0.1}),
                                         ContractionMap::affine_1d(-0.3, 0.2),
                                         builtin::perturbed_map(0.0)};
  double push_slack = -std::numeric_limits<double>::infinity();
  for (const auto& mu : suite) {
    for (const auto& f : maps) {
      for (double r : {1.0, 2.0, 3.0}) {
        for (std::size_t n : {1, 3, 8}) {
          const DistortionCheck c = pushforward_distortion_check(mu, f, n, r);
          push_slack = std::max(push_slack, c.lhs - c.rhs);
        }
      }
    }
  }
  double mix_slack = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < suite.size(); ++a) {
    for (std::size_t b = a; b < suite.size(); ++b) {
      EmpiricalMeasure shifted = suite[b];
      if (a != b) {
        for (Point& x : shifted.points) x[0] += 2.0;
      }
      for (double r : {1.0, 2.0}) {
        for (auto alloc : {std::vector<std::size_t>{1, 1}, std::vector<std::size_t>{2, 5},
                           std::vector<std::size_t>{6, 3}}) {
          const DistortionCheck c =
              mixture_distortion_check({{suite[a], 0.3}, {shifted, 0.7}}, alloc, r);
          mix_slack = std::max(mix_slack, c.lhs - c.rhs);
        }
      }
    }
  }
  ok = ok && push_slack <= 1e-12 && mix_slack <= 1e-12;
  notes("pushforward_slack", push_slack)("mixture_slack", mix_slack);

  // Tops identity: T_FF(x) = x.
  double tops_err = 0.0;
  std::size_t tops_bad = 0;
  {
    const IFSystem b = builtin::binary();
    Rng pts(o.seed, 13);
    for (int k = 0; k < 1000; ++k) {
      const Point x{pts.uniform()};
      const double e = std::abs(transform_point(b, b, x, 48)[0] - x[0]);
      tops_err = std::max(tops_err, e);
      if (e > std::ldexp(1.0, -40)) ++tops_bad;
    }
    const IFSystem pc = builtin::perturbed_cantor();
    const TopsSolver solver(pc);
    const EmpiricalMeasure on = chaos_game(pc, 1000, kDefaultBurnIn, o.seed, 14);
    for (const Point& x : on.points) {
      const TopsResult t = solver(x, 24);
      const double e =
          std::abs(address_point(pc, t.code, tail_fixed_point(pc, t.code)).point[0] - x[0]);
      tops_err = std::max(tops_err, e);
      if (e > 2.0 * solver.tolerance()) ++tops_bad;
    }
  }
  ok = ok && tops_bad == 0;
  notes("tops_max_err", tops_err)("tops_failures", tops_bad);

  res.passed = ok;
  res.detail = notes.str();
  return res;
}

struct Criterion {
  int id;
  std::function<CriterionResult(const Options&)> run;
};

inline std::vector<Criterion> all_criteria() {
  return {{1, solvers},         {2, countable},      {3, cantor},
          {4, two_sided},       {5, graph_attractor}, {6, graph_sandwich},
          {7, product_measure}, {8, product_quantization}, {9, properties}};
}

/// Runs one criterion, timing it and turning exceptions into failures.
inline CriterionResult run_criterion(const Criterion& c, const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult res;
  try {
    res = c.run(o);
  } catch (const std::exception& e) {
    res.id = c.id;
    res.name = "criterion " + std::to_string(c.id);
    res.passed = false;
    res.detail = std::string("exception: ") + e.what();
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (res.time_limit > 0.0 && res.seconds > res.time_limit) {
    res.passed = false;
    res.detail += " over_time_limit=" + std::to_string(res.time_limit);
  }
  return res;
}

inline std::string format_line(const CriterionResult& r) {
  std::ostringstream out;
  out << (r.passed ? "PASS" : "FAIL") << " [" << r.id << "] " << r.name << " (" << std::fixed;
  out.precision(2);
  out << r.seconds << " s) " << r.detail;
  return out.str();
}

}  // namespace ifsq::verify
