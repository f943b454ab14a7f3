#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ifsq/measure.hpp"
#include "ifsq/quantization.hpp"
#include "ifsq/rng.hpp"
#include "oracles.hpp"

using namespace ifsq;

namespace {

EmpiricalMeasure uniform_grid(std::size_t k) {
  std::vector<Point> pts;
  for (std::size_t i = 0; i < k; ++i) pts.push_back({(static_cast<double>(i) + 0.5) / k});
  return EmpiricalMeasure::uniform(1, std::move(pts));
}

EmpiricalMeasure random_atoms(Rng& rng, std::size_t count) {
  EmpiricalMeasure m{1, {}, {}};
  double total = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    m.points.push_back({rng.uniform()});
    m.weights.push_back(0.05 + rng.uniform());
    total += m.weights.back();
  }
  for (double& w : m.weights) w /= total;
  return m;
}

std::pair<std::vector<double>, std::vector<double>> sorted_atoms(const EmpiricalMeasure& m) {
  std::vector<std::size_t> order(m.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return m.points[a][0] < m.points[b][0]; });
  std::vector<double> x, w;
  for (std::size_t i : order) {
    x.push_back(m.points[i][0]);
    w.push_back(m.weights[i]);
  }
  return {x, w};
}

}  // namespace

TEST(Distortion, SingleCenterOnAUniformGrid) {
  const auto m = uniform_grid(1024);
  const double want = 1.0 / 12.0 - 1.0 / (12.0 * 1024.0 * 1024.0);
  EXPECT_NEAR(distortion(m, {{0.5}}, 2.0), want, 1e-14);
  EXPECT_NEAR(distortion(m, {{0.5}}, 1.0), 0.25, 1e-14);
  EXPECT_THROW(distortion(m, {{0.5}}, 0.0), Error);
}

TEST(VoronoiAssign, TiesGoToTheLowestIndex) {
  const EmpiricalMeasure m = EmpiricalMeasure::uniform(1, {{0.5}, {0.0}, {1.0}});
  EXPECT_EQ(voronoi_assign(m, {{1.0}, {0.0}}), (std::vector<std::size_t>{0, 1, 0}));
  EXPECT_EQ(voronoi_assign(m, {{0.0}, {1.0}}), (std::vector<std::size_t>{0, 0, 1}));
  const EmpiricalMeasure m2 = EmpiricalMeasure::uniform(2, {{0.5, 0.5}, {0.0, 0.1}});
  EXPECT_EQ(voronoi_assign(m2, {{1.0, 1.0}, {0.0, 0.0}}), (std::vector<std::size_t>{0, 1}));
}

TEST(QuantizerMesh, LargestNearestDistance) {
  const EmpiricalMeasure m = EmpiricalMeasure::uniform(1, {{0.0}, {0.3}, {1.0}});
  EXPECT_DOUBLE_EQ(quantizer_mesh(m, {{0.0}, {1.0}}), 0.3);
}

TEST(Lloyd, TwoCentersOnTheUniformGrid) {
  const Quantizer q = lloyd_quantize(uniform_grid(1024), 2, 2.0, 1);
  EXPECT_NEAR(q.distortion, 1.0 / 48.0, 1e-5);
  ASSERT_EQ(q.centers.size(), 2u);
  std::vector<double> c{q.centers[0][0], q.centers[1][0]};
  std::sort(c.begin(), c.end());
  EXPECT_NEAR(c[0], 0.25, 1e-3);
  EXPECT_NEAR(c[1], 0.75, 1e-3);
  EXPECT_TRUE(q.converged);
}

TEST(Lloyd, HistoryNeverIncreases) {
  const auto m = chaos_game(builtin::cantor3({0.3, 0.7}), 20'000, 64, 5);
  for (double r : {1.0, 2.0, 3.0}) {
    const Quantizer q = lloyd_quantize(m, 12, r, 9);
    for (std::size_t k = 1; k < q.history.size(); ++k) {
      EXPECT_LE(q.history[k], q.history[k - 1] * (1 + 1e-12)) << "r=" << r << " k=" << k;
    }
    EXPECT_NEAR(q.history.back(), q.distortion, 1e-15);
    EXPECT_NEAR(distortion(m, q.centers, r), q.distortion, 1e-12 * q.distortion);
  }
}

TEST(Lloyd, DeterministicAcrossRunsAndThreads) {
  const auto m = chaos_game(builtin::binary({0.4, 0.6}), 10'000, 64, 2);
  LloydOptions one;
  LloydOptions three;
  three.threads = 3;
  const Quantizer a = lloyd_quantize(m, 7, 2.0, 42, one);
  const Quantizer b = lloyd_quantize(m, 7, 2.0, 42, one);
  const Quantizer c = lloyd_quantize(m, 7, 2.0, 42, three);
  EXPECT_EQ(a.centers, b.centers);
  EXPECT_EQ(a.centers, c.centers);
  EXPECT_EQ(a.distortion, c.distortion);
}

TEST(Lloyd, SmallSupportIsQuantizedExactly) {
  const EmpiricalMeasure m = EmpiricalMeasure::uniform(1, {{0.0}, {1.0}, {1.0}});
  const Quantizer q = lloyd_quantize(m, 5, 2.0, 1);
  EXPECT_EQ(q.centers.size(), 2u);
  EXPECT_EQ(q.distortion, 0.0);
}

TEST(Lloyd, WorksInTwoDimensions) {
  const IFSystem h = diagonal_product(builtin::cantor3(), builtin::cantor3());
  const auto m = chaos_game(IFSystem(h.maps(), std::vector<double>{0.5, 0.5},
                                     Separation::ssc, h.hull()),
                            5'000, 64, 3);
  const Quantizer q = lloyd_quantize(m, 2, 2.0, 1);
  // Two centers near the fixed points of the two maps' images.
  EXPECT_LT(q.distortion, 0.03);
  EXPECT_TRUE(q.converged);
}

TEST(Exact, TwoAtoms) {
  const EmpiricalMeasure m = EmpiricalMeasure::uniform(1, {{0.0}, {1.0}});
  EXPECT_NEAR(exact_quantize_1d(m, 1, 2.0).distortion, 0.25, 1e-15);
  EXPECT_NEAR(exact_quantize_1d(m, 1, 1.0).distortion, 0.5, 1e-15);
  EXPECT_EQ(exact_quantize_1d(m, 2, 2.0).distortion, 0.0);
}

TEST(Exact, UniformGridScaling) {
  const auto m = uniform_grid(1024);
  const auto curve = exact_distortion_curve_1d(m, 16, 2.0);
  for (std::size_t n : {1u, 2u, 4u, 8u, 16u}) {
    const double want = 1.0 / (12.0 * n * n);
    EXPECT_NEAR(curve[n - 1], want, 0.01 * want) << "n=" << n;
  }
}

TEST(Exact, MatchesTheQuadraticDynamicProgram) {
  Rng rng(17);
  for (int trial = 0; trial < 24; ++trial) {
    const EmpiricalMeasure m = random_atoms(rng, 8 + rng.next_u64() % 20);
    const auto [x, w] = sorted_atoms(m);
    const double r = std::vector<double>{1.0, 1.5, 2.0, 3.0}[trial % 4];
    for (std::size_t n = 1; n <= 5; ++n) {
      const double want = oracle::exact_distortion(x, w, n, r);
      const Quantizer q = exact_quantize_1d(m, n, r);
      EXPECT_NEAR(q.distortion, want, 1e-9 * std::max(want, 1e-6)) << "trial " << trial << " n " << n;
      EXPECT_NEAR(distortion(m, q.centers, r), q.distortion, 1e-12);
    }
  }
}

TEST(Exact, RejectsUnsupportedInput) {
  const auto m = uniform_grid(16);
  try {
    exact_quantize_1d(m, 2, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unsupported_input);
  }
  try {
    exact_quantize_1d(uniform_grid(kExactAtomBudget + 1), 2, 2.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::resource);
  }
  EXPECT_THROW(exact_quantize_1d(EmpiricalMeasure::uniform(2, {{0.0, 0.0}}), 1, 2.0), Error);
}

TEST(Lloyd, WithinFivePercentOfOptimal) {
  const auto m = cylinder_measure(builtin::cantor3({0.3, 0.7}), 11);
  for (std::size_t n : {2u, 4u, 8u, 16u, 32u}) {
    const double exact = exact_quantize_1d(m, n, 2.0).distortion;
    const double lloyd = lloyd_quantize(m, n, 2.0, 7).distortion;
    EXPECT_GE(lloyd, exact * (1 - 1e-9));
    EXPECT_LE(lloyd, 1.05 * exact) << "n=" << n;
  }
}

TEST(Exact, ScalingCovariance) {
  Rng rng(23);
  const EmpiricalMeasure m = random_atoms(rng, 40);
  const double lambda = 0.37;
  EmpiricalMeasure scaled = m;
  for (Point& x : scaled.points) x[0] = lambda * x[0] + 0.2;
  for (double r : {1.0, 2.0, 2.5}) {
    for (std::size_t n : {1u, 3u, 6u}) {
      const double a = exact_quantize_1d(m, n, r).distortion;
      const double b = exact_quantize_1d(scaled, n, r).distortion;
      EXPECT_NEAR(b, std::pow(lambda, r) * a, 1e-9 * a);
    }
  }
}

TEST(EstimateQdim, SlopeIsScaleInvariant) {
  const auto m = cylinder_measure(builtin::cantor3(), 11);
  EmpiricalMeasure scaled = m;
  for (Point& x : scaled.points) x[0] *= 0.1;
  const auto grid = geometric_grid(4, 64);
  const double a = estimate_qdim(m, 2.0, grid, 3).slope;
  const double b = estimate_qdim(scaled, 2.0, grid, 3).slope;
  EXPECT_LE(std::abs(a - b), 0.01);
}

TEST(EstimateQdim, ExactSolverOnTheCantorMeasure) {
  const auto m = cylinder_measure(builtin::cantor3(), 12);
  QDimOptions opt;
  opt.solver = QuantizerKind::exact_1d;
  const QDimFit fit = estimate_qdim(m, 2.0, geometric_grid(2, 256), 0, opt);
  EXPECT_NEAR(fit.slope, std::log(2.0) / std::log(3.0), 0.03);
  EXPECT_EQ(fit.first_fitted, 1u);
  EXPECT_EQ(fit.errors.size(), 8u);
  EXPECT_NEAR(fit.errors[0], std::sqrt(fit.distortions[0]), 1e-15);
}

TEST(EstimateQdim, GridErrors) {
  const auto m = uniform_grid(32);
  auto kind_of = [&](const std::vector<std::size_t>& grid) {
    try {
      estimate_qdim(m, 2.0, grid, 1);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::numerical;
  };
  EXPECT_EQ(kind_of({4}), ErrorKind::invalid_grid);
  EXPECT_EQ(kind_of({4, 4, 8}), ErrorKind::invalid_grid);
  EXPECT_EQ(kind_of({0, 4, 8}), ErrorKind::invalid_grid);
  EXPECT_EQ(kind_of({4, 8}), ErrorKind::invalid_grid);
  EXPECT_EQ(kind_of({4, 16, 32}), ErrorKind::invalid_grid);
}

TEST(GeometricGrid, Doubling) {
  EXPECT_EQ(geometric_grid(2, 20), (std::vector<std::size_t>{2, 4, 8, 16}));
  EXPECT_EQ(geometric_grid(1, 27, 3), (std::vector<std::size_t>{1, 3, 9, 27}));
}

TEST(DistortionInequalities, PushforwardAndMixture) {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const EmpiricalMeasure a = random_atoms(rng, 12);
    const EmpiricalMeasure b = random_atoms(rng, 15);
    const double r = trial % 2 == 0 ? 2.0 : 1.0;
    const auto f = builtin::perturbed_map(0.1);
    const auto push = pushforward_distortion_check(a, f, 3, r);
    EXPECT_TRUE(push.holds()) << push.lhs << " > " << push.rhs;
    const double s = 0.2 + 0.6 * rng.uniform();
    const auto mix = mixture_distortion_check({{a, s}, {b, 1.0 - s}}, {2, 3}, r);
    EXPECT_TRUE(mix.holds()) << mix.lhs << " > " << mix.rhs;
  }
  EXPECT_THROW(mixture_distortion_check({{uniform_grid(4), 0.5}}, {2}, 2.0), Error);
}
