#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "ifsq/measure.hpp"
#include "ifsq/quantization.hpp"

using namespace ifsq;

TEST(ChaosGame, SeedAndStreamDetermineTheSample) {
  const IFSystem s = builtin::cantor3({0.3, 0.7});
  const auto a = chaos_game(s, 1000, 64, 7);
  const auto b = chaos_game(s, 1000, 64, 7);
  const auto c = chaos_game(s, 1000, 64, 7, 1);
  EXPECT_EQ(a.points, b.points);
  EXPECT_NE(a.points, c.points);
  EXPECT_EQ(a.size(), 1000u);
  EXPECT_DOUBLE_EQ(a.weights.front(), 1e-3);
}

TEST(ChaosGame, SamplesStayInTheHull) {
  const auto m = chaos_game(builtin::perturbed_cantor(), 5000, 64, 1);
  for (const Point& x : m.points) {
    EXPECT_GE(x[0], 0.0);
    EXPECT_LE(x[0], 1.0);
    EXPECT_FALSE(x[0] > 0.33 + 1e-12 && x[0] < 0.67 - 1e-12);
  }
}

TEST(ChaosGame, InputChecks) {
  EXPECT_THROW(chaos_game(IFSystem(builtin::binary().maps()), 10, 0, 1), Error);
  EXPECT_THROW(chaos_game(builtin::binary(), 0, 0, 1), Error);
  try {
    chaos_game(builtin::binary(), kMaxChaosSamples + 1, 0, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::resource);
  }
}

TEST(EmpiricalMeasure, Validation) {
  EmpiricalMeasure m{1, {{0.0}, {1.0}}, {0.5, 0.6}};
  EXPECT_THROW(m.validate(), Error);
  m.weights = {0.5, 0.5};
  EXPECT_NO_THROW(m.validate());
  m.weights = {1.5, -0.5};
  EXPECT_THROW(m.validate(), Error);
}

TEST(CylinderMeasure, WeightsAreWordProbabilities) {
  const IFSystem s = builtin::cantor3({0.2, 0.8});
  const auto m = cylinder_measure(s, 3);
  ASSERT_EQ(m.size(), 8u);
  double total = 0.0;
  for (double w : m.weights) total += w;
  EXPECT_NEAR(total, 1.0, 1e-15);
  // First atom is the word 111, the last 222.
  EXPECT_NEAR(m.weights.front(), 0.008, 1e-15);
  EXPECT_NEAR(m.weights.back(), 0.512, 1e-15);
  EXPECT_DOUBLE_EQ(m.points.front()[0], 0.0);
}

TEST(MeasureOfBox, ClosedBoxes) {
  const EmpiricalMeasure m{1, {{0.0}, {0.5}, {1.0}}, {0.25, 0.25, 0.5}};
  EXPECT_DOUBLE_EQ(measure_of_box(m, Box::interval(0.0, 0.5)), 0.5);
  EXPECT_DOUBLE_EQ(measure_of_box(m, Box::interval(0.5, 1.0)), 0.75);
  EXPECT_DOUBLE_EQ(measure_of_box(m, Box::interval(0.1, 0.4)), 0.0);
  EXPECT_THROW(measure_of_box(m, Box({0.0, 0.0}, {1.0, 1.0})), Error);
}

TEST(MinBallMass, AgreesInOneAndTwoDimensions) {
  const EmpiricalMeasure m1{1, {{0.0}, {0.1}, {0.5}, {1.0}}, {0.1, 0.2, 0.3, 0.4}};
  EXPECT_DOUBLE_EQ(min_ball_mass(m1, 0.15), 0.3);
  EXPECT_DOUBLE_EQ(min_ball_mass(m1, 0.05), 0.1);
  const EmpiricalMeasure m2{2, {{0.0, 0.0}, {0.1, 0.0}, {0.5, 0.0}, {1.0, 0.0}}, m1.weights};
  EXPECT_DOUBLE_EQ(min_ball_mass(m2, 0.15), 0.3);
}

TEST(InvarianceResidual, ShrinksWithSampleSize) {
  const IFSystem s = builtin::cantor3({0.3, 0.7});
  const auto boxes = dyadic_boxes(16);
  int better = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const double small = invariance_residual(chaos_game(s, 10'000, 64, seed), s, boxes);
    const double large = invariance_residual(chaos_game(s, 1'000'000, 64, seed), s, boxes);
    if (large < small) ++better;
  }
  EXPECT_GE(better, 8);
}

TEST(InvarianceResidual, DetectsTheWrongWeights) {
  const auto m = chaos_game(builtin::binary({0.3, 0.7}), 100'000, 64, 3);
  EXPECT_LT(invariance_residual(m, builtin::binary({0.3, 0.7}), dyadic_boxes(8)), 0.02);
  EXPECT_GE(invariance_residual(m, builtin::binary({0.7, 0.3}), dyadic_boxes(8)), 0.05);
}

TEST(InvarianceResidual, PreimageAndPushforwardAgree) {
  // For invertible affine maps x in f^-1(B) exactly when f(x) in B.
  const IFSystem s = builtin::cantor3({0.4, 0.6});
  const auto m = cylinder_measure(s, 10);
  const auto boxes = dyadic_boxes(8);
  const double pre = invariance_residual(m, s, boxes, ResidualMode::preimage);
  EXPECT_NEAR(pre, invariance_residual(m, s, boxes, ResidualMode::pushforward), 1e-12);
  // Depth 10 against depth 11 cylinders.
  EXPECT_LT(pre, 0.01);
  EXPECT_THROW(invariance_residual(m, builtin::perturbed_cantor({0.4, 0.6}), boxes,
                                   ResidualMode::preimage),
               Error);
}

TEST(DyadicBoxes, CoverTheUnitSquare) {
  const auto boxes = dyadic_boxes(4, 2);
  ASSERT_EQ(boxes.size(), 16u);
  double area = 0.0;
  for (const Box& b : boxes) area += (b.upper[0] - b.lower[0]) * (b.upper[1] - b.lower[1]);
  EXPECT_NEAR(area, 1.0, 1e-15);
}

TEST(ProductMeasure, ResidualDecaysLikeAnInverseSquareRoot) {
  const IFSystem f = builtin::cantor3({0.3, 0.7});
  const IFSystem g = builtin::binary({1.0 / 3.0, 2.0 / 3.0});
  const auto boxes = dyadic_boxes(4);
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t n : {1'000u, 10'000u, 100'000u}) {
    double mean = 0.0;
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
      mean += product_measure_residual(f, g, boxes, boxes, n, seed) / 6.0;
    }
    xs.push_back(std::log(static_cast<double>(n)));
    ys.push_back(std::log(mean));
  }
  const double slope = least_squares(xs, ys).slope;
  EXPECT_GE(slope, -0.7);
  EXPECT_LE(slope, -0.3);
}

TEST(CountableExample, TwoAtoms) {
  const CountableExample ex = countable_example_measure(2);
  ASSERT_EQ(ex.measure.size(), 2u);
  EXPECT_DOUBLE_EQ(ex.measure.points[0][0], 0.75);
  EXPECT_NEAR(ex.measure.points[1][0], 5.0 / 12.0, 1e-15);
  EXPECT_NEAR(ex.measure.weights[0], 0.8, 1e-15);
  EXPECT_NEAR(ex.measure.weights[1], 0.2, 1e-15);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  EXPECT_NEAR(ex.tail_mass, 1.0 - 7.5 / pi2, 1e-14);
  EXPECT_THROW(countable_example_measure(1), Error);
}

TEST(CountableExample, TailMassMatchesPartialSums) {
  const double gamma = 6.0 / (std::numbers::pi * std::numbers::pi);
  for (std::size_t m : {5u, 50u, 500u}) {
    double head = 0.0;
    for (std::size_t k = 1; k <= m; ++k) head += gamma / (static_cast<double>(k) * k);
    EXPECT_NEAR(countable_example_measure(m).tail_mass, 1.0 - head, 1e-13);
  }
}
