#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ifsq/fractal_transform.hpp"
#include "ifsq/rng.hpp"
#include "oracles.hpp"

using namespace ifsq;

namespace {

// The largest depth-K word whose cylinder image of the hull contains x,
// found by checking every word.
std::vector<int> brute_force_tops(const IFSystem& f, double x, std::size_t depth) {
  std::vector<int> best;
  for (const auto& w : oracle::words_up_to(static_cast<int>(f.size()), depth)) {
    if (w.size() != depth) continue;
    const Word word(static_cast<int>(f.size()), w);
    const double a = apply_word(f, word, {f.hull()->lower[0]})[0];
    const double b = apply_word(f, word, {f.hull()->upper[0]})[0];
    if (x >= std::min(a, b) - 1e-12 && x <= std::max(a, b) + 1e-12) best = std::max(best, w);
  }
  return best;
}

}  // namespace

TEST(Tops, DyadicMidpointTakesTheLargerAddress) {
  const TopsResult t = tops_code(builtin::binary(), {0.5}, 8);
  EXPECT_EQ(t.code.word.to_string(), "21111111");
  EXPECT_TRUE(t.certified);
}

TEST(Tops, ZeroHasOnlyOnes) {
  EXPECT_EQ(tops_code(builtin::binary(), {0.0}, 12).code.word.to_string(), "111111111111");
}

TEST(Tops, CantorPoint) {
  EXPECT_EQ(tops_code(builtin::cantor3(), {1.0 / 3.0}, 6).code.word.to_string(), "122222");
}

TEST(Tops, MaximalityAgainstBruteForce) {
  const IFSystem b = builtin::binary();
  const IFSystem t = builtin::third_two_thirds();
  for (std::size_t depth : {4, 7, 10}) {
    for (int k = 0; k <= 64; ++k) {
      const double x = k / 64.0;
      EXPECT_EQ(tops_code(b, {x}, depth).code.word.symbols(), brute_force_tops(b, x, depth))
          << "binary x=" << x;
      const double y = apply_word(t, Word(2, {1 + k % 2, 1 + (k / 2) % 2, 1 + (k / 4) % 2}),
                                  {(k % 3) / 2.0})[0];
      EXPECT_EQ(tops_code(t, {y}, depth).code.word.symbols(), brute_force_tops(t, y, depth))
          << "third-two-thirds y=" << y;
    }
  }
}

TEST(Tops, FailsOutsideTheAttractor) {
  try {
    tops_code(builtin::cantor3(), {0.5}, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::address_failure);
    EXPECT_NE(std::string(e.what()).find("step 1"), std::string::npos);
  }
  EXPECT_THROW(tops_code(builtin::binary(), {1.5}, 4), Error);
}

TEST(Tops, SnapsSmallDrift) {
  // 1/3 + 5e-9 sits just outside [0, 1/3] but within 10 tol of it.
  const TopsResult t = tops_code(builtin::cantor3(), {1.0 / 3.0 + 5e-9}, 3);
  EXPECT_EQ(t.snapped_steps, 1u);
  EXPECT_EQ(t.code.word.to_string(), "122");
}

TEST(Tops, NeedsInverses) {
  const IFSystem s({ContractionMap::general(
                        1, [](const Point& x) { return Point{0.5 * x[0]}; }, {}, 0.5, 0.5),
                    ContractionMap::affine_1d(0.5, 0.5)},
                   {}, Separation::osc, Box::interval(0.0, 1.0));
  try {
    TopsSolver solver(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unsupported_input);
  }
}

TEST(Tops, CloudModeForNonlinearMaps) {
  const IFSystem pc = builtin::perturbed_cantor();
  const TopsSolver solver(pc);
  EXPECT_FALSE(solver.certified());
  const Word w = Word::parse(2, "2112122");
  const double x = apply_word(pc, w, {0.0})[0];
  EXPECT_EQ(solver({x}, 7).code.word, w);
}

TEST(TransformPoint, Examples) {
  const IFSystem f = builtin::binary();
  const IFSystem g = builtin::third_two_thirds();
  EXPECT_DOUBLE_EQ(transform_point(f, g, {0.0}, 20)[0], 0.0);
  EXPECT_NEAR(transform_point(f, g, {0.5}, 20)[0], 1.0 / 3.0, 1e-15);
}

TEST(TransformPoint, IdentityOnTheAttractor) {
  for (const IFSystem& f : {builtin::binary(), builtin::cantor3(), builtin::third_two_thirds()}) {
    const PointCloud xs = attractor_sample(f, 9, {0.0});
    for (const Point& x : xs.points) {
      // Each inverse step multiplies rounding error by up to 1/s_min, so
      // keep the depth well short of where Cantor points drift into gaps.
      const std::size_t depth = 16;
      const double bound =
          std::pow(f.max_upper_lip(), static_cast<double>(depth)) * f.hull()->diameter() + 1e-9;
      EXPECT_NEAR(transform_point(f, f, x, depth)[0], x[0], bound);
    }
  }
}

TEST(GraphSample, IdentityGivesTheDiagonal) {
  const IFSystem f = builtin::binary();
  Rng rng(2);
  PointCloud xs{1, {}};
  for (int k = 0; k < 50; ++k) xs.points.push_back({rng.uniform()});
  const GraphSample g = graph_sample(f, f, xs, 45);
  ASSERT_EQ(g.graph.size(), 50u);
  for (const Point& z : g.graph.points) EXPECT_NEAR(z[0], z[1], 1e-12);
}

TEST(GraphSample, ReportsFailures) {
  const IFSystem c = builtin::cantor3();
  const PointCloud xs{1, {{0.0}, {0.5}, {1.0}}};
  const GraphSample g = graph_sample(c, c, xs, 10);
  EXPECT_EQ(g.graph.size(), 2u);
  EXPECT_EQ(g.failures, std::vector<std::size_t>{1});
}

TEST(GraphSample, MatchesProductAttractor) {
  const IFSystem f = builtin::binary();
  const IFSystem g = builtin::third_two_thirds();
  const PointCloud xs = attractor_sample(f, 10, {0.0});
  const GraphSample gs = graph_sample(f, g, xs, 40, {}, 2);
  const PointCloud h = attractor_sample(diagonal_product(f, g), 10, {0.0, 0.0});
  EXPECT_LE(hausdorff_distance(gs.graph, h), 1e-7);
}

TEST(GraphSample, ThreadCountDoesNotChangeTheResult) {
  const IFSystem f = builtin::binary();
  const IFSystem g = builtin::third_two_thirds();
  const PointCloud xs = attractor_sample(f, 8, {0.1});
  EXPECT_EQ(graph_sample(f, g, xs, 30, {}, 1).graph.points,
            graph_sample(f, g, xs, 30, {}, 3).graph.points);
}
