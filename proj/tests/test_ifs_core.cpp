#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ifsq/ifs.hpp"
#include "ifsq/rng.hpp"

using namespace ifsq;

namespace {

IFSystem three_map() {
  return IFSystem({ContractionMap::affine_1d(1.0 / 3.0, 0.0), ContractionMap::affine_1d(0.5, 0.0),
                   ContractionMap::affine_1d(0.5, 0.5)},
                  {}, Separation::none, Box::interval(0.0, 1.0));
}

}  // namespace

TEST(ContractionMap, AffineConstantsAreSingularValues) {
  Eigen::MatrixXd a(2, 2);
  a << 0.5, 0.0, 0.0, 0.25;
  const auto f = ContractionMap::affine(a, Eigen::Vector2d(0.1, 0.2));
  EXPECT_DOUBLE_EQ(f.lower_lip(), 0.25);
  EXPECT_DOUBLE_EQ(f.upper_lip(), 0.5);
  EXPECT_EQ(f.kind(), MapKind::affine);
  const Point y = f({1.0, 1.0});
  EXPECT_NEAR(y[0], 0.6, 1e-15);
  EXPECT_NEAR(y[1], 0.45, 1e-15);
  const Point back = f.inverse(y);
  EXPECT_NEAR(back[0], 1.0, 1e-14);
  EXPECT_NEAR(back[1], 1.0, 1e-14);
}

TEST(ContractionMap, RotationIsASimilarity) {
  const double t = 0.7;
  Eigen::MatrixXd a(2, 2);
  a << 0.4 * std::cos(t), -0.4 * std::sin(t), 0.4 * std::sin(t), 0.4 * std::cos(t);
  const auto f = ContractionMap::affine(a, Eigen::Vector2d(0.0, 0.0));
  EXPECT_EQ(f.kind(), MapKind::similarity);
  EXPECT_NEAR(f.upper_lip(), 0.4, 1e-14);
}

TEST(ContractionMap, RejectsNonContractions) {
  EXPECT_THROW(ContractionMap::affine_1d(1.0, 0.0), Error);
  EXPECT_THROW(ContractionMap::affine_1d(0.0, 0.0), Error);
  EXPECT_THROW(ContractionMap::general(1, [](const Point& x) { return x; }, {}, 0.5, 0.4), Error);
}

TEST(ContractionMap, FixedPointAndComposition) {
  const auto f = ContractionMap::affine_1d(0.5, 0.5);
  EXPECT_NEAR(f.fixed_point({0.0})[0], 1.0, 1e-15);
  const auto g = ContractionMap::affine_1d(1.0 / 3.0, 0.0);
  const auto fg = f.compose(g);
  EXPECT_NEAR(fg({0.9})[0], f(g({0.9}))[0], 1e-15);
  EXPECT_NEAR(fg.upper_lip(), 1.0 / 6.0, 1e-15);
  const auto p = builtin::perturbed_map(0.0);
  EXPECT_NEAR(p(p.fixed_point({0.5}))[0], p.fixed_point({0.5})[0], 1e-15);
}

TEST(ContractionMap, PerturbedMapInverse) {
  const auto p = builtin::perturbed_map(0.67);
  std::vector<Point> samples;
  for (int k = 0; k <= 100; ++k) samples.push_back({k / 100.0});
  EXPECT_LE(p.inverse_defect(samples), 1e-12);
}

TEST(IFSystem, Validation) {
  EXPECT_THROW(IFSystem({ContractionMap::affine_1d(0.5, 0.0)}), Error);
  EXPECT_THROW(builtin::binary({0.5, 0.6}), Error);
  EXPECT_THROW(IFSystem({ContractionMap::affine_1d(0.5, 0.0), ContractionMap::affine_1d(0.5, 0.9)},
                        {}, Separation::none, Box::interval(0.0, 1.0)),
               Error);
  EXPECT_THROW(IFSystem({ContractionMap::affine_1d(0.5, 0.0),
                         ContractionMap::similarity(0.5, {0.0, 0.0})}),
               Error);
}

TEST(ApplyWord, Examples) {
  const IFSystem b = builtin::binary();
  EXPECT_DOUBLE_EQ(apply_word(b, Word(2), {0.3})[0], 0.3);
  EXPECT_DOUBLE_EQ(apply_word(b, Word::parse(2, "21"), {0.0})[0], 0.5);
  EXPECT_DOUBLE_EQ(apply_word(builtin::cantor3(), Word::parse(2, "22"), {1.0})[0], 1.0);
  EXPECT_THROW(apply_word(b, Word::parse(3, "3"), {0.0}), Error);
}

TEST(ApplyWord, LipschitzSandwichOnSampledPairs) {
  const IFSystem pc = builtin::perturbed_cantor();
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> s;
    for (int k = 0; k < 5; ++k) s.push_back(1 + static_cast<int>(rng.next_u64() % 2));
    const Word w(2, s);
    const double x = rng.uniform();
    const double y = rng.uniform();
    const double d = std::abs(apply_word(pc, w, {x})[0] - apply_word(pc, w, {y})[0]);
    EXPECT_LE(d, word_product(w, pc.upper_lips()) * std::abs(x - y) * (1 + 1e-12));
    EXPECT_GE(d, word_product(w, pc.lower_lips()) * std::abs(x - y) * (1 - 1e-12));
  }
}

TEST(AddressPoint, Examples) {
  const IFSystem b = builtin::binary();
  const CodePrefix ones{Word(2, std::vector<int>(30, 1))};
  const auto p1 = address_point(b, ones, tail_fixed_point(b, ones));
  EXPECT_DOUBLE_EQ(p1.point[0], 0.0);
  EXPECT_LE(*p1.error_bound, std::ldexp(1.0, -30));

  std::vector<int> s(30, 1);
  s[0] = 2;
  const CodePrefix two_ones{Word(2, s)};
  const auto p2 = address_point(b, two_ones, {0.37});
  EXPECT_NEAR(p2.point[0], 0.5, std::ldexp(1.0, -30));
  EXPECT_LE(*p2.error_bound, std::ldexp(1.0, -30));

  const IFSystem c3 = builtin::cantor3();
  const CodePrefix twos{Word(2, std::vector<int>(20, 2))};
  const auto p3 = address_point(c3, twos, {0.0});
  EXPECT_NEAR(p3.point[0], 1.0, std::pow(3.0, -20) + 1e-15);
  EXPECT_LE(*p3.error_bound, std::pow(3.0, -20) * (1 + 1e-12));
}

TEST(AddressPoint, NoHullMeansNoBound) {
  const IFSystem s({ContractionMap::affine_1d(0.5, 0.0), ContractionMap::affine_1d(0.5, 0.5)});
  EXPECT_FALSE(address_point(s, CodePrefix{Word::parse(2, "12")}, {0.0}).error_bound.has_value());
}

TEST(AttractorSample, SmallDepths) {
  const IFSystem b = builtin::binary();
  const auto d1 = attractor_sample(b, 1, {0.0});
  EXPECT_EQ(d1.points, (std::vector<Point>{{0.0}, {0.5}}));
  const auto d2 = attractor_sample(b, 2, {0.0});
  EXPECT_EQ(d2.points, (std::vector<Point>{{0.0}, {0.25}, {0.5}, {0.75}}));
}

TEST(AttractorSample, BudgetNamesTheCap) {
  try {
    attractor_sample(builtin::binary(), 30, {0.0}, 1000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::resource);
    EXPECT_NE(std::string(e.what()).find("1000"), std::string::npos);
  }
}

TEST(AttractorSample, HutchinsonConvergence) {
  for (const IFSystem& s : {builtin::cantor3(), builtin::third_two_thirds(),
                            builtin::perturbed_cantor()}) {
    for (std::size_t k = 2; k <= 9; ++k) {
      const double d = hausdorff_distance(attractor_sample(s, k, {0.5}),
                                          attractor_sample(s, k + 1, {0.5}));
      EXPECT_LE(d, std::pow(s.max_upper_lip(), static_cast<double>(k)) * s.hull()->diameter());
    }
  }
}

TEST(Hausdorff, Examples) {
  const PointCloud a{1, {{0.0}, {1.0}}};
  EXPECT_EQ(hausdorff_distance(a, a), 0.0);
  EXPECT_DOUBLE_EQ(hausdorff_distance({1, {{0.0}}}, {1, {{1.0}}}), 1.0);
  EXPECT_DOUBLE_EQ(hausdorff_distance(a, {1, {{0.5}}}), 0.5);
  EXPECT_THROW(hausdorff_distance(a, {1, {}}), Error);
}

TEST(DiagonalProduct, Constants) {
  const IFSystem bb = diagonal_product(builtin::binary(), builtin::binary());
  EXPECT_EQ(bb.size(), 2u);
  EXPECT_EQ(bb.dimension(), 2u);
  for (const auto& m : bb.maps()) {
    EXPECT_DOUBLE_EQ(m.lower_lip(), 0.5);
    EXPECT_DOUBLE_EQ(m.upper_lip(), 0.5);
    EXPECT_EQ(m.kind(), MapKind::similarity);
  }
  EXPECT_EQ(bb.metric(), ProductMetric::max);

  const IFSystem h = diagonal_product(builtin::binary(), builtin::third_two_thirds());
  EXPECT_DOUBLE_EQ(h.map(0).upper_lip(), 0.5);
  EXPECT_DOUBLE_EQ(h.map(1).upper_lip(), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(h.map(0).lower_lip(), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(h.map(1).lower_lip(), 0.5);
}

TEST(DiagonalProduct, InheritsSeparationAndChecksCounts) {
  EXPECT_EQ(diagonal_product(builtin::cantor3(), builtin::binary()).declared_separation(),
            Separation::ssc);
  EXPECT_THROW(diagonal_product(builtin::binary(), three_map()), Error);
}

TEST(DiagonalProduct, AttractorLiesInProductOfAttractors) {
  const IFSystem f = builtin::cantor3();
  const IFSystem g = builtin::third_two_thirds();
  const IFSystem h = diagonal_product(f, g);
  const PointCloud af = attractor_sample(f, 10, {0.0});
  const PointCloud ag = attractor_sample(g, 10, {0.0});
  const PointCloud ah = attractor_sample(h, 8, {0.0, 0.0});
  auto nearest = [](const PointCloud& c, double x) {
    double best = 1e9;
    for (const Point& p : c.points) best = std::min(best, std::abs(p[0] - x));
    return best;
  };
  const double tol = std::pow(2.0 / 3.0, 8);
  for (const Point& z : ah.points) {
    EXPECT_LE(nearest(af, z[0]), tol);
    EXPECT_LE(nearest(ag, z[1]), tol);
  }
}

TEST(FullProduct, WeightsInLexicographicOrder) {
  const IFSystem p = full_product(builtin::binary(), builtin::binary({1.0 / 3.0, 2.0 / 3.0}));
  ASSERT_EQ(p.size(), 4u);
  const std::vector<double> want{1.0 / 6.0, 1.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0};
  double total = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR((*p.probs())[i], want[i], 1e-15);
    total += (*p.probs())[i];
  }
  EXPECT_NEAR(total, 1.0, 1e-15);
  EXPECT_THROW(full_product(builtin::binary(), three_map()), Error);
}

TEST(FullProduct, CommonRatioGivesSimilarities) {
  const IFSystem p = full_product(builtin::cantor3(), builtin::cantor3({0.2, 0.8}));
  EXPECT_TRUE(p.all_similarities());
  for (const auto& m : p.maps()) EXPECT_NEAR(m.upper_lip(), 1.0 / 3.0, 1e-15);
}

TEST(RefineIfs, EmptyWitnessDepthOne) {
  const IFSystem b = builtin::binary({0.3, 0.7});
  const IFSystem r = refine_ifs(b, Word(2), 1);
  ASSERT_EQ(r.size(), 2u);
  for (double x : {0.0, 0.4, 1.0}) {
    EXPECT_DOUBLE_EQ(r.map(0)({x})[0], b.map(0)({x})[0]);
    EXPECT_DOUBLE_EQ(r.map(1)({x})[0], b.map(1)({x})[0]);
  }
  EXPECT_NEAR((*r.probs())[0], 0.3, 1e-15);
}

TEST(RefineIfs, BinaryWithWitnessOne) {
  const IFSystem r = refine_ifs(builtin::binary(), Word::parse(2, "1"), 1, true);
  EXPECT_DOUBLE_EQ(r.map(0)({1.0})[0], 0.25);
  EXPECT_DOUBLE_EQ(r.map(1)({0.0})[0], 0.5);
  EXPECT_DOUBLE_EQ(r.map(1)({1.0})[0], 0.75);
  EXPECT_EQ(r.declared_separation(), Separation::ssc);
}

TEST(RefineIfs, ConstantsMultiply) {
  const IFSystem pc = builtin::perturbed_cantor({0.4, 0.6});
  const IFSystem r = refine_ifs(pc, Word::parse(2, "21"), 2);
  ASSERT_EQ(r.size(), 4u);
  const auto words = all_words(2, 2);
  for (std::size_t i = 0; i < 4; ++i) {
    const Word full = words[i].concat(Word::parse(2, "21"));
    EXPECT_NEAR(r.map(i).upper_lip(), word_product(full, pc.upper_lips()), 1e-12);
    EXPECT_NEAR(r.map(i).lower_lip(), word_product(full, pc.lower_lips()), 1e-12);
    EXPECT_NEAR(r.map(i)({0.3})[0], apply_word(pc, full, {0.3})[0], 1e-15);
  }
  EXPECT_THROW(refine_ifs(IFSystem(builtin::binary().maps()), Word(2), 1), Error);
  EXPECT_THROW(refine_ifs(pc, Word(2), 40, false, 1000), Error);
}

TEST(IntervalSeparation, Examples) {
  EXPECT_EQ(check_interval_separation(builtin::cantor3()), IntervalSeparation::ssc);
  EXPECT_EQ(check_interval_separation(builtin::binary()), IntervalSeparation::osc_touching);
  EXPECT_EQ(check_interval_separation(three_map()), IntervalSeparation::overlapping);
  try {
    check_interval_separation(builtin::perturbed_cantor());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unsupported_input);
  }
}
