#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "pseudospec/geometry.h"
#include "pseudospec/search.h"
#include "support.h"

namespace pseudospec {
namespace {

const std::vector<Point> kSquare = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};

TEST(SimplexWeights, Validation) {
  EXPECT_NO_THROW(SimplexWeights({0.25, 0.75}));
  EXPECT_THROW(SimplexWeights({}), std::invalid_argument);
  EXPECT_THROW(SimplexWeights({-0.1, 1.1}), std::invalid_argument);
  EXPECT_THROW(SimplexWeights({0.5, 0.4}), std::invalid_argument);
}

TEST(Caratheodory, ExampleCentroid) {
  const std::vector<Point> pts = {{0, 1, 0}, {-1, 0, 0}, {0, 0, -1}, {-0.5, 0.5, -0.5}};
  const Point c = caratheodory_combine(pts, SimplexWeights({0.25, 0.25, 0.25, 0.25}));
  EXPECT_NEAR(c[0], -0.375, 1e-15);
  EXPECT_NEAR(c[1], 0.375, 1e-15);
  EXPECT_NEAR(c[2], -0.375, 1e-15);
  EXPECT_THROW(caratheodory_combine(pts, SimplexWeights({0.5, 0.5})), std::invalid_argument);
}

TEST(HullMembership, TriangleCentroidInside) {
  const std::vector<Point> tri = {{0, 0}, {1, 0}, {0, 1}};
  const auto rep = hull_membership(std::vector<double>{1.0 / 3, 1.0 / 3}, tri, 1e-12);
  ASSERT_TRUE(rep.inside);
  ASSERT_EQ(rep.weights.size(), 3u);
  double sum = 0.0;
  for (double w : rep.weights) {
    EXPECT_GE(w, 0.0);
    EXPECT_NEAR(w, 1.0 / 3, 1e-12);
    sum += w;
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(HullMembership, OutsideGivesSeparator) {
  const Point x = {2.0, 2.0};
  const auto rep = hull_membership(x, kSquare, 1e-12);
  ASSERT_FALSE(rep.inside);
  ASSERT_EQ(rep.separator.size(), 2u);
  EXPECT_NEAR(rep.separator[0], 1.0 / std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(rep.separator[1], 1.0 / std::sqrt(2.0), 1e-9);
  const double sx = rep.separator[0] * x[0] + rep.separator[1] * x[1];
  for (const auto& p : kSquare) EXPECT_GT(sx, rep.separator[0] * p[0] + rep.separator[1] * p[1]);
  EXPECT_GT(rep.infeasibility, 0.0);
}

TEST(HullMembership, WeightsReproducePoint) {
  std::mt19937_64 rng(21);
  const auto pts = testing::uniform_samples(rng, 3, 12, -1.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> w(pts.size());
    double s = 0.0;
    for (auto& v : w) s += v = u(rng);
    for (auto& v : w) v /= s;
    Point x(3, 0.0);
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (int d = 0; d < 3; ++d) x[d] += w[i] * pts[i][d];
    const auto rep = hull_membership(x, pts, 1e-10);
    ASSERT_TRUE(rep.inside);
    const Point back = caratheodory_combine(pts, SimplexWeights(rep.weights));
    for (int d = 0; d < 3; ++d) EXPECT_NEAR(back[d], x[d], 1e-9);
  }
}

TEST(DistanceToHull, PointCases) {
  EXPECT_NEAR(distance_to_hull(std::vector<double>{2.0, 2.0}, kSquare), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(distance_to_hull(std::vector<double>{0.5, -3.0}, kSquare), 3.0, 1e-12);
  EXPECT_EQ(distance_to_hull(std::vector<double>{0.5, 0.5}, kSquare), 0.0);
}

TEST(HullDistance, DilatedSquare) {
  std::vector<Point> big;
  for (const auto& p : kSquare) big.push_back({2 * p[0], 2 * p[1]});
  EXPECT_NEAR(hull_distance(kSquare, big), std::sqrt(2.0), 1e-12);
  EXPECT_EQ(hull_distance(kSquare, kSquare), 0.0);
}

TEST(HullDistance, SymmetricAndMonotone) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 10; ++t) {
    const auto a = testing::uniform_samples(rng, 2, 8, -1.0, 1.0);
    auto b = testing::uniform_samples(rng, 2, 6, -2.0, 2.0);
    const double d = hull_distance(a, b);
    EXPECT_NEAR(d, hull_distance(b, a), 1e-12);
    EXPECT_GE(d, 0.0);
    // Points of b's hull added to b cannot change conv(b).
    Point mid = {(b[0][0] + b[1][0]) / 2, (b[0][1] + b[1][1]) / 2};
    b.push_back(mid);
    EXPECT_NEAR(hull_distance(a, b), d, 1e-9);
    // One-sided distance from a to a larger hull can only shrink.
    std::vector<Point> bigger = b;
    bigger.push_back({5.0, 5.0});
    double before = 0.0, after = 0.0;
    for (const auto& p : a) {
      before = std::max(before, distance_to_hull(p, b));
      after = std::max(after, distance_to_hull(p, bigger));
    }
    EXPECT_LE(after, before + 1e-12);
  }
}

TEST(HullMembership, CircleRegionInsideRankOneHull) {
  const MatrixPencil pencil = example1_pencil();
  const RankOneLocus locus =
      sample_rank_one_boundary(pencil, std::vector<double>{0.5, 0.0}, 200, 1e-9);
  ASSERT_EQ(locus.points.size(), 200u);
  std::mt19937_64 rng(17);
  std::vector<Point> region;
  for (const auto& p : testing::uniform_samples(rng, 2, 4000, -0.5, 1.5)) {
    if (region.size() < 500 && p[0] * (1 - p[0]) - p[1] * p[1] >= 0.0) region.push_back(p);
  }
  ASSERT_EQ(region.size(), 500u);
  for (const auto& p : region) EXPECT_TRUE(hull_membership(p, locus.points, 1e-3).inside);
}

TEST(HullDistance, CircleRegionAgainstRankOneSamples) {
  const RankOneLocus locus =
      sample_rank_one_boundary(example1_pencil(), std::vector<double>{0.5, 0.0}, 200, 1e-9);
  std::mt19937_64 rng(18);
  const auto region = testing::example1_region_samples(rng, 2000);
  EXPECT_LE(hull_distance(region, locus.points), 1e-3);
}

}  // namespace
}  // namespace pseudospec
