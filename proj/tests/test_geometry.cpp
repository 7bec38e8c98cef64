#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "scenerule/geometry.hpp"

using namespace scenerule;

namespace {

const BoundingBox kReticulum0{161, 12, 165, 167};
const BoundingBox kDagger1{257, 68, 109, 281};
const BoundingBox kCorn2{86, 323, 162, 129};
const BoundingBox kCorn3{107, 337, 181, 162};
const BoundingBox kCorn4{3, 506, 144, 23};

BoundingBox random_box(std::mt19937& rng, int span = 40, int max_side = 15) {
  std::uniform_int_distribution<int> pos(0, span);
  std::uniform_int_distribution<int> side(1, max_side);
  return {double(pos(rng)), double(pos(rng)), double(side(rng)), double(side(rng))};
}

}  // namespace

TEST(Distance, Examples) {
  EXPECT_DOUBLE_EQ(distance({0, 0, 10, 10}, {14, 0, 10, 10}), 4.0);
  EXPECT_DOUBLE_EQ(distance({0, 0, 10, 10}, {10, 0, 10, 10}), 0.0);
  EXPECT_DOUBLE_EQ(distance({0, 0, 10, 10}, {13, 14, 5, 5}), 5.0);
  EXPECT_DOUBLE_EQ(oracle::sampled_distance({0, 0, 10, 10}, {13, 14, 5, 5}), 5.0);
}

TEST(Distance, AgreesWithSamplingOracle) {
  std::mt19937 rng(7);
  for (int i = 0; i < 100; ++i) {
    const auto a = random_box(rng);
    const auto b = random_box(rng);
    EXPECT_NEAR(distance(a, b), oracle::sampled_distance(a, b), 1e-6);
  }
}

TEST(Merge, Examples) {
  EXPECT_EQ(merge({0, 0, 2, 2}, {4, 0, 2, 2}), (BoundingBox{0, 0, 6, 2}));
  EXPECT_EQ(merge({0, 0, 10, 10}, {2, 2, 3, 3}), (BoundingBox{0, 0, 10, 10}));
  EXPECT_EQ(merge(kCorn2, kCorn4), (BoundingBox{3, 323, 245, 206}));
}

TEST(Contains, Examples) {
  EXPECT_TRUE(contains({0, 0, 10, 10}, {2, 2, 3, 3}));
  EXPECT_TRUE(contains({0, 0, 10, 10}, {0, 0, 10, 10}));
  EXPECT_FALSE(contains(kCorn3, kCorn2));
}

TEST(Disjoint, Examples) {
  EXPECT_TRUE(disjoint({0, 0, 10, 10}, {20, 0, 5, 5}));
  EXPECT_FALSE(disjoint({0, 0, 10, 10}, {10, 0, 5, 5}));
  EXPECT_FALSE(disjoint({0, 0, 10, 10}, {5, 5, 10, 10}));
}

TEST(Overlap, Examples) {
  EXPECT_TRUE(overlap({0, 0, 10, 10}, {5, 5, 10, 10}));
  EXPECT_FALSE(overlap({0, 0, 10, 10}, {2, 2, 3, 3}));
  EXPECT_TRUE(overlap(kReticulum0, kDagger1));
}

TEST(Horizontal, Examples) {
  EXPECT_TRUE(horizontal({0, 0, 10, 20}, {11, 0, 10, 20}, HorizontalPos::left));
  EXPECT_FALSE(horizontal({0, 0, 10, 20}, {11, 0, 10, 20}, HorizontalPos::right));
  EXPECT_FALSE(horizontal({0, 0, 10, 10}, {0, 20, 10, 10}));
}

TEST(Vertical, Examples) {
  EXPECT_TRUE(vertical({0, 0, 10, 10}, {0, 20, 10, 10}, VerticalPos::up));
  EXPECT_TRUE(vertical(kCorn2, kCorn3));
  EXPECT_FALSE(vertical({0, 0, 10, 10}, {20, 0, 10, 10}, VerticalPos::up));
}

TEST(Diagonal, Examples) {
  EXPECT_TRUE(diagonal({20, 0, 5, 5}, {0, 20, 5, 5}, DiagonalPos::ne));
  EXPECT_FALSE(diagonal({20, 0, 5, 5}, {0, 20, 5, 5}, DiagonalPos::sw));
  for (auto p : {DiagonalPos::ne, DiagonalPos::nw, DiagonalPos::se, DiagonalPos::sw})
    EXPECT_FALSE(diagonal({0, 0, 10, 20}, {11, 0, 10, 20}, p));
}

TEST(AbsNear, Examples) {
  EXPECT_TRUE(abs_near({0, 0, 10, 10}, {14, 0, 10, 10}, 10.0));
  EXPECT_FALSE(abs_near({0, 0, 10, 10}, {14, 0, 10, 10}, 4.0));
  EXPECT_TRUE(abs_near({0, 0, 10, 10}, {5, 5, 10, 10}, 0.1));
  EXPECT_THROW(abs_near({0, 0, 1, 1}, {0, 0, 1, 1}, -1.0), Error);
}

TEST(RelNear, Examples) {
  const BoundingBox a{0, 0, 2, 2}, b{4, 0, 2, 2};
  EXPECT_NEAR(oracle::rel_ratio(a, b), 2.0 / std::sqrt(40.0), 1e-12);
  EXPECT_NEAR(rel_distance(a, b), oracle::rel_ratio(a, b), 1e-12);
  EXPECT_TRUE(rel_near(a, b, 0.32));
  EXPECT_FALSE(rel_near(a, b, 0.31));
  for (double f : {0.5, 3.0, 17.25}) {
    EXPECT_TRUE(rel_near(a.scaled(f), b.scaled(f), 0.32));
    EXPECT_FALSE(rel_near(a.scaled(f), b.scaled(f), 0.31));
  }
  EXPECT_THROW(rel_near(a, b, 1.5), Error);
}

TEST(Group, Examples) {
  const std::vector<BoundingBox> chain{{0, 0, 10, 10}, {12, 0, 10, 10}, {24, 0, 10, 10}};
  EXPECT_TRUE(abs_group(chain, 5));
  const std::vector<BoundingBox> apart{{0, 0, 10, 10}, {100, 0, 10, 10}};
  EXPECT_FALSE(abs_group(apart, 5));
  const std::vector<BoundingBox> corns{kCorn2, kCorn3, kCorn4};
  EXPECT_TRUE(rel_group(corns, 0.5));
  EXPECT_NEAR(rel_distance(kCorn2, kCorn4), 54.0 / std::sqrt(245.0 * 245 + 206.0 * 206), 1e-12);
  EXPECT_NEAR(oracle::rel_ratio(kCorn2, kCorn4), 54.0 / std::sqrt(245.0 * 245 + 206.0 * 206), 1e-12);
}

TEST(Group, PermutationInvariant) {
  std::mt19937 rng(11);
  for (int i = 0; i < 200; ++i) {
    std::vector<BoundingBox> boxes;
    for (int k = 0; k < 4; ++k) boxes.push_back(random_box(rng, 60));
    const bool expected = abs_group(boxes, 6.0);
    std::shuffle(boxes.begin(), boxes.end(), rng);
    EXPECT_EQ(abs_group(boxes, 6.0), expected);
  }
}

TEST(Chains, VerticalAndHorizontal) {
  const std::vector<BoundingBox> stack{{0, 50, 30, 20}, {0, 0, 30, 20}, {5, 25, 30, 20}};
  EXPECT_TRUE(vertical_chain(stack));
  EXPECT_FALSE(horizontal_chain(stack));
  const std::vector<BoundingBox> row{{0, 0, 30, 20}, {35, 2, 30, 20}};
  EXPECT_TRUE(horizontal_chain(row));
  EXPECT_FALSE(vertical_chain(row));
}

TEST(GeometryProperties, RandomPairs) {
  std::mt19937 rng(3);
  for (int i = 0; i < 2000; ++i) {
    const auto a = random_box(rng);
    const auto b = random_box(rng);
    EXPECT_DOUBLE_EQ(distance(a, b), distance(b, a));
    EXPECT_EQ(disjoint(a, b), disjoint(b, a));
    EXPECT_EQ(overlap(a, b), overlap(b, a));
    EXPECT_EQ(abs_near(a, b, 5.0), abs_near(b, a, 5.0));
    EXPECT_EQ(rel_near(a, b, 0.2), rel_near(b, a, 0.2));
    EXPECT_EQ(distance(a, b) == 0.0, !disjoint(a, b));
    EXPECT_EQ(contains(a, b) && contains(b, a), a == b);
    if (overlap(a, b)) EXPECT_TRUE(!contains(a, b) && !contains(b, a) && !disjoint(a, b));
    EXPECT_FALSE(disjoint(a, b) && overlap(a, b));
    if (diagonal(a, b)) EXPECT_TRUE(!horizontal(a, b) && !vertical(a, b));
  }
}

TEST(GeometryProperties, RelNearScaleInvariance) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> th(0.0, 1.0);
  std::uniform_real_distribution<double> factor(0.1, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_box(rng);
    const auto b = random_box(rng);
    const double t = th(rng);
    const double f = factor(rng);
    const double r = rel_distance(a, b);
    // Skip ratios within rounding of the threshold.
    if (std::abs(r - t) < 1e-9) continue;
    EXPECT_EQ(rel_near(a.scaled(f), b.scaled(f), t), rel_near(a, b, t));
  }
}
