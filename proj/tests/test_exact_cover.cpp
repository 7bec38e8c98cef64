#include <random>

#include <gtest/gtest.h>

#include "scenerule/exact_cover.hpp"
#include "scenerule/exact_cover_oracle.hpp"

using namespace scenerule;

namespace {

using Inst = CoverInstance<int>;

Inst make(std::size_t n, const std::vector<std::vector<std::size_t>>& rows) {
  Inst inst;
  inst.universe_size = n;
  for (std::size_t r = 0; r < rows.size(); ++r) inst.rows.push_back({static_cast<int>(r), rows[r]});
  return inst;
}

// Universe {1..5} mapped to columns 0..4: five singletons then CS1..CS4.
Inst graph1() {
  return make(5, {{0}, {1}, {2}, {3}, {4}, {0, 1}, {1, 2, 3}, {3, 4}, {1, 2, 3, 4}});
}

Inst random_instance(std::mt19937& rng, std::size_t max_n, std::size_t max_rows) {
  const std::size_t n = 1 + rng() % max_n;
  const std::size_t rows = rng() % (max_rows + 1);
  std::vector<std::vector<std::size_t>> rs;
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<std::size_t> row;
    for (std::size_t c = 0; c < n; ++c)
      if (rng() % 3 == 0) row.push_back(c);
    if (row.empty()) row.push_back(rng() % n);
    rs.push_back(row);
  }
  return make(n, rs);
}

void expect_exact(const Inst& inst, const CoverSolution<int>& s) {
  std::vector<int> hits(inst.universe_size, 0);
  for (int k : s.keys)
    for (auto e : inst.rows[static_cast<std::size_t>(k)].elements) ++hits[e];
  for (int h : hits) EXPECT_EQ(h, 1);
}

}  // namespace

TEST(SolveAll, Identity) {
  auto sols = solve_all(make(3, {{0}, {1}, {2}}));
  ASSERT_EQ(sols.size(), 1u);
  EXPECT_EQ(sols[0].keys, (std::vector<int>{0, 1, 2}));
}

TEST(SolveAll, Graph1HasSixCovers) {
  const auto inst = graph1();
  const auto sols = solve_all(inst);
  EXPECT_EQ(sols.size(), 6u);
  EXPECT_EQ(brute_force_cover(inst), sols);
  // The cover [BS1, BS2, BS3, CS3] is among them.
  EXPECT_NE(std::find(sols.begin(), sols.end(), CoverSolution<int>{{0, 1, 2, 7}}), sols.end());
  for (const auto& s : sols) expect_exact(inst, s);
}

TEST(SolveAll, Uncoverable) {
  EXPECT_TRUE(solve_all(make(2, {{0}})).empty());
  EXPECT_TRUE(brute_force_cover(make(2, {{0}})).empty());
  EXPECT_TRUE(solve_all(make(1, {})).empty());
  EXPECT_TRUE(brute_force_cover(make(1, {})).empty());
}

TEST(SolveAll, BattleTwentyNine) {
  std::vector<std::vector<std::size_t>> rows;
  for (std::size_t i = 0; i < 8; ++i) rows.push_back({i});
  for (std::size_t i = 0; i < 8; i += 2) rows.push_back({i, i + 1});
  rows.push_back({0, 1, 2, 3});
  rows.push_back({2, 3, 4, 5});
  rows.push_back({4, 5, 6, 7});
  const auto inst = make(8, rows);
  EXPECT_EQ(solve_all(inst).size(), 29u);
  EXPECT_EQ(brute_force_cover(inst).size(), 29u);
}

TEST(SolveAll, DuplicateRowsAreDistinctSolutions) {
  // Two rows with the same subset, as for two interpretations of one image.
  const auto sols = solve_all(make(2, {{0}, {1}, {1}, {0, 1}, {0, 1}}));
  EXPECT_EQ(sols.size(), 4u);
}

TEST(SolveAll, Validation) {
  EXPECT_THROW(solve_all(make(0, {})), Error);
  EXPECT_THROW(solve_all(make(2, {{}})), Error);
  EXPECT_THROW(solve_all(make(2, {{2}})), Error);
  std::vector<std::vector<std::size_t>> many(kOracleMaxRows + 1, std::vector<std::size_t>{0});
  EXPECT_THROW(brute_force_cover(make(1, many)), Error);
}

TEST(SolveAll, RandomMatchesOracle) {
  std::mt19937 rng(6);
  const auto inst = make(6, [&] {
    std::vector<std::vector<std::size_t>> rows;
    for (int r = 0; r < 10; ++r) {
      std::vector<std::size_t> row;
      for (std::size_t c = 0; c < 6; ++c)
        if (rng() % 3 == 0) row.push_back(c);
      if (row.empty()) row.push_back(static_cast<std::size_t>(r) % 6);
      rows.push_back(row);
    }
    return rows;
  }());
  EXPECT_EQ(solve_all(inst), brute_force_cover(inst));
}

TEST(ExactCoverProperties, DifferentialFiveHundred) {
  std::mt19937 rng(2024);
  std::size_t mismatches = 0;
  for (int i = 0; i < 500; ++i) {
    const auto inst = random_instance(rng, 8, 14);
    const auto fast = solve_all(inst);
    if (fast != brute_force_cover(inst)) ++mismatches;
    for (const auto& s : fast) expect_exact(inst, s);
  }
  EXPECT_EQ(mismatches, 0u);
}
