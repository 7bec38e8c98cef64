#pragma once

// Brute-force exact cover: tries every subset of rows. Reference for
// differential tests of solve_all.

#include <cstdint>
#include <vector>

#include "scenerule/exact_cover.hpp"

namespace scenerule {

inline constexpr std::size_t kOracleMaxRows = 20;

template <class Key>
std::vector<CoverSolution<Key>> brute_force_cover(const CoverInstance<Key>& inst) {
  validate_cover_instance(inst);
  if (inst.rows.size() > kOracleMaxRows)
    throw Error(Stage::cover, "instance too large for the brute-force oracle (" +
                                  std::to_string(inst.rows.size()) + " rows)");

  const std::uint32_t subsets = std::uint32_t{1} << inst.rows.size();
  std::vector<CoverSolution<Key>> out;
  std::vector<int> hits(inst.universe_size);
  for (std::uint32_t mask = 0; mask < subsets; ++mask) {
    std::fill(hits.begin(), hits.end(), 0);
    for (std::size_t r = 0; r < inst.rows.size(); ++r) {
      if (!(mask & (std::uint32_t{1} << r))) continue;
      std::vector<bool> in_row(inst.universe_size, false);
      for (auto e : inst.rows[r].elements) in_row[e] = true;
      for (std::size_t e = 0; e < inst.universe_size; ++e) hits[e] += in_row[e] ? 1 : 0;
    }
    bool exact = true;
    for (int h : hits) exact = exact && h == 1;
    if (!exact) continue;
    CoverSolution<Key> s;
    for (std::size_t r = 0; r < inst.rows.size(); ++r)
      if (mask & (std::uint32_t{1} << r)) s.keys.push_back(inst.rows[r].key);
    out.push_back(std::move(s));
  }
  canonicalize(out);
  return out;
}

}  // namespace scenerule
