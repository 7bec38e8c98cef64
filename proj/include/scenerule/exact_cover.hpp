#pragma once

// Exact cover by Algorithm X over a dense row-set representation.
//
// Column choice is the live column with the fewest live rows (lowest index
// on ties); rows of the chosen column are tried in ascending row order.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "scenerule/error.hpp"

namespace scenerule {

template <class Key>
struct CoverRow {
  Key key;
  std::vector<std::size_t> elements;
};

template <class Key>
struct CoverInstance {
  std::size_t universe_size = 0;
  std::vector<CoverRow<Key>> rows;
};

template <class Key>
struct CoverSolution {
  std::vector<Key> keys;

  friend bool operator==(const CoverSolution&, const CoverSolution&) = default;
  friend auto operator<=>(const CoverSolution& a, const CoverSolution& b) { return a.keys <=> b.keys; }
};

template <class Key>
void validate_cover_instance(const CoverInstance<Key>& inst) {
  if (inst.universe_size == 0) throw Error(Stage::cover, "universe must be non-empty");
  for (std::size_t r = 0; r < inst.rows.size(); ++r) {
    if (inst.rows[r].elements.empty())
      throw Error(Stage::cover, "row " + std::to_string(r) + " is empty");
    for (auto e : inst.rows[r].elements)
      if (e >= inst.universe_size)
        throw Error(Stage::cover, "row " + std::to_string(r) + " has element " +
                                      std::to_string(e) + " outside the universe");
  }
}

/// Sorts keys inside each solution and the solutions themselves.
template <class Key>
void canonicalize(std::vector<CoverSolution<Key>>& solutions) {
  for (auto& s : solutions) std::sort(s.keys.begin(), s.keys.end());
  std::sort(solutions.begin(), solutions.end());
}

namespace detail {

template <class Key>
class AlgorithmX {
 public:
  explicit AlgorithmX(const CoverInstance<Key>& inst) : inst_(inst) {
    const std::size_t n = inst.universe_size;
    rows_.reserve(inst.rows.size());
    for (const auto& row : inst.rows) {
      auto e = row.elements;
      std::sort(e.begin(), e.end());
      e.erase(std::unique(e.begin(), e.end()), e.end());
      rows_.push_back(std::move(e));
    }
    column_rows_.assign(n, {});
    for (std::size_t r = 0; r < rows_.size(); ++r)
      for (auto c : rows_[r]) column_rows_[c].push_back(r);
    column_live_.assign(n, true);
    row_live_.assign(rows_.size(), true);
    live_columns_ = n;
  }

  void run(const std::function<void(const std::vector<std::size_t>&)>& emit) {
    emit_ = &emit;
    search();
  }

 private:
  void search() {
    if (live_columns_ == 0) {
      (*emit_)(partial_);
      return;
    }
    std::size_t best_col = 0;
    std::size_t best_count = static_cast<std::size_t>(-1);
    for (std::size_t c = 0; c < column_live_.size(); ++c) {
      if (!column_live_[c]) continue;
      std::size_t count = 0;
      for (auto r : column_rows_[c]) count += row_live_[r] ? 1 : 0;
      if (count < best_count) {
        best_count = count;
        best_col = c;
      }
    }
    if (best_count == 0) return;

    const auto candidates = column_rows_[best_col];
    for (auto r : candidates) {
      if (!row_live_[r]) continue;
      partial_.push_back(r);
      std::vector<std::size_t> removed_rows;
      for (auto c : rows_[r]) {
        column_live_[c] = false;
        --live_columns_;
        for (auto other : column_rows_[c]) {
          if (row_live_[other]) {
            row_live_[other] = false;
            removed_rows.push_back(other);
          }
        }
      }
      search();
      for (auto other : removed_rows) row_live_[other] = true;
      for (auto c : rows_[r]) {
        column_live_[c] = true;
        ++live_columns_;
      }
      partial_.pop_back();
    }
  }

  const CoverInstance<Key>& inst_;
  std::vector<std::vector<std::size_t>> rows_;
  std::vector<std::vector<std::size_t>> column_rows_;
  std::vector<bool> column_live_;
  std::vector<bool> row_live_;
  std::size_t live_columns_ = 0;
  std::vector<std::size_t> partial_;
  const std::function<void(const std::vector<std::size_t>&)>* emit_ = nullptr;
};

}  // namespace detail

/// Every exact cover exactly once, canonicalized.
template <class Key>
std::vector<CoverSolution<Key>> solve_all(const CoverInstance<Key>& inst) {
  validate_cover_instance(inst);
  std::vector<CoverSolution<Key>> out;
  detail::AlgorithmX<Key> solver(inst);
  solver.run([&](const std::vector<std::size_t>& rows) {
    CoverSolution<Key> s;
    s.keys.reserve(rows.size());
    for (auto r : rows) s.keys.push_back(inst.rows[r].key);
    out.push_back(std::move(s));
  });
  canonicalize(out);
  return out;
}

}  // namespace scenerule
