#pragma once

// Test-only reference implementations. They share no code with the library's
// update path: gaps come from scanning an occupancy set cell by cell and each
// step is applied from a frozen copy of the previous configuration.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <vector>

namespace oracle {

using Cell = std::int64_t;

/// Free cells in front of x, found by walking forward until an occupied cell
/// or a blocked (red) cell. `limit` caps the walk for the open road.
inline int free_cells_ahead(const std::set<Cell>& occupied, const std::set<Cell>& blocked, Cell x,
                            int limit = 64) {
  int free = 0;
  for (Cell c = x + 1; free < limit; ++c) {
    if (occupied.count(c) || blocked.count(c)) break;
    ++free;
  }
  return free;
}

inline constexpr int kR1[4][6] = {
    {0, -1, 1, 1, 1, 1}, {0, 1, 1, 1, 2, 2}, {0, 1, 1, 1, 2, 2}, {0, 1, 1, 1, 2, 2}};
inline constexpr int kR2[4][6] = {
    {0, -1, 1, 2, 1, 1}, {0, 1, 1, 2, 2, 2}, {0, 1, 1, 2, 3, 2}, {0, 1, 1, 2, 3, 2}};

/// Deterministic table rule road, written straight from the update equations.
struct TableRoad {
  std::vector<Cell> x;
  std::vector<int> v;
  std::vector<int> prev_gap;

  TableRoad(std::vector<Cell> positions, const std::set<Cell>& blocked) : x(std::move(positions)) {
    v.assign(x.size(), 0);
    std::set<Cell> occ(x.begin(), x.end());
    for (Cell xi : x) prev_gap.push_back(free_cells_ahead(occ, blocked, xi));
  }

  void step(const int (*table)[6], const std::set<Cell>& blocked) {
    const std::set<Cell> occ(x.begin(), x.end());
    std::vector<int> gaps;
    for (Cell xi : x) gaps.push_back(free_cells_ahead(occ, blocked, xi));
    for (std::size_t i = 0; i < x.size(); ++i) {
      const int k = std::min(gaps[i], 5);
      const int u = table[v[i]][k];
      v[i] = u >= 0 ? u : std::min(prev_gap[i], gaps[i]);
    }
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += v[i];
    prev_gap = gaps;
  }
};

/// NaSch road driven by an explicit per-vehicle deceleration decision.
struct NaschRoad {
  std::vector<Cell> x;
  std::vector<int> v;
  int v_max;

  NaschRoad(std::vector<Cell> positions, int vmax) : x(std::move(positions)), v_max(vmax) {
    v.assign(x.size(), 0);
  }

  void step(const std::vector<bool>& decelerate, const std::set<Cell>& blocked) {
    const std::set<Cell> occ(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const int gap = free_cells_ahead(occ, blocked, x[i]);
      int nv = std::min({v[i] + 1, gap, v_max});
      if (decelerate[i]) nv = std::max(0, nv - 1);
      v[i] = nv;
    }
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += v[i];
  }
};

/// Crossings of a line during a pure-rule saturated queue discharge with
/// red only at t = 0: queue in cells 1..queue, stop cell = queue.
inline int saturated_crossings(const int (*table)[6], int queue, long steps) {
  std::vector<Cell> x;
  for (Cell c = queue; c >= 1; --c) x.push_back(c);
  const Cell stop = queue;
  std::set<Cell> red = {stop + 1};
  TableRoad road(x, red);
  int crossed = 0;
  for (long t = 0; t < steps; ++t) {
    const auto before = road.x;
    road.step(table, t == 0 ? red : std::set<Cell>{});
    for (std::size_t i = 0; i < before.size(); ++i) {
      if (before[i] <= stop && road.x[i] > stop) ++crossed;
    }
  }
  return crossed;
}

}  // namespace oracle
