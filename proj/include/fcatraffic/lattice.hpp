#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fcatraffic/error.hpp"

namespace fca {

using Cell = std::int64_t;

/// Gap reported when nothing blocks a vehicle. Larger than any rule horizon.
inline constexpr int kOpenGap = 1 << 20;

/// One deterministic CA configuration on a single lane.
///
/// Vehicle 0 leads; positions are strictly decreasing. On an open road the
/// axis is unbounded. With ring_cells > 0 the lane is a periodic ring and
/// positions are unwrapped, so vehicle 0 follows vehicle N-1 shifted by one
/// ring length.
struct Channel {
  std::vector<Cell> positions;
  std::vector<int> velocities;
  std::vector<int> prev_gaps;
  Cell ring_cells = 0;

  std::size_t size() const noexcept { return positions.size(); }
  bool empty() const noexcept { return positions.empty(); }

  friend bool operator==(const Channel&, const Channel&) = default;
};

/// Cells in front of which vehicles must stop, sorted ascending.
class HaltSet {
 public:
  HaltSet() = default;
  explicit HaltSet(std::vector<Cell> cells);

  std::span<const Cell> cells() const noexcept { return cells_; }
  bool empty() const noexcept { return cells_.empty(); }
  bool contains(Cell cell) const noexcept;

  /// Smallest halt cell strictly greater than x, or max() when none.
  Cell nearest_ahead(Cell x) const noexcept;

  friend bool operator==(const HaltSet&, const HaltSet&) = default;

 private:
  std::vector<Cell> cells_;
};

/// Fixed-time signal guarding one halt cell. Yellow counts as green.
struct SignalSchedule {
  Cell halt_cell = 0;
  long cycle = 60;
  long green_start = 0;
  long green_duration = 30;

  bool is_red(long t) const noexcept;

  friend bool operator==(const SignalSchedule&, const SignalSchedule&) = default;
};

/// Throws Error(InvalidSchedule) unless 0 < green_duration < cycle and 0 <= green_start < cycle.
SignalSchedule make_schedule(Cell halt_cell, long cycle, long green_start, long green_duration);

HaltSet active_halt_cells(std::span<const SignalSchedule> schedules, long t);

/// Free cells between vehicle i and the nearer of its leader and the next halt cell.
int gap_ahead(const Channel& channel, std::size_t i, const HaltSet& halt);

/// Gaps for every vehicle, read from the current configuration only.
void compute_gaps(const Channel& channel, const HaltSet& halt, std::vector<int>& gaps);

/// Stopped vehicles at the given positions; prev_gaps start at the initial gaps.
Channel make_channel(std::vector<Cell> positions, const HaltSet& halt = {}, Cell ring_cells = 0);

/// Throws Error(CollisionDetected) if positions are not strictly decreasing
/// (or, on a ring, span a full lap).
void check_ordering(const Channel& channel);

/// Synchronous update. All gaps are computed before any vehicle moves; the
/// velocity function is then called once per vehicle in index order as
/// velocity_fn(i, v_prev, gap, prev_gap). Velocities above the gap raise
/// CollisionDetected. Returns the number of velocity_fn evaluations.
template <typename VelocityFn>
std::size_t advance_channel_in_place(Channel& channel, VelocityFn&& velocity_fn,
                                     const HaltSet& halt, std::vector<int>& gaps) {
  const std::size_t n = channel.size();
  compute_gaps(channel, halt, gaps);
  for (std::size_t i = 0; i < n; ++i) {
    const int gap = gaps[i];
    const int v = velocity_fn(i, channel.velocities[i], gap, channel.prev_gaps[i]);
    if (v < 0 || v > gap) {
      throw Error(ErrorKind::CollisionDetected,
                  "vehicle " + std::to_string(i) + " velocity " + std::to_string(v) +
                      " exceeds gap " + std::to_string(gap));
    }
    channel.velocities[i] = v;
  }
  for (std::size_t i = 0; i < n; ++i) {
    channel.positions[i] += channel.velocities[i];
    channel.prev_gaps[i] = gaps[i];
  }
  return n;
}

template <typename VelocityFn>
Channel advance_channel(Channel channel, VelocityFn&& velocity_fn, const HaltSet& halt) {
  std::vector<int> gaps;
  advance_channel_in_place(channel, std::forward<VelocityFn>(velocity_fn), halt, gaps);
  return channel;
}

/// Number of vehicles that move from <= line to > line between two snapshots
/// of the same channel.
std::size_t count_crossings(std::span<const Cell> before, std::span<const Cell> after, Cell line);

}  // namespace fca
