#include "fcatraffic/lattice.hpp"

#include <algorithm>

namespace fca {

HaltSet::HaltSet(std::vector<Cell> cells) : cells_(std::move(cells)) {
  std::sort(cells_.begin(), cells_.end());
  cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
}

bool HaltSet::contains(Cell cell) const noexcept {
  return std::binary_search(cells_.begin(), cells_.end(), cell);
}

Cell HaltSet::nearest_ahead(Cell x) const noexcept {
  auto it = std::upper_bound(cells_.begin(), cells_.end(), x);
  return it == cells_.end() ? std::numeric_limits<Cell>::max() : *it;
}

bool SignalSchedule::is_red(long t) const noexcept {
  long phase = (t - green_start) % cycle;
  if (phase < 0) phase += cycle;
  return phase >= green_duration;
}

SignalSchedule make_schedule(Cell halt_cell, long cycle, long green_start, long green_duration) {
  if (!(green_duration > 0 && green_duration < cycle)) {
    throw Error(ErrorKind::InvalidSchedule, "signal requires 0 < green duration < cycle");
  }
  if (green_start < 0 || green_start >= cycle) {
    throw Error(ErrorKind::InvalidSchedule, "signal requires 0 <= green start < cycle");
  }
  return SignalSchedule{halt_cell, cycle, green_start, green_duration};
}

HaltSet active_halt_cells(std::span<const SignalSchedule> schedules, long t) {
  std::vector<Cell> cells;
  for (const auto& s : schedules) {
    if (s.is_red(t)) cells.push_back(s.halt_cell);
  }
  return HaltSet(std::move(cells));
}

namespace {

int clamp_gap(Cell free_cells) {
  return free_cells >= kOpenGap ? kOpenGap : static_cast<int>(free_cells);
}

Cell leader_position(const Channel& channel, std::size_t i) {
  if (i > 0) return channel.positions[i - 1];
  if (channel.ring_cells > 0) return channel.positions.back() + channel.ring_cells;
  return std::numeric_limits<Cell>::max();
}

}  // namespace

int gap_ahead(const Channel& channel, std::size_t i, const HaltSet& halt) {
  const Cell x = channel.positions[i];
  const Cell obstacle = std::min(leader_position(channel, i), halt.nearest_ahead(x));
  if (obstacle == std::numeric_limits<Cell>::max()) return kOpenGap;
  return clamp_gap(obstacle - x - 1);
}

void compute_gaps(const Channel& channel, const HaltSet& halt, std::vector<int>& gaps) {
  const std::size_t n = channel.size();
  gaps.resize(n);
  if (halt.empty()) {
    for (std::size_t i = 0; i < n; ++i) {
      const Cell lead = leader_position(channel, i);
      gaps[i] = lead == std::numeric_limits<Cell>::max()
                    ? kOpenGap
                    : clamp_gap(lead - channel.positions[i] - 1);
    }
    return;
  }
  for (std::size_t i = 0; i < n; ++i) gaps[i] = gap_ahead(channel, i, halt);
}

Channel make_channel(std::vector<Cell> positions, const HaltSet& halt, Cell ring_cells) {
  Channel channel;
  channel.positions = std::move(positions);
  channel.ring_cells = ring_cells;
  channel.velocities.assign(channel.size(), 0);
  check_ordering(channel);
  compute_gaps(channel, halt, channel.prev_gaps);
  return channel;
}

void check_ordering(const Channel& channel) {
  const auto& x = channel.positions;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x[i] >= x[i - 1]) {
      throw Error(ErrorKind::CollisionDetected,
                  "vehicles " + std::to_string(i - 1) + " and " + std::to_string(i) +
                      " out of order at cells " + std::to_string(x[i - 1]) + ", " +
                      std::to_string(x[i]));
    }
  }
  if (channel.ring_cells > 0 && !x.empty() && x.front() - x.back() >= channel.ring_cells) {
    throw Error(ErrorKind::CollisionDetected, "vehicles overlap on the ring");
  }
}

std::size_t count_crossings(std::span<const Cell> before, std::span<const Cell> after, Cell line) {
  std::size_t crossed = 0;
  for (std::size_t i = 0; i < before.size(); ++i) {
    if (before[i] <= line && after[i] > line) ++crossed;
  }
  return crossed;
}

}  // namespace fca
