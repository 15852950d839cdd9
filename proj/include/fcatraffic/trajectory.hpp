#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fcatraffic/lattice.hpp"

namespace fca {

/// Per-step record of one or more channels, snapshots t = 0..steps.
///
/// Fuzzy runs store five channels in the order L, H, 1, 2, 3; NaSch and
/// single-rule runs store one.
struct TrajectoryLog {
  std::string model;
  std::vector<std::string> channels;
  std::size_t vehicles = 0;
  long steps = 0;
  std::size_t snapshots = 0;
  std::vector<Cell> positions;  // [(t * channels + c) * vehicles + i]
  std::vector<int> velocities;
  std::uint64_t op_count = 0;
  std::map<std::string, std::string> metadata;

  std::size_t channel_count() const noexcept { return channels.size(); }
  std::size_t snapshot_count() const noexcept { return snapshots; }

  std::span<const Cell> positions_at(long t, std::size_t channel) const;
  std::span<const int> velocities_at(long t, std::size_t channel) const;

  /// Appends one snapshot; channels must be passed in log order.
  void record(std::span<const Channel* const> snapshot);
};

inline constexpr std::size_t kChannelLow = 0;
inline constexpr std::size_t kChannelHigh = 1;
/// Log index of fuzzy component m (1..3).
constexpr std::size_t component_channel(int m) { return static_cast<std::size_t>(1 + m); }

/// Reduces one channel of one run to sample values. observe() sees every
/// snapshot t = 0..T in order.
class RunProbe {
 public:
  virtual ~RunProbe() = default;
  virtual void observe(long t, const Channel& channel) = 0;
  virtual std::vector<double> samples() const = 0;
};

using ProbeFactory = std::function<std::unique_ptr<RunProbe>()>;

/// Feeds the snapshots of one logged channel to a probe.
void replay(const TrajectoryLog& log, std::size_t channel, RunProbe& probe);

}  // namespace fca
