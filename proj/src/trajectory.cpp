#include "fcatraffic/trajectory.hpp"

#include "fcatraffic/error.hpp"

namespace fca {

std::span<const Cell> TrajectoryLog::positions_at(long t, std::size_t channel) const {
  if (t < 0 || static_cast<std::size_t>(t) >= snapshots || channel >= channel_count()) {
    throw Error(ErrorKind::OutOfRange, "snapshot (" + std::to_string(t) + ", " +
                                           std::to_string(channel) + ") not in log");
  }
  const std::size_t offset = (static_cast<std::size_t>(t) * channel_count() + channel) * vehicles;
  return std::span<const Cell>(positions).subspan(offset, vehicles);
}

std::span<const int> TrajectoryLog::velocities_at(long t, std::size_t channel) const {
  if (t < 0 || static_cast<std::size_t>(t) >= snapshots || channel >= channel_count()) {
    throw Error(ErrorKind::OutOfRange, "snapshot (" + std::to_string(t) + ", " +
                                           std::to_string(channel) + ") not in log");
  }
  const std::size_t offset = (static_cast<std::size_t>(t) * channel_count() + channel) * vehicles;
  return std::span<const int>(velocities).subspan(offset, vehicles);
}

void TrajectoryLog::record(std::span<const Channel* const> snapshot) {
  if (snapshot.size() != channel_count()) {
    throw Error(ErrorKind::DimensionMismatch, "snapshot channel count differs from log");
  }
  for (const Channel* ch : snapshot) {
    if (ch->size() != vehicles) {
      throw Error(ErrorKind::DimensionMismatch, "snapshot vehicle count differs from log");
    }
    positions.insert(positions.end(), ch->positions.begin(), ch->positions.end());
    velocities.insert(velocities.end(), ch->velocities.begin(), ch->velocities.end());
  }
  ++snapshots;
}

void replay(const TrajectoryLog& log, std::size_t channel, RunProbe& probe) {
  Channel ch;
  for (std::size_t t = 0; t < log.snapshot_count(); ++t) {
    const auto x = log.positions_at(static_cast<long>(t), channel);
    const auto v = log.velocities_at(static_cast<long>(t), channel);
    ch.positions.assign(x.begin(), x.end());
    ch.velocities.assign(v.begin(), v.end());
    probe.observe(static_cast<long>(t), ch);
  }
}

}  // namespace fca
