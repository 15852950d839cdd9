#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fcatraffic/fuzzy_number.hpp"
#include "fcatraffic/fuzzy_simulator.hpp"
#include "fcatraffic/nasch_simulator.hpp"
#include "fcatraffic/rules.hpp"
#include "fcatraffic/scenario.hpp"
#include "fcatraffic/trajectory.hpp"

namespace fca {

// ---------------------------------------------------------------------------
// Probes

/// Counts stop-line crossings. samples() = {flow in veh/h over the horizon}.
/// With require_queue set, samples() throws Error(QueueExhausted) if nobody
/// was left upstream of the line before the last step.
class CrossingProbe : public RunProbe {
 public:
  CrossingProbe(Cell line, long horizon, bool require_queue = true)
      : line_(line), horizon_(horizon), require_queue_(require_queue) {}

  void observe(long t, const Channel& channel) override;
  std::vector<double> samples() const override;

  std::size_t crossed() const noexcept { return crossed_; }
  std::size_t upstream() const noexcept { return upstream_; }

 private:
  Cell line_;
  long horizon_;
  bool require_queue_;
  std::vector<Cell> previous_;
  std::size_t crossed_ = 0;
  std::size_t upstream_ = 0;
  std::optional<long> emptied_at_;
};

/// First step at which one vehicle is beyond a line. samples() = {steps};
/// throws Error(NeverArrived) if it never gets there.
class ArrivalProbe : public RunProbe {
 public:
  ArrivalProbe(std::size_t vehicle, Cell line) : vehicle_(vehicle), line_(line) {}

  void observe(long t, const Channel& channel) override;
  std::vector<double> samples() const override;
  std::optional<long> arrival() const noexcept { return arrival_; }

 private:
  std::size_t vehicle_;
  Cell line_;
  std::optional<long> arrival_;
};

/// Vehicles at or upstream of a boundary cell, sampled at the given steps
/// (sorted ascending; samples come back in that order).
class CountProbe : public RunProbe {
 public:
  CountProbe(Cell boundary, std::vector<long> times);

  void observe(long t, const Channel& channel) override;
  std::vector<double> samples() const override { return counts_; }

 private:
  Cell boundary_;
  std::vector<long> times_;
  std::vector<double> counts_;
  std::size_t next_ = 0;
};

/// Concatenates the samples of several probes.
class CompositeProbe : public RunProbe {
 public:
  explicit CompositeProbe(std::vector<std::unique_ptr<RunProbe>> parts) : parts_(std::move(parts)) {}

  void observe(long t, const Channel& channel) override;
  std::vector<double> samples() const override;

 private:
  std::vector<std::unique_ptr<RunProbe>> parts_;
};

std::size_t count_upstream(std::span<const Cell> positions, Cell boundary);

// ---------------------------------------------------------------------------
// Saturation flow

/// Crossings of stop_cell over snapshots 0..horizon of one logged channel, in veh/h.
double measure_saturation_flow(const TrajectoryLog& log, std::size_t channel, Cell stop_cell,
                               long horizon);

/// Component flows (m = 1, 2, 3) of a logged fuzzy run.
std::array<double, 3> measure_fuzzy_saturation_flow(const TrajectoryLog& log, Cell stop_cell,
                                                    long horizon);

/// Live saturated-queue run of a single deterministic rule.
double rule_queue_saturation_flow(const RuleTable& rule, long horizon = 3600);

/// Live saturated-queue fuzzy run; component flows in veh/h.
std::array<double, 3> fuzzy_queue_saturation_flow(const Calibration& cal, long horizon = 3600);

/// Saturation flow sample (veh/h) of each run of a saturated-queue NaSch ensemble.
std::vector<double> nasch_saturation_samples(const NaschParams& params, int runs, long horizon,
                                             std::uint64_t master_seed, unsigned threads = 0);

// ---------------------------------------------------------------------------
// Queue discharge

struct DischargeTrace {
  Cell first_cell = 0;  // cell of column 0
  std::size_t width = 0;
  std::vector<std::vector<int>> states;  // [t][cell - first_cell]; velocity or -1 when empty
  int steady_velocity = 0;
  int steady_gap = 0;
  bool steady = false;  // every moving pair at steady velocity shares one gap

  double saturation_flow_veh_h() const {
    return rule_saturation_flow(steady_velocity, steady_gap) * kStepsPerHour;
  }
};

/// Bumper-to-bumper queue released after a red signal at t = 0; records the
/// cell states for t = 0..steps and the stationary (velocity, gap) reached by
/// the front of the queue.
DischargeTrace queue_discharge_trace(const RuleTable& rule, int queue_len, long steps);

/// Custom table whose (v_max, g_stat) are measured by queue discharge.
/// Throws Error(InvalidRule) if the table breaks an invariant or never
/// settles into a uniform stream.
RuleTable make_custom_rule(std::string name, const RuleMatrix& u);

// ---------------------------------------------------------------------------
// Fuzzy measures on logs

/// Steps until each component of vehicle l first passes stop_cell, sorted ascending.
TriangularFuzzy fuzzy_travel_time(const TrajectoryLog& log, std::size_t vehicle, Cell stop_cell);

/// Per-component arrival steps in component order m = 1, 2, 3 (unsorted).
std::array<long, 3> component_travel_times(const TrajectoryLog& log, std::size_t vehicle,
                                           Cell stop_cell);

/// Vehicles at or upstream of boundary_cell at step t, sorted ascending.
TriangularFuzzy fuzzy_vehicle_count(const TrajectoryLog& log, long t, Cell boundary_cell);

/// Per-component counts in component order (unsorted).
std::array<std::size_t, 3> component_vehicle_counts(const TrajectoryLog& log, long t,
                                                    Cell boundary_cell);

// ---------------------------------------------------------------------------
// Flow-density diagram

struct SweepOptions {
  Cell ring_cells = 1000;
  long warmup = 1000;
  long measure = 1000;
  std::uint64_t seed = 0;
};

struct FlowPoint {
  double density = 0;                // vehicles per cell
  std::vector<double> flow_veh_h;    // one value (NaSch) or three (fuzzy components)
};

/// Ring road with vehicles at uniformly random distinct cells. Flow is
/// sum of velocities over the measured steps / (ring_cells * steps), in veh/h.
/// Throws Error(Overfull) if a density needs more vehicles than cells.
std::vector<FlowPoint> flow_density_sweep_nasch(std::span<const double> densities,
                                               const NaschParams& params,
                                               const SweepOptions& options);
std::vector<FlowPoint> flow_density_sweep_fuzzy(std::span<const double> densities,
                                               const Calibration& cal,
                                               const SweepOptions& options);

/// Random distinct ring cells, returned in descending order (leader first).
std::vector<Cell> random_ring_placement(std::size_t vehicles, Cell ring_cells, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Operation counts

struct OpCostReport {
  std::uint64_t fuzzy_ops = 0;
  std::uint64_t nasch_ops = 0;
  double ratio = 0;  // nasch / fuzzy, K / 5 for equal T and N
};

/// Throws Error(DimensionMismatch) when the runs differ in T or N.
OpCostReport op_cost_report(const TrajectoryLog& fuzzy_log, const Ensemble& ensemble);

}  // namespace fca
