#pragma once

#include <string_view>
#include <vector>

#include "fcatraffic/lattice.hpp"

namespace fca {

enum class Model { Fuzzy, Nasch };

std::string_view to_string(Model model) noexcept;
Model parse_model(std::string_view name);

/// Cell lengths giving both models a free-flow speed of 13.5 m/s: NaSch moves
/// v_max - p = 1.8 cells/step on 7.5 m cells, the fuzzy model 2 cells/step.
inline constexpr double kNaschCellLength = 7.5;
inline constexpr double kFuzzyCellLength = 6.75;

/// Fixed-time plan of the signal at one stop line (index into stop_lines_m).
struct SignalPlan {
  std::size_t stop_line = 0;
  long cycle = 60;
  long green_start = 0;
  long green_duration = 30;

  friend bool operator==(const SignalPlan&, const SignalPlan&) = default;
};

/// Road geometry, signal plan and initial queues of a one-lane arterial.
///
/// Cell k covers [k * cell_length, (k + 1) * cell_length). A stop line lies in
/// cell floor(position / cell_length); its halt cell is the next one, so a
/// queue's front vehicle waits in the stop cell and passing the line means
/// moving beyond the stop cell.
struct Scenario {
  double road_length_m = 3000.0;
  double cell_length_m = kFuzzyCellLength;
  std::vector<double> stop_lines_m;
  std::vector<SignalPlan> signals;
  int initial_queue_per_intersection = 0;
  bool last_vehicle_at_first_cell = false;
  long horizon = 3600;

  std::vector<Cell> stop_cells() const;

  /// Signal plans resolved to halt cells for the current cell length.
  std::vector<SignalSchedule> schedules() const;

  /// Queues of equal length packed bumper-to-bumper up to each stop cell,
  /// most downstream vehicle first, plus one vehicle in cell 0 when requested.
  std::vector<Cell> initial_positions() const;

  std::size_t vehicle_count() const { return initial_positions().size(); }
  HaltSet initial_halt() const { return active_halt_cells(schedules(), 0); }

  /// Throws Error(GeometryError) for inconsistent geometry or overlapping
  /// queues and Error(InvalidSchedule) for a bad signal plan.
  void validate() const;

  /// Same road in meters on a different lattice.
  Scenario with_cell_length(double cell_length_m) const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

Cell stop_cell_of(double position_m, double cell_length_m);
inline Cell halt_cell_of(Cell stop_cell) { return stop_cell + 1; }

/// Three intersections at 750, 1500 and 2250 m of a 3 km road. Every signal
/// has the same cycle and green time; green starts `offset` seconds later at
/// each successive intersection, the first one starting green at t = 0.
Scenario build_arterial(int queue_len, long cycle, long green, long offset, Model model,
                        long horizon = 3600);

/// One stop line with a standing queue behind it. The signal is red at t = 0
/// only and green for the whole horizon after that. The default queue length
/// (horizon + 1) cannot be exhausted, since at most one vehicle crosses per step.
Scenario build_saturated_queue(long horizon, double cell_length_m, int queue_len = -1);

}  // namespace fca
