#include "fcatraffic/scenario.hpp"

#include <cmath>
#include <string>

#include "fcatraffic/error.hpp"

namespace fca {

std::string_view to_string(Model model) noexcept {
  return model == Model::Fuzzy ? "fuzzy" : "nasch";
}

Model parse_model(std::string_view name) {
  if (name == "fuzzy") return Model::Fuzzy;
  if (name == "nasch") return Model::Nasch;
  throw Error(ErrorKind::ConfigError, "unknown model '" + std::string(name) + "'");
}

Cell stop_cell_of(double position_m, double cell_length_m) {
  // Guards exact multiples against representation error (750 / 7.5 is 100).
  return static_cast<Cell>(std::floor(position_m / cell_length_m + 1e-9));
}

std::vector<Cell> Scenario::stop_cells() const {
  std::vector<Cell> cells;
  cells.reserve(stop_lines_m.size());
  for (double m : stop_lines_m) cells.push_back(stop_cell_of(m, cell_length_m));
  return cells;
}

std::vector<SignalSchedule> Scenario::schedules() const {
  const auto stops = stop_cells();
  std::vector<SignalSchedule> out;
  out.reserve(signals.size());
  for (const auto& plan : signals) {
    if (plan.stop_line >= stops.size()) {
      throw Error(ErrorKind::InvalidSchedule,
                  "signal refers to missing stop line " + std::to_string(plan.stop_line));
    }
    out.push_back(make_schedule(halt_cell_of(stops[plan.stop_line]), plan.cycle, plan.green_start,
                                plan.green_duration));
  }
  return out;
}

Scenario Scenario::with_cell_length(double cell_length) const {
  Scenario s = *this;
  s.cell_length_m = cell_length;
  return s;
}

std::vector<Cell> Scenario::initial_positions() const {
  std::vector<Cell> positions;
  const auto stops = stop_cells();
  for (auto it = stops.rbegin(); it != stops.rend(); ++it) {
    for (int k = 0; k < initial_queue_per_intersection; ++k) positions.push_back(*it - k);
  }
  if (last_vehicle_at_first_cell) positions.push_back(0);
  return positions;
}

void Scenario::validate() const {
  if (!(cell_length_m > 0.0) || !(road_length_m > 0.0)) {
    throw Error(ErrorKind::GeometryError, "road and cell lengths must be positive");
  }
  if (horizon < 0) throw Error(ErrorKind::GeometryError, "horizon must be non-negative");
  if (initial_queue_per_intersection < 0) {
    throw Error(ErrorKind::GeometryError, "queue length must be non-negative");
  }
  for (std::size_t k = 0; k < stop_lines_m.size(); ++k) {
    const double m = stop_lines_m[k];
    if (!(m > 0.0) || m > road_length_m) {
      throw Error(ErrorKind::GeometryError, "stop line outside the road");
    }
    if (k > 0 && !(m > stop_lines_m[k - 1])) {
      throw Error(ErrorKind::GeometryError, "stop lines must be strictly increasing");
    }
  }
  const auto stops = stop_cells();
  const int q = initial_queue_per_intersection;
  Cell lowest_free = last_vehicle_at_first_cell ? 1 : 0;
  for (Cell stop : stops) {
    if (q > 0 && stop - q + 1 < lowest_free) {
      throw Error(ErrorKind::GeometryError,
                  "queue of " + std::to_string(q) + " behind stop cell " + std::to_string(stop) +
                      " overlaps the upstream intersection");
    }
    // Upstream queues must not stand on this line's halt cell.
    lowest_free = halt_cell_of(stop) + 1;
  }
  schedules();
}

Scenario build_arterial(int queue_len, long cycle, long green, long offset, Model model,
                        long horizon) {
  if (queue_len < 1) throw Error(ErrorKind::GeometryError, "queue length must be >= 1");
  Scenario s;
  s.road_length_m = 3000.0;
  s.cell_length_m = model == Model::Fuzzy ? kFuzzyCellLength : kNaschCellLength;
  s.stop_lines_m = {750.0, 1500.0, 2250.0};
  s.initial_queue_per_intersection = queue_len;
  s.last_vehicle_at_first_cell = true;
  s.horizon = horizon;
  for (std::size_t k = 0; k < s.stop_lines_m.size(); ++k) {
    long start = (static_cast<long>(k) * offset) % cycle;
    if (start < 0) start += cycle;
    s.signals.push_back(SignalPlan{k, cycle, start, green});
  }
  s.validate();
  return s;
}

Scenario build_saturated_queue(long horizon, double cell_length_m, int queue_len) {
  if (queue_len < 0) queue_len = static_cast<int>(horizon) + 1;
  Scenario s;
  s.cell_length_m = cell_length_m;
  // Queue occupies cells 1..queue_len with the stop line in cell queue_len.
  const double stop_m = (static_cast<double>(queue_len) + 0.5) * cell_length_m;
  s.stop_lines_m = {stop_m};
  s.road_length_m = stop_m + cell_length_m;
  s.initial_queue_per_intersection = queue_len;
  s.horizon = horizon;
  s.signals.push_back(SignalPlan{0, horizon + 1, 1, horizon});
  s.validate();
  return s;
}

}  // namespace fca
