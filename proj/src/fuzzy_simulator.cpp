#include "fcatraffic/fuzzy_simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fcatraffic/error.hpp"
#include "format.hpp"

namespace fca {

namespace {

// Slack for veh/h inputs whose veh/step conversion lands a rounding error
// outside the attainable interval.
constexpr double kFlowTolerance = 1e-12;

}  // namespace

Calibration make_calibration(RuleTable low, RuleTable high, std::array<double, 3> alpha) {
  if (!(rule_saturation_flow(low) < rule_saturation_flow(high))) {
    throw Error(ErrorKind::InvalidRule, "rule " + low.name + " must saturate below rule " + high.name);
  }
  for (double a : alpha) {
    if (!(a >= 0.0 && a <= 1.0)) {
      throw Error(ErrorKind::OutOfRange, "calibration parameter " + std::to_string(a) + " outside [0, 1]");
    }
  }
  if (alpha[0] > alpha[1] || alpha[1] > alpha[2]) {
    throw Error(ErrorKind::OrderViolation, "calibration parameters must be ascending");
  }
  return Calibration{std::move(low), std::move(high), alpha};
}

double saturation_of_alpha(int v_low, int g_low, int v_high, int g_high, double alpha) {
  const double v = v_low + alpha * (v_high - v_low);
  const double g = g_low + alpha * (g_high - g_low);
  return v / (g + 1.0);
}

double saturation_of_alpha(const RuleTable& low, const RuleTable& high, double alpha) {
  return saturation_of_alpha(low.v_max, low.g_stat, high.v_max, high.g_stat, alpha);
}

double alpha_for_saturation(const RuleTable& low, const RuleTable& high, double s) {
  const double s_low = rule_saturation_flow(low);
  const double s_high = rule_saturation_flow(high);
  if (!(s >= s_low - kFlowTolerance && s <= s_high + kFlowTolerance)) {
    throw Error(ErrorKind::OutOfRange,
                "saturation flow " + std::to_string(s * kStepsPerHour) + " veh/h outside [" +
                    std::to_string(s_low * kStepsPerHour) + ", " +
                    std::to_string(s_high * kStepsPerHour) + "]");
  }
  const double numerator = s * (low.g_stat + 1) - low.v_max;
  const double denominator = (high.v_max - low.v_max) - s * (high.g_stat - low.g_stat);
  return std::clamp(numerator / denominator, 0.0, 1.0);
}

Calibration calibrate_alpha(const TriangularFuzzy& saturation_veh_h, const RuleTable& low,
                            const RuleTable& high) {
  const auto s = saturation_veh_h.scaled(1.0 / kStepsPerHour).components();
  std::array<double, 3> alpha{};
  for (std::size_t m = 0; m < 3; ++m) alpha[m] = alpha_for_saturation(low, high, s[m]);
  return make_calibration(low, high, alpha);
}

double normalized_position(Cell x, Cell x_low, Cell x_high) {
  if (x < x_low || x > x_high) {
    throw Error(ErrorKind::BoundViolation,
                "position " + std::to_string(x) + " outside auxiliary bounds [" +
                    std::to_string(x_low) + ", " + std::to_string(x_high) + "]");
  }
  if (x_high == x_low) return 0.0;
  return static_cast<double>(x - x_low) / static_cast<double>(x_high - x_low);
}

double extrapolated_position(Cell x, Cell x_low, Cell x_high) {
  if (x_high == x_low) {
    if (x == x_low) return 0.0;
    return x < x_low ? -std::numeric_limits<double>::infinity()
                     : std::numeric_limits<double>::infinity();
  }
  return static_cast<double>(x - x_low) / static_cast<double>(x_high - x_low);
}

FuzzyState make_fuzzy_state(std::vector<Cell> positions, const HaltSet& halt, Cell ring_cells) {
  FuzzyState state;
  state.low = make_channel(std::move(positions), halt, ring_cells);
  state.high = state.low;
  state.components = {state.low, state.low, state.low};
  return state;
}

FuzzySimulator::FuzzySimulator(FuzzyState initial, std::vector<SignalSchedule> schedules,
                               Calibration cal, BoundPolicy policy)
    : state_(std::move(initial)),
      schedules_(std::move(schedules)),
      cal_(std::move(cal)),
      policy_(policy) {
  const std::size_t n = state_.size();
  if (state_.high.size() != n || state_.components[0].size() != n ||
      state_.components[1].size() != n || state_.components[2].size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "fuzzy channels hold different vehicle counts");
  }
  gaps_.reserve(n);
  use_high_.resize(3 * n);
}

FuzzySimulator::FuzzySimulator(const Scenario& scenario, Calibration cal, BoundPolicy policy)
    : FuzzySimulator(make_fuzzy_state(scenario.initial_positions(), scenario.initial_halt()),
                     scenario.schedules(), std::move(cal), policy) {}

void FuzzySimulator::step() {
  const std::size_t n = state_.size();
  const HaltSet halt = active_halt_cells(schedules_, state_.t);
  const auto& x_low = state_.low.positions;
  const auto& x_high = state_.high.positions;

  // Rule choice reads the pre-step auxiliary positions.
  const bool strict = policy_ == BoundPolicy::Strict;
  for (std::size_t m = 0; m < 3; ++m) {
    const auto& x = state_.components[m].positions;
    for (std::size_t i = 0; i < n; ++i) {
      const double xbar = strict ? normalized_position(x[i], x_low[i], x_high[i])
                                 : extrapolated_position(x[i], x_low[i], x_high[i]);
      use_high_[m * n + i] = xbar <= cal_.alpha[m];
    }
  }

  const RuleTable& low = cal_.rule_low;
  const RuleTable& high = cal_.rule_high;
  ops_ += advance_channel_in_place(
      state_.low, [&](std::size_t, int v, int g, int pg) { return table_velocity(low, v, g, pg); },
      halt, gaps_);
  ops_ += advance_channel_in_place(
      state_.high, [&](std::size_t, int v, int g, int pg) { return table_velocity(high, v, g, pg); },
      halt, gaps_);
  for (std::size_t m = 0; m < 3; ++m) {
    const unsigned char* choice = use_high_.data() + m * n;
    ops_ += advance_channel_in_place(
        state_.components[m],
        [&](std::size_t i, int v, int g, int pg) {
          return table_velocity(choice[i] ? high : low, v, g, pg);
        },
        halt, gaps_);
  }
  ++state_.t;

  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& comp : state_.components) {
      if (comp.positions[i] < x_low[i] || comp.positions[i] > x_high[i]) {
        if (strict) {
          throw Error(ErrorKind::BoundViolation,
                      "vehicle " + std::to_string(i) + " left its auxiliary bounds at step " +
                          std::to_string(state_.t));
        }
        ++bound_excursions_;
      }
    }
    if (state_.components[0].positions[i] > state_.components[1].positions[i] ||
        state_.components[1].positions[i] > state_.components[2].positions[i]) {
      ++ordering_warnings_;
    }
  }
}

FuzzyState step_fuzzy(const FuzzyState& state, const Calibration& cal,
                      std::span<const SignalSchedule> schedules) {
  FuzzySimulator sim(state, std::vector<SignalSchedule>(schedules.begin(), schedules.end()), cal);
  sim.step();
  return sim.state();
}

TrajectoryLog run_fuzzy(const Scenario& scenario, const Calibration& cal, BoundPolicy policy) {
  scenario.validate();
  FuzzySimulator sim(scenario, cal, policy);
  TrajectoryLog log;
  log.model = "fuzzy";
  log.channels = {"L", "H", "1", "2", "3"};
  log.vehicles = sim.state().size();
  log.steps = scenario.horizon;

  auto record = [&] {
    const auto& s = sim.state();
    const std::array<const Channel*, 5> snapshot = {&s.low, &s.high, &s.components[0],
                                                    &s.components[1], &s.components[2]};
    log.record(snapshot);
  };
  record();
  for (long t = 0; t < scenario.horizon; ++t) {
    sim.step();
    record();
  }
  log.op_count = sim.op_count();
  log.metadata["rule_low"] = cal.rule_low.name;
  log.metadata["rule_high"] = cal.rule_high.name;
  for (std::size_t m = 0; m < 3; ++m) {
    log.metadata["alpha" + std::to_string(m + 1)] = detail::format_real(cal.alpha[m]);
  }
  log.metadata["ordering_warnings"] = std::to_string(sim.ordering_warnings());
  log.metadata["bound_policy"] = policy == BoundPolicy::Strict ? "strict" : "count";
  log.metadata["bound_excursions"] = std::to_string(sim.bound_excursions());
  return log;
}

}  // namespace fca
