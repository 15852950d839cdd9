#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "fcatraffic/fuzzy_number.hpp"
#include "fcatraffic/lattice.hpp"
#include "fcatraffic/rules.hpp"
#include "fcatraffic/scenario.hpp"
#include "fcatraffic/trajectory.hpp"

namespace fca {

/// Rule pair plus one target normalized position per fuzzy component.
struct Calibration {
  RuleTable rule_low;
  RuleTable rule_high;
  std::array<double, 3> alpha{};

  friend bool operator==(const Calibration&, const Calibration&) = default;
};

/// Throws Error(InvalidRule) unless the low rule saturates below the high
/// one, Error(OutOfRange) for alpha outside [0, 1] and Error(OrderViolation)
/// for a descending alpha triple.
Calibration make_calibration(RuleTable low, RuleTable high, std::array<double, 3> alpha);

/// Saturation flow (veh/step) of a stream held at normalized position alpha.
double saturation_of_alpha(int v_low, int g_low, int v_high, int g_high, double alpha);
double saturation_of_alpha(const RuleTable& low, const RuleTable& high, double alpha);

/// Inverse of saturation_of_alpha. s is in veh/step; throws Error(OutOfRange)
/// when s lies outside the flows of the two rules.
double alpha_for_saturation(const RuleTable& low, const RuleTable& high, double s);

/// alpha for each component of a fuzzy saturation flow given in veh/h.
Calibration calibrate_alpha(const TriangularFuzzy& saturation_veh_h, const RuleTable& low,
                            const RuleTable& high);

/// (x - x_low) / (x_high - x_low), or 0 when both bounds coincide.
/// Throws Error(BoundViolation) when x lies outside [x_low, x_high].
double normalized_position(Cell x, Cell x_low, Cell x_high);

/// Normalized position without the bound check: below 0 or above 1 when x
/// lies outside [x_low, x_high]. With equal bounds it is 0 at the bound and
/// -inf / +inf below / above it.
double extrapolated_position(Cell x, Cell x_low, Cell x_high);

/// What to do when a fuzzy component leaves [x^L, x^H].
///
/// Strict raises Error(BoundViolation). Count records the excursion and keeps
/// going with the extrapolated normalized position, which makes the selection
/// rule steer the component back toward its bounds. Excursions do happen with
/// the slow-to-start tables: a component that stops behind its own leader
/// restarts one step later than the unstopped L vehicle.
enum class BoundPolicy { Strict, Count };

/// Auxiliary trajectories of both rules and the three fuzzy components.
struct FuzzyState {
  Channel low;
  Channel high;
  std::array<Channel, 3> components;
  long t = 0;

  std::size_t size() const noexcept { return low.size(); }
  friend bool operator==(const FuzzyState&, const FuzzyState&) = default;
};

/// All five channels start from the same stopped configuration.
FuzzyState make_fuzzy_state(std::vector<Cell> positions, const HaltSet& halt = {},
                            Cell ring_cells = 0);

/// Stateful stepper for one fuzzy run. Every step evaluates a rule exactly
/// five times per vehicle.
class FuzzySimulator {
 public:
  FuzzySimulator(FuzzyState initial, std::vector<SignalSchedule> schedules, Calibration cal,
                 BoundPolicy policy = BoundPolicy::Strict);
  FuzzySimulator(const Scenario& scenario, Calibration cal,
                 BoundPolicy policy = BoundPolicy::Strict);

  const FuzzyState& state() const noexcept { return state_; }
  const Calibration& calibration() const noexcept { return cal_; }
  std::uint64_t op_count() const noexcept { return ops_; }

  /// Vehicle-steps at which the component positions were not ascending in m.
  /// Soft invariant: counted, never raised.
  std::uint64_t ordering_warnings() const noexcept { return ordering_warnings_; }
  /// Vehicle-component-steps that ended outside [x^L, x^H] (Count policy).
  std::uint64_t bound_excursions() const noexcept { return bound_excursions_; }

  void step();

 private:
  FuzzyState state_;
  std::vector<SignalSchedule> schedules_;
  Calibration cal_;
  BoundPolicy policy_;
  std::uint64_t ops_ = 0;
  std::uint64_t ordering_warnings_ = 0;
  std::uint64_t bound_excursions_ = 0;
  std::vector<int> gaps_;
  std::vector<unsigned char> use_high_;
};

/// One step of the fuzzy CA as a pure function.
FuzzyState step_fuzzy(const FuzzyState& state, const Calibration& cal,
                      std::span<const SignalSchedule> schedules);

/// Full run over the scenario horizon, logging channels L, H, 1, 2, 3.
TrajectoryLog run_fuzzy(const Scenario& scenario, const Calibration& cal,
                        BoundPolicy policy = BoundPolicy::Strict);

}  // namespace fca
