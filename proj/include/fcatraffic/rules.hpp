#pragma once

#include <algorithm>
#include <array>
#include <string>
#include <string_view>

#include "fcatraffic/error.hpp"

namespace fca {

inline constexpr int kRuleRows = 4;  // previous velocity 0..3
inline constexpr int kRuleCols = 6;  // gap 0..4, and 5 or more
inline constexpr int kDelayedStart = -1;

using RuleMatrix = std::array<std::array<int, kRuleCols>, kRuleRows>;

/// Deterministic table-driven velocity rule.
///
/// Row = previous velocity, column = min(gap, 5). The entry -1 marks the
/// delayed start of a stopped vehicle with a single free cell ahead; the
/// vehicle then takes the gap it had one step earlier.
struct RuleTable {
  std::string name;
  RuleMatrix u{};
  int v_max = 0;   // velocity of the saturated stream, cells/step
  int g_stat = 0;  // uniform gap of the saturated stream, cells

  friend bool operator==(const RuleTable&, const RuleTable&) = default;
};

/// R1 (v_max 2, gap 4) or R2 (v_max 2, gap 3). Throws Error(UnknownRule).
RuleTable builtin_rule(std::string_view name);

/// Throws Error(InvalidRule) when the table breaks an entry invariant:
/// entries in [-1, 3], -1 only for (v_prev 0, gap 1), column for gap 0 all zero,
/// and no entry exceeding its gap.
void validate_rule_matrix(const RuleMatrix& u);

/// Velocity from a rule table. The result never exceeds the current gap.
inline int table_velocity(const RuleTable& rule, int v_prev, int gap, int prev_gap) {
  if (v_prev < 0 || v_prev >= kRuleRows) {
    throw Error(ErrorKind::VelocityOutOfRange,
                "previous velocity " + std::to_string(v_prev) + " outside rule table rows");
  }
  const int entry = rule.u[v_prev][std::min(gap, kRuleCols - 1)];
  if (entry != kDelayedStart) return entry;
  return std::clamp(prev_gap, 0, gap);
}

struct NaschParams {
  int v_max = 2;
  double p = 0.2;  // deceleration probability

  friend bool operator==(const NaschParams&, const NaschParams&) = default;
};

/// Throws Error(OutOfRange) unless v_max >= 1 and p in [0, 1].
void validate(const NaschParams& params);

/// NSH when decelerate is false, NSL when true.
inline int nasch_velocity(const NaschParams& params, int v_prev, int gap, bool decelerate) {
  const int v = std::min({v_prev + 1, gap, params.v_max});
  return decelerate ? std::max(0, v - 1) : v;
}

/// Saturation flow of a deterministic stream in veh/step: v_max / (g + 1).
inline double rule_saturation_flow(int v_max, int g) {
  return static_cast<double>(v_max) / static_cast<double>(g + 1);
}

inline double rule_saturation_flow(const RuleTable& rule) {
  return rule_saturation_flow(rule.v_max, rule.g_stat);
}

}  // namespace fca
