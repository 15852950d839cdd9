#include "fcatraffic/rules.hpp"

#include <cmath>

namespace fca {

namespace {

constexpr RuleMatrix kR1 = {{
    {0, -1, 1, 1, 1, 1},
    {0, 1, 1, 1, 2, 2},
    {0, 1, 1, 1, 2, 2},
    {0, 1, 1, 1, 2, 2},
}};

constexpr RuleMatrix kR2 = {{
    {0, -1, 1, 2, 1, 1},
    {0, 1, 1, 2, 2, 2},
    {0, 1, 1, 2, 3, 2},
    {0, 1, 1, 2, 3, 2},
}};

}  // namespace

RuleTable builtin_rule(std::string_view name) {
  if (name == "R1") return RuleTable{"R1", kR1, 2, 4};
  if (name == "R2") return RuleTable{"R2", kR2, 2, 3};
  throw Error(ErrorKind::UnknownRule, "unknown rule '" + std::string(name) + "'");
}

void validate_rule_matrix(const RuleMatrix& u) {
  for (int row = 0; row < kRuleRows; ++row) {
    for (int col = 0; col < kRuleCols; ++col) {
      const int entry = u[row][col];
      const std::string where =
          " at (v_prev " + std::to_string(row) + ", gap column " + std::to_string(col) + ")";
      if (entry == kDelayedStart) {
        if (row != 0 || col != 1) {
          throw Error(ErrorKind::InvalidRule, "delayed-start entry only allowed at (0, 1)" + where);
        }
        continue;
      }
      if (entry < 0 || entry >= kRuleRows) {
        throw Error(ErrorKind::InvalidRule, "entry " + std::to_string(entry) + " outside [0, 3]" + where);
      }
      if (col == 0 && entry != 0) {
        throw Error(ErrorKind::InvalidRule, "gap 0 must force velocity 0" + where);
      }
      // The last column stands for every gap >= 5.
      if (entry > col) {
        throw Error(ErrorKind::InvalidRule, "entry exceeds its gap" + where);
      }
    }
  }
}

void validate(const NaschParams& params) {
  if (params.v_max < 1) {
    throw Error(ErrorKind::OutOfRange, "NaSch v_max must be >= 1");
  }
  if (!(params.p >= 0.0 && params.p <= 1.0)) {
    throw Error(ErrorKind::OutOfRange, "NaSch deceleration probability must lie in [0, 1]");
  }
}

}  // namespace fca
