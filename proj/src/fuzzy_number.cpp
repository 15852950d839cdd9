#include "fcatraffic/fuzzy_number.hpp"

#include <cmath>
#include <sstream>

#include "fcatraffic/error.hpp"

namespace fca {

TriangularFuzzy TriangularFuzzy::make(double z1, double z2, double z3) {
  if (!std::isfinite(z1) || !std::isfinite(z2) || !std::isfinite(z3) || z1 > z2 || z2 > z3) {
    std::ostringstream msg;
    msg << "triangular fuzzy number requires finite z1 <= z2 <= z3, got (" << z1 << ", " << z2
        << ", " << z3 << ")";
    throw Error(ErrorKind::OrderViolation, msg.str());
  }
  return TriangularFuzzy(z1, z2, z3);
}

double TriangularFuzzy::membership(double x) const noexcept {
  if (x < z1_ || x > z3_) return 0.0;
  if (x == z2_) return 1.0;
  if (x < z2_) return (x - z1_) / (z2_ - z1_);
  return (z3_ - x) / (z3_ - z2_);
}

TriangularFuzzy TriangularFuzzy::scaled(double factor) const {
  if (!(factor > 0.0)) {
    throw Error(ErrorKind::NonPositiveFactor, "scale factor must be positive");
  }
  return TriangularFuzzy(z1_ * factor, z2_ * factor, z3_ * factor);
}

}  // namespace fca
