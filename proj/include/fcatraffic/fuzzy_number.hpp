#pragma once

#include <array>

namespace fca {

/// Triangular fuzzy number (z1, z2, z3) with z1 <= z2 <= z3.
///
/// Membership rises linearly from 0 at z1 to 1 at z2 and falls back to 0 at
/// z3. Equal bounds are allowed; a fully degenerate triple is a crisp value.
/// Units come from the context (veh/h, cells, steps, vehicles).
class TriangularFuzzy {
 public:
  /// Throws Error(OrderViolation) unless z1 <= z2 <= z3 and all are finite.
  static TriangularFuzzy make(double z1, double z2, double z3);

  double lower() const noexcept { return z1_; }
  double peak() const noexcept { return z2_; }
  double upper() const noexcept { return z3_; }
  std::array<double, 3> components() const noexcept { return {z1_, z2_, z3_}; }
  bool is_crisp() const noexcept { return z1_ == z3_; }

  double membership(double x) const noexcept;

  /// Component-wise multiplication; throws Error(NonPositiveFactor) for factor <= 0.
  TriangularFuzzy scaled(double factor) const;

  friend bool operator==(const TriangularFuzzy&, const TriangularFuzzy&) = default;

 private:
  TriangularFuzzy(double z1, double z2, double z3) : z1_(z1), z2_(z2), z3_(z3) {}

  double z1_;
  double z2_;
  double z3_;
};

inline TriangularFuzzy make_tfn(double z1, double z2, double z3) {
  return TriangularFuzzy::make(z1, z2, z3);
}

inline double membership(const TriangularFuzzy& z, double x) { return z.membership(x); }

inline TriangularFuzzy scale_tfn(const TriangularFuzzy& z, double factor) {
  return z.scaled(factor);
}

/// Seconds per simulation step; flows convert between veh/h and veh/step with it.
inline constexpr double kSecondsPerStep = 1.0;
inline constexpr double kStepsPerHour = 3600.0 / kSecondsPerStep;

}  // namespace fca
