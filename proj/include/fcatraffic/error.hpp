#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fca {

/// Machine-readable failure categories. The CLI reports these by name.
enum class ErrorKind {
  OrderViolation,
  NonPositiveFactor,
  UnknownRule,
  InvalidRule,
  VelocityOutOfRange,
  CollisionDetected,
  HaltViolation,
  BoundViolation,
  OutOfRange,
  EmptySample,
  QueueExhausted,
  NeverArrived,
  Overfull,
  DimensionMismatch,
  GeometryError,
  InvalidSchedule,
  ConfigError,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace fca
