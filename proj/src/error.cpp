#include "fcatraffic/error.hpp"

namespace fca {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::OrderViolation: return "OrderViolation";
    case ErrorKind::NonPositiveFactor: return "NonPositiveFactor";
    case ErrorKind::UnknownRule: return "UnknownRule";
    case ErrorKind::InvalidRule: return "InvalidRule";
    case ErrorKind::VelocityOutOfRange: return "VelocityOutOfRange";
    case ErrorKind::CollisionDetected: return "CollisionDetected";
    case ErrorKind::HaltViolation: return "HaltViolation";
    case ErrorKind::BoundViolation: return "BoundViolation";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::EmptySample: return "EmptySample";
    case ErrorKind::QueueExhausted: return "QueueExhausted";
    case ErrorKind::NeverArrived: return "NeverArrived";
    case ErrorKind::Overfull: return "Overfull";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::GeometryError: return "GeometryError";
    case ErrorKind::InvalidSchedule: return "InvalidSchedule";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace fca
