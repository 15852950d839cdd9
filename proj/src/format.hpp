#pragma once

#include <sstream>
#include <string>

namespace fca::detail {

/// Shortest text that reads back to the same double.
inline std::string format_real(double value) {
  std::ostringstream out;
  out.precision(17);
  out << value;
  return out.str();
}

}  // namespace fca::detail
