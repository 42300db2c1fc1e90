#pragma once

#include <string>

namespace netlap {

/// Shortest round-trip decimal rendering of a double ("%.17g" style but
/// without trailing noise). Locale independent.
std::string format_double(double value);

}  // namespace netlap
