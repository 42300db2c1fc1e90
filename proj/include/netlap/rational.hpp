#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace netlap {

/// Arbitrary-precision rational in canonical form (gcd 1, positive
/// denominator). GMP keeps the canonical form after every operation.
using ExactRational = mpq_class;

/// Parses "p/q", an integer, or a plain decimal such as "2.5" or "-0.125".
/// Throws Error(ParseError) on anything else.
ExactRational parse_rational(std::string_view text);

/// Exact b^n for n >= 0.
ExactRational pow(const ExactRational& base, unsigned long exponent);

/// Decimal rendering rounded to `digits` places after the point.
std::string to_decimal(const ExactRational& value, int digits);

std::string to_string(const ExactRational& value);

}  // namespace netlap
