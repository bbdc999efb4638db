#pragma once

#include <string>
#include <string_view>

namespace puma {

/// Shortest decimal string that parses back to exactly `value`.
/// Locale-independent.
std::string format_double(double value);

/// Fixed-point with `precision` decimals (for SVG coordinates and labels).
std::string format_fixed(double value, int precision);

/// Inverse of format_double. Throws std::invalid_argument on malformed input.
double parse_double(std::string_view text);

}  // namespace puma
