#pragma once

#include <string>
#include <string_view>

namespace numguard {

/// printf("%a") rendering, e.g. 0x1.999999999999ap-4. Round-trips bit-exactly.
std::string to_hex(double value);
/// Shortest decimal that round-trips.
std::string to_decimal(double value);
/// Parses a decimal or hex-float literal; the whole string must be consumed.
/// Throws std::invalid_argument.
double parse_double(std::string_view text);

}  // namespace numguard
