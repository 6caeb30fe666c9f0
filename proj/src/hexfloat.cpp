#include "numguard/hexfloat.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace numguard {

std::string to_hex(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", value);
  return buf;
}

std::string to_decimal(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw std::runtime_error("to_decimal: buffer too small");
  return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (text.empty()) throw std::invalid_argument("empty numeric field");
  const std::string owned(text);
  errno = 0;
  char* end = nullptr;
  // strtod accepts both decimal and 0x hex-float syntax with correct rounding
  const double value = std::strtod(owned.c_str(), &end);
  if (end != owned.c_str() + owned.size()) {
    throw std::invalid_argument("malformed number '" + owned + "'");
  }
  if (!std::isfinite(value)) throw std::invalid_argument("non-finite number '" + owned + "'");
  return value;
}

}  // namespace numguard
