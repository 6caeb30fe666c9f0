#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>

#include <gmpxx.h>

namespace numguard {

using BigInt = mpz_class;

/// Exact rational number in canonical form (denominator > 0, gcd 1).
class Rational {
public:
  Rational() = default;
  Rational(std::int64_t value);  // NOLINT(google-explicit-constructor)
  Rational(const BigInt& numerator, const BigInt& denominator);

  /// The exact value a finite binary64 denotes. Throws on NaN/infinity.
  static Rational from_double(double value);

  BigInt numerator() const { return value_.get_num(); }
  BigInt denominator() const { return value_.get_den(); }

  BigInt floor() const;
  BigInt ceil() const;
  int sign() const { return sgn(value_); }

  Rational& operator+=(const Rational& rhs);
  Rational& operator-=(const Rational& rhs);
  Rational& operator*=(const Rational& rhs);
  Rational& operator/=(const Rational& rhs);

  friend Rational operator+(Rational lhs, const Rational& rhs) { return lhs += rhs; }
  friend Rational operator-(Rational lhs, const Rational& rhs) { return lhs -= rhs; }
  friend Rational operator*(Rational lhs, const Rational& rhs) { return lhs *= rhs; }
  friend Rational operator/(Rational lhs, const Rational& rhs) { return lhs /= rhs; }
  Rational operator-() const;

  friend bool operator==(const Rational& lhs, const Rational& rhs) {
    return cmp(lhs.value_, rhs.value_) == 0;
  }
  friend std::strong_ordering operator<=>(const Rational& lhs, const Rational& rhs) {
    return cmp(lhs.value_, rhs.value_) <=> 0;
  }

  /// "p/q", or "p" when the denominator is 1.
  std::string to_string() const;

private:
  mpq_class value_{0};
};

std::ostream& operator<<(std::ostream& os, const Rational& value);

}  // namespace numguard
