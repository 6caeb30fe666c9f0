#include "numguard/rational.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace numguard {

static_assert(sizeof(long) == sizeof(std::int64_t), "GMP si functions take long");

Rational::Rational(std::int64_t value) : value_(static_cast<long>(value)) {}

Rational::Rational(const BigInt& numerator, const BigInt& denominator) {
  if (denominator == 0) throw std::domain_error("Rational: zero denominator");
  value_ = mpq_class(numerator, denominator);
  value_.canonicalize();
}

Rational Rational::from_double(double value) {
  if (!std::isfinite(value)) throw std::domain_error("Rational: non-finite binary64");
  Rational r;
  r.value_ = mpq_class(value);  // mpq_set_d is exact
  return r;
}

BigInt Rational::floor() const {
  BigInt q;
  mpz_fdiv_q(q.get_mpz_t(), value_.get_num_mpz_t(), value_.get_den_mpz_t());
  return q;
}

BigInt Rational::ceil() const {
  BigInt q;
  mpz_cdiv_q(q.get_mpz_t(), value_.get_num_mpz_t(), value_.get_den_mpz_t());
  return q;
}

Rational& Rational::operator+=(const Rational& rhs) {
  value_ += rhs.value_;
  return *this;
}

Rational& Rational::operator-=(const Rational& rhs) {
  value_ -= rhs.value_;
  return *this;
}

Rational& Rational::operator*=(const Rational& rhs) {
  value_ *= rhs.value_;
  return *this;
}

Rational& Rational::operator/=(const Rational& rhs) {
  if (rhs.value_ == 0) throw std::domain_error("Rational: division by zero");
  value_ /= rhs.value_;
  return *this;
}

Rational Rational::operator-() const {
  Rational r;
  r.value_ = -value_;
  return r;
}

std::string Rational::to_string() const {
  if (value_.get_den() == 1) return value_.get_num().get_str();
  return value_.get_num().get_str() + "/" + value_.get_den().get_str();
}

std::ostream& operator<<(std::ostream& os, const Rational& value) {
  return os << value.to_string();
}

}  // namespace numguard
