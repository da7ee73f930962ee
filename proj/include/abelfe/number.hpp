#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace abelfe {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Shortest decimal string that strtod parses back to exactly v.
std::string format_double(double v);

// Scalar that stays an exact rational for as long as every operand is exact.
// Integer and p/q literals construct rationals; decimal literals construct
// doubles; any operation with a double operand produces a double.
class Number {
 public:
  Number() : v_(Rational(0)) {}
  Number(int v) : v_(Rational(v)) {}
  Number(long v) : v_(Rational(v)) {}
  Number(long long v) : v_(Rational(v)) {}
  Number(double v) : v_(v) {}
  Number(Rational v) : v_(std::move(v)) {}

  // Accepts an integer, a p/q ratio, or a decimal literal (optional sign,
  // fraction, exponent). Returns nullopt when text is not a lone number.
  static std::optional<Number> parse(std::string_view text);
  static Number ratio(long long num, long long den);

  bool exact() const { return std::holds_alternative<Rational>(v_); }
  const Rational& rational() const { return std::get<Rational>(v_); }
  double value() const;
  bool is_zero() const;
  bool is_integer() const;
  bool negative() const;

  // Exact numbers render as "p" or "p/q", doubles as decimal literals that
  // re-parse to the same double.
  std::string str() const;

  Number operator-() const;
  Number& operator+=(const Number& o);
  Number& operator-=(const Number& o);
  Number& operator*=(const Number& o);
  Number& operator/=(const Number& o);
  Number pow_int(long long e) const;

  friend Number operator+(Number a, const Number& b) { return a += b; }
  friend Number operator-(Number a, const Number& b) { return a -= b; }
  friend Number operator*(Number a, const Number& b) { return a *= b; }
  friend Number operator/(Number a, const Number& b) { return a /= b; }

  // Mathematical equality; mixed exact/double operands compare as doubles.
  friend bool operator==(const Number& a, const Number& b);
  friend bool operator!=(const Number& a, const Number& b) { return !(a == b); }
  friend bool operator<(const Number& a, const Number& b);

  // Same representation class and same value; distinguishes exact 2 from 2.0.
  static bool same_representation(const Number& a, const Number& b);

 private:
  std::variant<Rational, double> v_;
};

}  // namespace abelfe
