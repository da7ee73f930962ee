#include "abelfe/number.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace abelfe {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::optional<Number> Number::parse(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::string s(text);
  std::string_view body = s;
  bool neg = false;
  if (body.front() == '+' || body.front() == '-') {
    neg = body.front() == '-';
    body.remove_prefix(1);
  }
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    auto num = body.substr(0, slash);
    auto den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) return std::nullopt;
    BigInt n{std::string(num)}, d{std::string(den)};
    if (d == 0) return std::nullopt;
    Rational r(n, d);
    return Number(neg ? Rational(-r) : r);
  }
  if (all_digits(body)) {
    BigInt n((std::string(body)));
    return Number(Rational(neg ? BigInt(-n) : n));
  }
  char* end = nullptr;
  double d = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return std::nullopt;
  return Number(d);
}

Number Number::ratio(long long num, long long den) {
  if (den == 0) throw std::domain_error("zero denominator");
  return Number(Rational(BigInt(num), BigInt(den)));
}

double Number::value() const {
  if (exact()) return rational().convert_to<double>();
  return std::get<double>(v_);
}

bool Number::is_zero() const {
  if (exact()) return rational() == 0;
  return std::get<double>(v_) == 0.0;
}

bool Number::is_integer() const {
  if (exact()) return denominator(rational()) == 1;
  double d = std::get<double>(v_);
  return std::isfinite(d) && std::floor(d) == d;
}

bool Number::negative() const {
  if (exact()) return rational() < 0;
  return std::get<double>(v_) < 0.0;
}

std::string Number::str() const {
  if (!exact()) {
    std::string s = format_double(std::get<double>(v_));
    if (s.find_first_of(".eE") == std::string::npos &&
        s.find_first_of("ni") == std::string::npos)
      s += ".0";
    return s;
  }
  const Rational& r = rational();
  std::string s = numerator(r).str();
  if (denominator(r) != 1) s += "/" + denominator(r).str();
  return s;
}

Number Number::operator-() const {
  if (exact()) return Number(Rational(-rational()));
  return Number(-std::get<double>(v_));
}

Number& Number::operator+=(const Number& o) {
  if (exact() && o.exact())
    v_ = Rational(rational() + o.rational());
  else
    v_ = value() + o.value();
  return *this;
}

Number& Number::operator-=(const Number& o) {
  if (exact() && o.exact())
    v_ = Rational(rational() - o.rational());
  else
    v_ = value() - o.value();
  return *this;
}

Number& Number::operator*=(const Number& o) {
  if (exact() && o.exact())
    v_ = Rational(rational() * o.rational());
  else
    v_ = value() * o.value();
  return *this;
}

Number& Number::operator/=(const Number& o) {
  if (exact() && o.exact()) {
    if (o.rational() == 0) throw std::domain_error("division by zero");
    v_ = Rational(rational() / o.rational());
  } else {
    v_ = value() / o.value();
  }
  return *this;
}

Number Number::pow_int(long long e) const {
  if (!exact()) return Number(std::pow(std::get<double>(v_), static_cast<double>(e)));
  if (e == 0) return Number(1);
  bool inv = e < 0;
  unsigned long long ue = inv ? static_cast<unsigned long long>(-(e + 1)) + 1ull
                              : static_cast<unsigned long long>(e);
  const Rational& r = rational();
  if (inv && r == 0) throw std::domain_error("zero raised to negative power");
  BigInt n = boost::multiprecision::pow(numerator(r), static_cast<unsigned>(ue));
  BigInt d = boost::multiprecision::pow(denominator(r), static_cast<unsigned>(ue));
  return inv ? Number(Rational(d, n)) : Number(Rational(n, d));
}

bool operator==(const Number& a, const Number& b) {
  if (a.exact() && b.exact()) return a.rational() == b.rational();
  return a.value() == b.value();
}

bool operator<(const Number& a, const Number& b) {
  if (a.exact() && b.exact()) return a.rational() < b.rational();
  return a.value() < b.value();
}

bool Number::same_representation(const Number& a, const Number& b) {
  if (a.exact() != b.exact()) return false;
  return a == b;
}

}  // namespace abelfe
