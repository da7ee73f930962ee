#include "abelfe/transform.hpp"

#include <cmath>
#include <stdexcept>

namespace abelfe {

AlphaTransform::AlphaTransform(Number alpha, int n) : alpha_(std::move(alpha)), n_(n) {
  if (n_ < 1) throw std::invalid_argument("derivative power n must be a positive integer");
  if (alpha_ == Number(-n_))
    throw std::invalid_argument("alpha = -n collapses the exponent map");
}

Number AlphaTransform::solution_power() const {
  return (alpha_ + Number(n_)) / Number(n_);
}

Number AlphaTransform::coefficient_factor() const {
  return solution_power().pow_int(n_);
}

Number AlphaTransform::exponent_map(const Number& m) const {
  return Number(n_) * (m + alpha_) / (Number(n_) + alpha_);
}

double AlphaTransform::initial_value_map(double z0) const {
  if (!(z0 > 0.0)) throw std::invalid_argument("initial value must be positive");
  return std::pow(z0, solution_power().value());
}

std::pair<std::vector<Number>, std::vector<Number>> apply_to_parameters(
    const AlphaTransform& t, std::span<const Number> u, std::span<const Number> m) {
  if (u.size() != m.size())
    throw std::invalid_argument("coefficient and exponent lists must have equal length");
  std::vector<Number> ub, mb;
  ub.reserve(u.size());
  mb.reserve(m.size());
  const Number factor = t.coefficient_factor();
  for (std::size_t k = 0; k < u.size(); ++k) {
    ub.push_back(factor * u[k]);
    mb.push_back(t.exponent_map(m[k]));
  }
  return {std::move(ub), std::move(mb)};
}

AbelEquation apply_to_equation(const AlphaTransform& t, const AbelEquation& eq) {
  if (t.n() != eq.n())
    throw std::invalid_argument("transform and equation disagree on n");
  const Number factor = t.coefficient_factor();
  std::vector<Term> terms;
  terms.reserve(eq.num_terms());
  for (const Term& term : eq.terms()) {
    Term nt;
    nt.coeff = expr_mul(expr_number(factor), term.coeff);
    nt.exponent = t.exponent_map(term.exponent);
    terms.push_back(std::move(nt));
  }
  return AbelEquation(eq.n(), std::move(terms), t.initial_value_map(eq.z0()), eq.x0());
}

AlphaTransform compose(const AlphaTransform& first, const AlphaTransform& second) {
  if (first.n() != second.n())
    throw std::invalid_argument("cannot compose transforms with different n");
  const Number& a = first.alpha();
  const Number& b = second.alpha();
  Number gamma = a + b + a * b / Number(first.n());
  return AlphaTransform(std::move(gamma), first.n());
}

AlphaTransform invert(const AlphaTransform& t) {
  const Number& a = t.alpha();
  Number inv = -(Number(t.n()) * a) / (Number(t.n()) + a);
  return AlphaTransform(std::move(inv), t.n());
}

}  // namespace abelfe
