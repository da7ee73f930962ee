#pragma once

#include <span>
#include <utility>
#include <vector>

#include "abelfe/equation.hpp"
#include "abelfe/number.hpp"

namespace abelfe {

// Parameter substitution that carries one equation into another of the same
// shape: coefficients scale by ((n+alpha)/n)^n, exponents map through
// m -> n(m+alpha)/(n+alpha), and the initial value is raised to (n+alpha)/n.
// The solutions correspond through z = w^(n/(n+alpha)).
class AlphaTransform {
 public:
  AlphaTransform(Number alpha, int n);

  const Number& alpha() const { return alpha_; }
  int n() const { return n_; }

  // (n+alpha)/n, the power that carries z0 and the solution.
  Number solution_power() const;
  // ((n+alpha)/n)^n, applied to every coefficient.
  Number coefficient_factor() const;
  Number exponent_map(const Number& m) const;
  double initial_value_map(double z0) const;

 private:
  Number alpha_;
  int n_;
};

std::pair<std::vector<Number>, std::vector<Number>> apply_to_parameters(
    const AlphaTransform& t, std::span<const Number> u, std::span<const Number> m);

AbelEquation apply_to_equation(const AlphaTransform& t, const AbelEquation& eq);

// Applying `second` and then `first` equals applying the composite directly;
// the composite power is alpha + beta + alpha*beta/n.
AlphaTransform compose(const AlphaTransform& first, const AlphaTransform& second);
AlphaTransform invert(const AlphaTransform& t);

}  // namespace abelfe
