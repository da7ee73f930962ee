#pragma once

#include "abelfe/expr.hpp"
#include "abelfe/solve.hpp"

namespace abelfe {

// dz/dx = g(x) z^m + h(x) z with z(x0) = z0 > 0 and m != 1.
struct BernoulliSpec {
  Expr g;
  Expr h;
  double m = 0.0;
  double z0 = 1.0;
  double x0 = 0.0;
};

// Exact solution via the substitution y = z^(1-m), which turns the equation
// linear: z(x) = e^H(x) * [z0^(1-m) + (1-m) * I(x)]^(1/(1-m)) with
// H(x) the integral of h from x0 and I(x) the integral of g e^((m-1)H).
// Integrals are adaptive quadratures, the inner one at tol/10. Throws
// SolveError{DomainExit} when the bracket is not positive at x.
double bernoulli_solution(const BernoulliSpec& spec, double x, double tol);

// dz/dx = v(x) z^n_exp: for n_exp != 1 the power-law form
// [z0^(1-n_exp) + (1-n_exp) V(x)]^(1/(1-n_exp)), for n_exp = 1 the
// exponential z0 e^V(x), with V the integral of v from x0. Requires x >= x0.
double separable_solution(const Expr& v, double n_exp, double z0, double x0, double x,
                          double tol);

// Exchanges the roles of the power term and the linear term; an involution.
BernoulliSpec bernoulli_role_swap(const BernoulliSpec& spec);

}  // namespace abelfe
