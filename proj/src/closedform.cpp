#include "abelfe/closedform.hpp"

#include <cmath>
#include <stdexcept>

namespace abelfe {

namespace {

void validate_spec(const BernoulliSpec& spec) {
  if (!spec.g.valid() || !spec.h.valid())
    throw std::invalid_argument("both coefficient expressions are required");
  if (spec.m == 1.0)
    throw std::invalid_argument("m = 1 merges both terms into one linear term");
  if (!(spec.z0 > 0.0)) throw std::invalid_argument("initial value must be positive");
}

double eval_at(const Expr& e, double x) {
  return evaluate(e, {{"x", x}});
}

}  // namespace

double bernoulli_solution(const BernoulliSpec& spec, double x, double tol) {
  validate_spec(spec);
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");

  const double inner_tol = tol / 10.0;
  auto H = [&spec, inner_tol](double t) {
    return quadrature([&spec](double s) { return eval_at(spec.h, s); }, spec.x0, t,
                      inner_tol);
  };
  const double one_minus_m = 1.0 - spec.m;
  auto integrand = [&spec, &H, one_minus_m](double t) {
    return eval_at(spec.g, t) * std::exp(-one_minus_m * H(t));
  };
  double I = quadrature(integrand, spec.x0, x, tol);
  double bracket = std::pow(spec.z0, one_minus_m) + one_minus_m * I;
  if (!(bracket > 0.0))
    throw SolveError(SolveError::Kind::DomainExit,
                     "solution leaves the positive domain before x");
  return std::exp(H(x)) * std::pow(bracket, 1.0 / one_minus_m);
}

double separable_solution(const Expr& v, double n_exp, double z0, double x0, double x,
                          double tol) {
  if (!v.valid()) throw std::invalid_argument("coefficient expression is required");
  if (!(z0 > 0.0)) throw std::invalid_argument("initial value must be positive");
  if (x < x0) throw std::invalid_argument("evaluation point must not precede x0");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");

  double V = quadrature([&v](double t) { return eval_at(v, t); }, x0, x, tol);
  if (n_exp == 1.0) return z0 * std::exp(V);
  const double p = 1.0 - n_exp;
  double bracket = std::pow(z0, p) + p * V;
  if (!(bracket > 0.0))
    throw SolveError(SolveError::Kind::DomainExit,
                     "solution leaves the positive domain before x");
  return std::pow(bracket, 1.0 / p);
}

BernoulliSpec bernoulli_role_swap(const BernoulliSpec& spec) {
  validate_spec(spec);
  BernoulliSpec out = spec;
  out.g = spec.h;
  out.h = spec.g;
  return out;
}

}  // namespace abelfe
