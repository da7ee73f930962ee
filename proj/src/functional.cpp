#include "abelfe/functional.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "abelfe/closedform.hpp"

namespace abelfe {

namespace {

double rel_err(double a, double b) {
  double scale = std::max(std::abs(a), std::abs(b));
  if (scale < 1e-8) return std::abs(a - b);
  return std::abs(a - b) / scale;
}

void validate_monomial(const MonomialTerm& mono) {
  if (mono.a.empty() || mono.a.size() != mono.b.size())
    throw std::invalid_argument("monomial exponent lists must be non-empty and equal length");
  for (int e : mono.a)
    if (e < 0) throw std::invalid_argument("monomial exponents must be nonnegative");
  for (int e : mono.b)
    if (e < 0) throw std::invalid_argument("monomial exponents must be nonnegative");
  if (mono.c == 0) throw std::invalid_argument("monomial coefficient must be nonzero");
}

Rational rational_pow(const Rational& base, int e) {
  return Number(base).pow_int(e).rational();
}

AbelEquation with_coefficient(const AbelEquation& eq, std::size_t k, double value) {
  std::vector<Term> terms = eq.terms();
  terms[k].coeff = expr_number(Number(value));
  return AbelEquation(eq.n(), std::move(terms), eq.z0(), eq.x0());
}

AbelEquation with_exponent(const AbelEquation& eq, std::size_t k, double value) {
  std::vector<Term> terms = eq.terms();
  terms[k].exponent = Number(value);
  return AbelEquation(eq.n(), std::move(terms), eq.z0(), eq.x0());
}

double endpoint_value(const AbelEquation& eq, double x_end, double tol) {
  Trajectory traj = integrate(eq, x_end, tol);
  if (traj.status == SolveStatus::BlowUp)
    throw SolveError(SolveError::Kind::BlowUp, "solve blew up before x_end");
  if (traj.status == SolveStatus::DomainExit)
    throw SolveError(SolveError::Kind::DomainExit, "solve left the domain before x_end");
  return traj.end_z();
}

}  // namespace

std::string_view scaling_kind_name(ScalingKind k) {
  return k == ScalingKind::Lambda ? "lambda" : "omega";
}

Rational evaluate_monomial(const MonomialTerm& mono, int n, std::span<const Rational> u,
                           std::span<const Rational> m) {
  validate_monomial(mono);
  if (u.size() != mono.a.size() || m.size() != mono.b.size())
    throw std::invalid_argument("slot count does not match monomial arity");
  Rational out = mono.c;
  for (std::size_t j = 0; j < u.size(); ++j) {
    out *= rational_pow(u[j], mono.a[j]);
    out *= rational_pow(Rational(m[j] - n), mono.b[j]);
  }
  return out;
}

bool monomial_scaling_holds(const MonomialTerm& mono, ScalingKind kind, int n,
                            const Rational& alpha) {
  validate_monomial(mono);
  if (n < 1) throw std::invalid_argument("n must be a positive integer");
  if (alpha == Rational(-n)) throw std::invalid_argument("alpha = -n is not admissible");

  const std::size_t K = mono.a.size();
  // Generic slots: u_j nonzero, m_j - n nonzero.
  std::vector<Number> u, m;
  for (std::size_t j = 0; j < K; ++j) {
    u.push_back(Number(Rational(2 * static_cast<long long>(j) + 2, 3)));
    m.push_back(Number(Rational(static_cast<long long>(n) * 2 + static_cast<long long>(j) + 1, 2)));
  }
  AlphaTransform t(Number(alpha), n);
  auto [ub, mb] = apply_to_parameters(t, u, m);

  std::vector<Rational> ur, mr, ubr, mbr;
  for (std::size_t j = 0; j < K; ++j) {
    ur.push_back(u[j].rational());
    mr.push_back(m[j].rational());
    ubr.push_back(ub[j].rational());
    mbr.push_back(mb[j].rational());
  }
  Rational original = evaluate_monomial(mono, n, ur, mr);
  Rational barred = evaluate_monomial(mono, n, ubr, mbr);
  Rational power = t.solution_power().rational();  // (n+alpha)/n

  if (kind == ScalingKind::Lambda)
    return original == rational_pow(power, n - 1) * barred;
  return original == barred / rational_pow(power, 2);
}

int scaling_constraint_value(ScalingKind kind, int n) {
  if (n < 1) throw std::invalid_argument("n must be a positive integer");
  const Rational probes[] = {Rational(1), Rational(1, 2), Rational(-1, 3), Rational(5, 2)};
  for (int mag = 0; mag <= 4 * n + 4; ++mag) {
    for (int v : {mag, -mag}) {
      int sa = std::max(0, (v + n - 1) / n);
      while (n * sa - v < 0) ++sa;
      MonomialTerm mono;
      mono.a = {sa};
      mono.b = {n * sa - v};
      bool ok = true;
      for (const Rational& alpha : probes) {
        if (alpha == Rational(-n)) continue;
        if (!monomial_scaling_holds(mono, kind, n, alpha)) {
          ok = false;
          break;
        }
      }
      if (ok) return v;
      if (v == 0) break;
    }
  }
  throw std::logic_error("no admissible constraint value found");
}

namespace {

void compositions(int total, int parts, std::vector<int>& prefix,
                  std::vector<std::vector<int>>& out) {
  if (parts == 1) {
    prefix.push_back(total);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int first = total; first >= 0; --first) {
    prefix.push_back(first);
    compositions(total - first, parts - 1, prefix, out);
    prefix.pop_back();
  }
}

std::vector<std::vector<int>> compositions_of(int total, int parts) {
  std::vector<std::vector<int>> out;
  std::vector<int> prefix;
  compositions(total, parts, prefix, out);
  return out;
}

}  // namespace

std::vector<MonomialExponents> enumerate_monomials(ScalingKind kind, int n, int K,
                                                   int degree_cap,
                                                   std::optional<int> constraint) {
  if (n < 1 || K < 1 || degree_cap < 0)
    throw std::invalid_argument("need n >= 1, K >= 1, degree_cap >= 0");
  const int value = constraint ? *constraint : scaling_constraint_value(kind, n);
  std::vector<MonomialExponents> out;
  for (int sa = 0; sa <= degree_cap; ++sa) {
    int sb = n * sa - value;
    if (sb < 0) continue;
    for (const auto& a : compositions_of(sa, K))
      for (const auto& b : compositions_of(sb, K))
        out.push_back({a, b});
  }
  return out;
}

ScalingReport verify_scaling_exact(const MonomialTerm& mono, ScalingKind kind, int n,
                                   std::span<const Rational> alphas) {
  validate_monomial(mono);
  ScalingReport report;
  report.kind = kind;
  report.n = n;
  report.monomial = mono;
  int sa = 0, sb = 0;
  for (int e : mono.a) sa += e;
  for (int e : mono.b) sb += e;
  report.constraint_value = n * sa - sb;
  report.pass = true;
  for (const Rational& alpha : alphas) {
    ScalingVerdict v;
    v.alpha = alpha;
    v.pass = monomial_scaling_holds(mono, kind, n, alpha);
    report.pass = report.pass && v.pass;
    report.verdicts.push_back(std::move(v));
  }
  return report;
}

SensitivityBundle fd_log_sensitivities(const AbelEquation& eq, double x_end,
                                       double solver_tol, double rel_step) {
  if (!has_constant_coefficients(eq))
    throw std::invalid_argument("finite-difference sensitivities need constant coefficients");
  const std::size_t K = eq.num_terms();
  std::vector<double> u = coefficient_values(eq, eq.x0());

  SensitivityBundle out;
  out.z_end = endpoint_value(eq, x_end, solver_tol);
  out.lambda.resize(K);
  out.omega.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    double h = rel_step * std::max(1.0, std::abs(u[k]));
    double hi = endpoint_value(with_coefficient(eq, k, u[k] + h), x_end, solver_tol);
    double lo = endpoint_value(with_coefficient(eq, k, u[k] - h), x_end, solver_tol);
    out.lambda[k] = (std::log(hi) - std::log(lo)) / (2.0 * h);

    double mk = eq.terms()[k].exponent.value();
    double hm = rel_step * std::max(1.0, std::abs(mk));
    hi = endpoint_value(with_exponent(eq, k, mk + hm), x_end, solver_tol);
    lo = endpoint_value(with_exponent(eq, k, mk - hm), x_end, solver_tol);
    out.omega[k] = (std::log(hi) - std::log(lo)) / (2.0 * hm);
  }
  return out;
}

NumericScalingReport verify_scaling_numeric(const AbelEquation& eq, const AlphaTransform& t,
                                            double x_end, double tol,
                                            bool force_finite_differences) {
  if (t.n() != eq.n()) throw std::invalid_argument("transform and equation disagree on n");
  if (!has_constant_coefficients(eq))
    throw std::invalid_argument("scaling checks need constant coefficients");

  const double solver_tol = 1e-10;
  const bool variational = eq.n() == 1 && !force_finite_differences;
  auto bundle = [&](const AbelEquation& e) {
    return variational ? sensitivities(e, x_end, solver_tol)
                       : fd_log_sensitivities(e, x_end, solver_tol);
  };

  SensitivityBundle orig = bundle(eq);
  SensitivityBundle barred = bundle(apply_to_equation(t, eq));

  const double lam_factor = t.solution_power().pow_int(eq.n() - 1).value();
  const double om_base = t.solution_power().value();
  const double om_factor = 1.0 / (om_base * om_base);

  NumericScalingReport report;
  report.tol = tol;
  report.used_variational = variational;
  report.pass = true;
  for (std::size_t k = 0; k < eq.num_terms(); ++k) {
    NumericScalingTermCheck c;
    c.lhs_lambda = orig.lambda[k];
    c.rhs_lambda = lam_factor * barred.lambda[k];
    c.err_lambda = rel_err(c.lhs_lambda, c.rhs_lambda);
    c.lhs_omega = orig.omega[k];
    c.rhs_omega = om_factor * barred.omega[k];
    c.err_omega = rel_err(c.lhs_omega, c.rhs_omega);
    c.pass = c.err_lambda <= tol && c.err_omega <= tol;
    report.pass = report.pass && c.pass;
    report.terms.push_back(c);
  }
  return report;
}

double transform_commutation_error(const AbelEquation& eq, const AlphaTransform& t,
                                   std::span<const double> checkpoints, double solver_tol) {
  if (checkpoints.empty()) throw std::invalid_argument("need at least one checkpoint");
  double x_end = *std::max_element(checkpoints.begin(), checkpoints.end());

  Trajectory traj = integrate(eq, x_end, solver_tol, checkpoints);
  if (traj.status == SolveStatus::BlowUp)
    throw SolveError(SolveError::Kind::BlowUp, "original solve blew up");
  if (traj.status == SolveStatus::DomainExit)
    throw SolveError(SolveError::Kind::DomainExit, "original solve left the domain");

  Trajectory barred = integrate(apply_to_equation(t, eq), x_end, solver_tol, checkpoints);
  if (barred.status == SolveStatus::BlowUp)
    throw SolveError(SolveError::Kind::BlowUp, "transformed solve blew up");
  if (barred.status == SolveStatus::DomainExit)
    throw SolveError(SolveError::Kind::DomainExit, "transformed solve left the domain");

  const double back_power = 1.0 / t.solution_power().value();
  double worst = 0.0;
  for (double cp : checkpoints) {
    auto z = traj.value_at(cp);
    auto w = barred.value_at(cp);
    if (!z || !w)
      throw SolveError(SolveError::Kind::DomainExit, "checkpoint was not landed on");
    worst = std::max(worst, rel_err(*z, std::pow(*w, back_power)));
  }
  return worst;
}

PowerRelationReport verify_power_relation(const AbelEquation& eq, const AlphaTransform& t,
                                          double beta, double x_end, double solver_tol,
                                          double tol) {
  double z = endpoint_value(eq, x_end, solver_tol);
  double w = endpoint_value(apply_to_equation(t, eq), x_end, solver_tol);
  const double back_power = 1.0 / t.solution_power().value();

  PowerRelationReport report;
  report.base_err = rel_err(z, std::pow(w, back_power));
  report.closure_err = rel_err(std::pow(z, beta), std::pow(w, beta * back_power));
  report.pass = report.base_err <= tol && report.closure_err <= tol;
  return report;
}

SlotTuple constant_slots(const AbelEquation& eq) {
  if (eq.n() != 1) throw std::invalid_argument("slot tuples describe first-order equations");
  if (!has_constant_coefficients(eq))
    throw std::invalid_argument("slot tuples need constant coefficients");
  SlotTuple s;
  s.u = coefficient_values(eq, eq.x0());
  for (const Term& t : eq.terms()) s.m.push_back(t.exponent.value());
  s.z0 = eq.z0();
  return s;
}

SlotTuple alpha_substitution(const SlotTuple& s, std::size_t k) {
  if (k >= s.u.size() || s.u.size() != s.m.size())
    throw std::invalid_argument("slot index out of range");
  const double mk = s.m[k];
  if (mk == 0.0)
    throw std::domain_error("m_k = 0 makes the substituted exponent map singular");
  if (!(s.z0 > 0.0)) throw std::domain_error("initial slot must be positive");
  SlotTuple out;
  out.u.reserve(s.u.size());
  out.m.reserve(s.m.size());
  for (std::size_t j = 0; j < s.u.size(); ++j) {
    out.u.push_back(mk * s.u[j]);
    out.m.push_back((s.m[j] + mk - 1.0) / mk);
  }
  out.z0 = std::pow(s.z0, mk);
  return out;
}

std::vector<ResidualSample> substitution_residual(
    const SlotFunction& F, std::span<const std::function<double(double)>> phi,
    std::span<const SlotTuple> samples) {
  std::vector<ResidualSample> out;
  out.reserve(samples.size());
  for (const SlotTuple& s : samples) {
    if (s.u.size() != phi.size())
      throw std::invalid_argument("one phi per slot is required");
    ResidualSample r;
    r.slots = s;
    for (std::size_t k = 0; k < s.u.size(); ++k) {
      double h = 1e-6 * std::max(1.0, std::abs(s.u[k]));
      SlotTuple hi = s, lo = s;
      hi.u[k] += h;
      lo.u[k] -= h;
      r.lhs += (F(hi) - F(lo)) / (2.0 * h) * phi[k](s.u[k]);
      r.rhs += s.u[k] * F(alpha_substitution(s, k));
    }
    r.residual = r.lhs - r.rhs;
    out.push_back(std::move(r));
  }
  return out;
}

ReconstructionReport reconstruct_from_boundary(const AbelEquation& eq, double x_end,
                                               double tol) {
  if (eq.n() != 1 || eq.num_terms() != 2)
    throw std::invalid_argument("reconstruction needs a first-order two-term equation");
  if (!has_constant_coefficients(eq))
    throw std::invalid_argument("reconstruction needs constant coefficients");

  const double solver_tol = 1e-10;
  const double quad_tol = std::min(1e-6, tol / 10.0);
  std::vector<double> u = coefficient_values(eq, eq.x0());
  std::vector<double> m{eq.terms()[0].exponent.value(), eq.terms()[1].exponent.value()};

  ReconstructionReport report;
  report.direct = endpoint_value(eq, x_end, solver_tol);

  auto path = [&](std::size_t vary, std::size_t fixed) {
    double boundary = separable_solution(expr_number(Number(u[fixed])), m[fixed], eq.z0(),
                                         eq.x0(), x_end, solver_tol / 10.0);
    auto lam = [&](double theta) {
      return sensitivities(with_coefficient(eq, vary, theta), x_end, solver_tol)
          .lambda[vary];
    };
    return boundary * std::exp(quadrature(lam, 0.0, u[vary], quad_tol));
  };
  report.via_first = path(0, 1);
  report.via_second = path(1, 0);

  const double scale = std::max(std::abs(report.direct), 1e-12);
  report.err_first = std::abs(report.via_first - report.direct) / scale;
  report.err_second = std::abs(report.via_second - report.direct) / scale;
  report.err_paths = std::abs(report.via_first - report.via_second) / scale;
  report.pass = report.err_first <= tol && report.err_second <= tol &&
                report.err_paths <= 2.0 * tol;
  return report;
}

MixedPartialReport mixed_partial_check(const AbelEquation& eq, double x_end, double step,
                                       double tol) {
  if (eq.n() != 1 || eq.num_terms() != 2)
    throw std::invalid_argument("the mixed-partial check needs a first-order two-term equation");
  if (!has_constant_coefficients(eq))
    throw std::invalid_argument("the mixed-partial check needs constant coefficients");

  const double solver_tol = 1e-10;
  std::vector<double> u = coefficient_values(eq, eq.x0());
  std::vector<double> m{eq.terms()[0].exponent.value(), eq.terms()[1].exponent.value()};

  auto lam = [&](const AbelEquation& e, std::size_t idx) {
    return sensitivities(e, x_end, solver_tol).lambda[idx];
  };
  auto omg = [&](const AbelEquation& e, std::size_t idx) {
    return sensitivities(e, x_end, solver_tol).omega[idx];
  };
  auto d_coeff = [&](std::size_t k, auto&& read) {
    double h = step * std::max(1.0, std::abs(u[k]));
    return (read(with_coefficient(eq, k, u[k] + h)) -
            read(with_coefficient(eq, k, u[k] - h))) /
           (2.0 * h);
  };
  auto d_exp = [&](std::size_t k, auto&& read) {
    double h = step * std::max(1.0, std::abs(m[k]));
    return (read(with_exponent(eq, k, m[k] + h)) - read(with_exponent(eq, k, m[k] - h))) /
           (2.0 * h);
  };

  MixedPartialReport report;
  report.pass = true;
  auto add_pair = [&](std::string name, double lhs, double rhs) {
    MixedPartialPair p;
    p.name = std::move(name);
    p.lhs = lhs;
    p.rhs = rhs;
    p.err = std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
    p.pass = p.err <= tol;
    report.pass = report.pass && p.pass;
    report.pairs.push_back(std::move(p));
  };

  add_pair("du1_du2", d_coeff(1, [&](const AbelEquation& e) { return lam(e, 0); }),
           d_coeff(0, [&](const AbelEquation& e) { return lam(e, 1); }));
  add_pair("du1_dm1", d_exp(0, [&](const AbelEquation& e) { return lam(e, 0); }),
           d_coeff(0, [&](const AbelEquation& e) { return omg(e, 0); }));
  add_pair("dm1_dm2", d_exp(1, [&](const AbelEquation& e) { return omg(e, 0); }),
           d_exp(0, [&](const AbelEquation& e) { return omg(e, 1); }));
  return report;
}

std::vector<RepresentationCheck> nonuniqueness_demo(std::span<const Expr> reps,
                                                    const Expr& g1, const Expr& g2,
                                                    const Expr& target,
                                                    std::span<const double> grid, double tol) {
  if (grid.empty()) throw std::invalid_argument("grid must be non-empty");
  static const std::string slots[] = {std::string("u1"), std::string("u2")};
  std::vector<RepresentationCheck> out;
  for (const Expr& rep : reps) {
    if (!uses_only(rep, slots))
      throw std::invalid_argument("representations may only use u1 and u2");
    RepresentationCheck check;
    check.expression = to_string(rep);
    Expr composed = substitute(rep, {{"u1", g1}, {"u2", g2}});
    for (double x : grid) {
      const std::map<std::string, double> at{{"x", x}};
      check.max_abs_dev =
          std::max(check.max_abs_dev, std::abs(evaluate(composed, at) - evaluate(target, at)));
    }
    check.pass = check.max_abs_dev <= tol;
    out.push_back(std::move(check));
  }
  return out;
}

nlohmann::json to_json(const ScalingReport& r) {
  nlohmann::json j;
  j["kind"] = std::string(scaling_kind_name(r.kind));
  j["n"] = r.n;
  j["a"] = r.monomial.a;
  j["b"] = r.monomial.b;
  j["c"] = Number(r.monomial.c).str();
  j["constraint_value"] = r.constraint_value;
  j["mode"] = "exact";
  j["verdicts"] = nlohmann::json::array();
  for (const ScalingVerdict& v : r.verdicts)
    j["verdicts"].push_back({{"alpha", Number(v.alpha).str()}, {"pass", v.pass}});
  j["pass"] = r.pass;
  return j;
}

nlohmann::json to_json(const NumericScalingReport& r) {
  nlohmann::json j;
  j["mode"] = r.used_variational ? "variational" : "finite-difference";
  j["tol"] = r.tol;
  j["terms"] = nlohmann::json::array();
  for (const NumericScalingTermCheck& c : r.terms)
    j["terms"].push_back({{"err_lambda", c.err_lambda},
                          {"err_omega", c.err_omega},
                          {"pass", c.pass}});
  j["pass"] = r.pass;
  return j;
}

nlohmann::json to_json(const ResidualSample& s) {
  nlohmann::json j;
  j["u"] = s.slots.u;
  j["m"] = s.slots.m;
  j["z0"] = s.slots.z0;
  j["lhs"] = s.lhs;
  j["rhs"] = s.rhs;
  j["residual"] = s.residual;
  return j;
}

}  // namespace abelfe
