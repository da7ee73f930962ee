// Acceptance gate: one line per criterion, exit code = number of failures.
// Tolerances are pinned here on purpose; loosening them is a spec change.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <limits>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "abelfe/closedform.hpp"
#include "abelfe/functional.hpp"
#include "abelfe/solve.hpp"
#include "abelfe/suites.hpp"
#include "abelfe/transform.hpp"

using namespace abelfe;

namespace {

int g_failures = 0;

void criterion(int num, const char* label, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", num, label,
              detail.c_str());
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// Worst value of body over `count` seeded instances; draws that leave the
// solvable domain are redrawn, exhaustion surfaces as +inf.
template <typename Fn>
double worst_instance(int count, std::uint64_t stream, Fn&& body) {
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    bool done = false;
    for (int attempt = 0; attempt < 500 && !done; ++attempt) {
      Rng rng(mix_seed(7, stream, static_cast<std::uint64_t>(i) * 1000 + attempt));
      try {
        worst = std::max(worst, body(rng));
        done = true;
      } catch (const SolveError&) {
      } catch (const EvalError&) {
      }
    }
    if (!done) return std::numeric_limits<double>::infinity();
  }
  return worst;
}

std::vector<double> window_checkpoints(double x0, int count, double step) {
  std::vector<double> pts;
  for (int j = 1; j <= count; ++j) pts.push_back(x0 + step * j);
  return pts;
}

// --- criterion 1 and 2: the transform commutes with solving ---

void run_commutation() {
  auto t0 = std::chrono::steady_clock::now();
  double worst = worst_instance(200, 9101, [](Rng& rng) {
    int K = 1 + rng.range(0, 2);
    bool constant = rng.range(0, 1) == 0;
    AbelEquation eq = random_equation(rng, 1, K, constant, false);
    AlphaTransform t = random_transform(rng, 1);
    std::vector<double> pts = window_checkpoints(eq.x0(), 10, 0.03);
    return transform_commutation_error(eq, t, pts, 1e-10);
  });
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  criterion(1, "transform-solve commutation, first order", worst <= 1e-6 && secs <= 10.0,
            fmt("max rel err %.3e <= 1e-06 over 200 instances, %.2f s <= 10 s", worst, secs));

  double worst_n = worst_instance(50, 9102, [](Rng& rng) {
    int n = 2 + rng.range(0, 1);
    int K = 1 + rng.range(0, 1);
    AbelEquation eq = random_equation(rng, n, K, rng.range(0, 1) == 0, true);
    AlphaTransform t = random_transform(rng, n);
    std::vector<double> pts = window_checkpoints(eq.x0(), 10, 0.03);
    return transform_commutation_error(eq, t, pts, 1e-10);
  });
  criterion(2, "transform-solve commutation, higher order", worst_n <= 1e-5,
            fmt("max rel err %.3e <= 1e-05 over 50 instances with n in {2,3}", worst_n));
}

// --- criterion 3: log-sensitivity scaling laws ---

double report_worst_err(const NumericScalingReport& rep) {
  double w = 0.0;
  for (const NumericScalingTermCheck& t : rep.terms)
    w = std::max({w, t.err_lambda, t.err_omega});
  return w;
}

void run_scaling_laws() {
  double worst_var = worst_instance(50, 9201, [](Rng& rng) {
    int K = 1 + rng.range(0, 1);
    AbelEquation eq = random_equation(rng, 1, K, true, false);
    AlphaTransform t = random_transform(rng, 1);
    NumericScalingReport rep = verify_scaling_numeric(eq, t, eq.x0() + 0.3, 1e-4);
    if (!rep.used_variational) return 1.0;
    return report_worst_err(rep);
  });
  double worst_fd = worst_instance(50, 9202, [](Rng& rng) {
    int K = 1 + rng.range(0, 1);
    AbelEquation eq = random_equation(rng, 1, K, true, false);
    AlphaTransform t = random_transform(rng, 1);
    return report_worst_err(verify_scaling_numeric(eq, t, eq.x0() + 0.3, 1e-3, true));
  });
  double worst_n2 = worst_instance(25, 9203, [](Rng& rng) {
    int K = 1 + rng.range(0, 1);
    AbelEquation eq = random_equation(rng, 2, K, true, true);
    AlphaTransform t = random_transform(rng, 2);
    return report_worst_err(verify_scaling_numeric(eq, t, eq.x0() + 0.3, 1e-3));
  });
  criterion(3, "log-sensitivity scaling laws",
            worst_var <= 1e-4 && worst_fd <= 1e-3 && worst_n2 <= 1e-3,
            fmt("variational %.3e <= 1e-04, fd cross-check %.3e <= 1e-03, n=2 fd %.3e <= 1e-03",
                worst_var, worst_fd, worst_n2));
}

// --- criterion 4: monomial enumeration against an independent scan ---

// Plain odometer scan over all exponent boxes; shares no code with
// enumerate_monomials.
std::vector<MonomialExponents> brute_force_scan(ScalingKind kind, int n, int K, int cap) {
  int target = scaling_constraint_value(kind, n);
  std::vector<MonomialExponents> out;
  std::vector<int> a(K, 0);
  for (;;) {
    int sa = 0;
    for (int v : a) sa += v;
    if (sa <= cap) {
      int sb_needed = n * sa - target;
      if (sb_needed >= 0) {
        std::vector<int> b(K, 0);
        for (;;) {
          int sb = 0;
          for (int v : b) sb += v;
          if (sb == sb_needed) out.push_back({a, b});
          int j = K - 1;
          while (j >= 0 && b[j] == sb_needed) b[j--] = 0;
          if (j < 0) break;
          ++b[j];
        }
      }
    }
    int j = K - 1;
    while (j >= 0 && a[j] == cap) a[j--] = 0;
    if (j < 0) break;
    ++a[j];
  }
  return out;
}

bool same_as_sets(std::vector<MonomialExponents> x, std::vector<MonomialExponents> y) {
  auto key = [](const MonomialExponents& e) { return std::make_pair(e.a, e.b); };
  auto lt = [&](const MonomialExponents& p, const MonomialExponents& q) {
    return key(p) < key(q);
  };
  std::sort(x.begin(), x.end(), lt);
  std::sort(y.begin(), y.end(), lt);
  if (x.size() != y.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i].a != y[i].a || x[i].b != y[i].b) return false;
  return true;
}

void run_monomial_machinery() {
  bool scan_ok = true;
  bool exact_ok = true;
  long checked = 0;
  Rng rng(mix_seed(7, 9401, 0));
  for (int n = 1; n <= 3 && scan_ok; ++n)
    for (int K = 1; K <= 2 && scan_ok; ++K)
      for (int cap = 0; cap <= 4 && scan_ok; ++cap)
        for (ScalingKind kind : {ScalingKind::Lambda, ScalingKind::Omega}) {
          auto got = enumerate_monomials(kind, n, K, cap);
          if (!same_as_sets(got, brute_force_scan(kind, n, K, cap))) {
            scan_ok = false;
            break;
          }
          for (const MonomialExponents& e : got) {
            MonomialTerm mono{e.a, e.b, Rational(1)};
            std::vector<Rational> alphas;
            while (alphas.size() < 5) {
              Rational a = rng.rational(-9, 9, 9);
              if (a != Rational(-n)) alphas.push_back(a);
            }
            if (!verify_scaling_exact(mono, kind, n, alphas).pass) exact_ok = false;
            ++checked;
          }
        }

  // The pinned example orderings.
  auto lam11 = enumerate_monomials(ScalingKind::Lambda, 1, 1, 2);
  bool order_ok = lam11.size() == 3 && lam11[0].a == std::vector<int>{0} &&
                  lam11[1].a == std::vector<int>{1} && lam11[1].b == std::vector<int>{1} &&
                  lam11[2].a == std::vector<int>{2} && lam11[2].b == std::vector<int>{2};
  auto om12 = enumerate_monomials(ScalingKind::Omega, 1, 2, 2);
  order_ok = order_ok && om12.size() == 3 && om12[0].a == (std::vector<int>{2, 0}) &&
             om12[1].a == (std::vector<int>{1, 1}) && om12[2].a == (std::vector<int>{0, 2});

  bool omega_two = scaling_constraint_value(ScalingKind::Omega, 1) == 2 &&
                   scaling_constraint_value(ScalingKind::Omega, 2) == 2 &&
                   scaling_constraint_value(ScalingKind::Omega, 3) == 2;

  // At n = 2 the exponent-slot law fixes n*sum(a) - sum(b) to 1 - n, not the
  // printed n - 1: the (1,1) candidate fails and the (0,1) candidate passes.
  std::vector<Rational> alphas{Rational(1), Rational(-1, 2), Rational(3, 4), Rational(2),
                               Rational(-3)};
  bool printed_fails =
      !verify_scaling_exact(MonomialTerm{{1}, {1}, Rational(1)}, ScalingKind::Lambda, 2, alphas)
           .pass;
  bool corrected_passes =
      verify_scaling_exact(MonomialTerm{{0}, {1}, Rational(1)}, ScalingKind::Lambda, 2, alphas)
          .pass;

  criterion(4, "monomial enumeration and exact scaling",
            scan_ok && exact_ok && order_ok && omega_two && printed_fails && corrected_passes,
            fmt("independent scan matches for 30 (n,K,cap) boxes, %ld monomials scale exactly, "
                "omega constraint = 2, n=2 constraint is 1-n: (1,1) fails, (0,1) passes",
                checked));
}

// --- criterion 5 and 6: closed forms against the integrator ---

void run_closed_forms() {
  double worst_b = worst_instance(100, 9301, [](Rng& rng) {
    Expr g = random_coefficient(rng, rng.range(0, 1) == 0, false);
    Expr h = random_coefficient(rng, rng.range(0, 1) == 0, false);
    double m = rng.uniform(-1.0, 3.0);
    if (std::abs(m - 1.0) < 0.05) throw EvalError("resample near-linear exponent");
    double z0 = rng.uniform(0.5, 2.0), x0 = rng.uniform(-0.2, 0.2);
    BernoulliSpec spec{g, h, m, z0, x0};
    std::vector<Term> terms{{g, Number(m)}, {h, Number(1)}};
    AbelEquation eq(1, terms, z0, x0);
    std::vector<double> pts = window_checkpoints(x0, 5, 0.06);
    Trajectory tr = integrate(eq, pts.back(), 1e-11, pts);
    if (tr.status != SolveStatus::ReachedEnd) throw SolveError(SolveError::Kind::BlowUp, "short");
    double worst = 0.0;
    for (double p : pts) {
      double zc = bernoulli_solution(spec, p, 1e-12);
      double zi = *tr.value_at(p);
      worst = std::max(worst, std::abs(zc - zi) / std::abs(zi));
    }
    return worst;
  });

  double worst_g0 = worst_instance(10, 9302, [](Rng& rng) {
    Expr h = random_coefficient(rng, false, false);
    double m = rng.uniform(-1.0, 3.0);
    if (std::abs(m - 1.0) < 0.05) throw EvalError("resample");
    double z0 = rng.uniform(0.5, 2.0);
    double X = 0.4;
    double zc = bernoulli_solution({expr_number(Number(0)), h, m, z0, 0.0}, X, 1e-12);
    double H = quadrature([&](double x) { return evaluate(h, {{"x", x}}); }, 0.0, X, 1e-12);
    return std::abs(zc - z0 * std::exp(H)) / (z0 * std::exp(H));
  });

  double worst_m0 = worst_instance(10, 9303, [](Rng& rng) {
    Expr g = random_coefficient(rng, false, false);
    Expr h = random_coefficient(rng, false, false);
    double z0 = rng.uniform(0.5, 2.0);
    BernoulliSpec spec{g, h, 0.0, z0, 0.0};
    std::vector<Term> terms{{g, Number(0)}, {h, Number(1)}};
    AbelEquation eq(1, terms, z0, 0.0);
    Trajectory tr = integrate(eq, 0.4, 1e-11);
    if (tr.status != SolveStatus::ReachedEnd) throw SolveError(SolveError::Kind::BlowUp, "short");
    return std::abs(bernoulli_solution(spec, 0.4, 1e-12) - tr.end_z()) / tr.end_z();
  });

  criterion(5, "two-term closed form vs integration",
            worst_b <= 1e-8 && worst_g0 <= 1e-8 && worst_m0 <= 1e-8,
            fmt("100 instances at 5 checkpoints %.3e <= 1e-08, vanishing power term %.3e, "
                "zero exponent %.3e",
                worst_b, worst_g0, worst_m0));

  double worst_sep = worst_instance(50, 9304, [](Rng& rng) {
    Expr v = random_coefficient(rng, rng.range(0, 1) == 0, false);
    bool linear = rng.range(0, 4) == 0;
    double ne = linear ? 1.0 : rng.uniform(-1.0, 3.0);
    double z0 = rng.uniform(0.5, 2.0), x0 = rng.uniform(-0.2, 0.2);
    double X = x0 + 0.25;
    std::vector<Term> terms{{v, Number(ne)}};
    AbelEquation eq(1, terms, z0, x0);
    Trajectory tr = integrate(eq, X, 1e-12);
    if (tr.status != SolveStatus::ReachedEnd) throw SolveError(SolveError::Kind::BlowUp, "short");
    double zc = separable_solution(v, ne, z0, x0, X, 1e-13);
    return std::abs(zc - tr.end_z()) / tr.end_z();
  });

  double worst_ladder = worst_instance(20, 9305, [](Rng& rng) {
    Expr g = random_coefficient(rng, true, false);
    Expr h = random_coefficient(rng, true, false);
    double m = rng.uniform(-1.0, 3.0);
    if (std::abs(m - 1.0) < 0.05) throw EvalError("resample");
    double z0 = rng.uniform(0.5, 2.0);
    double X = 0.3;
    // Dropping the zeroed power term must land on the one-term closed form.
    std::vector<Term> terms{{expr_number(Number(0)), Number(m)}, {h, Number(1)}};
    AbelEquation eq(1, terms, z0, 0.0);
    AbelEquation dropped = specialize_zero_term(eq, 0);
    Trajectory tr = integrate(dropped, X, 1e-11);
    if (tr.status != SolveStatus::ReachedEnd) throw SolveError(SolveError::Kind::BlowUp, "short");
    double rung1 = std::abs(separable_solution(h, 1.0, z0, 0.0, X, 1e-12) - tr.end_z()) /
                   tr.end_z();
    // And a vanishing linear term must land on the separable power form.
    double zb = bernoulli_solution({g, expr_number(Number(0)), m, z0, 0.0}, X, 1e-12);
    double zs = separable_solution(g, m, z0, 0.0, X, 1e-12);
    double rung2 = std::abs(zb - zs) / std::abs(zs);
    return std::max(rung1, rung2);
  });

  criterion(6, "boundary specializations",
            worst_sep <= 1e-10 && worst_ladder <= 1e-8,
            fmt("one-term closed form %.3e <= 1e-10 over 50 instances, specialization ladder "
                "%.3e <= 1e-08 over 20",
                worst_sep, worst_ladder));
}

// --- criterion 7: reconstruction from boundary data ---

void run_reconstruction() {
  double worst_rec = worst_instance(20, 9501, [](Rng& rng) {
    double u = rng.uniform(0.1, 1.0), v = rng.uniform(0.1, 1.0);
    double m = rng.uniform(-0.5, 2.5), p = rng.uniform(-0.5, 2.5);
    std::vector<Term> terms{{expr_number(Number(u)), Number(m)},
                            {expr_number(Number(v)), Number(p)}};
    AbelEquation eq(1, terms, rng.uniform(0.5, 2.0), 0.0);
    ReconstructionReport rep = reconstruct_from_boundary(eq, 0.3, 1e-6);
    return std::max(rep.err_first, rep.err_second);
  });
  double worst_mix = worst_instance(10, 9502, [](Rng& rng) {
    double u = rng.uniform(0.1, 1.0), v = rng.uniform(0.1, 1.0);
    double m = rng.uniform(-0.5, 2.5), p = rng.uniform(-0.5, 2.5);
    std::vector<Term> terms{{expr_number(Number(u)), Number(m)},
                            {expr_number(Number(v)), Number(p)}};
    AbelEquation eq(1, terms, rng.uniform(0.5, 2.0), 0.0);
    MixedPartialReport rep = mixed_partial_check(eq, 0.3, 1e-4, 1e-3);
    double w = 0.0;
    for (const MixedPartialPair& pr : rep.pairs) w = std::max(w, pr.err);
    return w;
  });
  criterion(7, "boundary reconstruction and mixed partials",
            worst_rec <= 1e-3 && worst_mix <= 1e-3,
            fmt("both exp-integral paths %.3e <= 1e-03 over 20 instances, mixed partials "
                "%.3e <= 1e-03",
                worst_rec, worst_mix));
}

// --- criterion 8: the substitution-residual instrument ---

void run_residual_instrument() {
  SlotFunction F = [](const SlotTuple& s) {
    double m = s.m[0], u = s.u[0];
    double bracket = std::pow(s.z0, 1.0 - m) + (1.0 - m) * (u - 1.0);
    if (bracket <= 0.0) throw EvalError("flow map left its domain");
    return std::pow(bracket, 1.0 / (1.0 - m));
  };
  std::vector<std::function<double(double)>> ident{[](double v) { return v; }};
  std::vector<SlotTuple> sample{{{1.0}, {2.0}, 1.0}};
  auto out = substitution_residual(F, ident, sample);
  bool frozen_ok = out.size() == 1 && std::abs(out[0].residual + 3.0) <= 1e-9;

  // phi = 1 exposes the evaluator's internal dF/du; pit it against an
  // independent five-point stencil.
  std::vector<std::function<double(double)>> unit{[](double) { return 1.0; }};
  std::vector<SlotTuple> probe{{{1.3}, {2.0}, 1.0}};
  double internal = substitution_residual(F, unit, probe)[0].lhs;
  double u = 1.3, h = 1e-4 * std::max(1.0, std::abs(u));
  auto Fu = [&](double uu) {
    SlotTuple s{{uu}, {2.0}, 1.0};
    return F(s);
  };
  double stencil = (-Fu(u + 2 * h) + 8 * Fu(u + h) - 8 * Fu(u - h) + Fu(u - 2 * h)) / (12 * h);
  bool fd_ok = std::abs(internal - stencil) <= 1e-6;

  criterion(8, "substitution residual",
            frozen_ok && fd_ok,
            fmt("hand-computed sample residual %.6f within 1e-09 of -3, internal derivative "
                "vs five-point stencil |%.3e| <= 1e-06",
                out.empty() ? 0.0 : out[0].residual, std::abs(internal - stencil)));
}

// --- criterion 9: non-uniqueness of the slot representation ---

void run_nonuniqueness() {
  NonuniquenessExample ex = canonical_nonuniqueness_example();
  auto checks = nonuniqueness_demo(ex.reps, ex.g1, ex.g2, ex.target, ex.grid, 1e-10);
  bool reps_ok = checks.size() == 3;
  double worst = 0.0;
  for (const RepresentationCheck& c : checks) {
    reps_ok = reps_ok && c.pass;
    worst = std::max(worst, c.max_abs_dev);
  }
  std::vector<Expr> control{ex.negative_control};
  auto neg = nonuniqueness_demo(control, ex.g1, ex.g2, ex.target, ex.grid, 1e-10);
  bool control_fails = neg.size() == 1 && !neg[0].pass;
  criterion(9, "representation non-uniqueness",
            reps_ok && control_fails,
            fmt("3 representations match the target within %.3e <= 1e-10 on %zu grid points, "
                "control deviates by %.3e",
                worst, ex.grid.size(), neg.empty() ? 0.0 : neg[0].max_abs_dev));
}

// --- criterion 10: the transform family is a group under composition ---

void run_group_laws() {
  bool ok = true;
  long checks = 0;
  for (int i = 0; i < 100 && ok; ++i) {
    Rng rng(mix_seed(7, 9601, static_cast<std::uint64_t>(i)));
    int n = 1 + i % 3;
    auto draw = [&]() {
      Rational r;
      do {
        r = rng.rational(-9, 9, 9);
      } while (r == Rational(-n));
      return Number(r);
    };
    Number a = draw(), b = draw(), c = draw();
    AlphaTransform ta(a, n), tb(b, n), tc(c, n);
    ok = ok && compose(ta, tb).alpha() == a + b + a * b / Number(n);
    ok = ok && compose(compose(ta, tb), tc).alpha() == compose(ta, compose(tb, tc)).alpha();
    ok = ok && compose(ta, invert(ta)).alpha() == Number(0);
    ok = ok && compose(AlphaTransform(Number(0), n), ta).alpha() == a;
    ok = ok && invert(invert(ta)).alpha() == a;

    Number m(rng.rational(-12, 12, 9));
    Number shift_lhs = ta.exponent_map(m) - Number(n);
    Number shift_rhs = (Number(n) / (Number(n) + a)) * (m - Number(n));
    ok = ok && shift_lhs == shift_rhs && shift_lhs.exact();
    checks += 6;
  }
  bool identity_ok = AlphaTransform(Number(0), 2).coefficient_factor() == Number(1) &&
                     AlphaTransform(Number(0), 2).exponent_map(Number::ratio(7, 3)) ==
                         Number::ratio(7, 3);
  criterion(10, "transform group laws",
            ok && identity_ok,
            fmt("%ld exact rational identities over 100 draws: composition, associativity, "
                "inverse, identity, double inverse, exponent shift",
                checks));
}

// --- criterion 11: deterministic reports ---

std::pair<int, std::string> capture(const std::string& cmd) {
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  char buf[8192];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

void run_determinism() {
  std::string cmd = std::string(ABELFE_BIN) + " verify --suite all --seed 7 2>/dev/null";
  auto [code1, out1] = capture(cmd);
  auto [code2, out2] = capture(cmd);
  criterion(11, "report determinism",
            code1 == 0 && code2 == 0 && !out1.empty() && out1 == out2,
            fmt("two runs of verify --suite all --seed 7: exit %d/%d, %zu bytes, "
                "byte-identical: %s",
                code1, code2, out1.size(), out1 == out2 ? "yes" : "no"));
}

}  // namespace

int main() {
  run_commutation();
  run_scaling_laws();
  run_monomial_machinery();
  run_closed_forms();
  run_reconstruction();
  run_residual_instrument();
  run_nonuniqueness();
  run_group_laws();
  run_determinism();
  std::printf("%d of 11 criteria failed\n", g_failures);
  return g_failures;
}
