#include "abelfe/solve.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace abelfe {

namespace {

constexpr double kBlowupLimit = 1e12;
constexpr double kMinStep = 1e-14;
constexpr int kMaxAcceptedSteps = 500000;

// Dormand-Prince 5(4) coefficients; the fifth-order solution propagates and
// the seventh stage doubles as the first stage of the next step.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

using State = std::vector<double>;

// Right-hand side; returns false when the state left the domain of the field.
using RhsFn = std::function<bool(double x, const State& y, State& dy)>;

enum class StateCheck { Ok, Domain, Blow };
using CheckFn = std::function<StateCheck(const State& y)>;
using AcceptFn = std::function<void(double x, const State& y)>;

bool finite_all(const State& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

struct Stepper {
  const RhsFn& rhs;
  std::size_t dim;
  State k1, k2, k3, k4, k5, k6, k7, ytmp, ynew, yerr;

  Stepper(const RhsFn& f, std::size_t d) : rhs(f), dim(d) {
    for (State* s : {&k1, &k2, &k3, &k4, &k5, &k6, &k7, &ytmp, &ynew, &yerr}) s->resize(dim);
  }

  // k1 must hold rhs(x, y). Returns false on a domain failure inside a stage.
  bool attempt(double x, const State& y, double h) {
    auto comb = [&](const State& y0, std::initializer_list<std::pair<double, const State*>> ks) {
      for (std::size_t i = 0; i < dim; ++i) {
        double acc = y0[i];
        for (const auto& [w, k] : ks) acc += h * w * (*k)[i];
        ytmp[i] = acc;
      }
    };
    comb(y, {{a21, &k1}});
    if (!rhs(x + c2 * h, ytmp, k2) || !finite_all(k2)) return false;
    comb(y, {{a31, &k1}, {a32, &k2}});
    if (!rhs(x + c3 * h, ytmp, k3) || !finite_all(k3)) return false;
    comb(y, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
    if (!rhs(x + c4 * h, ytmp, k4) || !finite_all(k4)) return false;
    comb(y, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
    if (!rhs(x + c5 * h, ytmp, k5) || !finite_all(k5)) return false;
    comb(y, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
    if (!rhs(x + h, ytmp, k6) || !finite_all(k6)) return false;
    for (std::size_t i = 0; i < dim; ++i)
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    if (!finite_all(ynew)) return false;
    if (!rhs(x + h, ynew, k7) || !finite_all(k7)) return false;
    for (std::size_t i = 0; i < dim; ++i)
      yerr[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    return true;
  }

  double error_norm(const State& y, double tol) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      double sc = tol + tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      double r = yerr[i] / sc;
      sum += r * r;
    }
    return std::sqrt(sum / static_cast<double>(dim));
  }
};

SolveStatus drive(const RhsFn& rhs, const CheckFn& check, const AcceptFn& on_accept,
                  double x0, State y, double x_end, double tol,
                  std::span<const double> stops) {
  const std::size_t dim = y.size();
  Stepper st(rhs, dim);
  double x = x0;

  on_accept(x, y);  // the initial state is always part of the trajectory
  StateCheck sc0 = check(y);
  if (sc0 == StateCheck::Blow) return SolveStatus::BlowUp;
  if (sc0 == StateCheck::Domain) return SolveStatus::DomainExit;
  if (!rhs(x, y, st.k1) || !finite_all(st.k1)) return SolveStatus::DomainExit;

  const double span = x_end - x0;
  double f0 = 0.0;
  for (double k : st.k1) f0 = std::max(f0, std::abs(k));
  double h = std::min(0.01 * span, 0.1 * (1.0 + std::abs(y[0])) / (1e-8 + f0));
  h = std::max(h, kMinStep * 2);

  double err_prev = 1e-4;
  std::size_t stop_idx = 0;
  int accepted = 0;

  while (x < x_end) {
    while (stop_idx < stops.size() && stops[stop_idx] <= x + kMinStep) ++stop_idx;
    double next_stop = stop_idx < stops.size() ? std::min(stops[stop_idx], x_end) : x_end;
    bool landing = x + h >= next_stop - kMinStep;
    double h_try = landing ? next_stop - x : h;

    if (!st.attempt(x, y, h_try)) {
      h *= 0.25;
      if (h < kMinStep) return SolveStatus::DomainExit;
      continue;
    }
    double err = st.error_norm(y, tol);
    if (!std::isfinite(err) || err > 1.0) {
      double fac = std::isfinite(err) ? std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9) : 0.1;
      h = h_try * fac;
      if (h < kMinStep) return SolveStatus::BlowUp;
      continue;
    }

    StateCheck sc = check(st.ynew);
    if (sc == StateCheck::Blow) return SolveStatus::BlowUp;
    if (sc == StateCheck::Domain) {
      // Shrink toward the boundary so the trajectory ends next to the
      // crossing instead of one full step before it.
      h = h_try * 0.25;
      if (h < kMinStep) return SolveStatus::DomainExit;
      continue;
    }
    x = landing ? next_stop : x + h_try;
    y = st.ynew;
    on_accept(x, y);
    if (++accepted > kMaxAcceptedSteps) return SolveStatus::BlowUp;

    st.k1 = st.k7;
    double fac = err > 0.0 ? 0.9 * std::pow(err, -0.17) * std::pow(err_prev, 0.08) : 5.0;
    fac = std::clamp(fac, 0.2, 5.0);
    h = h_try * fac;
    err_prev = std::max(err, 1e-10);
  }
  return SolveStatus::ReachedEnd;
}

std::vector<double> sorted_stops(std::span<const double> checkpoints, double x0, double x_end) {
  std::vector<double> stops(checkpoints.begin(), checkpoints.end());
  stops.push_back(x_end);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
  for (double s : stops)
    if (s <= x0 || s > x_end)
      throw std::invalid_argument("checkpoints must lie in (x0, x_end]");
  return stops;
}

void validate_tol(double tol) {
  if (!(tol >= 1e-12 && tol <= 1e-3))
    throw std::invalid_argument("tolerance must lie in [1e-12, 1e-3]");
}

}  // namespace

std::optional<double> Trajectory::value_at(double x) const {
  for (const TrajectorySample& s : samples) {
    if (s.x == x || std::abs(s.x - x) <= 1e-12 * (1.0 + std::abs(x))) return s.z;
    if (s.x > x) break;
  }
  return std::nullopt;
}

Trajectory integrate(const AbelEquation& eq, double x_end, double tol,
                     std::span<const double> checkpoints) {
  validate_tol(tol);
  if (!(x_end > eq.x0())) throw std::invalid_argument("x_end must exceed x0");
  std::vector<double> stops = sorted_stops(checkpoints, eq.x0(), x_end);

  const int n = eq.n();
  const double root = 1.0 / n;
  RhsFn rhs = [&eq, n, root](double x, const State& y, State& dy) {
    double s;
    try {
      s = rhs_eval(eq, x, y[0]);
    } catch (const EvalError&) {
      return false;
    }
    if (!std::isfinite(s)) return false;
    if (n == 1) {
      dy[0] = s;
      return true;
    }
    if (s <= 0.0) return false;
    dy[0] = std::pow(s, root);
    return true;
  };
  CheckFn check = [](const State& y) {
    if (!(y[0] > 0.0)) return StateCheck::Domain;
    if (std::abs(y[0]) > kBlowupLimit) return StateCheck::Blow;
    return StateCheck::Ok;
  };

  Trajectory traj;
  traj.tol = tol;
  AcceptFn record = [&traj](double x, const State& y) {
    traj.samples.push_back({x, y[0]});
  };
  traj.status = drive(rhs, check, record, eq.x0(), {eq.z0()}, x_end, tol, stops);
  return traj;
}

SensitivityBundle sensitivities(const AbelEquation& eq, double x_end, double tol) {
  validate_tol(tol);
  if (eq.n() != 1)
    throw std::invalid_argument("log-sensitivities require n = 1");
  if (!has_constant_coefficients(eq))
    throw std::invalid_argument("log-sensitivities require constant coefficients");
  if (!(x_end > eq.x0())) throw std::invalid_argument("x_end must exceed x0");

  const std::size_t K = eq.num_terms();
  std::vector<double> u = coefficient_values(eq, eq.x0());
  std::vector<double> m(K);
  for (std::size_t k = 0; k < K; ++k) m[k] = eq.terms()[k].exponent.value();

  RhsFn rhs = [&u, &m, K](double, const State& y, State& dy) {
    const double z = y[0];
    if (!(z > 0.0)) return false;
    const double lnz = std::log(z);
    double base = 0.0, jac = 0.0;
    std::vector<double> zm(K);
    for (std::size_t k = 0; k < K; ++k) {
      zm[k] = std::pow(z, m[k]);
      base += u[k] * zm[k];
      jac += u[k] * m[k] * zm[k] / z;
    }
    dy[0] = base;
    for (std::size_t k = 0; k < K; ++k) {
      dy[1 + k] = zm[k] + jac * y[1 + k];
      dy[1 + K + k] = u[k] * zm[k] * lnz + jac * y[1 + K + k];
    }
    return true;
  };
  CheckFn check = [](const State& y) {
    if (!(y[0] > 0.0)) return StateCheck::Domain;
    if (std::abs(y[0]) > kBlowupLimit) return StateCheck::Blow;
    return StateCheck::Ok;
  };

  State y(1 + 2 * K, 0.0);
  y[0] = eq.z0();
  State final = y;
  AcceptFn keep = [&final](double, const State& s) { final = s; };
  std::vector<double> stops{x_end};
  SolveStatus status = drive(rhs, check, keep, eq.x0(), y, x_end, tol, stops);
  if (status == SolveStatus::BlowUp)
    throw SolveError(SolveError::Kind::BlowUp, "sensitivity solve blew up");
  if (status == SolveStatus::DomainExit)
    throw SolveError(SolveError::Kind::DomainExit, "sensitivity solve left the domain");

  SensitivityBundle out;
  out.z_end = final[0];
  out.lambda.resize(K);
  out.omega.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    out.lambda[k] = final[1 + k] / final[0];
    out.omega[k] = final[1 + K + k] / final[0];
  }
  return out;
}

namespace {

double eval_finite(const std::function<double(double)>& f, double x) {
  double v = f(x);
  if (!std::isfinite(v)) throw EvalError("non-finite integrand value");
  return v;
}

double simpson_recurse(const std::function<double(double)>& f, double a, double b, double fa,
                       double fm, double fb, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = eval_finite(f, lm), frm = eval_finite(f, rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth >= 30)
    throw SolveError(SolveError::Kind::MaxDepth,
                     "quadrature failed to converge within depth 30");
  return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace

double quadrature(const std::function<double(double)>& f, double a, double b, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("quadrature tolerance must be positive");
  if (a == b) return 0.0;
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  double fa = eval_finite(f, a), fb = eval_finite(f, b);
  double m = 0.5 * (a + b);
  double fm = eval_finite(f, m);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return sign * simpson_recurse(f, a, b, fa, fm, fb, whole, tol, 0);
}

}  // namespace abelfe
