#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "abelfe/solve.hpp"

using namespace abelfe;

namespace {

AbelEquation exponential_growth() {
  std::vector<Term> terms{{parse_expr("1"), Number(1)}};
  return AbelEquation(1, terms, 1.0, 0.0);
}

AbelEquation make_eq(int n, const char* coeff, double m, double z0, double x0 = 0.0) {
  std::vector<Term> terms{{parse_expr(coeff), Number(m)}};
  return AbelEquation(n, terms, z0, x0);
}

}  // namespace

TEST_CASE("exponential growth reaches e with requested accuracy") {
  Trajectory tr = integrate(exponential_growth(), 1.0, 1e-10);
  CHECK(tr.status == SolveStatus::ReachedEnd);
  CHECK(tr.end_x() == 1.0);
  CHECK(std::abs(tr.end_z() - std::exp(1.0)) < 1e-9);
  for (std::size_t i = 1; i < tr.samples.size(); ++i) {
    CHECK(tr.samples[i].x > tr.samples[i - 1].x);
    CHECK(tr.samples[i].z > 0.0);
  }
}

TEST_CASE("checkpoints are landed on exactly") {
  std::vector<double> pts{0.25, 0.5, 0.75};
  Trajectory tr = integrate(exponential_growth(), 1.0, 1e-10, pts);
  for (double p : pts) {
    auto v = tr.value_at(p);
    REQUIRE(v.has_value());
    CHECK(std::abs(*v - std::exp(p)) < 1e-9);
  }
  CHECK(!tr.value_at(0.33).has_value());
  CHECK(tr.value_at(1.0).has_value());
}

TEST_CASE("quadratic growth blows up near its pole") {
  // z' = z^2, z0 = 1 has z = 1/(1-x), pole at x = 1.
  Trajectory tr = integrate(make_eq(1, "1", 2.0, 1.0), 2.0, 1e-10);
  CHECK(tr.status == SolveStatus::BlowUp);
  CHECK(tr.end_x() < 1.01);
  CHECK(tr.end_x() > 0.9);
  CHECK(tr.end_z() > 1e11);
}

TEST_CASE("a decaying solution exits the positive domain") {
  // z' = -1, z0 = 0.5 reaches zero at x = 0.5.
  Trajectory tr = integrate(make_eq(1, "-1", 0.0, 0.5), 2.0, 1e-10);
  CHECK(tr.status == SolveStatus::DomainExit);
  CHECK(tr.end_x() == doctest::Approx(0.5).epsilon(0.05));
  CHECK(tr.end_z() > 0.0);
  CHECK(tr.end_z() < 0.1);
}

TEST_CASE("n = 2 takes the principal root of the right-hand side") {
  // (z')^2 = 4 z with z0 = 1 gives z = (x+1)^2.
  Trajectory tr = integrate(make_eq(2, "4", 1.0, 1.0), 1.0, 1e-10);
  CHECK(tr.status == SolveStatus::ReachedEnd);
  CHECK(std::abs(tr.end_z() - 4.0) < 1e-8);

  // A negative right-hand side has no real n-th root for even n.
  Trajectory bad = integrate(make_eq(2, "-1", 0.0, 1.0), 1.0, 1e-10);
  CHECK(bad.status == SolveStatus::DomainExit);
  CHECK(bad.end_x() == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("integration inputs are validated") {
  AbelEquation eq = exponential_growth();
  CHECK_THROWS_AS(integrate(eq, 1.0, 1e-2), std::invalid_argument);
  CHECK_THROWS_AS(integrate(eq, 1.0, 1e-13), std::invalid_argument);
  CHECK_THROWS_AS(integrate(eq, 0.0, 1e-8), std::invalid_argument);
  CHECK_THROWS_AS(integrate(eq, -1.0, 1e-8), std::invalid_argument);
  std::vector<double> low{-0.5}, high{1.5}, at_start{0.0};
  CHECK_THROWS_AS(integrate(eq, 1.0, 1e-8, low), std::invalid_argument);
  CHECK_THROWS_AS(integrate(eq, 1.0, 1e-8, high), std::invalid_argument);
  CHECK_THROWS_AS(integrate(eq, 1.0, 1e-8, at_start), std::invalid_argument);
}

TEST_CASE("tightening the tolerance tightens the endpoint") {
  AbelEquation eq = exponential_growth();
  double exact = std::exp(1.0);
  double loose = std::abs(integrate(eq, 1.0, 1e-5).end_z() - exact);
  double tight = std::abs(integrate(eq, 1.0, 1e-9).end_z() - exact);
  CHECK(loose < 100.0 * 1e-5);
  CHECK(tight < 100.0 * 1e-9);
  CHECK(tight < loose);
}

TEST_CASE("log-sensitivities of pure exponential growth") {
  // z = e^{u x}: d(ln z)/du = x = 1, d(ln z)/dm at m=1 needs the variational
  // solve; for z' = u z^m the value at u = 1, m = 1, X = 1 is 1/2.
  SensitivityBundle sb = sensitivities(exponential_growth(), 1.0, 1e-10);
  CHECK(std::abs(sb.z_end - std::exp(1.0)) < 1e-8);
  REQUIRE(sb.lambda.size() == 1);
  REQUIRE(sb.omega.size() == 1);
  CHECK(std::abs(sb.lambda[0] - 1.0) < 1e-8);
  CHECK(std::abs(sb.omega[0] - 0.5) < 1e-8);
}

TEST_CASE("log-sensitivities agree with finite differences") {
  auto build = [](double u1, double u2, double m1, double m2) {
    std::vector<Term> terms{{expr_number(Number(u1)), Number(m1)},
                            {expr_number(Number(u2)), Number(m2)}};
    return AbelEquation(1, terms, 1.2, 0.0);
  };
  double u1 = 0.8, u2 = -0.3, m1 = 2.0, m2 = 0.5, X = 0.4;
  SensitivityBundle sb = sensitivities(build(u1, u2, m1, m2), X, 1e-11);

  auto lnz = [&](double a, double b, double c, double d) {
    return std::log(integrate(build(a, b, c, d), X, 1e-11).end_z());
  };
  double h = 1e-5;
  double fd_l1 = (lnz(u1 + h, u2, m1, m2) - lnz(u1 - h, u2, m1, m2)) / (2 * h);
  double fd_l2 = (lnz(u1, u2 + h, m1, m2) - lnz(u1, u2 - h, m1, m2)) / (2 * h);
  double fd_o1 = (lnz(u1, u2, m1 + h, m2) - lnz(u1, u2, m1 - h, m2)) / (2 * h);
  double fd_o2 = (lnz(u1, u2, m1, m2 + h) - lnz(u1, u2, m1, m2 - h)) / (2 * h);
  CHECK(std::abs(sb.lambda[0] - fd_l1) < 1e-6);
  CHECK(std::abs(sb.lambda[1] - fd_l2) < 1e-6);
  CHECK(std::abs(sb.omega[0] - fd_o1) < 1e-6);
  CHECK(std::abs(sb.omega[1] - fd_o2) < 1e-6);
}

TEST_CASE("sensitivity preconditions") {
  CHECK_THROWS_AS(sensitivities(make_eq(2, "4", 1.0, 1.0), 1.0, 1e-10), std::invalid_argument);
  CHECK_THROWS_AS(sensitivities(make_eq(1, "x", 1.0, 1.0), 1.0, 1e-10), std::invalid_argument);
  CHECK_THROWS_AS(sensitivities(exponential_growth(), 0.0, 1e-10), std::invalid_argument);
  CHECK_THROWS_AS(sensitivities(make_eq(1, "1", 2.0, 1.0), 2.0, 1e-10), SolveError);
  try {
    sensitivities(make_eq(1, "1", 2.0, 1.0), 2.0, 1e-10);
  } catch (const SolveError& e) {
    CHECK(e.kind() == SolveError::Kind::BlowUp);
  }
}

TEST_CASE("quadrature on smooth integrands") {
  double third = quadrature([](double x) { return x * x; }, 0.0, 1.0, 1e-12);
  CHECK(std::abs(third - 1.0 / 3.0) < 1e-12);
  double two = quadrature([](double x) { return std::sin(x); }, 0.0, std::acos(-1.0), 1e-12);
  CHECK(std::abs(two - 2.0) < 1e-11);
  double rev = quadrature([](double x) { return x * x; }, 1.0, 0.0, 1e-12);
  CHECK(std::abs(rev + 1.0 / 3.0) < 1e-12);
}

TEST_CASE("degenerate and failing quadrature") {
  bool touched = false;
  double zero = quadrature(
      [&](double) {
        touched = true;
        return 1.0;
      },
      2.0, 2.0, 1e-10);
  CHECK(zero == 0.0);
  CHECK(!touched);

  CHECK_THROWS_AS(quadrature([](double) { return 1.0; }, 0.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(quadrature([](double x) { return 1.0 / x; }, 0.0, 1.0, 1e-10), EvalError);

  // A jump at an irrational point starves the local error estimate: the
  // discrepancy and the budget halve together, so depth 30 is exhausted.
  double c = 1.0 / std::acos(-1.0);
  auto jump = [c](double x) { return x < c ? 0.0 : 1.0; };
  CHECK_THROWS_AS(quadrature(jump, 0.0, 1.0, 1e-15), SolveError);
  try {
    quadrature(jump, 0.0, 1.0, 1e-15);
  } catch (const SolveError& e) {
    CHECK(e.kind() == SolveError::Kind::MaxDepth);
  }
}

TEST_CASE("nested quadrature composes") {
  auto inner = [](double x) {
    return quadrature([](double t) { return t; }, 0.0, x, 1e-12);
  };
  double v = quadrature(inner, 0.0, 1.0, 1e-10);
  CHECK(std::abs(v - 1.0 / 6.0) < 1e-9);
}
