#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "abelfe/suites.hpp"
#include "abelfe/transform.hpp"

using namespace abelfe;

namespace {

Number rational_alpha(Rng& rng, int n) {
  Rational r;
  do {
    r = rng.rational(-9, 9, 9);
  } while (r == Rational(-n));
  return Number(r);
}

}  // namespace

TEST_CASE("the documented n=1 alpha=1 maps") {
  AlphaTransform t(Number(1), 1);
  CHECK(t.solution_power().rational() == Rational(2));
  CHECK(t.coefficient_factor().rational() == Rational(2));
  CHECK(t.exponent_map(Number(2)).rational() == Rational(3, 2));
  CHECK(t.exponent_map(Number(1)).rational() == Rational(1));
  CHECK(t.initial_value_map(1.0) == 1.0);
  CHECK(t.initial_value_map(2.0) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("alpha = 0 is the identity") {
  for (int n = 1; n <= 3; ++n) {
    AlphaTransform id(Number(0), n);
    CHECK(id.coefficient_factor() == Number(1));
    CHECK(id.exponent_map(Number::ratio(7, 3)) == Number::ratio(7, 3));
    CHECK(id.initial_value_map(1.7) == 1.7);
  }
}

TEST_CASE("inadmissible transforms are rejected") {
  CHECK_THROWS_AS(AlphaTransform(Number(-1), 1), std::invalid_argument);
  CHECK_THROWS_AS(AlphaTransform(Number(-2), 2), std::invalid_argument);
  CHECK_THROWS_AS(AlphaTransform(Number(-2.0), 2), std::invalid_argument);
  CHECK_THROWS_AS(AlphaTransform(Number(1), 0), std::invalid_argument);
  CHECK_THROWS_AS(AlphaTransform(Number(1), -3), std::invalid_argument);
  AlphaTransform ok(Number(-1), 2);
  CHECK(ok.solution_power().rational() == Rational(1, 2));
}

TEST_CASE("general-n exponent and coefficient maps") {
  AlphaTransform t(Number::ratio(1, 2), 2);
  // (n+a)/n = 5/4, factor = 25/16, m -> 2(m+1/2)/(5/2) = (4m+2)/5
  CHECK(t.solution_power().rational() == Rational(5, 4));
  CHECK(t.coefficient_factor().rational() == Rational(25, 16));
  CHECK(t.exponent_map(Number(2)).rational() == Rational(2));
  CHECK(t.exponent_map(Number(3)).rational() == Rational(14, 5));
  // Exponent n is the fixed point of the map for every alpha.
  CHECK(t.exponent_map(Number(2)).rational() == Rational(2));
}

TEST_CASE("transforming an equation rescales coefficients and initial value") {
  std::vector<Term> terms{{parse_expr("1"), Number(1)}};
  AbelEquation eq(1, terms, 1.0, 0.0);
  AlphaTransform t(Number(1), 1);
  AbelEquation out = apply_to_equation(t, eq);

  REQUIRE(out.num_terms() == 1);
  CHECK(evaluate(out.terms()[0].coeff, {{"x", 0.3}}) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(out.terms()[0].exponent == Number(1));
  CHECK(out.z0() == 1.0);
  CHECK(out.x0() == 0.0);

  std::vector<Term> t2{{parse_expr("x"), Number(2)}};
  AbelEquation eq2(2, t2, 2.0, 0.0);
  CHECK_THROWS_AS(apply_to_equation(t, eq2), std::invalid_argument);

  AlphaTransform t_n2(Number(2), 2);
  AbelEquation out2 = apply_to_equation(t_n2, eq2);
  CHECK(out2.z0() == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(out2.terms()[0].exponent == Number(2));
}

TEST_CASE("composition follows the group law exactly") {
  for (int i = 0; i < 60; ++i) {
    Rng rng(mix_seed(17, 1, static_cast<std::uint64_t>(i)));
    int n = 1 + i % 3;
    Number a = rational_alpha(rng, n), b = rational_alpha(rng, n), c = rational_alpha(rng, n);
    AlphaTransform ta(a, n), tb(b, n), tc(c, n);

    AlphaTransform ab = compose(ta, tb);
    CHECK(ab.alpha() == a + b + a * b / Number(n));

    CHECK(compose(compose(ta, tb), tc).alpha() == compose(ta, compose(tb, tc)).alpha());
    CHECK(compose(ta, AlphaTransform(Number(0), n)).alpha() == a);
    CHECK(compose(AlphaTransform(Number(0), n), ta).alpha() == a);
    CHECK(compose(ta, invert(ta)).alpha() == Number(0));
    CHECK(compose(invert(ta), ta).alpha() == Number(0));
    CHECK(invert(invert(ta)).alpha() == a);

    // The admissible set is closed: (n+a)(n+b)/n never vanishes, so the
    // composite is itself admissible and construction cannot throw.
    CHECK(compose(ta, tb).alpha() != Number(-n));

    // Composition mirrors multiplication of solution powers.
    CHECK(ab.solution_power() == ta.solution_power() * tb.solution_power());
  }
}

TEST_CASE("exponent shift law on random rationals") {
  for (int i = 0; i < 60; ++i) {
    Rng rng(mix_seed(17, 2, static_cast<std::uint64_t>(i)));
    int n = 1 + i % 3;
    Number a = rational_alpha(rng, n);
    AlphaTransform t(a, n);
    Number m(rng.rational(-12, 12, 9));
    Number lhs = t.exponent_map(m) - Number(n);
    Number rhs = (Number(n) / (Number(n) + a)) * (m - Number(n));
    CHECK(lhs == rhs);
    CHECK(lhs.exact());
  }
}

TEST_CASE("parameter lists map slotwise and round trip through the inverse") {
  AlphaTransform t(Number::ratio(3, 2), 1);
  std::vector<Number> u{Number(1), Number::ratio(2, 3)};
  std::vector<Number> m{Number(2), Number::ratio(1, 2)};
  auto [ub, mb] = apply_to_parameters(t, u, m);
  REQUIRE(ub.size() == 2);
  // factor (1+3/2)^1 = 5/2
  CHECK(ub[0].rational() == Rational(5, 2));
  CHECK(ub[1].rational() == Rational(5, 3));
  // m=2 -> (2+3/2)/(5/2) = 7/5
  CHECK(mb[0].rational() == Rational(7, 5));

  auto [u2, m2] = apply_to_parameters(invert(t), ub, mb);
  for (std::size_t k = 0; k < u.size(); ++k) {
    CHECK(u2[k] == u[k]);
    CHECK(m2[k] == m[k]);
  }
}

TEST_CASE("floating alphas keep value semantics") {
  AlphaTransform t(Number(0.5), 1);
  CHECK(!t.coefficient_factor().exact());
  CHECK(t.coefficient_factor().value() == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(t.exponent_map(Number(2)).value() == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
}
