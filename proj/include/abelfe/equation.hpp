#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "abelfe/expr.hpp"
#include "abelfe/number.hpp"

namespace abelfe {

struct Term {
  Expr coeff;       // expression in x only
  Number exponent;  // exact rational when given as an integer or ratio
};

// dz/dx raised to the n-th power equals a sum of coefficient-weighted powers
// of z, with a positive initial value z0 at x0.
class AbelEquation {
 public:
  AbelEquation(int n, std::vector<Term> terms, double z0, double x0);

  int n() const { return n_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t num_terms() const { return terms_.size(); }
  double z0() const { return z0_; }
  double x0() const { return x0_; }

 private:
  int n_;
  std::vector<Term> terms_;
  double z0_;
  double x0_;
};

// z raised to a possibly fractional or negative exponent, with the domain
// rules shared by the solver: negative bases need integer exponents, zero
// needs a nonnegative one.
double power_with_domain(double z, const Number& m);

// Sum of g_k(x) * z^{m_k}; this is the n-th power of dz/dx.
double rhs_eval(const AbelEquation& eq, double x, double z);

std::vector<std::pair<std::size_t, std::size_t>> mergeable_pairs(const AbelEquation& eq);
AbelEquation merge_equal_exponent_terms(const AbelEquation& eq);

// Drops the term at index (0-based) as if its coefficient were zero.
AbelEquation specialize_zero_term(const AbelEquation& eq, std::size_t index);

bool has_constant_coefficients(const AbelEquation& eq);
std::vector<double> coefficient_values(const AbelEquation& eq, double x);

// Schema: {"n": int, "x0": num, "z0": num,
//          "terms": [{"coeff": "expr", "m": num-or-"p/q"}, ...]}
AbelEquation equation_from_json(const nlohmann::json& j);
nlohmann::json equation_to_json(const AbelEquation& eq);
AbelEquation load_equation_file(const std::string& path);

}  // namespace abelfe
