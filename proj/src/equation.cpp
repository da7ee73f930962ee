#include "abelfe/equation.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace abelfe {

namespace {

const std::string kXOnly[] = {std::string("x")};

void validate_term(const Term& t, std::size_t index) {
  if (!t.coeff.valid())
    throw std::invalid_argument("term " + std::to_string(index) + " has no coefficient");
  if (!uses_only(t.coeff, kXOnly))
    throw std::invalid_argument("term " + std::to_string(index) +
                                " coefficient may only depend on x");
  if (!std::isfinite(t.exponent.value()))
    throw std::invalid_argument("term " + std::to_string(index) + " exponent is not finite");
}

}  // namespace

AbelEquation::AbelEquation(int n, std::vector<Term> terms, double z0, double x0)
    : n_(n), terms_(std::move(terms)), z0_(z0), x0_(x0) {
  if (n_ < 1) throw std::invalid_argument("derivative power n must be a positive integer");
  if (terms_.empty()) throw std::invalid_argument("equation needs at least one term");
  if (!(z0_ > 0.0) || !std::isfinite(z0_))
    throw std::invalid_argument("initial value z0 must be positive and finite");
  if (!std::isfinite(x0_)) throw std::invalid_argument("x0 must be finite");
  for (std::size_t i = 0; i < terms_.size(); ++i) validate_term(terms_[i], i);
}

double power_with_domain(double z, const Number& m) {
  if (z > 0.0) return std::pow(z, m.value());
  double mv = m.value();
  if (z == 0.0) {
    if (mv > 0.0) return 0.0;
    if (mv == 0.0) return 1.0;
    throw EvalError("zero raised to a negative exponent");
  }
  if (m.is_integer() && std::abs(mv) < 9.0e15) return std::pow(z, mv);
  throw EvalError("negative value raised to a non-integer exponent");
}

double rhs_eval(const AbelEquation& eq, double x, double z) {
  double sum = 0.0;
  const std::map<std::string, double> at{{"x", x}};
  for (const Term& t : eq.terms())
    sum += evaluate(t.coeff, at) * power_with_domain(z, t.exponent);
  return sum;
}

std::vector<std::pair<std::size_t, std::size_t>> mergeable_pairs(const AbelEquation& eq) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const auto& terms = eq.terms();
  for (std::size_t i = 0; i < terms.size(); ++i)
    for (std::size_t j = i + 1; j < terms.size(); ++j)
      if (terms[i].exponent == terms[j].exponent) out.emplace_back(i, j);
  return out;
}

AbelEquation merge_equal_exponent_terms(const AbelEquation& eq) {
  std::vector<Term> merged;
  for (const Term& t : eq.terms()) {
    bool found = false;
    for (Term& m : merged) {
      if (m.exponent == t.exponent) {
        m.coeff = expr_add(m.coeff, t.coeff);
        found = true;
        break;
      }
    }
    if (!found) merged.push_back(t);
  }
  return AbelEquation(eq.n(), std::move(merged), eq.z0(), eq.x0());
}

AbelEquation specialize_zero_term(const AbelEquation& eq, std::size_t index) {
  if (index >= eq.num_terms()) throw std::invalid_argument("term index out of range");
  if (eq.num_terms() == 1)
    throw std::invalid_argument("cannot drop the only term of an equation");
  std::vector<Term> terms;
  for (std::size_t i = 0; i < eq.num_terms(); ++i)
    if (i != index) terms.push_back(eq.terms()[i]);
  return AbelEquation(eq.n(), std::move(terms), eq.z0(), eq.x0());
}

bool has_constant_coefficients(const AbelEquation& eq) {
  for (const Term& t : eq.terms())
    if (!free_variables(t.coeff).empty()) return false;
  return true;
}

std::vector<double> coefficient_values(const AbelEquation& eq, double x) {
  std::vector<double> out;
  const std::map<std::string, double> at{{"x", x}};
  out.reserve(eq.num_terms());
  for (const Term& t : eq.terms()) out.push_back(evaluate(t.coeff, at));
  return out;
}

AbelEquation equation_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("equation config must be a JSON object");
  for (const char* key : {"n", "x0", "z0", "terms"})
    if (!j.contains(key))
      throw std::invalid_argument(std::string("equation config missing key \"") + key + "\"");
  if (!j["n"].is_number_integer())
    throw std::invalid_argument("\"n\" must be an integer");
  int n = j["n"].get<int>();
  if (!j["x0"].is_number() || !j["z0"].is_number())
    throw std::invalid_argument("\"x0\" and \"z0\" must be numbers");
  double x0 = j["x0"].get<double>();
  double z0 = j["z0"].get<double>();
  if (!j["terms"].is_array() || j["terms"].empty())
    throw std::invalid_argument("\"terms\" must be a non-empty array");

  std::vector<Term> terms;
  for (const auto& jt : j["terms"]) {
    if (!jt.is_object() || !jt.contains("coeff") || !jt.contains("m"))
      throw std::invalid_argument("each term needs \"coeff\" and \"m\"");
    if (!jt["coeff"].is_string())
      throw std::invalid_argument("term \"coeff\" must be an expression string");
    Term t;
    t.coeff = parse_expr(jt["coeff"].get<std::string>());
    const auto& jm = jt["m"];
    if (jm.is_number_integer()) {
      t.exponent = Number(jm.get<long long>());
    } else if (jm.is_number()) {
      t.exponent = Number(jm.get<double>());
    } else if (jm.is_string()) {
      auto parsed = Number::parse(jm.get<std::string>());
      if (!parsed || !parsed->exact())
        throw std::invalid_argument("term \"m\" string must be an integer or p/q ratio");
      t.exponent = *parsed;
    } else {
      throw std::invalid_argument("term \"m\" must be a number or a ratio string");
    }
    terms.push_back(std::move(t));
  }
  return AbelEquation(n, std::move(terms), z0, x0);
}

nlohmann::json equation_to_json(const AbelEquation& eq) {
  nlohmann::json j;
  j["n"] = eq.n();
  j["x0"] = eq.x0();
  j["z0"] = eq.z0();
  j["terms"] = nlohmann::json::array();
  for (const Term& t : eq.terms()) {
    nlohmann::json jt;
    jt["coeff"] = to_string(t.coeff);
    if (t.exponent.exact() && t.exponent.is_integer())
      jt["m"] = t.exponent.rational().convert_to<long long>();
    else if (t.exponent.exact())
      jt["m"] = t.exponent.str();
    else
      jt["m"] = t.exponent.value();
    j["terms"].push_back(std::move(jt));
  }
  return j;
}

AbelEquation load_equation_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open equation file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("invalid JSON in " + path + ": " + e.what());
  }
  return equation_from_json(j);
}

}  // namespace abelfe
