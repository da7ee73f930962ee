#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "abelfe/equation.hpp"
#include "abelfe/solve.hpp"
#include "abelfe/transform.hpp"

namespace abelfe {

enum class ScalingKind { Lambda, Omega };

std::string_view scaling_kind_name(ScalingKind k);

// c * prod u_j^{a_j} * prod (m_j - n)^{b_j} with nonnegative integer
// exponents and a nonzero rational coefficient.
struct MonomialTerm {
  std::vector<int> a;
  std::vector<int> b;
  Rational c = 1;
};

Rational evaluate_monomial(const MonomialTerm& mono, int n, std::span<const Rational> u,
                           std::span<const Rational> m);

// The value of n*sum(a) - sum(b) that makes a monomial transform exactly the
// way the corresponding log-sensitivity does. Determined at runtime by exact
// substitution over candidate values, not hard-coded.
int scaling_constraint_value(ScalingKind kind, int n);

struct MonomialExponents {
  std::vector<int> a;
  std::vector<int> b;
};

// All exponent vectors with sum(a) <= degree_cap satisfying
// n*sum(a) - sum(b) = constraint (default: scaling_constraint_value).
// Ordered by sum(a) ascending, then compositions with the first component
// descending, for a and b alike.
std::vector<MonomialExponents> enumerate_monomials(ScalingKind kind, int n, int K,
                                                   int degree_cap,
                                                   std::optional<int> constraint = {});

struct ScalingVerdict {
  Rational alpha;
  bool pass = false;
};

struct ScalingReport {
  ScalingKind kind = ScalingKind::Lambda;
  int n = 1;
  MonomialTerm monomial;
  int constraint_value = 0;  // n*sum(a) - sum(b) of the monomial
  std::vector<ScalingVerdict> verdicts;
  bool pass = false;
};

// Substitutes exact rational slots through the parameter transform and checks
// the prefactor law in rational arithmetic; no floating point is involved.
bool monomial_scaling_holds(const MonomialTerm& mono, ScalingKind kind, int n,
                            const Rational& alpha);
ScalingReport verify_scaling_exact(const MonomialTerm& mono, ScalingKind kind, int n,
                                   std::span<const Rational> alphas);

// Log-sensitivities of the flow map by central differences over full solves.
SensitivityBundle fd_log_sensitivities(const AbelEquation& eq, double x_end,
                                       double solver_tol, double rel_step = 1e-5);

struct NumericScalingTermCheck {
  double lhs_lambda = 0, rhs_lambda = 0, err_lambda = 0;
  double lhs_omega = 0, rhs_omega = 0, err_omega = 0;
  bool pass = false;
};

struct NumericScalingReport {
  std::vector<NumericScalingTermCheck> terms;
  double tol = 0;
  bool used_variational = false;  // variational ODE vs finite differences
  bool pass = false;
};

// Checks that the measured log-sensitivities of the original and transformed
// equations differ by exactly the predicted prefactors. n = 1 uses the
// variational solve unless forced to finite differences; n > 1 always
// differences.
NumericScalingReport verify_scaling_numeric(const AbelEquation& eq, const AlphaTransform& t,
                                            double x_end, double tol,
                                            bool force_finite_differences = false);

// Max relative deviation of z(x) from w(x)^(n/(n+alpha)) over the checkpoints,
// both sides solved independently. Throws SolveError when either solve fails.
double transform_commutation_error(const AbelEquation& eq, const AlphaTransform& t,
                                   std::span<const double> checkpoints, double solver_tol);

struct PowerRelationReport {
  double base_err = 0;     // z(X) vs w(X)^(n/(n+alpha))
  double closure_err = 0;  // z(X)^beta vs w(X)^(beta*n/(n+alpha))
  bool pass = false;
};

PowerRelationReport verify_power_relation(const AbelEquation& eq, const AlphaTransform& t,
                                          double beta, double x_end, double solver_tol,
                                          double tol);

// Parameter tuple of a first-order constant-coefficient equation.
struct SlotTuple {
  std::vector<double> u;
  std::vector<double> m;
  double z0 = 1.0;
};

SlotTuple constant_slots(const AbelEquation& eq);

// The substitution alpha = m_k - 1 expressed directly on slots: coefficients
// scale by m_k, exponents map through (m_j + m_k - 1)/m_k, the initial value
// is raised to m_k. Throws std::domain_error when m_k = 0.
SlotTuple alpha_substitution(const SlotTuple& s, std::size_t k);

using SlotFunction = std::function<double(const SlotTuple&)>;

struct ResidualSample {
  SlotTuple slots;
  double lhs = 0;       // sum_k dF/du_k * phi_k(u_k)
  double rhs = 0;       // sum_k u_k * F(alpha-substituted slots)
  double residual = 0;  // lhs - rhs
};

// Residual of the derivative-weighted identity for a candidate flow map F.
// dF/du_k uses central differences with relative step 1e-6.
std::vector<ResidualSample> substitution_residual(const SlotFunction& F,
                                                  std::span<const std::function<double(double)>> phi,
                                                  std::span<const SlotTuple> samples);

struct ReconstructionReport {
  double direct = 0;
  double via_first = 0;   // boundary at u_1 = 0, exp-integral over the u_1 slot
  double via_second = 0;  // boundary at u_2 = 0, exp-integral over the u_2 slot
  double err_first = 0, err_second = 0, err_paths = 0;
  bool pass = false;
};

// Rebuilds z(x_end) of a two-term constant-coefficient equation from a
// one-term boundary solution and the exponential of an integrated
// log-sensitivity, along both parameter paths.
ReconstructionReport reconstruct_from_boundary(const AbelEquation& eq, double x_end,
                                               double tol);

struct MixedPartialPair {
  std::string name;
  double lhs = 0, rhs = 0, err = 0;
  bool pass = false;
};

struct MixedPartialReport {
  std::vector<MixedPartialPair> pairs;
  bool pass = false;
};

// Symmetry of second log-derivatives across the slot pairs (u1,u2), (u1,m1),
// (m1,m2), each side a central difference of a variational solve.
MixedPartialReport mixed_partial_check(const AbelEquation& eq, double x_end, double step,
                                       double tol);

struct RepresentationCheck {
  std::string expression;
  double max_abs_dev = 0;
  bool pass = false;
};

// Composes each two-slot representation with the coefficient functions and
// measures the worst deviation from the target over the grid.
std::vector<RepresentationCheck> nonuniqueness_demo(std::span<const Expr> reps,
                                                    const Expr& g1, const Expr& g2,
                                                    const Expr& target,
                                                    std::span<const double> grid, double tol);

nlohmann::json to_json(const ScalingReport& r);
nlohmann::json to_json(const NumericScalingReport& r);
nlohmann::json to_json(const ResidualSample& s);

}  // namespace abelfe
