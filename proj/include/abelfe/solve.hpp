#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "abelfe/equation.hpp"

namespace abelfe {

enum class SolveStatus { ReachedEnd, BlowUp, DomainExit };

class SolveError : public std::runtime_error {
 public:
  enum class Kind { BlowUp, DomainExit, MaxDepth };

  SolveError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct TrajectorySample {
  double x;
  double z;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;  // every accepted step, x ascending, z > 0
  double tol = 0.0;
  SolveStatus status = SolveStatus::ReachedEnd;

  double end_x() const { return samples.back().x; }
  double end_z() const { return samples.back().z; }
  // The sample landed exactly on a requested checkpoint, if any.
  std::optional<double> value_at(double x) const;
};

// Embedded 4(5) Runge-Kutta pair with PI step control. Integration fails
// softly: the trajectory holds whatever was reached plus a status. Steps are
// clamped so that every checkpoint (and x_end) is landed on exactly.
// Requires x_end > x0 and tol in [1e-12, 1e-3].
Trajectory integrate(const AbelEquation& eq, double x_end, double tol,
                     std::span<const double> checkpoints = {});

struct SensitivityBundle {
  double z_end = 0.0;
  std::vector<double> lambda;  // d(ln z)/du_k at x_end
  std::vector<double> omega;   // d(ln z)/dm_k at x_end
};

// Variational solve for n = 1 constant-coefficient equations: the state is
// extended with s_k = dz/du_k and p_k = dz/dm_k and the log-derivatives are
// read off at the end. Throws SolveError when the base solve does not reach
// x_end, std::invalid_argument on a non-conforming equation.
SensitivityBundle sensitivities(const AbelEquation& eq, double x_end, double tol);

// Adaptive Simpson quadrature with Richardson extrapolation. Throws
// SolveError{MaxDepth} when bisection depth 30 is reached without meeting
// the local error target, EvalError when f produces a non-finite value.
double quadrature(const std::function<double(double)>& f, double a, double b, double tol);

}  // namespace abelfe
