#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "abelfe/equation.hpp"
#include "abelfe/functional.hpp"
#include "abelfe/transform.hpp"

namespace abelfe {

// Deterministic per-instance stream splitting: the same (seed, stream, index)
// always yields the same generator state, independent of other instances.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi);
  int range(int lo, int hi);  // inclusive
  Rational rational(int num_lo, int num_hi, int den_hi);

 private:
  std::mt19937_64 gen_;
};

Expr random_coefficient(Rng& rng, bool constant, bool positive);
AbelEquation random_equation(Rng& rng, int n, int K, bool constant_coeffs, bool positive);
AlphaTransform random_transform(Rng& rng, int n);

struct NonuniquenessExample {
  std::vector<Expr> reps;
  Expr negative_control;
  Expr g1, g2, target;
  std::vector<double> grid;
  double tol = 1e-10;
};

// Two coefficient functions whose ratio-of-roles admits several two-slot
// representations of the same composite target, plus one that does not.
NonuniquenessExample canonical_nonuniqueness_example();

struct SuiteConfig {
  std::string suite;
  std::uint64_t seed = 0;
  int count = 0;     // 0 picks the per-suite default
  double tol = 0.0;  // 0 picks the per-check defaults
  // enumeration parameters
  std::string kind = "lambda";
  int n = 1;
  int K = 1;
  int cap = 2;
  std::optional<int> constraint;
};

const std::vector<std::string>& known_suites();

// JSON-lines report: one header per suite, one line per check, one summary.
// Output is byte-deterministic for a fixed config: keys are sorted, doubles
// print shortest-round-trip, suites run sequentially, and no timestamps or
// host details are embedded.
class ReportWriter {
 public:
  explicit ReportWriter(std::ostream& os) : os_(os) {}

  void begin_suite(const std::string& suite, const SuiteConfig& cfg,
                   const nlohmann::json& tolerances);
  void check(const std::string& name, int index, double observed, double tolerance,
             bool pass, const nlohmann::json& detail = nlohmann::json());
  void end_suite();

  int failures() const { return total_failures_; }

 private:
  std::ostream& os_;
  std::string suite_;
  int checks_ = 0;
  int failures_ = 0;
  int total_failures_ = 0;
};

// Writes the enumeration of cfg.kind/cfg.n/cfg.K/cfg.cap as CSV.
void write_enumeration_csv(const SuiteConfig& cfg, std::ostream& os);

// Runs one suite (or "all") and returns the number of failed checks.
int run_suite(const SuiteConfig& cfg, ReportWriter& writer);

}  // namespace abelfe
