#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trboost/boosting.hpp"
#include "trboost/losses.hpp"

namespace trboost {

// Scalar step rule for the one-instance simulation. TRBoost keeps mu frozen.
struct StepRule {
  Method method = Method::TRBoost;
  double mu = 0.0;  // TRBoost: f = -g / (h + mu)
  double nu = 1.0;  // GBDT: f = -nu g; Newton: f = -nu g / h

  static StepRule trboost(double mu) { return {Method::TRBoost, mu, 1.0}; }
  static StepRule gbdt(double nu) { return {Method::GBDT, 0.0, nu}; }
  static StepRule newton(double nu) { return {Method::NewtonGBM, 0.0, nu}; }
};

struct LossTrace {
  std::vector<double> losses;  // losses[0] is the loss at F0
  std::vector<double> scores;  // F after each entry
  std::vector<double> quads;   // h at each entry's F (before the next step)
  std::string method;
};

// Boosting on a single instance with no fitting error: the exact step is
// applied every iteration.
LossTrace run_one_instance(const LossKind& loss, double y, double f0, const StepRule& rule,
                           std::size_t iterations, const ClampConfig& clamp = {});

struct RateCheck {
  bool passed = false;
  double c = 0.0;
  bool bound_holds = false;
  std::optional<std::size_t> failing_index;
  std::string reason;
};

// eps_t <= eps_{t-1} - c eps_{t-1}^2 with the largest such c, and the
// resulting eps_T <= eps_0 / (1 + c eps_0 T).
RateCheck check_sublinear(std::span<const double> trace);

inline constexpr double kLinearRateThreshold = 1.0 - 1e-6;

// eps_t <= c eps_{t-1} with c = max ratio; passes when c < threshold and
// eps_T <= eps_0 c^T.
RateCheck check_linear(std::span<const double> trace, double threshold = kLinearRateThreshold);

struct InequalityReport {
  // max over the grid of l - g^2/h (non-positive when the bound holds)
  double max_comparison_violation = -std::numeric_limits<double>::infinity();
  // max over the grid of |g/h| - 1/(2 rho)
  double max_step_violation = -std::numeric_limits<double>::infinity();
  std::size_t points = 0;
  bool passed = false;
};

inline constexpr double kInequalitySlack = 1e-12;

// Logistic loss with clamped probabilities: checks g^2/h >= l and
// |g/h| <= 1/(2 rho) on every grid point for the given labels.
InequalityReport check_appendix_inequalities(const ClampConfig& clamp,
                                             std::span<const double> f_grid,
                                             std::span<const double> labels);

}  // namespace trboost
