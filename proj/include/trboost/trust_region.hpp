#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace trboost {

// Radius-control constants. Requires 0 <= eta <= eps1 < 1 < eps2, gamma > 1.
struct TrustParams {
  double eps1 = 0.9;
  double eps2 = 1.1;
  double gamma = 1.01;
  double eta = 0.0;
  double mu_max = 1e6;

  // Throws Domain if the ordering constraints are violated.
  void validate() const;
};

// Radius shift state. The generic-learner path uses mu; trees use
// mu_j = alpha * n_j + beta.
struct TrustState {
  double mu = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  std::size_t iteration = 0;
};

enum class RatioKind { R1, R2 };

struct ScalarStep {
  double z = 0.0;
  double mu = 0.0;  // z == -g / (b + mu)
};

// argmin g z + b z^2 / 2 subject to |z| <= radius.
ScalarStep solve_scalar_subproblem(double g, double b, double radius);

// z_i = -g_i / (b_i + mu). Throws InfeasibleRadius if some b_i + mu <= 0.
std::vector<double> target_values(std::span<const double> grads,
                                  std::span<const double> quads, double mu);

// Predicted reduction -(1/n) sum [g z + b z^2 / 2] of the quadratic model.
double predicted_reduction(std::span<const double> grads,
                           std::span<const double> quads,
                           std::span<const double> outputs);

inline constexpr double kDegenerateDenominator = 1e-15;

// Actual over predicted reduction. Returns 0 when the predicted reduction is
// not positive or vanishes.
double ratio_r1(double loss_prev, double loss_new, std::span<const double> grads,
                std::span<const double> quads, std::span<const double> outputs);

// Same ratio from an already computed actual reduction.
double ratio_r1(double actual_reduction, std::span<const double> grads,
                std::span<const double> quads, std::span<const double> outputs);

// Actual reduction over mean |z|. Returns 0 when mean |z| vanishes.
double ratio_r2(double loss_prev, double loss_new, std::span<const double> outputs);
double ratio_r2(double actual_reduction, std::span<const double> outputs);

// Scale mu, alpha and beta by gamma (capped at mu_max) when rho leaves
// [eps1, eps2]. The iteration counter always advances.
TrustState update_radius(const TrustState& state, const TrustParams& params, double rho);

inline bool admit(double rho, double eta) { return rho > eta; }

}  // namespace trboost
