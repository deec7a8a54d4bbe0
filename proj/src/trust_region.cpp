#include "trboost/trust_region.hpp"

#include <algorithm>
#include <cmath>

#include "trboost/error.hpp"

namespace trboost {
namespace {

// Never shrinks a value that already sits above the cap.
double grow(double value, const TrustParams& params) {
  if (value >= params.mu_max) return value;
  return std::min(value * params.gamma, params.mu_max);
}

}  // namespace

void TrustParams::validate() const {
  if (!(0.0 <= eta && eta <= eps1 && eps1 < 1.0 && 1.0 < eps2)) {
    fail(ErrorKind::Domain, "trust parameters must satisfy 0 <= eta <= eps1 < 1 < eps2");
  }
  if (!(gamma > 1.0)) fail(ErrorKind::Domain, "gamma must be greater than 1");
  if (!(mu_max > 0.0)) fail(ErrorKind::Domain, "mu_max must be positive");
}

ScalarStep solve_scalar_subproblem(double g, double b, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    fail(ErrorKind::Domain, "trust radius must be positive and finite");
  }
  if (!std::isfinite(g) || !std::isfinite(b)) {
    fail(ErrorKind::Domain, "subproblem coefficients must be finite");
  }
  if (g == 0.0) {
    if (b >= 0.0) return {0.0, 0.0};
    // Both endpoints are optimal; +radius is the fixed tie-break.
    return {radius, -b};
  }
  if (b > 0.0 && std::abs(g / b) <= radius) return {-g / b, 0.0};
  const double z = g > 0.0 ? -radius : radius;
  return {z, std::abs(g) / radius - b};
}

std::vector<double> target_values(std::span<const double> grads,
                                  std::span<const double> quads, double mu) {
  if (grads.size() != quads.size()) {
    fail(ErrorKind::Domain, "gradient and quadratic vectors differ in length");
  }
  std::vector<double> z(grads.size());
  for (std::size_t i = 0; i < grads.size(); ++i) {
    const double denom = quads[i] + mu;
    if (!(denom > 0.0)) {
      fail(ErrorKind::InfeasibleRadius,
           "b + mu is not positive; the radius shift must be raised");
    }
    z[i] = -grads[i] / denom;
  }
  return z;
}

double predicted_reduction(std::span<const double> grads, std::span<const double> quads,
                           std::span<const double> outputs) {
  if (grads.size() != quads.size() || grads.size() != outputs.size() || grads.empty()) {
    fail(ErrorKind::Domain, "ratio inputs must be non-empty and of equal length");
  }
  double model = 0.0;
  for (std::size_t i = 0; i < grads.size(); ++i) {
    model += grads[i] * outputs[i] + 0.5 * quads[i] * outputs[i] * outputs[i];
  }
  return -model / static_cast<double>(grads.size());
}

double ratio_r1(double actual_reduction, std::span<const double> grads,
                std::span<const double> quads, std::span<const double> outputs) {
  const double denom = predicted_reduction(grads, quads, outputs);
  if (denom <= 0.0 || std::abs(denom) < kDegenerateDenominator) return 0.0;
  return actual_reduction / denom;
}

double ratio_r1(double loss_prev, double loss_new, std::span<const double> grads,
                std::span<const double> quads, std::span<const double> outputs) {
  return ratio_r1(loss_prev - loss_new, grads, quads, outputs);
}

double ratio_r2(double actual_reduction, std::span<const double> outputs) {
  if (outputs.empty()) fail(ErrorKind::Domain, "ratio inputs must be non-empty");
  double mean_abs = 0.0;
  for (double z : outputs) mean_abs += std::abs(z);
  mean_abs /= static_cast<double>(outputs.size());
  if (mean_abs < kDegenerateDenominator) return 0.0;
  return actual_reduction / mean_abs;
}

double ratio_r2(double loss_prev, double loss_new, std::span<const double> outputs) {
  return ratio_r2(loss_prev - loss_new, outputs);
}

TrustState update_radius(const TrustState& state, const TrustParams& params, double rho) {
  TrustState next = state;
  next.iteration += 1;
  if (rho < params.eps1 || rho > params.eps2) {
    next.mu = grow(state.mu, params);
    next.alpha = grow(state.alpha, params);
    next.beta = grow(state.beta, params);
  }
  return next;
}

}  // namespace trboost
