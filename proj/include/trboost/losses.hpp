#pragma once

#include <string>
#include <string_view>

namespace trboost {

enum class LossTag { Logistic, Squared, Absolute, Huber };

// Per-instance loss l(y, F) on the raw score F.
struct LossKind {
  LossTag tag = LossTag::Squared;
  double delta = 1.0;  // Huber only, must be > 0

  static LossKind logistic() { return {LossTag::Logistic, 1.0}; }
  static LossKind squared() { return {LossTag::Squared, 1.0}; }
  static LossKind absolute() { return {LossTag::Absolute, 1.0}; }
  static LossKind huber(double delta);

  friend bool operator==(const LossKind&, const LossKind&) = default;
};

// Probability clamp applied to logistic derivatives. 0 < rho < 0.5.
struct ClampConfig {
  double rho = 1e-4;

  static ClampConfig make(double rho);
};

// First derivative g and quadratic coefficient b of the loss at F.
struct GradQuad {
  double g = 0.0;
  double b = 0.0;
};

// Accepts "logloss", "l2", "l1", "huber" and "huber:<delta>".
LossKind parse_loss(std::string_view text);
std::string to_string(const LossKind& kind);

// Throws Domain when y is not a valid label for the loss.
void check_label(const LossKind& kind, double y);

// psi(F) = e^F / (e^F + e^-F).
double probability(double f);

// psi(F) and 1 - psi(F) for a logistic label, with the clamp applied:
// y = 0 caps p at 1 - rho, y = 1 floors p at rho. Both are kept strictly
// positive so that b = 4 p q never vanishes.
struct ClampedProbability {
  double p = 0.5;
  double q = 0.5;
};
ClampedProbability clamped_probability(double y, double f, const ClampConfig& clamp);

double loss_value(const LossKind& kind, double y, double f);

// l(y, f) - l(y, f + z), evaluated without cancelling two large losses
// wherever the loss is piecewise polynomial.
double loss_decrease(const LossKind& kind, double y, double f, double z);

// Logistic derivatives use the clamped probability; other losses ignore clamp.
GradQuad grad_quad(const LossKind& kind, double y, double f,
                   const ClampConfig& clamp = {});

}  // namespace trboost
