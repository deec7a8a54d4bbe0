#include "trboost/losses.hpp"

#include <charconv>
#include <algorithm>
#include <cmath>
#include <limits>

#include "trboost/error.hpp"

namespace trboost {
namespace {

void require_finite(double y, double f) {
  if (!std::isfinite(y) || !std::isfinite(f)) {
    fail(ErrorKind::Domain, "loss evaluated at a non-finite value");
  }
}

// log(1 + e^x) without overflow.
double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

}  // namespace

LossKind LossKind::huber(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    fail(ErrorKind::Domain, "huber delta must be positive");
  }
  return {LossTag::Huber, delta};
}

ClampConfig ClampConfig::make(double rho) {
  if (!(rho > 0.0 && rho < 0.5)) {
    fail(ErrorKind::Domain, "clamp rho must lie in (0, 0.5)");
  }
  return {rho};
}

LossKind parse_loss(std::string_view text) {
  if (text == "logloss") return LossKind::logistic();
  if (text == "l2") return LossKind::squared();
  if (text == "l1") return LossKind::absolute();
  if (text == "huber") return LossKind::huber(1.0);
  constexpr std::string_view prefix = "huber:";
  if (text.starts_with(prefix)) {
    auto rest = text.substr(prefix.size());
    double delta = 0.0;
    auto [end, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), delta);
    if (ec != std::errc() || end != rest.data() + rest.size()) {
      fail(ErrorKind::Domain, "cannot parse huber delta in '" + std::string(text) + "'");
    }
    return LossKind::huber(delta);
  }
  fail(ErrorKind::Domain, "unknown loss '" + std::string(text) +
                              "' (expected logloss, l2, l1 or huber:<delta>)");
}

std::string to_string(const LossKind& kind) {
  switch (kind.tag) {
    case LossTag::Logistic: return "logloss";
    case LossTag::Squared: return "l2";
    case LossTag::Absolute: return "l1";
    case LossTag::Huber: {
      char buf[64];
      auto res = std::to_chars(buf, buf + sizeof(buf), kind.delta);
      return "huber:" + std::string(buf, res.ptr);
    }
  }
  return "l2";
}

void check_label(const LossKind& kind, double y) {
  if (!std::isfinite(y)) fail(ErrorKind::Domain, "label is not finite");
  if (kind.tag == LossTag::Logistic && y != 0.0 && y != 1.0) {
    fail(ErrorKind::Domain, "logloss requires labels in {0, 1}");
  }
}

double probability(double f) { return 1.0 / (1.0 + std::exp(-2.0 * f)); }

ClampedProbability clamped_probability(double y, double f, const ClampConfig& clamp) {
  // p and q are evaluated separately so neither cancels to zero.
  constexpr double tiny = std::numeric_limits<double>::min();
  double p = std::max(probability(f), tiny);
  double q = std::max(1.0 / (1.0 + std::exp(2.0 * f)), tiny);
  if (y == 0.0 && p > 1.0 - clamp.rho) {
    p = 1.0 - clamp.rho;
    q = clamp.rho;
  } else if (y == 1.0 && p < clamp.rho) {
    p = clamp.rho;
    q = 1.0 - clamp.rho;
  }
  return {p, q};
}

double loss_value(const LossKind& kind, double y, double f) {
  require_finite(y, f);
  const double r = f - y;
  switch (kind.tag) {
    case LossTag::Logistic:
      // y log(1/p) + (1-y) log(1/(1-p)) with p = psi(F).
      return y * softplus(-2.0 * f) + (1.0 - y) * softplus(2.0 * f);
    case LossTag::Squared:
      return r * r;
    case LossTag::Absolute:
      return std::abs(r);
    case LossTag::Huber: {
      const double a = std::abs(r);
      return a <= kind.delta ? 0.5 * r * r : kind.delta * (a - 0.5 * kind.delta);
    }
  }
  return 0.0;
}

double loss_decrease(const LossKind& kind, double y, double f, double z) {
  require_finite(y, f);
  require_finite(y, f + z);
  const double r = f - y;
  const double s = r + z;
  switch (kind.tag) {
    case LossTag::Squared:
      return -z * (r + s);
    case LossTag::Absolute:
      return std::abs(r) - std::abs(s);
    case LossTag::Huber: {
      const double d = kind.delta;
      if (std::abs(r) <= d && std::abs(s) <= d) return -0.5 * z * (r + s);
      if (std::abs(r) > d && std::abs(s) > d && (r > 0.0) == (s > 0.0)) {
        return r > 0.0 ? -d * z : d * z;
      }
      break;
    }
    case LossTag::Logistic:
      break;
  }
  return loss_value(kind, y, f) - loss_value(kind, y, f + z);
}

GradQuad grad_quad(const LossKind& kind, double y, double f, const ClampConfig& clamp) {
  require_finite(y, f);
  const double r = f - y;
  switch (kind.tag) {
    case LossTag::Logistic: {
      const auto [p, q] = clamped_probability(y, f, clamp);
      const double g = y == 1.0 ? -2.0 * q : 2.0 * (p - y);
      return {g, 4.0 * p * q};
    }
    case LossTag::Squared:
      return {2.0 * r, 2.0};
    case LossTag::Absolute:
      return {r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0), 0.0};
    case LossTag::Huber: {
      if (std::abs(r) <= kind.delta) return {r, 1.0};
      return {r > 0.0 ? kind.delta : -kind.delta, 0.0};
    }
  }
  return {};
}

}  // namespace trboost
