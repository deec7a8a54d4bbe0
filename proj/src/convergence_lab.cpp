#include "trboost/convergence_lab.hpp"

#include <algorithm>
#include <cmath>

#include "trboost/error.hpp"

namespace trboost {
namespace {

// Relative slack for bounds that hold exactly in real arithmetic.
bool within(double lhs, double rhs) { return lhs <= rhs * (1.0 + 1e-12) + 1e-300; }

double step(const GradQuad& gq, const StepRule& rule) {
  switch (rule.method) {
    case Method::TRBoost: {
      const double denom = gq.b + rule.mu;
      if (!(denom > 0.0)) {
        if (gq.g == 0.0) return 0.0;
        fail(ErrorKind::InfeasibleRadius, "h + mu is not positive");
      }
      return -gq.g / denom;
    }
    case Method::GBDT:
      return -rule.nu * gq.g;
    case Method::NewtonGBM:
      if (!(gq.b > 0.0)) fail(ErrorKind::HessianNotPositive, "Hessian not positive");
      return -rule.nu * gq.g / gq.b;
  }
  return 0.0;
}

const char* method_name(Method m) {
  switch (m) {
    case Method::TRBoost: return "trboost";
    case Method::GBDT: return "gbdt";
    case Method::NewtonGBM: return "newton";
  }
  return "";
}

}  // namespace

LossTrace run_one_instance(const LossKind& loss, double y, double f0, const StepRule& rule,
                           std::size_t iterations, const ClampConfig& clamp) {
  if (iterations < 1) fail(ErrorKind::Domain, "iterations must be at least 1");
  check_label(loss, y);
  LossTrace trace;
  trace.method = method_name(rule.method);
  double f = f0;
  for (std::size_t t = 0; t <= iterations; ++t) {
    const GradQuad gq = grad_quad(loss, y, f, clamp);
    trace.losses.push_back(loss_value(loss, y, f));
    trace.scores.push_back(f);
    trace.quads.push_back(gq.b);
    if (t < iterations) f += step(gq, rule);
  }
  return trace;
}

RateCheck check_sublinear(std::span<const double> trace) {
  RateCheck out;
  if (trace.size() < 2) {
    out.reason = "trace needs at least two entries";
    return out;
  }
  double c = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trace.size(); ++t) {
    if (!(trace[t] > 0.0) || !std::isfinite(trace[t])) {
      out.failing_index = t;
      out.reason = "trace entry is not positive";
      return out;
    }
    if (t == 0) continue;
    if (trace[t] > trace[t - 1]) {
      out.failing_index = t;
      out.reason = "trace increases";
      return out;
    }
    const double prev = trace[t - 1];
    c = std::min(c, (prev - trace[t]) / (prev * prev));
  }
  out.c = c;
  const double e0 = trace.front();
  const double big_t = static_cast<double>(trace.size() - 1);
  out.bound_holds = within(trace.back(), e0 / (1.0 + c * e0 * big_t));
  out.passed = c > 0.0 && out.bound_holds;
  if (!(c > 0.0)) out.reason = "no positive c satisfies the recurrence";
  else if (!out.bound_holds) out.reason = "O(1/T) bound violated";
  return out;
}

RateCheck check_linear(std::span<const double> trace, double threshold) {
  RateCheck out;
  if (trace.size() < 2) {
    out.reason = "trace needs at least two entries";
    return out;
  }
  double c = 0.0;
  for (std::size_t t = 0; t < trace.size(); ++t) {
    if (!(trace[t] > 0.0) || !std::isfinite(trace[t])) {
      out.failing_index = t;
      out.reason = "trace entry is not positive";
      return out;
    }
    if (t > 0) c = std::max(c, trace[t] / trace[t - 1]);
  }
  out.c = c;
  const double big_t = static_cast<double>(trace.size() - 1);
  out.bound_holds = within(trace.back(), trace.front() * std::pow(c, big_t));
  out.passed = c < threshold && out.bound_holds;
  if (!(c < threshold)) out.reason = "ratio constant is not below the threshold";
  else if (!out.bound_holds) out.reason = "linear-rate bound violated";
  return out;
}

InequalityReport check_appendix_inequalities(const ClampConfig& clamp,
                                             std::span<const double> f_grid,
                                             std::span<const double> labels) {
  InequalityReport report;
  const double step_bound = 1.0 / (2.0 * clamp.rho);
  for (double y : labels) {
    check_label(LossKind::logistic(), y);
    for (double f : f_grid) {
      if (!std::isfinite(f)) fail(ErrorKind::Domain, "grid contains a non-finite score");
      const GradQuad gq = grad_quad(LossKind::logistic(), y, f, clamp);
      const auto [p, q] = clamped_probability(y, f, clamp);
      // Loss at the same clamped probability the derivatives use.
      const double l = y == 1.0 ? std::log1p(q / p) : std::log1p(p / q);
      const double newton = gq.g / gq.b;
      report.max_comparison_violation =
          std::max(report.max_comparison_violation, l - gq.g * newton);
      report.max_step_violation =
          std::max(report.max_step_violation, std::abs(newton) - step_bound);
      ++report.points;
    }
  }
  report.passed = report.max_comparison_violation <= kInequalitySlack &&
                  report.max_step_violation <= kInequalitySlack;
  return report;
}

}  // namespace trboost
