#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "trboost/data.hpp"
#include "trboost/learners.hpp"
#include "trboost/losses.hpp"
#include "trboost/matrix.hpp"
#include "trboost/tree.hpp"
#include "trboost/trust_region.hpp"

namespace trboost {

enum class LearnerKind { Tree, Linear };

enum class Method { TRBoost, GBDT, NewtonGBM };

// Which boosting rule to run. nu and lambda are ignored by TRBoost.
struct BaselineKind {
  Method method = Method::TRBoost;
  double nu = 1.0;      // learning rate, (0, 1]
  double lambda = 0.0;  // Newton leaf shift, >= 0

  static BaselineKind trboost() { return {}; }
  static BaselineKind gbdt(double nu) { return {Method::GBDT, nu, 0.0}; }
  static BaselineKind newton(double nu, double lambda) { return {Method::NewtonGBM, nu, lambda}; }

  void validate() const;
};

struct BoostConfig {
  LossKind loss = LossKind::squared();
  ClampConfig clamp;
  std::size_t n_estimators = 100;
  TrustParams trust;
  double mu0 = 1.0;      // generic learner path
  double alpha0 = 0.1;   // tree path: mu_j = alpha * n_j + beta
  double beta0 = 10.0;
  RatioKind ratio = RatioKind::R1;
  LearnerKind learner = LearnerKind::Tree;
  TreeConfig tree;
  double base_score = 0.0;
  std::uint64_t seed = 0;
  // Stop after this many consecutive rejections; 0 disables.
  std::size_t patience = 0;

  void validate() const;
};

using Learner = std::variant<Tree, LinearLearner>;

double predict_learner(const Learner& learner, std::span<const double> row);

struct IterationLog {
  double rho = 0.0;
  bool admitted = false;
  // Radius shift used to fit this iteration's learner.
  double mu = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double predicted_reduction = 0.0;
  // Training objective after the admission decision.
  double train_loss = 0.0;

  friend bool operator==(const IterationLog&, const IterationLog&) = default;
};

struct Ensemble {
  BoostConfig config;
  BaselineKind method;
  std::size_t num_features = 0;
  double base_score = 0.0;
  double initial_loss = 0.0;
  std::vector<Learner> learners;  // admitted learners only, in order
  std::vector<IterationLog> log;  // one entry per iteration run

  std::size_t num_admitted() const noexcept { return learners.size(); }
  double predict_row(std::span<const double> row) const;
};

// Trust-region boosting loop: fit, score with the approximation ratio,
// update the radius, admit when rho > eta.
Ensemble train(const Dataset& data, const BoostConfig& config);

// GBDT (-nu g targets, squared-error splits) or Newton boosting
// (-nu G / (B + lambda) leaves). Every learner is admitted. Newton throws
// HessianNotPositive as soon as some b <= 0.
Ensemble train_baseline(const Dataset& data, const BaselineKind& kind, const BoostConfig& shared);

// Dispatches on kind.method.
Ensemble train_with(const Dataset& data, const BaselineKind& kind, const BoostConfig& config);

std::vector<double> predict(const Ensemble& ensemble, const Matrix& features);

// psi of the raw scores; only meaningful for the logistic loss.
std::vector<double> predict_proba(const Ensemble& ensemble, const Matrix& features);

// Raw scores after each logged iteration; rejected iterations repeat the
// previous stage.
std::vector<std::vector<double>> staged_predict(const Ensemble& ensemble, const Matrix& features);

}  // namespace trboost
