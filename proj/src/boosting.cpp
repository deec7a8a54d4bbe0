#include "trboost/boosting.hpp"

#include <cmath>
#include <optional>
#include <string>

#include "trboost/error.hpp"

namespace trboost {
namespace {

bool may_have_flat_curvature(const BoostConfig& config) {
  return config.loss.tag == LossTag::Absolute || config.loss.tag == LossTag::Huber ||
         (config.learner == LearnerKind::Tree && config.tree.first_order);
}

void check_data(const Dataset& data, const BoostConfig& config) {
  data.validate();
  for (double y : data.labels) check_label(config.loss, y);
}

double mean_loss(const LossKind& loss, std::span<const double> labels,
                 std::span<const double> scores) {
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) total += loss_value(loss, labels[i], scores[i]);
  return total / static_cast<double>(labels.size());
}

void compute_derivatives(const BoostConfig& config, std::span<const double> labels,
                         std::span<const double> scores, std::vector<double>& grads,
                         std::vector<double>& quads) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const GradQuad gq = grad_quad(config.loss, labels[i], scores[i], config.clamp);
    grads[i] = gq.g;
    quads[i] = gq.b;
  }
}

double mean_decrease(const LossKind& loss, std::span<const double> labels,
                     std::span<const double> scores, std::span<const double> outputs) {
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    total += loss_decrease(loss, labels[i], scores[i], outputs[i]);
  }
  return total / static_cast<double>(labels.size());
}

std::vector<double> learner_outputs(const Learner& learner, const Matrix& x) {
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = predict_learner(learner, x.row(i));
  return out;
}

Learner fit_trust_learner(const Dataset& data, const BoostConfig& config,
                          const TrustState& state, std::span<const double> grads,
                          std::span<const double> quads) {
  if (config.learner == LearnerKind::Tree) {
    return fit_tree(data.features, grads, quads, state.alpha, state.beta, config.tree);
  }
  const auto targets = target_values(grads, quads, state.mu);
  return fit_generic(data.features, targets);
}

Ensemble empty_ensemble(const Dataset& data, const BoostConfig& config, const BaselineKind& kind) {
  Ensemble ens;
  ens.config = config;
  ens.method = kind;
  ens.num_features = data.num_features();
  ens.base_score = config.base_score;
  return ens;
}

}  // namespace

void BaselineKind::validate() const {
  if (method == Method::TRBoost) return;
  if (!(nu > 0.0 && nu <= 1.0)) fail(ErrorKind::Domain, "learning rate nu must lie in (0, 1]");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) fail(ErrorKind::Domain, "lambda must be >= 0");
}

void BoostConfig::validate() const {
  if (n_estimators < 1) fail(ErrorKind::Domain, "n_estimators must be at least 1");
  trust.validate();
  tree.validate();
  if (!(mu0 >= 0.0 && alpha0 >= 0.0 && beta0 >= 0.0)) {
    fail(ErrorKind::Domain, "initial mu, alpha and beta must be non-negative");
  }
  if (mu0 > trust.mu_max || alpha0 > trust.mu_max || beta0 > trust.mu_max) {
    fail(ErrorKind::Domain, "initial mu, alpha and beta must not exceed mu_max");
  }
  if (!std::isfinite(base_score)) fail(ErrorKind::Domain, "base_score must be finite");
  ClampConfig::make(clamp.rho);
  if (may_have_flat_curvature(*this)) {
    const bool zero_shift =
        learner == LearnerKind::Tree ? (alpha0 == 0.0 && beta0 == 0.0) : mu0 == 0.0;
    if (zero_shift) {
      fail(ErrorKind::Domain,
           "this loss can have b <= 0; the initial radius shift must be positive");
    }
  }
}

double predict_learner(const Learner& learner, std::span<const double> row) {
  return std::visit([&](const auto& l) { return l.predict(row); }, learner);
}

double Ensemble::predict_row(std::span<const double> row) const {
  if (row.size() != num_features) {
    fail(ErrorKind::Domain, "row has " + std::to_string(row.size()) +
                                " features, model expects " + std::to_string(num_features));
  }
  double score = base_score;
  for (const auto& learner : learners) score += predict_learner(learner, row);
  return score;
}

Ensemble train(const Dataset& data, const BoostConfig& config) {
  config.validate();
  check_data(data, config);
  Ensemble ens = empty_ensemble(data, config, BaselineKind::trboost());

  const std::size_t n = data.size();
  std::vector<double> scores(n, config.base_score);
  std::vector<double> grads(n), quads(n), candidate(n);
  double loss_prev = mean_loss(config.loss, data.labels, scores);
  ens.initial_loss = loss_prev;

  TrustState state{config.mu0, config.alpha0, config.beta0, 0};
  std::size_t rejected_run = 0;

  for (std::size_t t = 0; t < config.n_estimators; ++t) {
    compute_derivatives(config, data.labels, scores, grads, quads);

    std::optional<Learner> learner;
    try {
      learner = fit_trust_learner(data, config, state, grads, quads);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InfeasibleRadius) throw;
      // One escalation of the shift, then give up.
      state.mu = std::min(state.mu * config.trust.gamma, config.trust.mu_max);
      state.alpha = std::min(state.alpha * config.trust.gamma, config.trust.mu_max);
      state.beta = std::min(state.beta * config.trust.gamma, config.trust.mu_max);
      learner = fit_trust_learner(data, config, state, grads, quads);
    }

    const auto outputs = learner_outputs(*learner, data.features);
    for (std::size_t i = 0; i < n; ++i) candidate[i] = scores[i] + outputs[i];
    const double loss_new = mean_loss(config.loss, data.labels, candidate);
    const double actual = mean_decrease(config.loss, data.labels, scores, outputs);

    const double rho = config.ratio == RatioKind::R1
                           ? ratio_r1(actual, grads, quads, outputs)
                           : ratio_r2(actual, outputs);
    const bool admitted = admit(rho, config.trust.eta);

    IterationLog entry;
    entry.rho = rho;
    entry.admitted = admitted;
    entry.mu = state.mu;
    entry.alpha = state.alpha;
    entry.beta = state.beta;
    entry.predicted_reduction = predicted_reduction(grads, quads, outputs);

    state = update_radius(state, config.trust, rho);
    if (admitted) {
      scores.swap(candidate);
      loss_prev = loss_new;
      ens.learners.push_back(std::move(*learner));
      rejected_run = 0;
    } else {
      ++rejected_run;
    }
    entry.train_loss = loss_prev;
    ens.log.push_back(entry);

    if (config.patience > 0 && rejected_run >= config.patience) break;
  }
  return ens;
}

Ensemble train_baseline(const Dataset& data, const BaselineKind& kind, const BoostConfig& shared) {
  if (kind.method == Method::TRBoost) return train(data, shared);
  kind.validate();
  BoostConfig config = shared;
  config.tree.first_order = false;
  config.learner = LearnerKind::Tree;
  if (config.n_estimators < 1) fail(ErrorKind::Domain, "n_estimators must be at least 1");
  config.tree.validate();
  check_data(data, config);
  Ensemble ens = empty_ensemble(data, config, kind);

  const std::size_t n = data.size();
  std::vector<double> scores(n, config.base_score);
  std::vector<double> grads(n), quads(n), fit_quads(n, 1.0);
  double loss_prev = mean_loss(config.loss, data.labels, scores);
  ens.initial_loss = loss_prev;

  for (std::size_t t = 0; t < config.n_estimators; ++t) {
    compute_derivatives(config, data.labels, scores, grads, quads);

    Tree tree;
    if (kind.method == Method::GBDT) {
      // Unit curvature with no shift gives squared-error splits on -g and
      // mean-target leaves.
      tree = fit_tree(data.features, grads, fit_quads, 0.0, 0.0, config.tree, kind.nu);
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        if (!(quads[i] > 0.0)) {
          fail(ErrorKind::HessianNotPositive,
               "Hessian not positive at iteration " + std::to_string(t) + ", instance " +
                   std::to_string(i) + "; Newton boosting cannot use loss " +
                   to_string(config.loss));
        }
      }
      tree = fit_tree(data.features, grads, quads, 0.0, kind.lambda, config.tree, kind.nu);
    }

    std::vector<double> outputs(n);
    for (std::size_t i = 0; i < n; ++i) {
      outputs[i] = tree.predict(data.features.row(i));
      scores[i] += outputs[i];
    }
    const double loss_new = mean_loss(config.loss, data.labels, scores);

    IterationLog entry;
    entry.rho = ratio_r1(loss_prev - loss_new, grads, quads, outputs);
    entry.admitted = true;
    entry.beta = kind.method == Method::NewtonGBM ? kind.lambda : 0.0;
    entry.predicted_reduction = predicted_reduction(grads, quads, outputs);
    entry.train_loss = loss_new;
    ens.log.push_back(entry);
    ens.learners.emplace_back(std::move(tree));
    loss_prev = loss_new;
  }
  return ens;
}

Ensemble train_with(const Dataset& data, const BaselineKind& kind, const BoostConfig& config) {
  return kind.method == Method::TRBoost ? train(data, config) : train_baseline(data, kind, config);
}

std::vector<double> predict(const Ensemble& ensemble, const Matrix& features) {
  if (features.cols() != ensemble.num_features) {
    fail(ErrorKind::Schema, "data has " + std::to_string(features.cols()) +
                                " features, model expects " + std::to_string(ensemble.num_features));
  }
  std::vector<double> out(features.rows());
  for (std::size_t i = 0; i < features.rows(); ++i) out[i] = ensemble.predict_row(features.row(i));
  return out;
}

std::vector<double> predict_proba(const Ensemble& ensemble, const Matrix& features) {
  auto out = predict(ensemble, features);
  for (double& v : out) v = probability(v);
  return out;
}

std::vector<std::vector<double>> staged_predict(const Ensemble& ensemble, const Matrix& features) {
  if (features.cols() != ensemble.num_features) {
    fail(ErrorKind::Schema, "feature count does not match the model");
  }
  std::vector<double> current(features.rows(), ensemble.base_score);
  std::vector<std::vector<double>> stages;
  stages.reserve(ensemble.log.size());
  std::size_t next = 0;
  for (const auto& entry : ensemble.log) {
    if (entry.admitted) {
      if (next >= ensemble.learners.size()) {
        fail(ErrorKind::Schema, "training log admits more learners than the model stores");
      }
      const Learner& learner = ensemble.learners[next++];
      for (std::size_t i = 0; i < features.rows(); ++i) {
        current[i] += predict_learner(learner, features.row(i));
      }
    }
    stages.push_back(current);
  }
  return stages;
}

}  // namespace trboost
