#pragma once

// Programmatic surface shared by the library users and the command-line tool.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trboost/boosting.hpp"
#include "trboost/convergence_lab.hpp"
#include "trboost/data.hpp"
#include "trboost/error.hpp"
#include "trboost/losses.hpp"
#include "trboost/metrics.hpp"
#include "trboost/model_io.hpp"

namespace trboost {

// Semantic version; the major component equals kFormatVersion.
std::string_view version();

enum class MetricKind { Auto, Loss, Auc, F1, Mae };

MetricKind parse_metric(std::string_view text);
std::string_view to_string(MetricKind metric);

// Auto resolves to AUC for logistic models and to the mean training loss otherwise.
MetricKind resolve_metric(MetricKind metric, const LossKind& loss);
bool higher_is_better(MetricKind metric);

// Metric of raw scores; AUC and F1 see psi-probabilities.
double compute_metric(MetricKind metric, const LossKind& loss, std::span<const double> scores,
                      std::span<const double> labels);

// Logistic: logloss, auc, f1. Otherwise: loss, mae, mse. The curve holds
// the mean loss after every logged iteration.
EvalReport evaluate(const Ensemble& ensemble, const Dataset& data);

struct CurveRow {
  std::size_t iteration = 0;  // 1-based
  double train_loss = 0.0;
  std::optional<double> val_metric;
  double rho = 0.0;
  bool admitted = false;
  double mu_or_alpha = 0.0;
  double beta = 0.0;
};

std::vector<CurveRow> training_curves(const Ensemble& ensemble, const Dataset* validation,
                                      MetricKind metric);

// Header: iteration,train_loss,val_metric,rho,admitted,mu_or_alpha,beta
void write_curves_csv(const std::vector<CurveRow>& rows, const std::filesystem::path& path);

// One grid dimension, named by its command-line flag (without dashes).
struct GridAxis {
  std::string flag;
  std::vector<double> values;
};

struct GridSetting {
  std::vector<std::pair<std::string, double>> values;  // in flag order
  double score = 0.0;
};

struct GridResult {
  std::vector<GridSetting> settings;  // lexicographic flag order
  std::size_t best = 0;
  MetricKind metric = MetricKind::Loss;
};

// Applies one flag value (alpha, beta, mu, eta, gamma, eps1, eps2, estimators,
// max-depth, min-leaf, min-gain, nu, lambda, base-score).
void apply_setting(BoostConfig& config, BaselineKind& kind, std::string_view flag, double value);

// Exhaustive search scored on the validation set. Ties keep the earliest
// setting in lexicographic flag order.
GridResult grid_search(const Dataset& train, const Dataset& validation, const BaselineKind& kind,
                       const BoostConfig& config, std::vector<GridAxis> axes, MetricKind metric);

Dataset concatenate(const Dataset& a, const Dataset& b);

}  // namespace trboost
