#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trboost/losses.hpp"

namespace trboost {

struct EvalReport {
  std::map<std::string, double> values;
  std::vector<std::pair<std::size_t, double>> curve;
};

// Mann-Whitney AUC with average ranks for ties. Throws UndefinedMetric when
// only one class is present.
double auc(std::span<const double> scores, std::span<const double> labels);

// Class 1 is predicted when score >= threshold. Degenerate cases give 0.
double f1(std::span<const double> scores, std::span<const double> labels,
          double threshold = 0.5);

// Mean per-instance loss of raw predictions.
double regression_loss(const LossKind& kind, std::span<const double> predictions,
                       std::span<const double> labels);

}  // namespace trboost
