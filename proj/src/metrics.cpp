#include "trboost/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "trboost/error.hpp"

namespace trboost {
namespace {

void require_same_length(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorKind::Domain, "metric inputs differ in length");
}

}  // namespace

double auc(std::span<const double> scores, std::span<const double> labels) {
  require_same_length(scores, labels);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double positive_rank_sum = 0.0;
  double n_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    // Ranks i+1 .. j+1 share their average.
    const double avg_rank = 0.5 * static_cast<double>(i + j + 2);
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]] == 1.0) {
        positive_rank_sum += avg_rank;
        n_pos += 1.0;
      }
    }
    i = j + 1;
  }
  const double n_neg = static_cast<double>(n) - n_pos;
  if (n_pos == 0.0 || n_neg == 0.0) {
    fail(ErrorKind::UndefinedMetric, "AUC undefined: labels contain a single class");
  }
  return (positive_rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

double f1(std::span<const double> scores, std::span<const double> labels, double threshold) {
  require_same_length(scores, labels);
  double tp = 0.0, fp = 0.0, fn = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    const bool actual = labels[i] == 1.0;
    if (predicted && actual) tp += 1.0;
    if (predicted && !actual) fp += 1.0;
    if (!predicted && actual) fn += 1.0;
  }
  if (tp + fp == 0.0 || tp + fn == 0.0 || tp == 0.0) return 0.0;
  const double precision = tp / (tp + fp);
  const double recall = tp / (tp + fn);
  return 2.0 * precision * recall / (precision + recall);
}

double regression_loss(const LossKind& kind, std::span<const double> predictions,
                       std::span<const double> labels) {
  require_same_length(predictions, labels);
  if (labels.empty()) fail(ErrorKind::Domain, "metric inputs are empty");
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) total += loss_value(kind, labels[i], predictions[i]);
  return total / static_cast<double>(labels.size());
}

}  // namespace trboost
