#pragma once

#include <span>
#include <vector>

#include "trboost/matrix.hpp"

namespace trboost {

inline constexpr double kRidgeEpsilon = 1e-8;

// Affine model w . x + intercept, the non-tree base learner.
struct LinearLearner {
  std::vector<double> weights;
  double intercept = 0.0;

  double predict(std::span<const double> row) const;

  friend bool operator==(const LinearLearner&, const LinearLearner&) = default;
};

// Least squares with intercept. Rank-deficient designs fall back to a ridge
// solve with kRidgeEpsilon on the diagonal.
LinearLearner fit_generic(const Matrix& features, std::span<const double> targets);

inline double predict_generic(const LinearLearner& learner, std::span<const double> row) {
  return learner.predict(row);
}

}  // namespace trboost
