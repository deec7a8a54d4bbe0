#include "trboost/learners.hpp"

#include <string>

#include <Eigen/Dense>

#include "trboost/error.hpp"

namespace trboost {

double LinearLearner::predict(std::span<const double> row) const {
  if (row.size() != weights.size()) {
    fail(ErrorKind::Domain, "row has " + std::to_string(row.size()) +
                                " features, learner expects " + std::to_string(weights.size()));
  }
  double out = intercept;
  for (std::size_t j = 0; j < row.size(); ++j) out += weights[j] * row[j];
  return out;
}

LinearLearner fit_generic(const Matrix& features, std::span<const double> targets) {
  const auto n = static_cast<Eigen::Index>(features.rows());
  const auto m = static_cast<Eigen::Index>(features.cols());
  if (n == 0) fail(ErrorKind::Domain, "cannot fit a learner on an empty dataset");
  if (targets.size() != features.rows()) {
    fail(ErrorKind::Domain, "target count does not match the feature rows");
  }

  // Design matrix with a trailing column of ones.
  Eigen::MatrixXd design(n, m + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) design(i, j) = features(i, j);
    design(i, m) = 1.0;
  }
  const Eigen::Map<const Eigen::VectorXd> z(targets.data(), n);

  Eigen::VectorXd coef;
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() == m + 1) {
    coef = qr.solve(z);
  } else {
    Eigen::MatrixXd gram = design.transpose() * design;
    gram.diagonal().array() += kRidgeEpsilon;
    coef = gram.ldlt().solve(design.transpose() * z);
  }

  LinearLearner learner;
  learner.weights.assign(coef.data(), coef.data() + m);
  learner.intercept = coef(m);
  return learner;
}

}  // namespace trboost
