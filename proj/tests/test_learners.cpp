#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "trboost/learners.hpp"

using namespace trboost;

namespace {

double sse(const LinearLearner& l, const Matrix& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double r = l.predict(x.row(i)) - y[i];
    s += r * r;
  }
  return s;
}

}  // namespace

TEST(Linear, ConstantTargets) {
  Matrix x(4, 2, {1, 0, 2, 1, 3, 5, 4, -1});
  std::vector<double> y(4, 3.5);
  const auto l = fit_generic(x, y);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(l.predict(x.row(i)), 3.5, 1e-12);
}

TEST(Linear, RecoversExactLine) {
  Matrix x(5, 1, {0, 1, 2, 3, 4});
  std::vector<double> y{1, 3, 5, 7, 9};
  const auto l = fit_generic(x, y);
  EXPECT_NEAR(l.weights[0], 2.0, 1e-12);
  EXPECT_NEAR(l.intercept, 1.0, 1e-12);
  EXPECT_EQ(predict_generic(l, std::vector<double>{10.0}), l.predict(std::vector<double>{10.0}));
}

TEST(Linear, DuplicateColumnsMatchPseudoInverseFit) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t n = 30;
  Matrix x(n, 3);
  std::vector<double> y(n);
  Eigen::MatrixXd a(n, 4);
  Eigen::VectorXd t(n);
  for (std::size_t i = 0; i < n; ++i) {
    x(i, 0) = normal(rng);
    x(i, 1) = x(i, 0);  // exact duplicate
    x(i, 2) = normal(rng);
    y[i] = 2.0 * x(i, 0) - x(i, 2) + 0.1 * normal(rng);
    a.row(i) << x(i, 0), x(i, 1), x(i, 2), 1.0;
    t(i) = y[i];
  }
  const Eigen::VectorXd pinv_fit =
      a * a.completeOrthogonalDecomposition().pseudoInverse() * t;
  const auto l = fit_generic(x, y);
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(l.predict(x.row(i)), pinv_fit(i), 1e-6);
}

TEST(Linear, NoRandomCompetitorHasSmallerResidual) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 40, m = 3;
    Matrix x(n, m);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) x(i, j) = normal(rng);
      y[i] = normal(rng) + x(i, 0);
    }
    const auto best = fit_generic(x, y);
    const double base = sse(best, x, y);
    for (int k = 0; k < 50; ++k) {
      LinearLearner other = best;
      for (double& w : other.weights) w += 0.05 * normal(rng);
      other.intercept += 0.05 * normal(rng);
      ASSERT_GE(sse(other, x, y), base - 1e-9);
    }
  }
}

TEST(Linear, RowSizeMismatchThrows) {
  LinearLearner l{{1.0, 2.0}, 0.0};
  EXPECT_ANY_THROW(l.predict(std::vector<double>{1.0}));
}
