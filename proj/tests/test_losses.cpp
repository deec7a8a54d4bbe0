#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "trboost/error.hpp"
#include "trboost/losses.hpp"

using namespace trboost;

namespace {

double central_difference(const LossKind& kind, double y, double f) {
  const double h = 1e-6 * std::max(1.0, std::abs(f));
  return (loss_value(kind, y, f + h) - loss_value(kind, y, f - h)) / (2.0 * h);
}

}  // namespace

TEST(Losses, ValueExamples) {
  EXPECT_NEAR(loss_value(LossKind::logistic(), 1.0, 0.0), std::log(2.0), 1e-15);
  EXPECT_EQ(loss_value(LossKind::squared(), 3.0, 3.0), 0.0);
  // delta * (|r| - delta / 2) = 1 * (2 - 0.5)
  EXPECT_DOUBLE_EQ(loss_value(LossKind::huber(1.0), 0.0, 2.0), 1.5);
  EXPECT_DOUBLE_EQ(loss_value(LossKind::huber(1.0), 0.0, 0.5), 0.125);
  EXPECT_DOUBLE_EQ(loss_value(LossKind::absolute(), 4.0, 1.0), 3.0);
}

TEST(Losses, NonFiniteInputIsDomainError) {
  try {
    loss_value(LossKind::squared(), 0.0, std::nan(""));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Domain);
  }
  EXPECT_THROW(grad_quad(LossKind::logistic(), 1.0, INFINITY), Error);
}

TEST(Losses, ProbabilityExamples) {
  EXPECT_EQ(probability(0.0), 0.5);
  EXPECT_NEAR(probability(0.5), 0.7310585786300049, 1e-15);
  EXPECT_EQ(probability(1000.0), 1.0);
  EXPECT_EQ(probability(-1000.0), 0.0);
  double prev = 0.0;
  for (double f = -30.0; f <= 30.0; f += 0.25) {
    const double p = probability(f);
    EXPECT_GE(p, prev);
    prev = p;
  }
}

TEST(Losses, LogisticLossStableForLargeScores) {
  // y log(1/p) with p = psi(F) ~ e^{2F} for very negative F.
  EXPECT_NEAR(loss_value(LossKind::logistic(), 1.0, -400.0), 800.0, 1e-9);
  EXPECT_NEAR(loss_value(LossKind::logistic(), 0.0, 400.0), 800.0, 1e-9);
  EXPECT_EQ(loss_value(LossKind::logistic(), 1.0, 400.0), 0.0);
}

TEST(Losses, GradQuadExamples) {
  const auto a = grad_quad(LossKind::logistic(), 1.0, 0.0);
  EXPECT_DOUBLE_EQ(a.g, -1.0);
  EXPECT_DOUBLE_EQ(a.b, 1.0);

  const auto b = grad_quad(LossKind::absolute(), 0.0, 5.0);
  EXPECT_EQ(b.g, 1.0);
  EXPECT_EQ(b.b, 0.0);
  EXPECT_EQ(grad_quad(LossKind::absolute(), 2.0, 2.0).g, 0.0);

  // p is clamped up to rho before g = 2(p - y), b = 4p(1 - p).
  const auto c = grad_quad(LossKind::logistic(), 1.0, -20.0, ClampConfig::make(1e-4));
  EXPECT_DOUBLE_EQ(c.g, -1.9998);
  EXPECT_DOUBLE_EQ(c.b, 0.00039996000000000004);

  const auto sq = grad_quad(LossKind::squared(), 1.0, 4.0);
  EXPECT_EQ(sq.g, 6.0);
  EXPECT_EQ(sq.b, 2.0);

  const auto hin = grad_quad(LossKind::huber(2.0), 0.0, 1.5);
  EXPECT_EQ(hin.g, 1.5);
  EXPECT_EQ(hin.b, 1.0);
  const auto hout = grad_quad(LossKind::huber(2.0), 0.0, -7.0);
  EXPECT_EQ(hout.g, -2.0);
  EXPECT_EQ(hout.b, 0.0);
}

TEST(Losses, ClampedLogisticHasPositiveCurvatureAndBoundedStep) {
  const ClampConfig clamp = ClampConfig::make(1e-4);
  for (double y : {0.0, 1.0}) {
    for (double f = -1000.0; f <= 1000.0; f += 0.37) {
      const auto gq = grad_quad(LossKind::logistic(), y, f, clamp);
      ASSERT_GT(gq.b, 0.0) << "y=" << y << " F=" << f;
      ASSERT_LE(std::abs(gq.g / gq.b), 1.0 / (2.0 * clamp.rho) * (1.0 + 1e-12));
    }
  }
}

TEST(Losses, ComparisonInequalityOnDenseGrid) {
  const ClampConfig clamp = ClampConfig::make(1e-4);
  for (double y : {0.0, 1.0}) {
    for (int k = 0; k <= 20000; ++k) {
      const double f = -20.0 + 40.0 * k / 20000.0;
      const auto gq = grad_quad(LossKind::logistic(), y, f, clamp);
      const double l = loss_value(LossKind::logistic(), y, f);
      ASSERT_GE(gq.g * (gq.g / gq.b), l - 1e-12) << "y=" << y << " F=" << f;
    }
  }
}

TEST(Losses, GradientMatchesFiniteDifference) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> score(-3.0, 3.0);
  const LossKind huber = LossKind::huber(1.5);
  for (int trial = 0; trial < 500; ++trial) {
    const double f = score(rng);
    const double y = score(rng);
    const double g_sq = grad_quad(LossKind::squared(), y, f).g;
    EXPECT_NEAR(central_difference(LossKind::squared(), y, f), g_sq, 1e-6 * std::max(1.0, std::abs(g_sq)));

    const double label = trial % 2;
    const double g_log = grad_quad(LossKind::logistic(), label, f, ClampConfig::make(1e-4)).g;
    EXPECT_NEAR(central_difference(LossKind::logistic(), label, f), g_log, 1e-6 * std::max(1.0, std::abs(g_log)));

    if (std::abs(f - y) < huber.delta - 1e-3) {
      const double g_h = grad_quad(huber, y, f).g;
      EXPECT_NEAR(central_difference(huber, y, f), g_h, 1e-6 * std::max(1.0, std::abs(g_h)));
    }
  }
}

TEST(Losses, FlatCurvatureReportsExactZero) {
  EXPECT_EQ(grad_quad(LossKind::absolute(), 0.0, -3.0).b, 0.0);
  EXPECT_EQ(grad_quad(LossKind::huber(1.0), 0.0, 3.0).b, 0.0);
  EXPECT_EQ(grad_quad(LossKind::huber(1.0), 0.0, -3.0).b, 0.0);
}

TEST(Losses, ParseAndLabels) {
  EXPECT_EQ(parse_loss("logloss"), LossKind::logistic());
  EXPECT_EQ(parse_loss("l2"), LossKind::squared());
  EXPECT_EQ(parse_loss("l1"), LossKind::absolute());
  EXPECT_EQ(parse_loss("huber:2.5"), LossKind::huber(2.5));
  EXPECT_EQ(to_string(parse_loss("huber:0.75")), "huber:0.75");
  EXPECT_THROW(parse_loss("huber:-1"), Error);
  EXPECT_THROW(parse_loss("huber:x"), Error);
  EXPECT_THROW(parse_loss("hinge"), Error);
  EXPECT_THROW(LossKind::huber(0.0), Error);
  EXPECT_THROW(ClampConfig::make(0.5), Error);
  EXPECT_THROW(ClampConfig::make(0.0), Error);
  EXPECT_THROW(check_label(LossKind::logistic(), 0.5), Error);
  EXPECT_NO_THROW(check_label(LossKind::squared(), 0.5));
}

TEST(Losses, DecreaseMatchesExtendedPrecisionDifference) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  auto reference = [](const LossKind& kind, double y, double f, double z) {
    const long double r = static_cast<long double>(f) - y;
    const long double s = r + z;
    auto l = [&](long double e) -> long double {
      switch (kind.tag) {
        case LossTag::Squared: return e * e;
        case LossTag::Absolute: return e < 0 ? -e : e;
        default: {
          const long double a = e < 0 ? -e : e;
          return a <= kind.delta ? 0.5L * e * e : kind.delta * (a - 0.5L * kind.delta);
        }
      }
    };
    return static_cast<double>(l(r) - l(s));
  };
  for (const LossKind& kind : {LossKind::squared(), LossKind::absolute(), LossKind::huber(1.3)}) {
    for (int trial = 0; trial < 2000; ++trial) {
      const double y = u(rng), f = u(rng), z = u(rng) * (trial % 2 ? 1e-6 : 1.0);
      const double want = reference(kind, y, f, z);
      ASSERT_NEAR(loss_decrease(kind, y, f, z), want, 1e-12 * std::max(1.0, std::abs(want)));
    }
  }
  for (int trial = 0; trial < 200; ++trial) {
    const double y = trial % 2, f = u(rng), z = u(rng);
    const double naive = loss_value(LossKind::logistic(), y, f) - loss_value(LossKind::logistic(), y, f + z);
    EXPECT_EQ(loss_decrease(LossKind::logistic(), y, f, z), naive);
  }
}

TEST(Losses, DecreaseAvoidsCancellation) {
  // (1e6)^2 - (1e6 + 1e-7)^2 = -0.2 - 1e-14, below the spacing of doubles near 1e12.
  const double z = 1e-7;
  const double exact = -z * (2e6 + z);
  EXPECT_NEAR(loss_decrease(LossKind::squared(), 0.0, 1e6, z), exact, 1e-15);
  const double naive = loss_value(LossKind::squared(), 0.0, 1e6) -
                       loss_value(LossKind::squared(), 0.0, 1e6 + z);
  EXPECT_GT(std::abs(naive - exact), 1e-6);
}
