#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "trboost/engine.hpp"

using namespace trboost;

namespace {

void expect_same_predictions(const Ensemble& a, const Ensemble& b, const Matrix& x) {
  const auto pa = predict(a, x);
  const auto pb = predict(b, x);
  ASSERT_EQ(pa.size(), pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    EXPECT_EQ(std::bit_cast<std::uint64_t>(pa[i]), std::bit_cast<std::uint64_t>(pb[i]));
  }
}

}  // namespace

TEST(ModelIo, TreeModelRoundTripIsBitExact) {
  const auto d = gen_noisy_regression(150, 4, 0.05, 8.0, 3);
  BoostConfig cfg;
  cfg.loss = LossKind::huber(0.7);
  cfg.n_estimators = 30;
  const auto model = train(d, cfg);
  const std::string text = serialize(model);
  const auto back = deserialize(text);
  expect_same_predictions(model, back, d.features);
  EXPECT_EQ(serialize(back), text);
  EXPECT_EQ(back.log, model.log);
  EXPECT_EQ(back.config.loss, cfg.loss);
}

TEST(ModelIo, LinearAndBaselineModels) {
  const auto d = gen_noisy_regression(80, 3, 0.0, 0.0, 1);
  BoostConfig cfg;
  cfg.learner = LearnerKind::Linear;
  cfg.n_estimators = 10;
  const auto lin = train(d, cfg);
  expect_same_predictions(lin, deserialize(serialize(lin)), d.features);

  cfg.learner = LearnerKind::Tree;
  const auto gb = train_baseline(d, BaselineKind::gbdt(0.3), cfg);
  const auto back = deserialize(serialize(gb));
  EXPECT_EQ(back.method.method, Method::GBDT);
  EXPECT_EQ(back.method.nu, 0.3);
  expect_same_predictions(gb, back, d.features);
}

TEST(ModelIo, FileRoundTripAndVersion) {
  const auto d = gen_two_gaussians(100, 3, 2.0, 5);
  BoostConfig cfg;
  cfg.loss = LossKind::logistic();
  cfg.n_estimators = 10;
  cfg.trust.mu_max = std::numeric_limits<double>::infinity();
  const auto model = train(d, cfg);
  const auto path = std::filesystem::temp_directory_path() / "trboost_test_model.json";
  save_model(model, path);
  const auto back = load_model(path);
  expect_same_predictions(model, back, d.features);
  EXPECT_TRUE(std::isinf(back.config.trust.mu_max));
  const auto doc = to_json(model);
  EXPECT_EQ(doc.at("format_version").get<int>(), kFormatVersion);
  EXPECT_EQ(std::string(version()).substr(0, 2), std::to_string(kFormatVersion) + ".");
}

TEST(ModelIo, RejectsMalformedDocuments) {
  EXPECT_THROW(deserialize("not json"), Error);
  EXPECT_THROW(deserialize("{}"), Error);
  const auto d = gen_noisy_regression(40, 2, 0.0, 0.0, 1);
  BoostConfig cfg;
  cfg.n_estimators = 3;
  auto doc = to_json(train(d, cfg));
  doc["format_version"] = 99;
  EXPECT_THROW(ensemble_from_json(doc), Error);
  EXPECT_THROW(load_model("/nonexistent/model.json"), Error);
}
