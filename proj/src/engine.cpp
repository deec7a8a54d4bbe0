#include "trboost/engine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace trboost {

std::string_view version() { return "1.0.0"; }

MetricKind parse_metric(std::string_view text) {
  if (text == "auto") return MetricKind::Auto;
  if (text == "loss") return MetricKind::Loss;
  if (text == "auc") return MetricKind::Auc;
  if (text == "f1") return MetricKind::F1;
  if (text == "mae") return MetricKind::Mae;
  fail(ErrorKind::Domain, "unknown metric '" + std::string(text) + "'");
}

std::string_view to_string(MetricKind metric) {
  switch (metric) {
    case MetricKind::Auto: return "auto";
    case MetricKind::Loss: return "loss";
    case MetricKind::Auc: return "auc";
    case MetricKind::F1: return "f1";
    case MetricKind::Mae: return "mae";
  }
  return "loss";
}

MetricKind resolve_metric(MetricKind metric, const LossKind& loss) {
  if (metric != MetricKind::Auto) return metric;
  return loss.tag == LossTag::Logistic ? MetricKind::Auc : MetricKind::Loss;
}

bool higher_is_better(MetricKind metric) {
  return metric == MetricKind::Auc || metric == MetricKind::F1;
}

double compute_metric(MetricKind metric, const LossKind& loss, std::span<const double> scores,
                      std::span<const double> labels) {
  switch (resolve_metric(metric, loss)) {
    case MetricKind::Auc:
    case MetricKind::F1: {
      std::vector<double> proba(scores.size());
      std::transform(scores.begin(), scores.end(), proba.begin(), probability);
      return metric == MetricKind::F1 ? f1(proba, labels) : auc(proba, labels);
    }
    case MetricKind::Mae:
      return regression_loss(LossKind::absolute(), scores, labels);
    case MetricKind::Loss:
    case MetricKind::Auto:
      break;
  }
  return regression_loss(loss, scores, labels);
}

EvalReport evaluate(const Ensemble& ensemble, const Dataset& data) {
  data.validate();
  const auto scores = predict(ensemble, data.features);
  const LossKind& loss = ensemble.config.loss;
  EvalReport report;
  if (loss.tag == LossTag::Logistic) {
    for (double y : data.labels) check_label(loss, y);
    report.values["logloss"] = regression_loss(loss, scores, data.labels);
    report.values["auc"] = compute_metric(MetricKind::Auc, loss, scores, data.labels);
    report.values["f1"] = compute_metric(MetricKind::F1, loss, scores, data.labels);
  } else {
    report.values["loss"] = regression_loss(loss, scores, data.labels);
    report.values["mae"] = regression_loss(LossKind::absolute(), scores, data.labels);
    report.values["mse"] = regression_loss(LossKind::squared(), scores, data.labels);
  }
  const auto stages = staged_predict(ensemble, data.features);
  for (std::size_t t = 0; t < stages.size(); ++t) {
    report.curve.emplace_back(t + 1, regression_loss(loss, stages[t], data.labels));
  }
  return report;
}

std::vector<CurveRow> training_curves(const Ensemble& ensemble, const Dataset* validation,
                                      MetricKind metric) {
  std::vector<std::vector<double>> stages;
  if (validation != nullptr) stages = staged_predict(ensemble, validation->features);
  const bool linear = ensemble.config.learner == LearnerKind::Linear &&
                      ensemble.method.method == Method::TRBoost;
  std::vector<CurveRow> rows;
  rows.reserve(ensemble.log.size());
  for (std::size_t t = 0; t < ensemble.log.size(); ++t) {
    const auto& e = ensemble.log[t];
    CurveRow row;
    row.iteration = t + 1;
    row.train_loss = e.train_loss;
    if (validation != nullptr) {
      row.val_metric = compute_metric(metric, ensemble.config.loss, stages[t], validation->labels);
    }
    row.rho = e.rho;
    row.admitted = e.admitted;
    row.mu_or_alpha = linear ? e.mu : e.alpha;
    row.beta = linear ? 0.0 : e.beta;
    rows.push_back(row);
  }
  return rows;
}

void write_curves_csv(const std::vector<CurveRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << "iteration,train_loss,val_metric,rho,admitted,mu_or_alpha,beta\n";
  for (const auto& r : rows) {
    out << r.iteration << ',' << format_double(r.train_loss) << ','
        << (r.val_metric ? format_double(*r.val_metric) : std::string()) << ','
        << format_double(r.rho) << ',' << (r.admitted ? 1 : 0) << ','
        << format_double(r.mu_or_alpha) << ',' << format_double(r.beta) << '\n';
  }
  if (!out) fail(ErrorKind::Io, "failed writing " + path.string());
}

void apply_setting(BoostConfig& config, BaselineKind& kind, std::string_view flag, double value) {
  auto count = [&](const char* name) {
    if (!(value >= 1.0) || value != std::floor(value)) {
      fail(ErrorKind::Domain, std::string(name) + " must be a positive integer");
    }
    return static_cast<std::size_t>(value);
  };
  if (flag == "alpha") config.alpha0 = value;
  else if (flag == "beta") config.beta0 = value;
  else if (flag == "mu") config.mu0 = value;
  else if (flag == "eta") config.trust.eta = value;
  else if (flag == "gamma") config.trust.gamma = value;
  else if (flag == "eps1") config.trust.eps1 = value;
  else if (flag == "eps2") config.trust.eps2 = value;
  else if (flag == "estimators") config.n_estimators = count("estimators");
  else if (flag == "max-depth") config.tree.max_depth = static_cast<int>(count("max-depth"));
  else if (flag == "min-leaf") config.tree.min_samples_leaf = count("min-leaf");
  else if (flag == "min-gain") config.tree.min_gain = value;
  else if (flag == "nu") kind.nu = value;
  else if (flag == "lambda") kind.lambda = value;
  else if (flag == "base-score") config.base_score = value;
  else fail(ErrorKind::Domain, "flag '" + std::string(flag) + "' cannot be searched");
}

GridResult grid_search(const Dataset& train, const Dataset& validation, const BaselineKind& kind,
                       const BoostConfig& config, std::vector<GridAxis> axes, MetricKind metric) {
  if (axes.empty()) fail(ErrorKind::Domain, "grid is empty");
  for (const auto& axis : axes) {
    if (axis.values.empty()) fail(ErrorKind::Domain, "grid axis '" + axis.flag + "' is empty");
  }
  std::sort(axes.begin(), axes.end(),
            [](const GridAxis& a, const GridAxis& b) { return a.flag < b.flag; });
  for (std::size_t k = 1; k < axes.size(); ++k) {
    if (axes[k].flag == axes[k - 1].flag) {
      fail(ErrorKind::Domain, "grid axis '" + axes[k].flag + "' given twice");
    }
  }

  GridResult result;
  result.metric = resolve_metric(metric, config.loss);
  const bool maximize = higher_is_better(result.metric);

  // Odometer over the axes; the first flag varies slowest.
  std::vector<std::size_t> pos(axes.size(), 0);
  while (true) {
    BoostConfig cfg = config;
    BaselineKind k = kind;
    GridSetting setting;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const double v = axes[a].values[pos[a]];
      apply_setting(cfg, k, axes[a].flag, v);
      setting.values.emplace_back(axes[a].flag, v);
    }
    const Ensemble model = train_with(train, k, cfg);
    setting.score = compute_metric(result.metric, cfg.loss, predict(model, validation.features),
                                   validation.labels);
    result.settings.push_back(std::move(setting));
    const std::size_t idx = result.settings.size() - 1;
    const double s = result.settings[idx].score;
    const double best = result.settings[result.best].score;
    if (idx > 0 && (maximize ? s > best : s < best)) result.best = idx;

    std::size_t a = axes.size();
    while (a > 0) {
      --a;
      if (++pos[a] < axes[a].values.size()) break;
      pos[a] = 0;
      if (a == 0) return result;
    }
  }
}

Dataset concatenate(const Dataset& a, const Dataset& b) {
  if (a.num_features() != b.num_features()) {
    fail(ErrorKind::Domain, "cannot concatenate datasets with different widths");
  }
  std::vector<double> values(a.features.values().begin(), a.features.values().end());
  values.insert(values.end(), b.features.values().begin(), b.features.values().end());
  Dataset out;
  out.features = Matrix(a.size() + b.size(), a.num_features(), std::move(values));
  out.labels = a.labels;
  out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
  out.feature_names = a.feature_names;
  return out;
}

}  // namespace trboost
