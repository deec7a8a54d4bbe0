#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "trboost/engine.hpp"

namespace trboost::cli {
namespace {

// Flags that grid search may vary.
const std::vector<std::string> kSearchable = {"alpha", "beta", "mu",        "eta",      "gamma",
                                              "eps1",  "eps2", "estimators", "max-depth", "min-leaf",
                                              "min-gain", "nu", "lambda",    "base-score"};

struct TrainFlags {
  std::string data;
  std::string label = "y";
  bool no_header = false;
  std::string test_data;
  std::string loss = "l2";
  std::string learner = "tree";
  std::string baseline = "none";
  std::string ratio = "r1";
  double mu_max = 1e6;
  bool first_order = false;
  double rho = 1e-4;
  std::uint64_t seed = 0;
  std::size_t patience = 0;
  std::string metric = "auto";
  std::string out = "model.json";
  std::string curves_out;
  // Searchable values; train uses the single value of each.
  std::map<std::string, std::vector<double>> values = {
      {"alpha", {0.1}},     {"beta", {10.0}},   {"mu", {1.0}},      {"eta", {0.0}},
      {"gamma", {1.01}},    {"eps1", {0.9}},    {"eps2", {1.1}},    {"estimators", {100}},
      {"max-depth", {6}},   {"min-leaf", {1}},  {"min-gain", {0.0}}, {"nu", {0.1}},
      {"lambda", {1.0}},    {"base-score", {0.0}}};
  std::map<std::string, CLI::Option*> options;
};

void add_training_flags(CLI::App* cmd, TrainFlags& f, bool grid) {
  cmd->add_option("--data", f.data, "Training CSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--label", f.label, "Label column name or zero-based index")->capture_default_str();
  cmd->add_flag("--no-header", f.no_header, "CSV files have no header row");
  cmd->add_option("--loss", f.loss, "logloss | l2 | l1 | huber:<delta>")->capture_default_str();
  cmd->add_option("--learner", f.learner, "Base learner")
      ->check(CLI::IsMember({"tree", "linear"}))
      ->capture_default_str();
  cmd->add_option("--baseline", f.baseline, "none (trust-region boosting) | gbdt | newton")
      ->check(CLI::IsMember({"none", "trboost", "gbdt", "newton"}))
      ->capture_default_str();
  cmd->add_option("--ratio", f.ratio, "Approximation ratio")
      ->check(CLI::IsMember({"r1", "r2"}))
      ->capture_default_str();
  cmd->add_option("--mu-max", f.mu_max, "Cap on mu, alpha and beta")->capture_default_str();
  cmd->add_flag("--first-order", f.first_order, "Use B = 0 when fitting trees");
  cmd->add_option("--rho", f.rho, "Logistic probability clamp")->capture_default_str();
  cmd->add_option("--seed", f.seed, "Random seed")->capture_default_str();
  cmd->add_option("--patience", f.patience, "Stop after this many consecutive rejections (0 = off)")
      ->capture_default_str();
  cmd->add_option("--out", f.out, "Model output path")->capture_default_str();
  cmd->add_option("--curves-out", f.curves_out, "Per-iteration curves CSV");
  cmd->add_option("--metric", f.metric, "Validation metric")
      ->check(CLI::IsMember({"auto", "loss", "auc", "f1", "mae"}))
      ->capture_default_str();
  for (const auto& name : kSearchable) {
    auto* opt = cmd->add_option("--" + name, f.values[name]);
    if (grid) {
      opt->delimiter(',')->description("Comma-separated values to search");
    } else {
      opt->expected(1);
    }
    opt->default_str(format_double(f.values[name].front()));
    f.options[name] = opt;
  }
}

ColumnRef label_ref(const std::string& label, bool has_header) {
  const bool numeric = !label.empty() && std::all_of(label.begin(), label.end(), ::isdigit);
  if (!has_header && numeric) return static_cast<std::size_t>(std::stoull(label));
  return label;
}

Dataset load(const std::string& path, const std::string& label, bool has_header) {
  try {
    return load_csv(path, label_ref(label, has_header), has_header);
  } catch (const Error& e) {
    const bool numeric = !label.empty() && std::all_of(label.begin(), label.end(), ::isdigit);
    if (has_header && numeric && e.kind() == ErrorKind::Schema &&
        std::string_view(e.what()).starts_with("no column named")) {
      return load_csv(path, static_cast<std::size_t>(std::stoull(label)), has_header);
    }
    throw;
  }
}

BaselineKind baseline_of(const TrainFlags& f) {
  BaselineKind kind;
  if (f.baseline == "gbdt") kind.method = Method::GBDT;
  if (f.baseline == "newton") kind.method = Method::NewtonGBM;
  return kind;
}

// Config with the first value of every searchable flag applied.
void build_config(const TrainFlags& f, BoostConfig& config, BaselineKind& kind) {
  config.loss = parse_loss(f.loss);
  config.clamp = ClampConfig::make(f.rho);
  config.learner = f.learner == "linear" ? LearnerKind::Linear : LearnerKind::Tree;
  config.ratio = f.ratio == "r2" ? RatioKind::R2 : RatioKind::R1;
  config.trust.mu_max = f.mu_max;
  config.tree.first_order = f.first_order;
  config.seed = f.seed;
  config.patience = f.patience;
  kind = baseline_of(f);
  for (const auto& [name, vals] : f.values) {
    if (vals.empty()) throw CLI::ValidationError("--" + name, "needs a value");
    apply_setting(config, kind, name, vals.front());
  }
}

void write_text(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty() || path == "-") {
    fallback << text;
    return;
  }
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorKind::Io, "failed writing " + path);
}

int cmd_train(const TrainFlags& f, std::ostream& out) {
  BoostConfig config;
  BaselineKind kind;
  build_config(f, config, kind);
  const Dataset train = load(f.data, f.label, !f.no_header);
  std::optional<Dataset> val;
  if (!f.test_data.empty()) val = load(f.test_data, f.label, !f.no_header);

  const Ensemble model = train_with(train, kind, config);
  save_model(model, f.out);
  if (!f.curves_out.empty()) {
    const auto metric = resolve_metric(parse_metric(f.metric), config.loss);
    write_curves_csv(training_curves(model, val ? &*val : nullptr, metric), f.curves_out);
  }
  std::size_t admitted = model.num_admitted();
  out << "trained " << model.log.size() << " iterations, admitted " << admitted
      << ", final train loss " << format_double(model.log.empty() ? model.initial_loss
                                                                   : model.log.back().train_loss)
      << '\n';
  return kOk;
}

struct PredictFlags {
  std::string model;
  std::string data;
  std::string label;
  bool no_header = false;
  bool proba = false;
  std::string out;
};

// The label column, when named, is dropped; otherwise every column is a feature.
Matrix load_features(const std::string& path, const std::string& label, bool has_header) {
  if (!label.empty()) return load(path, label, has_header).features;
  return load_feature_matrix(path, has_header);
}

int cmd_predict(const PredictFlags& f, std::ostream& out) {
  const Ensemble model = load_model(f.model);
  const Matrix x = load_features(f.data, f.label, !f.no_header);
  const auto values = f.proba ? predict_proba(model, x) : predict(model, x);
  std::string text = "prediction\n";
  for (double v : values) text += format_double(v) + '\n';
  write_text(f.out, text, out);
  return kOk;
}

struct EvalFlags {
  std::string model;
  std::string data;
  std::string label = "y";
  bool no_header = false;
};

int cmd_evaluate(const EvalFlags& f, std::ostream& out) {
  const Ensemble model = load_model(f.model);
  const Dataset data = load(f.data, f.label, !f.no_header);
  const EvalReport report = evaluate(model, data);
  const std::string iteration = std::to_string(model.log.size());
  out << "iteration,metric,value\n";
  for (const auto& [name, value] : report.values) {
    out << iteration << ',' << name << ',' << format_double(value) << '\n';
  }
  return kOk;
}

struct GridFlags {
  TrainFlags train;
  std::string val_data;
  double val_fraction = 0.2;
  std::string report_out;
};

int cmd_grid(const GridFlags& g, std::ostream& out) {
  const TrainFlags& f = g.train;
  BoostConfig config;
  BaselineKind kind;
  build_config(f, config, kind);

  std::vector<GridAxis> axes;
  for (const auto& name : kSearchable) {
    if (f.options.at(name)->count() > 0) axes.push_back({name, f.values.at(name)});
  }
  if (axes.empty()) fail(ErrorKind::Domain, "grid is empty: give at least one searchable flag");

  const Dataset all = load(f.data, f.label, !f.no_header);
  Dataset train, val;
  if (!g.val_data.empty()) {
    train = all;
    val = load(g.val_data, f.label, !f.no_header);
  } else {
    // Only a validation block is carved out; the test block stays empty.
    auto idx = split_indices(all.size(), g.val_fraction, 0.0, f.seed);
    val = all.subset(idx.test);
    train = all.subset(idx.train);
  }

  const auto metric = parse_metric(f.metric);
  const GridResult result = grid_search(train, val, kind, config, axes, metric);

  std::ostringstream report;
  for (const auto& [name, v] : result.settings.front().values) report << name << ',';
  report << to_string(result.metric) << ",best\n";
  for (std::size_t i = 0; i < result.settings.size(); ++i) {
    for (const auto& [name, v] : result.settings[i].values) report << format_double(v) << ',';
    report << format_double(result.settings[i].score) << ',' << (i == result.best ? 1 : 0) << '\n';
  }
  if (!g.report_out.empty()) write_text(g.report_out, report.str(), out);

  const GridSetting& best = result.settings[result.best];
  out << "best";
  for (const auto& [name, v] : best.values) {
    out << " --" << name << ' ' << format_double(v);
    apply_setting(config, kind, name, v);
  }
  out << " " << to_string(result.metric) << '=' << format_double(best.score) << '\n';

  std::size_t ties = 0;
  for (const auto& s : result.settings) ties += s.score == best.score ? 1 : 0;
  if (ties > 1) out << "tie among " << ties << " settings; kept the first in flag order\n";

  const Dataset merged = concatenate(train, val);
  const Ensemble model = train_with(merged, kind, config);
  save_model(model, f.out);
  if (!f.curves_out.empty()) {
    write_curves_csv(training_curves(model, nullptr, result.metric), f.curves_out);
  }
  return kOk;
}

struct GenerateFlags {
  std::string kind = "gaussians";
  std::size_t n = 1000;
  std::size_t dims = 5;
  double separation = 3.0;
  double outlier_fraction = 0.0;
  double outlier_scale = 10.0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_generate(const GenerateFlags& f, std::ostream& out) {
  const Dataset data = f.kind == "gaussians"
                           ? gen_two_gaussians(f.n, f.dims, f.separation, f.seed)
                           : gen_noisy_regression(f.n, f.dims, f.outlier_fraction,
                                                  f.outlier_scale, f.seed);
  if (f.out.empty() || f.out == "-") {
    write_csv(data, out);
  } else {
    save_csv(data, f.out);
  }
  return kOk;
}

struct ConvergeFlags {
  std::string loss = "l1";
  double y = 1.0;
  double f0 = 0.0;
  std::string method = "trboost";
  double mu = 10.0;
  double nu = 0.1;
  std::size_t iters = 9;
  double rho = 1e-4;
  std::string check = "both";
  std::string out;
  bool appendix = false;
  double grid_min = -30.0;
  double grid_max = 30.0;
  std::size_t grid_points = 10000;
};

const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

int cmd_converge(const ConvergeFlags& f, std::ostream& out) {
  const LossKind loss = parse_loss(f.loss);
  const ClampConfig clamp = ClampConfig::make(f.rho);
  StepRule rule = StepRule::trboost(f.mu);
  if (f.method == "gbdt") rule = StepRule::gbdt(f.nu);
  if (f.method == "newton") rule = StepRule::newton(f.nu);

  const LossTrace trace = run_one_instance(loss, f.y, f.f0, rule, f.iters, clamp);
  std::string csv = "iteration,loss\n";
  for (std::size_t t = 0; t < trace.losses.size(); ++t) {
    csv += std::to_string(t) + ',' + format_double(trace.losses[t]) + '\n';
  }
  write_text(f.out, csv, out);

  int status = kOk;
  auto report = [&](const char* name, const RateCheck& r) {
    out << name << ',' << verdict(r.passed) << ",c=" << format_double(r.c);
    if (r.failing_index) out << ",index=" << *r.failing_index;
    if (!r.reason.empty()) out << ",reason=" << r.reason;
    out << '\n';
  };
  if (f.check == "sublinear" || f.check == "both") report("check_sublinear", check_sublinear(trace.losses));
  if (f.check == "linear" || f.check == "both") report("check_linear", check_linear(trace.losses));
  if (f.appendix) {
    if (f.grid_points < 2 || !(f.grid_max > f.grid_min)) {
      throw CLI::ValidationError("--grid-points", "grid needs two or more points on a non-empty range");
    }
    std::vector<double> grid(f.grid_points);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      grid[i] = f.grid_min + (f.grid_max - f.grid_min) * static_cast<double>(i) /
                                 static_cast<double>(grid.size() - 1);
    }
    const std::vector<double> labels = {0.0, 1.0};
    const auto r = check_appendix_inequalities(clamp, grid, labels);
    out << "check_appendix," << verdict(r.passed)
        << ",comparison_violation=" << format_double(r.max_comparison_violation)
        << ",step_violation=" << format_double(r.max_step_violation) << ",points=" << r.points
        << '\n';
  }
  return status;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::HessianNotPositive:
    case ErrorKind::InfeasibleRadius:
      return kNumeric;
    default:
      return kData;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Trust-region gradient boosting", "trboost"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version()));

  TrainFlags train_flags;
  auto* train_cmd = app.add_subcommand("train", "Train a model");
  add_training_flags(train_cmd, train_flags, false);
  train_cmd->add_option("--test-data", train_flags.test_data, "Validation CSV for curves")
      ->check(CLI::ExistingFile);

  PredictFlags predict_flags;
  auto* predict_cmd = app.add_subcommand("predict", "Score a CSV with a saved model");
  predict_cmd->add_option("--model", predict_flags.model)->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--data", predict_flags.data)->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--label", predict_flags.label, "Column to drop before scoring");
  predict_cmd->add_flag("--no-header", predict_flags.no_header);
  predict_cmd->add_flag("--proba", predict_flags.proba, "Emit probabilities (logistic models)");
  predict_cmd->add_option("--out", predict_flags.out, "Output CSV (stdout when omitted)");

  EvalFlags eval_flags;
  auto* eval_cmd = app.add_subcommand("evaluate", "Report metrics of a saved model");
  eval_cmd->add_option("--model", eval_flags.model)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--data", eval_flags.data)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--label", eval_flags.label)->capture_default_str();
  eval_cmd->add_flag("--no-header", eval_flags.no_header);

  GridFlags grid_flags;
  auto* grid_cmd = app.add_subcommand("grid", "Grid search on a validation split, then retrain");
  add_training_flags(grid_cmd, grid_flags.train, true);
  grid_cmd->add_option("--val-data", grid_flags.val_data, "Explicit validation CSV")
      ->check(CLI::ExistingFile);
  grid_cmd->add_option("--val-fraction", grid_flags.val_fraction)->capture_default_str();
  grid_cmd->add_option("--report-out", grid_flags.report_out, "CSV with every setting and score");

  GenerateFlags gen_flags;
  auto* gen_cmd = app.add_subcommand("generate", "Write a synthetic dataset");
  gen_cmd->add_option("--kind", gen_flags.kind)
      ->check(CLI::IsMember({"gaussians", "regression"}))
      ->capture_default_str();
  gen_cmd->add_option("--n", gen_flags.n)->capture_default_str();
  gen_cmd->add_option("--dims", gen_flags.dims)->capture_default_str();
  gen_cmd->add_option("--separation", gen_flags.separation)->capture_default_str();
  gen_cmd->add_option("--outlier-fraction", gen_flags.outlier_fraction)->capture_default_str();
  gen_cmd->add_option("--outlier-scale", gen_flags.outlier_scale)->capture_default_str();
  gen_cmd->add_option("--seed", gen_flags.seed)->capture_default_str();
  gen_cmd->add_option("--out", gen_flags.out, "Output CSV (stdout when omitted)");

  ConvergeFlags conv_flags;
  auto* conv_cmd = app.add_subcommand("converge", "One-instance convergence traces and rate checks");
  conv_cmd->add_option("--loss", conv_flags.loss)->capture_default_str();
  conv_cmd->add_option("--y", conv_flags.y)->capture_default_str();
  conv_cmd->add_option("--f0", conv_flags.f0)->capture_default_str();
  conv_cmd->add_option("--method", conv_flags.method)
      ->check(CLI::IsMember({"trboost", "gbdt", "newton"}))
      ->capture_default_str();
  conv_cmd->add_option("--mu", conv_flags.mu, "Frozen trust-region shift")->capture_default_str();
  conv_cmd->add_option("--nu", conv_flags.nu, "Learning rate for gbdt/newton")->capture_default_str();
  conv_cmd->add_option("--iters", conv_flags.iters)->capture_default_str();
  conv_cmd->add_option("--rho", conv_flags.rho, "Logistic probability clamp")->capture_default_str();
  conv_cmd->add_option("--check", conv_flags.check)
      ->check(CLI::IsMember({"sublinear", "linear", "both", "none"}))
      ->capture_default_str();
  conv_cmd->add_option("--out", conv_flags.out, "Trace CSV (stdout when omitted)");
  conv_cmd->add_flag("--appendix", conv_flags.appendix, "Also check the logistic inequalities");
  conv_cmd->add_option("--grid-min", conv_flags.grid_min)->capture_default_str();
  conv_cmd->add_option("--grid-max", conv_flags.grid_max)->capture_default_str();
  conv_cmd->add_option("--grid-points", conv_flags.grid_points)->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
    if (train_cmd->parsed()) return cmd_train(train_flags, out);
    if (predict_cmd->parsed()) return cmd_predict(predict_flags, out);
    if (eval_cmd->parsed()) return cmd_evaluate(eval_flags, out);
    if (grid_cmd->parsed()) return cmd_grid(grid_flags, out);
    if (gen_cmd->parsed()) return cmd_generate(gen_flags, out);
    if (conv_cmd->parsed()) return cmd_converge(conv_flags, out);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}

}  // namespace trboost::cli
