#include "trboost/model_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "trboost/engine.hpp"
#include "trboost/error.hpp"

namespace trboost {
namespace {

using nlohmann::json;

json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

const json& field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    fail(ErrorKind::Schema, std::string("model file is missing field '") + key + "'");
  }
  return obj.at(key);
}

double as_double(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  fail(ErrorKind::Schema, "model file holds a non-numeric value where a number is expected");
}

double get_double(const json& obj, const char* key) { return as_double(field(obj, key)); }

template <typename T>
T get_as(const json& obj, const char* key) {
  try {
    return field(obj, key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::Schema, std::string("bad field '") + key + "': " + e.what());
  }
}

const char* method_tag(Method m) {
  switch (m) {
    case Method::TRBoost: return "trboost";
    case Method::GBDT: return "gbdt";
    case Method::NewtonGBM: return "newton";
  }
  return "trboost";
}

Method parse_method(const std::string& s) {
  if (s == "trboost") return Method::TRBoost;
  if (s == "gbdt") return Method::GBDT;
  if (s == "newton") return Method::NewtonGBM;
  fail(ErrorKind::Schema, "unknown method '" + s + "' in model file");
}

json node_to_json(const std::vector<TreeNode>& nodes, std::size_t i) {
  const TreeNode& n = nodes[i];
  if (n.is_leaf()) {
    return {{"value", number(n.value)},
            {"count", n.count},
            {"g_sum", number(n.g_sum)},
            {"b_sum", number(n.b_sum)}};
  }
  return {{"feature", n.feature},
          {"threshold", number(n.threshold)},
          {"left", node_to_json(nodes, static_cast<std::size_t>(n.left))},
          {"right", node_to_json(nodes, static_cast<std::size_t>(n.right))}};
}

// Appends in pre-order, the layout the tree builder produces.
std::int32_t node_from_json(const json& j, std::vector<TreeNode>& nodes, int depth) {
  if (depth > 4096) fail(ErrorKind::Schema, "tree nesting too deep");
  const auto id = static_cast<std::int32_t>(nodes.size());
  nodes.emplace_back();
  if (j.is_object() && j.contains("value")) {
    TreeNode& leaf = nodes[id];
    leaf.value = get_double(j, "value");
    leaf.count = get_as<std::size_t>(j, "count");
    leaf.g_sum = get_double(j, "g_sum");
    leaf.b_sum = get_double(j, "b_sum");
    return id;
  }
  const auto feature = get_as<std::int32_t>(j, "feature");
  if (feature < 0) fail(ErrorKind::Schema, "split feature must be non-negative");
  const double threshold = get_double(j, "threshold");
  const auto left = node_from_json(field(j, "left"), nodes, depth + 1);
  const auto right = node_from_json(field(j, "right"), nodes, depth + 1);
  TreeNode& node = nodes[id];
  node.feature = feature;
  node.threshold = threshold;
  node.left = left;
  node.right = right;
  return id;
}

json config_to_json(const BoostConfig& c) {
  return {{"loss", to_string(c.loss)},
          {"clamp_rho", number(c.clamp.rho)},
          {"n_estimators", c.n_estimators},
          {"eps1", number(c.trust.eps1)},
          {"eps2", number(c.trust.eps2)},
          {"gamma", number(c.trust.gamma)},
          {"eta", number(c.trust.eta)},
          {"mu_max", number(c.trust.mu_max)},
          {"mu0", number(c.mu0)},
          {"alpha0", number(c.alpha0)},
          {"beta0", number(c.beta0)},
          {"ratio", c.ratio == RatioKind::R1 ? "r1" : "r2"},
          {"learner", c.learner == LearnerKind::Tree ? "tree" : "linear"},
          {"max_depth", c.tree.max_depth},
          {"min_samples_leaf", c.tree.min_samples_leaf},
          {"min_gain", number(c.tree.min_gain)},
          {"first_order", c.tree.first_order},
          {"base_score", number(c.base_score)},
          {"seed", c.seed},
          {"patience", c.patience}};
}

BoostConfig config_from_json(const json& j) {
  BoostConfig c;
  try {
    c.loss = parse_loss(get_as<std::string>(j, "loss"));
  } catch (const Error& e) {
    fail(ErrorKind::Schema, e.what());
  }
  c.clamp.rho = get_double(j, "clamp_rho");
  c.n_estimators = get_as<std::size_t>(j, "n_estimators");
  c.trust.eps1 = get_double(j, "eps1");
  c.trust.eps2 = get_double(j, "eps2");
  c.trust.gamma = get_double(j, "gamma");
  c.trust.eta = get_double(j, "eta");
  c.trust.mu_max = get_double(j, "mu_max");
  c.mu0 = get_double(j, "mu0");
  c.alpha0 = get_double(j, "alpha0");
  c.beta0 = get_double(j, "beta0");
  c.ratio = get_as<std::string>(j, "ratio") == "r2" ? RatioKind::R2 : RatioKind::R1;
  c.learner = get_as<std::string>(j, "learner") == "linear" ? LearnerKind::Linear : LearnerKind::Tree;
  c.tree.max_depth = get_as<int>(j, "max_depth");
  c.tree.min_samples_leaf = get_as<std::size_t>(j, "min_samples_leaf");
  c.tree.min_gain = get_double(j, "min_gain");
  c.tree.first_order = get_as<bool>(j, "first_order");
  c.base_score = get_double(j, "base_score");
  c.seed = get_as<std::uint64_t>(j, "seed");
  c.patience = get_as<std::size_t>(j, "patience");
  return c;
}

}  // namespace

json to_json(const Ensemble& ens) {
  json learners = json::array();
  for (const auto& learner : ens.learners) {
    if (const auto* tree = std::get_if<Tree>(&learner)) {
      learners.push_back({{"type", "tree"}, {"root", node_to_json(tree->nodes(), 0)}});
    } else {
      const auto& lin = std::get<LinearLearner>(learner);
      json weights = json::array();
      for (double w : lin.weights) weights.push_back(number(w));
      learners.push_back(
          {{"type", "linear"}, {"weights", weights}, {"intercept", number(lin.intercept)}});
    }
  }
  json log = json::array();
  for (const auto& e : ens.log) {
    log.push_back({{"rho", number(e.rho)},
                   {"admitted", e.admitted},
                   {"mu", number(e.mu)},
                   {"alpha", number(e.alpha)},
                   {"beta", number(e.beta)},
                   {"predicted_reduction", number(e.predicted_reduction)},
                   {"train_loss", number(e.train_loss)}});
  }
  return {{"format_version", kFormatVersion},
          {"library_version", std::string(version())},
          {"loss", to_string(ens.config.loss)},
          {"method",
           {{"kind", method_tag(ens.method.method)},
            {"nu", number(ens.method.nu)},
            {"lambda", number(ens.method.lambda)}}},
          {"config", config_to_json(ens.config)},
          {"num_features", ens.num_features},
          {"base_score", number(ens.base_score)},
          {"initial_loss", number(ens.initial_loss)},
          {"learners", learners},
          {"log", log}};
}

Ensemble ensemble_from_json(const json& doc) {
  const int format = get_as<int>(doc, "format_version");
  if (format != kFormatVersion) {
    fail(ErrorKind::Schema, "unsupported model format version " + std::to_string(format));
  }
  Ensemble ens;
  ens.config = config_from_json(field(doc, "config"));
  const json& method = field(doc, "method");
  ens.method.method = parse_method(get_as<std::string>(method, "kind"));
  ens.method.nu = get_double(method, "nu");
  ens.method.lambda = get_double(method, "lambda");
  ens.num_features = get_as<std::size_t>(doc, "num_features");
  ens.base_score = get_double(doc, "base_score");
  ens.initial_loss = get_double(doc, "initial_loss");

  for (const auto& item : field(doc, "learners")) {
    const auto type = get_as<std::string>(item, "type");
    if (type == "tree") {
      std::vector<TreeNode> nodes;
      node_from_json(field(item, "root"), nodes, 0);
      ens.learners.emplace_back(Tree(std::move(nodes), ens.num_features));
    } else if (type == "linear") {
      LinearLearner lin;
      for (const auto& w : field(item, "weights")) lin.weights.push_back(as_double(w));
      lin.intercept = get_double(item, "intercept");
      if (lin.weights.size() != ens.num_features) {
        fail(ErrorKind::Schema, "linear learner dimension does not match the model");
      }
      ens.learners.emplace_back(std::move(lin));
    } else {
      fail(ErrorKind::Schema, "unknown learner type '" + type + "'");
    }
  }
  std::size_t admitted = 0;
  for (const auto& item : field(doc, "log")) {
    IterationLog e;
    e.rho = get_double(item, "rho");
    e.admitted = get_as<bool>(item, "admitted");
    e.mu = get_double(item, "mu");
    e.alpha = get_double(item, "alpha");
    e.beta = get_double(item, "beta");
    e.predicted_reduction = get_double(item, "predicted_reduction");
    e.train_loss = get_double(item, "train_loss");
    admitted += e.admitted ? 1 : 0;
    ens.log.push_back(e);
  }
  if (admitted != ens.learners.size()) {
    fail(ErrorKind::Schema, "training log and learner list disagree");
  }
  return ens;
}

std::string serialize(const Ensemble& ensemble) { return to_json(ensemble).dump(1) + "\n"; }

Ensemble deserialize(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::Schema, std::string("model file is not valid JSON: ") + e.what());
  }
  return ensemble_from_json(doc);
}

void save_model(const Ensemble& ensemble, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << serialize(ensemble);
  if (!out) fail(ErrorKind::Io, "failed writing " + path.string());
}

Ensemble load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

}  // namespace trboost
