#include "trboost/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "trboost/error.hpp"

namespace trboost {
namespace {

double shifted_denominator(double b_sum, double alpha, std::size_t n, double beta) {
  const double denom = b_sum + alpha * static_cast<double>(n) + beta;
  if (!(denom > 0.0)) {
    fail(ErrorKind::InfeasibleRadius,
         "B + alpha * n + beta is not positive; alpha/beta must be raised");
  }
  return denom;
}

// Optimal value of the quadratic model at the shifted leaf value.
double node_objective(double g_sum, double b_sum, std::size_t n, double alpha, double beta) {
  const double denom = shifted_denominator(b_sum, alpha, n, beta);
  return g_sum * g_sum * (0.5 * b_sum / denom - 1.0) / denom;
}

struct Candidate {
  double gain = 0.0;
  std::int32_t feature = -1;
  double threshold = 0.0;
};

class Builder {
 public:
  Builder(const Matrix& x, std::span<const double> g, std::vector<double> b, double alpha,
          double beta, const TreeConfig& config, double scale)
      : x_(x), g_(g), b_(std::move(b)), alpha_(alpha), beta_(beta), config_(config),
        scale_(scale) {}

  std::vector<TreeNode> build() {
    std::vector<std::size_t> all(x_.rows());
    std::iota(all.begin(), all.end(), std::size_t{0});
    grow(all, 0);
    return std::move(nodes_);
  }

 private:
  std::int32_t grow(std::vector<std::size_t>& rows, int depth) {
    double g_sum = 0.0;
    double b_sum = 0.0;
    for (std::size_t i : rows) {
      g_sum += g_[i];
      b_sum += b_[i];
    }
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.emplace_back();

    Candidate best;
    if (depth < config_.max_depth && rows.size() >= 2 * config_.min_samples_leaf) {
      best = find_split(rows, g_sum, b_sum);
    }
    if (best.feature < 0) {
      TreeNode& leaf = nodes_[id];
      leaf.value = scale_ * leaf_value(g_sum, b_sum, alpha_, rows.size(), beta_);
      leaf.count = rows.size();
      leaf.g_sum = g_sum;
      leaf.b_sum = b_sum;
      return id;
    }

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t i : rows) {
      (x_(i, best.feature) <= best.threshold ? left : right).push_back(i);
    }
    rows.clear();
    rows.shrink_to_fit();
    const auto l = grow(left, depth + 1);
    const auto r = grow(right, depth + 1);
    TreeNode& node = nodes_[id];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  // Scans features in index order and thresholds in ascending order; only a
  // strictly larger gain replaces the incumbent.
  Candidate find_split(const std::vector<std::size_t>& rows, double g_sum, double b_sum) {
    Candidate best;
    best.gain = config_.min_gain;
    const std::size_t n = rows.size();
    const std::size_t min_leaf = config_.min_samples_leaf;
    std::vector<std::size_t> order(rows);
    for (std::size_t f = 0; f < x_.cols(); ++f) {
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) {
        const double xa = x_(a, f);
        const double xc = x_(c, f);
        return xa < xc || (xa == xc && a < c);
      });
      double g_left = 0.0;
      double b_left = 0.0;
      for (std::size_t k = 0; k + 1 < n; ++k) {
        g_left += g_[order[k]];
        b_left += b_[order[k]];
        const std::size_t n_left = k + 1;
        const double lo = x_(order[k], f);
        const double hi = x_(order[k + 1], f);
        if (lo == hi || n_left < min_leaf || n - n_left < min_leaf) continue;
        const double gain = split_gain(g_left, b_left, n_left, g_sum - g_left,
                                       b_sum - b_left, n - n_left, alpha_, beta_);
        if (gain > best.gain) {
          double threshold = lo + 0.5 * (hi - lo);
          if (!(threshold < hi)) threshold = lo;
          best = {gain, static_cast<std::int32_t>(f), threshold};
        }
      }
    }
    return best;
  }

  const Matrix& x_;
  std::span<const double> g_;
  std::vector<double> b_;
  double alpha_;
  double beta_;
  const TreeConfig& config_;
  double scale_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

void TreeConfig::validate() const {
  if (max_depth < 1) fail(ErrorKind::Domain, "max_depth must be at least 1");
  if (min_samples_leaf < 1) fail(ErrorKind::Domain, "min_samples_leaf must be at least 1");
  if (!std::isfinite(min_gain)) fail(ErrorKind::Domain, "min_gain must be finite");
}

Tree::Tree(std::vector<TreeNode> nodes, std::size_t num_features)
    : nodes_(std::move(nodes)), num_features_(num_features) {
  if (nodes_.empty()) fail(ErrorKind::Schema, "tree has no nodes");
  const auto size = static_cast<std::int32_t>(nodes_.size());
  for (std::int32_t i = 0; i < size; ++i) {
    const TreeNode& node = nodes_[i];
    if (node.is_leaf()) continue;
    if (static_cast<std::size_t>(node.feature) >= num_features_ || node.left <= i ||
        node.right <= i || node.left >= size || node.right >= size) {
      fail(ErrorKind::Schema, "malformed tree node " + std::to_string(i));
    }
  }
}

std::size_t Tree::num_leaves() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

int Tree::depth() const {
  std::vector<int> level(nodes_.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (!nodes_[i].is_leaf()) {
      level[nodes_[i].left] = level[i] + 1;
      level[nodes_[i].right] = level[i] + 1;
    }
  }
  return deepest;
}

double Tree::predict(std::span<const double> row) const {
  if (row.size() != num_features_) {
    fail(ErrorKind::Domain, "row has " + std::to_string(row.size()) + " features, tree expects " +
                                std::to_string(num_features_));
  }
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const TreeNode& node = nodes_[i];
    i = static_cast<std::size_t>(row[node.feature] <= node.threshold ? node.left : node.right);
  }
  return nodes_[i].value;
}

double leaf_value(double g_sum, double b_sum, double alpha, std::size_t n, double beta) {
  return -g_sum / shifted_denominator(b_sum, alpha, n, beta);
}

double leaf_objective(double g_sum, double b_sum, double value) {
  return 0.5 * b_sum * value * value + g_sum * value;
}

double split_gain(double g_left, double b_left, std::size_t n_left, double g_right,
                  double b_right, std::size_t n_right, double alpha, double beta) {
  const double parent =
      node_objective(g_left + g_right, b_left + b_right, n_left + n_right, alpha, beta);
  const double left = node_objective(g_left, b_left, n_left, alpha, beta);
  const double right = node_objective(g_right, b_right, n_right, alpha, beta);
  return parent - (left + right);
}

Tree fit_tree(const Matrix& features, std::span<const double> grads,
              std::span<const double> quads, double alpha, double beta,
              const TreeConfig& config, double leaf_scale) {
  config.validate();
  if (features.rows() == 0 || features.cols() == 0) {
    fail(ErrorKind::Domain, "cannot fit a tree on an empty dataset");
  }
  if (grads.size() != features.rows() || quads.size() != features.rows()) {
    fail(ErrorKind::Domain, "gradient vectors do not match the feature rows");
  }
  std::vector<double> b(quads.begin(), quads.end());
  if (config.first_order) std::fill(b.begin(), b.end(), 0.0);
  Builder builder(features, grads, std::move(b), alpha, beta, config, leaf_scale);
  return Tree(builder.build(), features.cols());
}

}  // namespace trboost
