#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "trboost/matrix.hpp"

namespace trboost {

struct TreeConfig {
  int max_depth = 6;
  std::size_t min_samples_leaf = 1;
  double min_gain = 0.0;
  // Zero every b before leaf values and gains are computed.
  bool first_order = false;

  void validate() const;
};

// Flat node record. A node with feature < 0 is a leaf.
struct TreeNode {
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;

  double value = 0.0;
  std::size_t count = 0;
  double g_sum = 0.0;
  double b_sum = 0.0;

  bool is_leaf() const noexcept { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

// Immutable regression tree; node 0 is the root.
class Tree {
 public:
  Tree() = default;
  Tree(std::vector<TreeNode> nodes, std::size_t num_features);

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  std::size_t num_features() const noexcept { return num_features_; }
  std::size_t num_leaves() const;
  int depth() const;

  // Routes value <= threshold to the left child.
  double predict(std::span<const double> row) const;

  friend bool operator==(const Tree&, const Tree&) = default;

 private:
  std::vector<TreeNode> nodes_;
  std::size_t num_features_ = 0;
};

// -G / (B + alpha * n + beta). Throws InfeasibleRadius on a non-positive denominator.
double leaf_value(double g_sum, double b_sum, double alpha, std::size_t n, double beta);

// Quadratic model B C^2 / 2 + G C of a leaf.
double leaf_objective(double g_sum, double b_sum, double value);

// Reduction of the quadratic model obtained by splitting P into L and R,
// each side evaluated at its own shifted leaf value. Positive is better.
double split_gain(double g_left, double b_left, std::size_t n_left,
                  double g_right, double b_right, std::size_t n_right,
                  double alpha, double beta);

// Exact greedy tree on per-instance (g, b). Leaf values are multiplied by
// leaf_scale, which baselines use as a learning rate.
Tree fit_tree(const Matrix& features, std::span<const double> grads,
              std::span<const double> quads, double alpha, double beta,
              const TreeConfig& config, double leaf_scale = 1.0);

inline double predict_tree(const Tree& tree, std::span<const double> row) {
  return tree.predict(row);
}

}  // namespace trboost
