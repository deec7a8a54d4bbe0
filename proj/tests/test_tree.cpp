#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "trboost/error.hpp"
#include "trboost/tree.hpp"

using namespace trboost;

namespace {

struct Problem {
  Matrix x;
  std::vector<double> g;
  std::vector<double> b;
};

Problem random_problem(std::size_t n, std::size_t m, std::uint64_t seed, bool grid_features) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> level(0, 4);
  std::uniform_real_distribution<double> curv(0.1, 2.0);
  Problem p{Matrix(n, m), std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) p.x(i, j) = grid_features ? level(rng) : normal(rng);
    p.g[i] = normal(rng);
    p.b[i] = curv(rng);
  }
  return p;
}

// Objective of the quadratic model with every leaf at its own optimum,
// computed directly from the shifted leaf value.
double optimal_objective(double g, double b, std::size_t n, double alpha, double beta) {
  return leaf_objective(g, b, leaf_value(g, b, alpha, n, beta));
}

}  // namespace

TEST(Leaf, Examples) {
  EXPECT_DOUBLE_EQ(leaf_value(10.0, 5.0, 0.1, 10, 10.0), -0.625);
  EXPECT_DOUBLE_EQ(leaf_objective(10.0, 5.0, -0.625), -5.2734375);
  EXPECT_DOUBLE_EQ(leaf_value(-4.0, 2.0, 0.0, 3, 0.0), 2.0);
  EXPECT_EQ(leaf_value(0.0, 1.0, 0.0, 1, 0.0), 0.0);
  EXPECT_EQ(leaf_value(4.0, 0.0, 0.0, 7, 2.0), -2.0);
  try {
    leaf_value(1.0, -3.0, 0.1, 10, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InfeasibleRadius);
  }
}

TEST(Leaf, OptimalObjectiveIsNeverPositiveWhenShifted) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 5.0);
  std::uniform_real_distribution<double> b(0.0, 10.0), a(0.0, 1.0), beta(0.0, 20.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + trial % 50;
    ASSERT_LE(optimal_objective(g(rng), b(rng), n, a(rng), beta(rng) + 1e-6), 0.0);
  }
}

TEST(Split, SeparatedChildrenGain) {
  // Parent objective vanishes with G = 0; each child sits at -25/4.
  EXPECT_DOUBLE_EQ(split_gain(-5.0, 2.0, 5, 5.0, 2.0, 5, 0.0, 0.0), 12.5);
}

TEST(Split, GainMatchesDirectObjectives) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 3.0);
  std::uniform_real_distribution<double> b(0.0, 4.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double gl = g(rng), gr = g(rng), bl = b(rng), br = b(rng);
    const std::size_t nl = 1 + trial % 7, nr = 1 + trial % 11;
    const double alpha = 0.1, beta = 1.0;
    const double direct = optimal_objective(gl + gr, bl + br, nl + nr, alpha, beta) -
                          optimal_objective(gl, bl, nl, alpha, beta) -
                          optimal_objective(gr, br, nr, alpha, beta);
    const double gain = split_gain(gl, bl, nl, gr, br, nr, alpha, beta);
    ASSERT_NEAR(gain, direct, 1e-12 * std::max(1.0, std::abs(direct)));
    ASSERT_DOUBLE_EQ(gain, split_gain(gr, br, nr, gl, bl, nl, alpha, beta));
  }
}

TEST(Split, XgboostStyleGainWhenShiftIsConstant) {
  // alpha = 0 leaves the constant shift lambda.
  const double lambda = 2.0;
  const double gl = 3.0, bl = 4.0, gr = -1.0, br = 1.0;
  auto l = [&](double gs, double bs) {
    const double d = bs + lambda;
    return 0.5 * bs * gs * gs / (d * d) - gs * gs / d;
  };
  EXPECT_NEAR(split_gain(gl, bl, 5, gr, br, 5, 0.0, lambda),
              l(gl + gr, bl + br) - l(gl, bl) - l(gr, br), 1e-14);
  // lambda = 0 recovers the Newton gain exactly.
  const double newton = 0.5 * (gl * gl / bl + gr * gr / br - (gl + gr) * (gl + gr) / (bl + br));
  EXPECT_NEAR(split_gain(gl, bl, 5, gr, br, 5, 0.0, 0.0), newton, 1e-14);
}

TEST(FitTree, StumpOnSeparableTargets) {
  Matrix x(4, 1, {1.0, 2.0, 3.0, 4.0});
  std::vector<double> g{1.0, 1.0, -1.0, -1.0}, b(4, 1.0);
  TreeConfig cfg;
  cfg.max_depth = 1;
  const Tree tree = fit_tree(x, g, b, 0.0, 0.0, cfg);
  ASSERT_EQ(tree.nodes().size(), 3u);
  EXPECT_EQ(tree.nodes()[0].feature, 0);
  EXPECT_EQ(tree.nodes()[0].threshold, 2.5);
  EXPECT_EQ(tree.predict(std::vector<double>{1.5}), -1.0);
  EXPECT_EQ(tree.predict(std::vector<double>{2.5}), -1.0);  // ties go left
  EXPECT_EQ(tree.predict(std::vector<double>{3.0}), 1.0);
  EXPECT_EQ(tree.depth(), 1);
  EXPECT_EQ(tree.num_leaves(), 2u);
  EXPECT_THROW(tree.predict(std::vector<double>{1.0, 2.0}), Error);
}

TEST(FitTree, ConstantGradientsGiveSingleLeaf) {
  Matrix x(5, 2, {1, 5, 2, 4, 3, 3, 4, 2, 5, 1});
  std::vector<double> g(5, 2.0), b(5, 1.0);
  const Tree tree = fit_tree(x, g, b, 0.1, 10.0, TreeConfig{});
  ASSERT_EQ(tree.nodes().size(), 1u);
  EXPECT_DOUBLE_EQ(tree.nodes()[0].value, -10.0 / (5.0 + 0.5 + 10.0));
}

TEST(FitTree, TiesPreferLowestFeature) {
  // Both columns separate the gradients identically.
  Matrix x(4, 2, {0, 0, 0, 0, 1, 1, 1, 1});
  std::vector<double> g{1, 1, -1, -1}, b(4, 1.0);
  TreeConfig cfg;
  cfg.max_depth = 1;
  const Tree tree = fit_tree(x, g, b, 0.0, 1.0, cfg);
  EXPECT_EQ(tree.nodes()[0].feature, 0);
  EXPECT_EQ(tree.nodes()[0].threshold, 0.5);
}

TEST(FitTree, RootSplitMatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto p = random_problem(40, 3, seed, seed % 2 == 0);
    const double alpha = 0.1, beta = 1.0;
    TreeConfig cfg;
    cfg.max_depth = 1;
    const Tree tree = fit_tree(p.x, p.g, p.b, alpha, beta, cfg);

    // Enumerate every (feature, distinct value) partition independently.
    double best = 0.0;
    for (std::size_t f = 0; f < p.x.cols(); ++f) {
      for (std::size_t k = 0; k < p.x.rows(); ++k) {
        const double t = p.x(k, f);
        double gl = 0, bl = 0, gr = 0, br = 0;
        std::size_t nl = 0, nr = 0;
        for (std::size_t i = 0; i < p.x.rows(); ++i) {
          if (p.x(i, f) <= t) {
            gl += p.g[i], bl += p.b[i], ++nl;
          } else {
            gr += p.g[i], br += p.b[i], ++nr;
          }
        }
        if (nl == 0 || nr == 0) continue;
        best = std::max(best, optimal_objective(gl + gr, bl + br, nl + nr, alpha, beta) -
                                  optimal_objective(gl, bl, nl, alpha, beta) -
                                  optimal_objective(gr, br, nr, alpha, beta));
      }
    }
    const auto& nodes = tree.nodes();
    if (best <= 1e-12) continue;
    ASSERT_FALSE(nodes[0].is_leaf());
    const auto& l = nodes[nodes[0].left];
    const auto& r = nodes[nodes[0].right];
    const double got = optimal_objective(l.g_sum + r.g_sum, l.b_sum + r.b_sum, l.count + r.count,
                                         alpha, beta) -
                       optimal_objective(l.g_sum, l.b_sum, l.count, alpha, beta) -
                       optimal_objective(r.g_sum, r.b_sum, r.count, alpha, beta);
    EXPECT_NEAR(got, best, 1e-10) << "seed " << seed;
  }
}

TEST(FitTree, LeafStatisticsPartitionTheData) {
  const auto p = random_problem(200, 4, 77, false);
  const Tree tree = fit_tree(p.x, p.g, p.b, 0.1, 10.0, TreeConfig{});
  std::size_t total = 0;
  double g_total = 0.0;
  for (const auto& node : tree.nodes()) {
    if (!node.is_leaf()) continue;
    total += node.count;
    g_total += node.g_sum;
    EXPECT_DOUBLE_EQ(node.value, leaf_value(node.g_sum, node.b_sum, 0.1, node.count, 10.0));
  }
  EXPECT_EQ(total, 200u);
  double g_sum = 0.0;
  for (double v : p.g) g_sum += v;
  EXPECT_NEAR(g_total, g_sum, 1e-10);
  EXPECT_LE(tree.depth(), 6);
}

TEST(FitTree, RespectsDepthAndLeafSize) {
  const auto p = random_problem(300, 3, 5, false);
  TreeConfig cfg;
  cfg.max_depth = 3;
  cfg.min_samples_leaf = 20;
  const Tree tree = fit_tree(p.x, p.g, p.b, 0.0, 1.0, cfg);
  EXPECT_LE(tree.depth(), 3);
  for (const auto& node : tree.nodes()) {
    if (node.is_leaf()) {
      EXPECT_GE(node.count, 20u);
    }
  }
  cfg.min_gain = 1e9;
  EXPECT_EQ(fit_tree(p.x, p.g, p.b, 0.0, 1.0, cfg).nodes().size(), 1u);
}

TEST(FitTree, FirstOrderIgnoresCurvature) {
  const auto p = random_problem(60, 2, 13, false);
  TreeConfig cfg;
  cfg.first_order = true;
  const Tree a = fit_tree(p.x, p.g, p.b, 0.5, 2.0, cfg);
  const Tree b = fit_tree(p.x, p.g, std::vector<double>(60, 0.0), 0.5, 2.0, TreeConfig{});
  EXPECT_EQ(a, b);
  for (const auto& node : a.nodes()) EXPECT_EQ(node.b_sum, 0.0);
}

TEST(FitTree, DeterministicAndLeafScale) {
  const auto p = random_problem(120, 5, 21, true);
  const Tree a = fit_tree(p.x, p.g, p.b, 0.1, 10.0, TreeConfig{});
  const Tree b = fit_tree(p.x, p.g, p.b, 0.1, 10.0, TreeConfig{});
  EXPECT_EQ(a, b);
  const Tree scaled = fit_tree(p.x, p.g, p.b, 0.1, 10.0, TreeConfig{}, 0.5);
  ASSERT_EQ(scaled.nodes().size(), a.nodes().size());
  for (std::size_t i = 0; i < a.nodes().size(); ++i) {
    EXPECT_EQ(scaled.nodes()[i].value, 0.5 * a.nodes()[i].value);
  }
}

TEST(FitTree, RejectsBadInput) {
  Matrix x(3, 1, {1, 2, 3});
  std::vector<double> g{1, 2}, b{1, 1};
  EXPECT_THROW(fit_tree(x, g, b, 0, 1, TreeConfig{}), Error);
  TreeConfig bad;
  bad.max_depth = 0;
  std::vector<double> g3{1, 2, 3}, b3{1, 1, 1};
  EXPECT_THROW(fit_tree(x, g3, b3, 0, 1, bad), Error);
  std::vector<TreeNode> nodes(1);
  nodes[0].feature = 0;
  nodes[0].left = 0;
  nodes[0].right = 0;
  EXPECT_THROW(Tree(nodes, 1), Error);
}
