#pragma once

#include <cstdint>
#include <vector>

#include "macroml/common/linalg.hpp"

namespace macroml {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;

  double predict_row(const Matrix& z, Eigen::Index row) const;
  int depth() const;
};

struct ForestOptions {
  int n_trees = 500;
  double mtry_frac = 1.0 / 3.0;
  int min_leaf = 5;
  int max_depth = -1;  // -1: grow until leaves are pure or too small
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

struct ForestFit {
  std::vector<RegressionTree> trees;
  ForestOptions options;
  int n_obs = 0;
  int n_features = 0;
  double oob_mse = kMissing;  // NaN when no row is ever out of bag

  Vector predict(const Matrix& z) const;
  Vector predict_serial(const Matrix& z) const;
};

/// Breiman forest with variance-reduction splits over ceil(mtry_frac * cols)
/// candidate columns per node. Tree t draws from derive_seed(seed, t), so the
/// OpenMP build is bit-identical to the serial reference.
/// Throws ArgumentError when rows < 2 * min_leaf or options are out of range.
ForestFit fit_random_forest(const Matrix& z, const Vector& y, const ForestOptions& opts = {});
ForestFit fit_random_forest_serial(const Matrix& z, const Vector& y, const ForestOptions& opts = {});

}  // namespace macroml
