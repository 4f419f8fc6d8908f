#include "macroml/models/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "macroml/common/error.hpp"
#include "macroml/common/rng.hpp"

namespace macroml {

double RegressionTree::predict_row(const Matrix& z, Eigen::Index row) const {
  int n = 0;
  while (nodes[n].feature >= 0) n = z(row, nodes[n].feature) <= nodes[n].threshold ? nodes[n].left : nodes[n].right;
  return nodes[n].value;
}

int RegressionTree::depth() const {
  std::vector<int> d(nodes.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    best = std::max(best, d[i]);
    if (nodes[i].feature >= 0) {
      d[nodes[i].left] = d[i] + 1;
      d[nodes[i].right] = d[i] + 1;
    }
  }
  return best;
}

namespace {

struct Grown {
  RegressionTree tree;
  std::vector<char> in_bag;
};

Grown grow_tree(const Matrix& z, const Vector& y, const ForestOptions& opts, std::uint64_t seed) {
  Rng rng(seed);
  const int n = static_cast<int>(z.rows());
  const int p = static_cast<int>(z.cols());
  const int mtry = std::clamp(static_cast<int>(std::ceil(opts.mtry_frac * p - 1e-12)), 1, p);

  Grown g;
  g.in_bag.assign(n, 0);
  std::vector<int> idx(n);
  if (opts.bootstrap) {
    for (int i = 0; i < n; ++i) idx[i] = static_cast<int>(uniform_index(rng, n));
  } else {
    std::iota(idx.begin(), idx.end(), 0);
  }
  for (int i : idx) g.in_bag[i] = 1;

  std::vector<int> features(p);
  std::iota(features.begin(), features.end(), 0);
  std::vector<std::pair<double, double>> scan;

  struct Job {
    int node, lo, hi, depth;
  };
  std::vector<Job> stack{{0, 0, n, 0}};
  auto& nodes = g.tree.nodes;
  nodes.emplace_back();

  while (!stack.empty()) {
    const Job job = stack.back();
    stack.pop_back();
    const int m = job.hi - job.lo;
    double sum = 0.0, sq = 0.0;
    for (int i = job.lo; i < job.hi; ++i) {
      sum += y(idx[i]);
      sq += y(idx[i]) * y(idx[i]);
    }
    nodes[job.node].value = sum / m;
    const double sst = sq - sum * sum / m;
    const bool depth_ok = opts.max_depth < 0 || job.depth < opts.max_depth;
    if (!depth_ok || m < 2 * opts.min_leaf || sst <= 1e-12 * std::max(sq, 1e-300)) continue;

    for (int k = 0; k < mtry; ++k) {
      const int r = k + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(p - k)));
      std::swap(features[k], features[r]);
    }
    double best_gain = 0.0;
    int best_feature = -1;
    double best_threshold = 0.0;
    for (int k = 0; k < mtry; ++k) {
      const int f = features[k];
      scan.clear();
      for (int i = job.lo; i < job.hi; ++i) scan.emplace_back(z(idx[i], f), y(idx[i]));
      std::sort(scan.begin(), scan.end());
      double left = 0.0;
      for (int i = 0; i < m - 1; ++i) {
        left += scan[i].second;
        const int nl = i + 1, nr = m - nl;
        if (nl < opts.min_leaf) continue;
        if (nr < opts.min_leaf) break;
        if (!(scan[i].first < scan[i + 1].first)) continue;
        const double right = sum - left;
        const double gain = left * left / nl + right * right / nr - sum * sum / m;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = f;
          best_threshold = 0.5 * (scan[i].first + scan[i + 1].first);
          if (best_threshold >= scan[i + 1].first) best_threshold = scan[i].first;
        }
      }
    }
    if (best_feature < 0 || best_gain <= 1e-12 * sst) continue;

    const auto mid = std::stable_partition(idx.begin() + job.lo, idx.begin() + job.hi,
                                           [&](int i) { return z(i, best_feature) <= best_threshold; });
    const int split = static_cast<int>(mid - idx.begin());
    const int l = static_cast<int>(nodes.size());
    nodes.emplace_back();
    nodes.emplace_back();
    nodes[job.node].feature = best_feature;
    nodes[job.node].threshold = best_threshold;
    nodes[job.node].left = l;
    nodes[job.node].right = l + 1;
    stack.push_back({l + 1, split, job.hi, job.depth + 1});
    stack.push_back({l, job.lo, split, job.depth + 1});
  }
  return g;
}

void check(const Matrix& z, const Vector& y, const ForestOptions& opts) {
  if (opts.n_trees < 1) throw ArgumentError("forest needs at least one tree");
  if (!(opts.mtry_frac > 0.0 && opts.mtry_frac <= 1.0)) throw ArgumentError("mtry fraction must lie in (0,1]");
  if (opts.min_leaf < 1) throw ArgumentError("min_leaf must be positive");
  if (z.rows() != y.size() || z.cols() < 1) throw ArgumentError("invalid forest inputs");
  if (z.rows() < 2 * opts.min_leaf)
    throw ArgumentError("forest needs at least " + std::to_string(2 * opts.min_leaf) + " rows, got " +
                        std::to_string(z.rows()));
  if (!z.allFinite() || !y.allFinite()) throw ArgumentError("forest inputs have missing entries");
}

ForestFit assemble(std::vector<Grown>& grown, const Matrix& z, const Vector& y, const ForestOptions& opts) {
  ForestFit f;
  f.options = opts;
  f.n_obs = static_cast<int>(z.rows());
  f.n_features = static_cast<int>(z.cols());
  Vector oob_sum = Vector::Zero(z.rows());
  std::vector<int> oob_n(z.rows(), 0);
  for (auto& g : grown) {
    for (Eigen::Index i = 0; i < z.rows(); ++i)
      if (!g.in_bag[i]) {
        oob_sum(i) += g.tree.predict_row(z, i);
        ++oob_n[i];
      }
    f.trees.push_back(std::move(g.tree));
  }
  double se = 0.0;
  int cnt = 0;
  for (Eigen::Index i = 0; i < z.rows(); ++i)
    if (oob_n[i] > 0) {
      const double e = y(i) - oob_sum(i) / oob_n[i];
      se += e * e;
      ++cnt;
    }
  if (cnt > 0) f.oob_mse = se / cnt;
  return f;
}

}  // namespace

ForestFit fit_random_forest_serial(const Matrix& z, const Vector& y, const ForestOptions& opts) {
  check(z, y, opts);
  std::vector<Grown> grown;
  grown.reserve(opts.n_trees);
  for (int t = 0; t < opts.n_trees; ++t) grown.push_back(grow_tree(z, y, opts, derive_seed(opts.seed, t)));
  return assemble(grown, z, y, opts);
}

ForestFit fit_random_forest(const Matrix& z, const Vector& y, const ForestOptions& opts) {
  check(z, y, opts);
  std::vector<Grown> grown(opts.n_trees);
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < opts.n_trees; ++t) grown[t] = grow_tree(z, y, opts, derive_seed(opts.seed, t));
  return assemble(grown, z, y, opts);
}

Vector ForestFit::predict_serial(const Matrix& z) const {
  if (z.cols() != n_features) throw ArgumentError("forest expects " + std::to_string(n_features) + " columns");
  Vector out(z.rows());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    double s = 0.0;
    for (const auto& t : trees) s += t.predict_row(z, i);
    out(i) = s / static_cast<double>(trees.size());
  }
  return out;
}

Vector ForestFit::predict(const Matrix& z) const {
  if (z.cols() != n_features) throw ArgumentError("forest expects " + std::to_string(n_features) + " columns");
  Vector out(z.rows());
  const Eigen::Index rows = z.rows();
#pragma omp parallel for schedule(static) if (rows > 64)
  for (Eigen::Index i = 0; i < rows; ++i) {
    double s = 0.0;
    for (const auto& t : trees) s += t.predict_row(z, i);
    out(i) = s / static_cast<double>(trees.size());
  }
  return out;
}

}  // namespace macroml
