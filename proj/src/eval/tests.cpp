#include "macroml/eval/tests.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "macroml/common/error.hpp"
#include "macroml/common/rng.hpp"
#include "macroml/eval/hac.hpp"

namespace macroml {
namespace {

double two_sided_normal_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

std::vector<double> differential(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw ArgumentError("loss sequences differ in length");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i]) || !std::isfinite(b[i])) throw ArgumentError("non-finite loss at position " + std::to_string(i));
    d[i] = a[i] - b[i];
  }
  return d;
}

double mean_abs(const std::vector<double>& d) {
  double s = 0.0;
  for (double v : d) s += std::abs(v);
  return d.empty() ? 0.0 : s / static_cast<double>(d.size());
}

// A variance this small relative to the differential is numerically zero.
bool vanishing(double var, double scale) { return var <= std::pow(1e-12 * scale, 2); }

RowVector bootstrap_replication(const Matrix& losses, int block, std::uint64_t seed, int b) {
  const Eigen::Index t = losses.rows();
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(b)));
  const Eigen::Index starts = t - block + 1;
  RowVector sum = RowVector::Zero(losses.cols());
  Eigen::Index filled = 0;
  while (filled < t) {
    const auto s = static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(starts)));
    for (Eigen::Index j = 0; j < block && filled < t; ++j, ++filled) sum += losses.row(s + j);
  }
  return sum / static_cast<double>(t);
}

void check_bootstrap(const Matrix& losses, int reps, int& block) {
  if (losses.rows() < 2) throw ArgumentError("bootstrap needs at least two dates");
  if (reps < 1) throw ArgumentError("bootstrap needs at least one replication");
  if (block < 1) throw ArgumentError("block length must be positive");
  block = std::min<int>(block, static_cast<int>(losses.rows()));
}

// Giacomini-Rossi (2010), two-sided critical values by window share.
constexpr std::array<double, 10> kMu{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
constexpr std::array<double, 10> kCrit05{3.393, 3.179, 3.012, 2.890, 2.779, 2.634, 2.560, 2.433, 2.248, 1.960};
constexpr std::array<double, 10> kCrit10{3.170, 2.948, 2.766, 2.626, 2.500, 2.356, 2.252, 2.130, 1.950, 1.645};

}  // namespace

TestResult dm_test(const std::vector<double>& loss_a, const std::vector<double>& loss_b, int h) {
  const auto d = differential(loss_a, loss_b);
  const int t = static_cast<int>(d.size());
  if (t < 30) throw ArgumentError("DM test needs at least 30 aligned losses, got " + std::to_string(t));
  TestResult r;
  r.bandwidth = std::max(h - 1, 0);
  double mean = 0.0;
  for (double v : d) mean += v;
  mean /= t;
  const double scale = mean_abs(d);
  if (scale == 0.0) return r;
  const double var = long_run_variance(d, r.bandwidth);
  if (vanishing(var, scale)) {
    if (std::abs(mean) <= 1e-12 * scale) return r;
    throw DomainError("DM test: loss differential has zero variance but mean " + std::to_string(mean));
  }
  r.statistic = mean / std::sqrt(var / t);
  r.p_value = two_sided_normal_p(r.statistic);
  return r;
}

std::string significance_stars(double p) {
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.10) return "*";
  return "";
}

double fluctuation_critical_value(double mu, double level) {
  const auto& table = level == 0.05 ? kCrit05 : level == 0.10 ? kCrit10 : throw ArgumentError("fluctuation level must be 0.05 or 0.10");
  if (!(mu > 0 && mu <= 1)) throw ArgumentError("window share must lie in (0,1]");
  if (mu <= kMu.front()) return table.front();
  for (std::size_t i = 1; i < kMu.size(); ++i)
    if (mu <= kMu[i]) {
      const double w = (mu - kMu[i - 1]) / (kMu[i] - kMu[i - 1]);
      return table[i - 1] + w * (table[i] - table[i - 1]);
    }
  return table.back();
}

FluctuationResult fluctuation_test(const std::vector<double>& loss_a, const std::vector<double>& loss_b, int window,
                                   int h) {
  const auto d = differential(loss_a, loss_b);
  const int t = static_cast<int>(d.size());
  if (window < 24) throw ArgumentError("fluctuation window must be at least 24, got " + std::to_string(window));
  if (window > t) throw ArgumentError("fluctuation window exceeds the sample");
  FluctuationResult r;
  r.window = window;
  r.mu = static_cast<double>(window) / t;
  r.critical_05 = fluctuation_critical_value(r.mu, 0.05);
  r.critical_10 = fluctuation_critical_value(r.mu, 0.10);
  r.path.assign(t - window + 1, 0.0);
  const double scale = mean_abs(d);
  if (scale == 0.0) return r;
  const double var = long_run_variance(d, std::max(h - 1, 0));
  if (vanishing(var, scale)) throw DomainError("fluctuation test: loss differential has zero variance");
  const double denom = std::sqrt(window * var);
  for (int end = window - 1; end < t; ++end) {
    double s = 0.0;
    for (int i = end - window + 1; i <= end; ++i) s += d[i];
    r.path[end - window + 1] = s / denom;
    r.rejects_05 = r.rejects_05 || std::abs(r.path[end - window + 1]) > r.critical_05;
  }
  return r;
}

Matrix mcs_bootstrap_means(const Matrix& losses, int reps, int block_length, std::uint64_t seed) {
  check_bootstrap(losses, reps, block_length);
  Matrix out(reps, losses.cols());
#pragma omp parallel for schedule(static)
  for (int b = 0; b < reps; ++b) out.row(b) = bootstrap_replication(losses, block_length, seed, b);
  return out;
}

Matrix mcs_bootstrap_means_serial(const Matrix& losses, int reps, int block_length, std::uint64_t seed) {
  check_bootstrap(losses, reps, block_length);
  Matrix out(reps, losses.cols());
  for (int b = 0; b < reps; ++b) out.row(b) = bootstrap_replication(losses, block_length, seed, b);
  return out;
}

TestResult model_confidence_set(const Matrix& losses, const std::vector<std::string>& models, const McsOptions& opts) {
  const auto m = static_cast<Eigen::Index>(models.size());
  if (losses.cols() != m) throw ArgumentError("MCS: one loss column per model required");
  if (m == 0) throw ArgumentError("MCS: no models");
  if (!losses.allFinite()) throw ArgumentError("MCS: non-finite losses");
  TestResult r;
  r.reps = opts.reps;
  if (m == 1) {
    r.survivors = models;
    r.mcs_p[models[0]] = 1.0;
    return r;
  }
  const RowVector lbar = losses.colwise().mean();
  const Matrix boot = mcs_bootstrap_means(losses, opts.reps, opts.block_length, opts.seed);
  const double scale = losses.cwiseAbs().mean();

  std::vector<Eigen::Index> alive(m);
  for (Eigen::Index i = 0; i < m; ++i) alive[i] = i;
  double running = 0.0;
  bool first = true;
  while (alive.size() > 1) {
    const auto k = alive.size();
    double mean_s = 0.0;
    for (auto i : alive) mean_s += lbar(i);
    mean_s /= static_cast<double>(k);
    Vector boot_mean_s = Vector::Zero(opts.reps);
    for (auto i : alive) boot_mean_s += boot.col(i);
    boot_mean_s /= static_cast<double>(k);

    std::vector<double> dbar(k), sd(k);
    Matrix dev(opts.reps, static_cast<Eigen::Index>(k));
    bool all_flat = true;
    for (std::size_t a = 0; a < k; ++a) {
      dbar[a] = lbar(alive[a]) - mean_s;
      dev.col(a) = (boot.col(alive[a]) - boot_mean_s).array() - dbar[a];
      const double var = dev.col(a).squaredNorm() / opts.reps;
      sd[a] = vanishing(var, scale) ? 0.0 : std::sqrt(var);
      all_flat = all_flat && sd[a] == 0.0 && std::abs(dbar[a]) <= 1e-12 * scale;
    }
    if (all_flat) break;

    std::size_t worst = 0;
    double tmax = -INFINITY;
    for (std::size_t a = 0; a < k; ++a) {
      double ti = 0.0;
      if (sd[a] > 0) ti = dbar[a] / sd[a];
      else if (std::abs(dbar[a]) > 1e-12 * scale) ti = dbar[a] > 0 ? INFINITY : -INFINITY;
      if (ti > tmax) tmax = ti, worst = a;
    }
    int exceed = 0;
    for (int b = 0; b < opts.reps; ++b) {
      double tb = -INFINITY;
      for (std::size_t a = 0; a < k; ++a) tb = std::max(tb, sd[a] > 0 ? dev(b, a) / sd[a] : 0.0);
      exceed += tb >= tmax;
    }
    const double p = static_cast<double>(exceed) / opts.reps;
    if (first) r.statistic = tmax, r.p_value = p, first = false;
    running = std::max(running, p);
    const auto gone = alive[worst];
    r.mcs_p[models[gone]] = running;
    r.eliminated.push_back(models[gone]);
    alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(worst));
  }
  for (auto i : alive) r.mcs_p[models[i]] = 1.0;
  for (const auto& name : models)
    if (r.mcs_p[name] >= opts.alpha) r.survivors.push_back(name);
  return r;
}

}  // namespace macroml
