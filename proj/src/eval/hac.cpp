#include "macroml/eval/hac.hpp"

#include <algorithm>
#include <cmath>
#include <spdlog/spdlog.h>

#include "macroml/common/error.hpp"

namespace macroml {

int newey_west_bandwidth(int t) {
  if (t <= 0) return 0;
  return static_cast<int>(std::floor(4.0 * std::pow(t / 100.0, 2.0 / 9.0)));
}

Matrix hac_covariance(const Matrix& g, int bandwidth, bool* repaired) {
  if (bandwidth < 0) throw ArgumentError("HAC bandwidth must be non-negative");
  const Eigen::Index t = g.rows();
  Matrix s = g.transpose() * g;
  for (int j = 1; j <= bandwidth && j < t; ++j) {
    const double w = 1.0 - j / (bandwidth + 1.0);
    const Matrix gj = g.bottomRows(t - j).transpose() * g.topRows(t - j);
    s += w * (gj + gj.transpose());
  }
  s = 0.5 * (s + s.transpose());
  if (repaired) *repaired = false;
  if (s.rows() == 0) return s;
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  const double floor_tol = -1e-12 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() < floor_tol) {
    spdlog::warn("HAC covariance not positive semi-definite (min eigenvalue {:.3g}); flooring at zero",
                 es.eigenvalues().minCoeff());
    if (repaired) *repaired = true;
    const Vector ev = es.eigenvalues().cwiseMax(0.0);
    s = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  }
  return s;
}

double long_run_variance(const std::vector<double>& x, int bandwidth) {
  const int t = static_cast<int>(x.size());
  if (t == 0) return 0.0;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= t;
  auto gamma = [&](int j) {
    double s = 0.0;
    for (int i = j; i < t; ++i) s += (x[i] - mean) * (x[i - j] - mean);
    return s / t;
  };
  double v = gamma(0);
  for (int j = 1; j <= bandwidth && j < t; ++j) v += 2.0 * (1.0 - j / (bandwidth + 1.0)) * gamma(j);
  return v;
}

OlsInference ols_hac(const Matrix& x, const Vector& y, int bandwidth, const std::vector<int>* cluster) {
  OlsInference out;
  const Eigen::ColPivHouseholderQR<Matrix> qr(x);
  out.beta = qr.solve(y);
  out.residuals = y - x * out.beta;
  Matrix g = x.array().colwise() * out.residuals.array();
  if (cluster) {
    if (static_cast<Eigen::Index>(cluster->size()) != x.rows()) throw ArgumentError("cluster keys misaligned");
    std::vector<Eigen::Index> starts;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      if (i == 0 || (*cluster)[i] != (*cluster)[i - 1]) starts.push_back(i);
    Matrix summed = Matrix::Zero(static_cast<Eigen::Index>(starts.size()), x.cols());
    for (std::size_t c = 0; c < starts.size(); ++c) {
      const Eigen::Index end = c + 1 < starts.size() ? starts[c + 1] : x.rows();
      summed.row(c) = g.middleRows(starts[c], end - starts[c]).colwise().sum();
    }
    g = std::move(summed);
  }
  const Matrix bread = (x.transpose() * x).ldlt().solve(Matrix::Identity(x.cols(), x.cols()));
  out.cov = bread * hac_covariance(g, bandwidth) * bread;
  return out;
}

Matrix ols_classical_cov(const Matrix& x, const Vector& residuals) {
  const double dof = static_cast<double>(x.rows() - x.cols());
  if (dof <= 0) throw ArgumentError("classical covariance needs more rows than columns");
  const double s2 = residuals.squaredNorm() / dof;
  return s2 * (x.transpose() * x).ldlt().solve(Matrix::Identity(x.cols(), x.cols()));
}

}  // namespace macroml
