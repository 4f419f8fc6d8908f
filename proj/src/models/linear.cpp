#include "macroml/models/linear.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <numeric>

#include "macroml/common/error.hpp"

namespace macroml {

Vector LinearFit::predict(const Matrix& z) const {
  return (pre.transform(z) * beta).array() + pre.y_offset;
}

Vector LinearFit::raw_coefficients() const {
  Vector out(beta.size() + 1);
  const Vector slopes = beta.array() / pre.x.scale.array();
  out(0) = pre.y_offset - pre.x.mean.dot(slopes);
  out.tail(beta.size()) = slopes;
  return out;
}

namespace {

void check_inputs(const Matrix& z, const Vector& y) {
  if (z.rows() != y.size()) throw ArgumentError("design has " + std::to_string(z.rows()) + " rows, target " +
                                                std::to_string(y.size()));
  if (!z.allFinite() || !y.allFinite()) throw ArgumentError("design or target has missing entries");
}

LinearFit finish(LinearFit f, const Matrix& zt, const Vector& yt, const FitOptions& opts) {
  f.ssr = (yt - zt * f.beta).squaredNorm();
  f.n_obs = static_cast<int>(zt.rows());
  f.n_params = static_cast<int>(zt.cols()) + (opts.intercept ? 1 : 0);
  return f;
}

double soft(double b, double t) { return b > t ? b - t : (b < -t ? b + t : 0.0); }

}  // namespace

LinearFit fit_ols(const Matrix& z, const Vector& y, const FitOptions& opts, const std::vector<std::string>* names) {
  check_inputs(z, y);
  const Eigen::Index p = z.cols() + (opts.intercept ? 1 : 0);
  if (z.rows() <= p)
    throw ArgumentError("OLS needs more rows than parameters (" + std::to_string(z.rows()) + " <= " +
                        std::to_string(p) + ")");
  LinearFit f;
  f.pre = Preprocess::fit(z, y, opts);
  const Matrix zt = f.pre.transform(z);
  const Vector yt = y.array() - f.pre.y_offset;

  Eigen::ColPivHouseholderQR<Matrix> qr(zt);
  qr.setThreshold(1e-10);
  if (qr.rank() < zt.cols()) {
    std::vector<std::string> cols;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index r = qr.rank(); r < zt.cols(); ++r) {
      const int c = perm(r);
      cols.push_back(names && c < static_cast<int>(names->size()) ? (*names)[c] : "column " + std::to_string(c));
    }
    std::string msg = "collinear design; redundant:";
    for (const auto& c : cols) msg += " " + c;
    throw CollinearityError(msg, cols);
  }
  f.beta = qr.solve(yt);
  f.is_ols = true;
  return finish(std::move(f), zt, yt, opts);
}

LinearFit fit_ridge(const Matrix& z, const Vector& y, double lambda, RidgeMode mode, const FitOptions& opts) {
  check_inputs(z, y);
  if (!(lambda >= 0.0)) throw ArgumentError("ridge penalty must be non-negative, got " + std::to_string(lambda));
  LinearFit f;
  f.pre = Preprocess::fit(z, y, opts);
  const Matrix zt = f.pre.transform(z);
  const Vector yt = y.array() - f.pre.y_offset;
  if (lambda == 0.0) {
    f.beta = Eigen::CompleteOrthogonalDecomposition<Matrix>(zt).solve(yt);
  } else if (mode == RidgeMode::Primal) {
    Matrix a = zt.transpose() * zt;
    a.diagonal().array() += lambda;
    f.beta = a.ldlt().solve(zt.transpose() * yt);
  } else {
    Matrix g = zt * zt.transpose();
    g.diagonal().array() += lambda;
    f.beta = zt.transpose() * g.ldlt().solve(yt);
  }
  return finish(std::move(f), zt, yt, opts);
}

double enet_kkt_violation(const Matrix& z, const Vector& y, const Vector& beta, double lambda, double alpha) {
  const Vector g = 2.0 * z.transpose() * (y - z * beta);
  double worst = 0.0;
  for (Eigen::Index k = 0; k < beta.size(); ++k) {
    double v;
    if (beta(k) != 0.0) {
      const double s = beta(k) > 0 ? 1.0 : -1.0;
      v = std::abs(g(k) - 2.0 * lambda * (1.0 - alpha) * beta(k) - lambda * alpha * s);
    } else {
      v = std::max(0.0, std::abs(g(k)) - lambda * alpha);
    }
    worst = std::max(worst, v);
  }
  return worst;
}

namespace {

/// Coordinate descent on preprocessed data; beta holds the warm start on entry.
int enet_descent(const Matrix& zt, const Vector& yt, double lambda, double alpha, const EnetControl& ctl,
                 Vector& beta) {
  const Eigen::Index p = zt.cols();
  const Vector a = zt.colwise().squaredNorm();
  Vector r = yt - zt * beta;
  const double l1 = lambda * alpha / 2.0;
  const double l2 = lambda * (1.0 - alpha);
  const double scale = std::sqrt(std::max(yt.squaredNorm(), 1e-300));

  auto update = [&](Eigen::Index k) {
    const double denom = a(k) + l2;
    if (denom <= 0.0) return 0.0;
    const double b = zt.col(k).dot(r) + a(k) * beta(k);
    const double nb = soft(b, l1) / denom;
    const double d = nb - beta(k);
    if (d != 0.0) {
      r.noalias() -= d * zt.col(k);
      beta(k) = nb;
    }
    return std::abs(d) * std::sqrt(a(k));
  };

  int sweeps = 0;
  std::vector<Eigen::Index> active;
  while (sweeps < ctl.max_sweeps) {
    double delta = 0.0;
    for (Eigen::Index k = 0; k < p; ++k) delta = std::max(delta, update(k));
    ++sweeps;
    if (delta <= ctl.tol * scale) return sweeps;
    active.clear();
    for (Eigen::Index k = 0; k < p; ++k)
      if (beta(k) != 0.0) active.push_back(k);
    while (sweeps < ctl.max_sweeps) {
      double d2 = 0.0;
      for (auto k : active) d2 = std::max(d2, update(k));
      ++sweeps;
      if (d2 <= ctl.tol * scale) break;
    }
  }
  return -sweeps;
}

}  // namespace

LinearFit fit_elastic_net(const Matrix& z, const Vector& y, double lambda, double alpha, const FitOptions& opts,
                          const EnetControl& ctl, const Vector* warm_start) {
  check_inputs(z, y);
  if (!(lambda >= 0.0)) throw ArgumentError("elastic-net penalty must be non-negative");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ArgumentError("elastic-net mixing must lie in [0,1]");
  LinearFit f;
  f.pre = Preprocess::fit(z, y, opts);
  const Matrix zt = f.pre.transform(z);
  const Vector yt = y.array() - f.pre.y_offset;
  f.beta = warm_start && warm_start->size() == zt.cols() ? *warm_start : Vector::Zero(zt.cols());
  const int sweeps = enet_descent(zt, yt, lambda, alpha, ctl, f.beta);
  f.kkt_violation = enet_kkt_violation(zt, yt, f.beta, lambda, alpha);
  if (sweeps < 0)
    throw ConvergenceError("elastic net did not converge in " + std::to_string(-sweeps) + " sweeps",
                           std::vector<double>(f.beta.data(), f.beta.data() + f.beta.size()), f.kkt_violation);
  f.sweeps = sweeps;
  return finish(std::move(f), zt, yt, opts);
}

Matrix ridge_path_predict(const Matrix& z, const Vector& y, const Matrix& z_new, const std::vector<double>& lambdas,
                          const FitOptions& opts) {
  check_inputs(z, y);
  const Preprocess pre = Preprocess::fit(z, y, opts);
  const Matrix zt = pre.transform(z);
  const Vector yt = y.array() - pre.y_offset;
  const Matrix zn = pre.transform(z_new);
  Eigen::BDCSVD<Matrix> svd(zt, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector s = svd.singularValues();
  const Vector uty = svd.matrixU().transpose() * yt;
  const Matrix znv = zn * svd.matrixV();
  const double tiny = s.size() ? s(0) * 1e-12 : 0.0;
  Matrix out(z_new.rows(), static_cast<Eigen::Index>(lambdas.size()));
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    if (!(lambdas[l] >= 0.0)) throw ArgumentError("ridge penalty must be non-negative");
    Vector w(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i)
      w(i) = s(i) > tiny ? s(i) / (s(i) * s(i) + lambdas[l]) * uty(i) : 0.0;
    out.col(static_cast<Eigen::Index>(l)) = (znv * w).array() + pre.y_offset;
  }
  return out;
}

Matrix enet_path_predict(const Matrix& z, const Vector& y, const Matrix& z_new, const std::vector<double>& lambdas,
                         double alpha, const FitOptions& opts, const EnetControl& ctl) {
  check_inputs(z, y);
  const Preprocess pre = Preprocess::fit(z, y, opts);
  const Matrix zt = pre.transform(z);
  const Vector yt = y.array() - pre.y_offset;
  const Matrix zn = pre.transform(z_new);
  std::vector<std::size_t> order(lambdas.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return lambdas[a] > lambdas[b]; });
  Matrix out(z_new.rows(), static_cast<Eigen::Index>(lambdas.size()));
  Vector beta = Vector::Zero(zt.cols());
  for (auto l : order) {
    const int sweeps = enet_descent(zt, yt, lambdas[l], alpha, ctl, beta);
    if (sweeps < 0)
      throw ConvergenceError("elastic-net path did not converge at lambda " + std::to_string(lambdas[l]),
                             std::vector<double>(beta.data(), beta.data() + beta.size()),
                             enet_kkt_violation(zt, yt, beta, lambdas[l], alpha));
    out.col(static_cast<Eigen::Index>(l)) = (zn * beta).array() + pre.y_offset;
  }
  return out;
}

}  // namespace macroml
