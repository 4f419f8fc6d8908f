#include "macroml/models/svr.hpp"

#include <algorithm>
#include <limits>

#include "macroml/common/error.hpp"

namespace macroml {

Vector SvrFit::predict(const Matrix& z) const {
  if (coef.size() == 0) return Vector::Constant(z.rows(), intercept);
  return (gram(pre.transform(z), support, kernel) * coef).array() + intercept;
}

double svr_dual_objective(const Matrix& k, const Vector& y, double epsilon, const Vector& alpha) {
  const Eigen::Index t = y.size();
  const Vector d = alpha.head(t) - alpha.tail(t);
  return 0.5 * d.dot(k * d) + epsilon * alpha.sum() - y.dot(d);
}

SvrFit fit_svr(const Matrix& z, const Vector& y, const Kernel& kernel, double C, double epsilon,
               const FitOptions& opts, const SvrControl& ctl) {
  if (!(C > 0.0)) throw ArgumentError("SVR cost must be positive");
  if (!(epsilon >= 0.0)) throw ArgumentError("SVR tube width must be non-negative");
  if (z.rows() != y.size() || z.rows() < 1 || !z.allFinite() || !y.allFinite())
    throw ArgumentError("invalid SVR inputs");

  SvrFit f;
  f.pre.x = Standardization::fit(z, opts.intercept, opts.standardize);
  f.kernel = kernel;
  f.C = C;
  f.epsilon = epsilon;
  f.n_obs = static_cast<int>(z.rows());
  const Matrix zt = f.pre.transform(z);
  const Matrix k = gram(zt, zt, kernel);

  const int t = static_cast<int>(y.size());
  const int l = 2 * t;
  constexpr double tau = 1e-12;
  Vector a = Vector::Zero(l);
  Vector g(l);
  std::vector<signed char> s(l);
  for (int i = 0; i < t; ++i) {
    s[i] = 1;
    s[i + t] = -1;
    g(i) = epsilon - y(i);
    g(i + t) = epsilon + y(i);
  }
  auto kk = [&](int i, int j) { return k(i % t, j % t); };
  auto upper = [&](int i) { return a(i) >= C; };
  auto lower = [&](int i) { return a(i) <= 0.0; };

  long iter = 0;
  double gap = 0.0;
  for (;; ++iter) {
    double gmax = -std::numeric_limits<double>::infinity();
    int i = -1;
    for (int q = 0; q < l; ++q) {
      if (s[q] == 1) {
        if (!upper(q) && -g(q) >= gmax) gmax = -g(q), i = q;
      } else if (!lower(q) && g(q) >= gmax) {
        gmax = g(q), i = q;
      }
    }
    double gmax2 = -std::numeric_limits<double>::infinity();
    int j = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int q = 0; q < l && i >= 0; ++q) {
      double diff, quad;
      if (s[q] == 1) {
        if (lower(q)) continue;
        diff = gmax + g(q);
        gmax2 = std::max(gmax2, g(q));
      } else {
        if (upper(q)) continue;
        diff = gmax - g(q);
        gmax2 = std::max(gmax2, -g(q));
      }
      if (diff > 0) {
        quad = kk(i, i) + kk(q, q) - 2.0 * kk(i, q);
        const double obj = -diff * diff / (quad > 0 ? quad : tau);
        if (obj <= best) best = obj, j = q;
      }
    }
    gap = (i < 0) ? 0.0 : gmax + gmax2;
    if (i < 0 || j < 0 || gap < ctl.tol) break;
    if (iter >= ctl.max_iter)
      throw ConvergenceError("SVR solver hit the iteration cap with KKT violation " + std::to_string(gap),
                             std::vector<double>(a.data(), a.data() + l), gap);

    const double qij = s[i] * s[j] * kk(i, j);
    const double ai = a(i), aj = a(j);
    if (s[i] != s[j]) {
      double quad = kk(i, i) + kk(j, j) + 2.0 * qij;
      if (quad <= 0) quad = tau;
      const double delta = (-g(i) - g(j)) / quad;
      const double diff = a(i) - a(j);
      a(i) += delta;
      a(j) += delta;
      if (diff > 0) {
        if (a(j) < 0) a(j) = 0, a(i) = diff;
      } else if (a(i) < 0) {
        a(i) = 0, a(j) = -diff;
      }
      if (diff > 0) {
        if (a(i) > C) a(i) = C, a(j) = C - diff;
      } else if (a(j) > C) {
        a(j) = C, a(i) = C + diff;
      }
    } else {
      double quad = kk(i, i) + kk(j, j) - 2.0 * qij;
      if (quad <= 0) quad = tau;
      const double delta = (g(i) - g(j)) / quad;
      const double sum = a(i) + a(j);
      a(i) -= delta;
      a(j) += delta;
      if (sum > C) {
        if (a(i) > C) a(i) = C, a(j) = sum - C;
      } else if (a(j) < 0) {
        a(j) = 0, a(i) = sum;
      }
      if (sum > C) {
        if (a(j) > C) a(j) = C, a(i) = sum - C;
      } else if (a(i) < 0) {
        a(i) = 0, a(j) = sum;
      }
    }
    const double di = a(i) - ai, dj = a(j) - aj;
    for (int q = 0; q < l; ++q) g(q) += s[q] * (s[i] * kk(i, q) * di + s[j] * kk(j, q) * dj);
  }

  double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0.0;
  int n_free = 0;
  for (int q = 0; q < l; ++q) {
    const double yg = s[q] * g(q);
    if (upper(q)) {
      if (s[q] == -1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (lower(q)) {
      if (s[q] == 1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / n_free : 0.5 * (ub + lb);

  f.alpha = a;
  f.intercept = -rho;
  f.iterations = iter;
  f.kkt_gap = gap;
  f.n_free = n_free;
  f.objective = svr_dual_objective(k, y, epsilon, a);
  std::vector<int> sv;
  for (int q = 0; q < t; ++q)
    if (a(q) - a(q + t) != 0.0) sv.push_back(q);
  f.support.resize(static_cast<Eigen::Index>(sv.size()), zt.cols());
  f.coef.resize(static_cast<Eigen::Index>(sv.size()));
  for (std::size_t r = 0; r < sv.size(); ++r) {
    f.support.row(static_cast<Eigen::Index>(r)) = zt.row(sv[r]);
    f.coef(static_cast<Eigen::Index>(r)) = a(sv[r]) - a(sv[r] + t);
  }
  return f;
}

}  // namespace macroml
