#include "macroml/models/krr.hpp"

#include <Eigen/Eigenvalues>

#include "macroml/common/error.hpp"

namespace macroml {

Vector KrrFit::predict(const Matrix& z) const {
  return (gram(pre.transform(z), z_train, kernel) * alpha).array() + pre.y_offset;
}

KrrFit fit_krr(const Matrix& z, const Vector& y, double lambda, const Kernel& kernel, const FitOptions& opts) {
  if (!(lambda > 0.0)) throw ArgumentError("kernel ridge needs a positive penalty");
  if (z.rows() != y.size() || !y.allFinite() || !z.allFinite()) throw ArgumentError("invalid kernel ridge inputs");
  KrrFit f;
  f.pre = Preprocess::fit(z, y, opts);
  f.kernel = kernel;
  f.lambda = lambda;
  f.z_train = f.pre.transform(z);
  const Vector yt = y.array() - f.pre.y_offset;
  Matrix k = gram(f.z_train, f.z_train, kernel);
  const Matrix k0 = k;
  k.diagonal().array() += lambda;
  f.alpha = k.ldlt().solve(yt);
  f.ssr = (yt - k0 * f.alpha).squaredNorm();
  f.n_obs = static_cast<int>(z.rows());
  return f;
}

Matrix krr_path_predict(const Matrix& z, const Vector& y, const Matrix& z_new, const Kernel& kernel,
                        const std::vector<double>& lambdas, const FitOptions& opts) {
  const Preprocess pre = Preprocess::fit(z, y, opts);
  const Matrix zt = pre.transform(z);
  const Vector yt = y.array() - pre.y_offset;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram(zt, zt, kernel));
  const Vector qty = eig.eigenvectors().transpose() * yt;
  const Matrix kq = gram(pre.transform(z_new), zt, kernel) * eig.eigenvectors();
  Matrix out(z_new.rows(), static_cast<Eigen::Index>(lambdas.size()));
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    if (!(lambdas[l] > 0.0)) throw ArgumentError("kernel ridge needs a positive penalty");
    const Vector w = qty.array() / (eig.eigenvalues().array().max(0.0) + lambdas[l]);
    out.col(static_cast<Eigen::Index>(l)) = (kq * w).array() + pre.y_offset;
  }
  return out;
}

}  // namespace macroml
