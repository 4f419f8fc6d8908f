#include "macroml/data/factors.hpp"

#include <Eigen/SVD>

#include "macroml/common/error.hpp"

namespace macroml {

Standardization Standardization::identity(Eigen::Index cols) {
  Standardization s;
  s.mean = Vector::Zero(cols);
  s.scale = Vector::Ones(cols);
  return s;
}

Standardization Standardization::fit(const Matrix& x, bool center, bool scale) {
  Standardization s;
  const Eigen::Index n = x.rows();
  s.mean = center ? Vector(x.colwise().mean().transpose()) : Vector::Zero(x.cols());
  s.scale = Vector::Ones(x.cols());
  if (scale && n > 1) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const double m = x.col(j).mean();
      const double var = (x.col(j).array() - m).square().sum() / static_cast<double>(n - 1);
      const double sd = std::sqrt(var);
      if (sd > 1e-12 * (1.0 + std::abs(m))) s.scale(j) = sd;
    }
  }
  return s;
}

Matrix Standardization::apply(const Matrix& x) const {
  return (x.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

RowVector Standardization::apply(const RowVector& row) const {
  return (row - mean.transpose()).array() / scale.transpose().array();
}

FactorSet extract_factors(const Matrix& x_std, int k) {
  const Eigen::Index t = x_std.rows(), n = x_std.cols();
  const Eigen::Index r = std::min(t, n);
  if (k < 0 || k > r)
    throw ArgumentError("requested " + std::to_string(k) + " factors from a " + std::to_string(t) + "x" +
                        std::to_string(n) + " panel");
  Eigen::BDCSVD<Matrix> svd(x_std, Eigen::ComputeThinU | Eigen::ComputeThinV);
  FactorSet fs;
  fs.k = k;
  fs.eigenvalues = svd.singularValues().array().square() / static_cast<double>(t);
  fs.loadings = svd.matrixV().leftCols(k);
  for (int j = 0; j < k; ++j) {
    Eigen::Index arg = 0;
    fs.loadings.col(j).cwiseAbs().maxCoeff(&arg);
    if (fs.loadings(arg, j) < 0) fs.loadings.col(j) *= -1.0;
  }
  fs.factors = x_std * fs.loadings;
  return fs;
}

}  // namespace macroml
