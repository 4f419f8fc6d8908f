#pragma once

#include <vector>

#include "macroml/common/linalg.hpp"
#include "macroml/models/kernels.hpp"
#include "macroml/models/preprocess.hpp"

namespace macroml {

/// Kernel ridge: alpha = (K + lambda I)^{-1} (y - c), forecast c + K(z, Z) alpha.
struct KrrFit {
  Preprocess pre;
  Kernel kernel;
  double lambda = 0.0;
  Matrix z_train;  // preprocessed training rows
  Vector alpha;
  double ssr = 0.0;
  int n_obs = 0;

  Vector predict(const Matrix& z) const;
};

/// Throws ArgumentError for lambda <= 0, DomainError for non-finite kernel entries.
KrrFit fit_krr(const Matrix& z, const Vector& y, double lambda, const Kernel& kernel, const FitOptions& opts = {});

/// Predictions for every lambda from one eigendecomposition of K.
Matrix krr_path_predict(const Matrix& z, const Vector& y, const Matrix& z_new, const Kernel& kernel,
                        const std::vector<double>& lambdas, const FitOptions& opts = {});

}  // namespace macroml
