#pragma once

#include "macroml/common/linalg.hpp"

namespace macroml {

/// Column centring/scaling captured on a training sample and replayed on new rows.
struct Standardization {
  Vector mean;   // empty when centring is off
  Vector scale;  // empty when scaling is off

  static Standardization identity(Eigen::Index cols);
  /// Sample mean and standard deviation (n-1). Constant columns keep scale 1.
  static Standardization fit(const Matrix& x, bool center = true, bool scale = true);

  Matrix apply(const Matrix& x) const;
  RowVector apply(const RowVector& row) const;
};

/// Principal components of a standardised panel: X = F Λ' (+ residual when K < rank).
struct FactorSet {
  Matrix factors;      // T x K, F = X Λ
  Matrix loadings;     // N x K, orthonormal columns
  Vector eigenvalues;  // all min(T,N) eigenvalues of X'X/T, descending
  int k = 0;

  /// Factor scores for rows standardised with the same statistics.
  Matrix project(const Matrix& x_std) const { return x_std * loadings; }
  double variance_share(int j) const { return eigenvalues(j) / eigenvalues.sum(); }
};

/// First K principal components via thin SVD. Loadings are sign-normalised so the
/// largest-magnitude entry of each column is positive.
/// Throws ArgumentError if K > min(T, N) or K < 0.
FactorSet extract_factors(const Matrix& x_std, int k);

}  // namespace macroml
