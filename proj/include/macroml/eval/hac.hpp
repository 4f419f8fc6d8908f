#pragma once

#include <vector>

#include "macroml/common/linalg.hpp"

namespace macroml {

/// Newey-West automatic truncation lag floor(4 (T/100)^(2/9)).
int newey_west_bandwidth(int t);

/// Bartlett-weighted long-run covariance of the rows of `moments` (T x k):
/// sum_t g_t g_t' + sum_{j=1..L} (1 - j/(L+1)) sum_t (g_t g_{t-j}' + g_{t-j} g_t').
/// Rows are used as given (no demeaning). Bandwidth 0 gives the White meat.
/// A result with negative eigenvalues is repaired by flooring them at zero.
Matrix hac_covariance(const Matrix& moments, int bandwidth, bool* repaired = nullptr);

/// Long-run variance of a scalar series around its mean, divided by T
/// (i.e. the HAC variance of the sample mean times T).
double long_run_variance(const std::vector<double>& x, int bandwidth);

struct OlsInference {
  Vector beta;
  Matrix cov;
  Vector residuals;
  Vector se() const { return cov.diagonal().cwiseMax(0.0).cwiseSqrt(); }
};

/// OLS with a sandwich covariance whose meat is hac_covariance of x_t u_t.
/// `cluster` (optional, length T) sums moments within equal consecutive keys
/// before weighting; keys must be sorted.
OlsInference ols_hac(const Matrix& x, const Vector& y, int bandwidth, const std::vector<int>* cluster = nullptr);

/// Classical homoskedastic OLS covariance s^2 (X'X)^-1.
Matrix ols_classical_cov(const Matrix& x, const Vector& residuals);

}  // namespace macroml
