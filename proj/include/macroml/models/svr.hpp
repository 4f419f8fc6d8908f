#pragma once

#include "macroml/common/linalg.hpp"
#include "macroml/models/kernels.hpp"
#include "macroml/models/preprocess.hpp"

namespace macroml {

struct SvrControl {
  double tol = 1e-6;  // maximal KKT violation at termination
  long max_iter = 10'000'000;
};

/// epsilon-SVR. Forecast: sum_j coef_j K(z_j, z) + intercept, coef = lambda - lambda*.
struct SvrFit {
  Preprocess pre;  // predictors only; the target is left as is
  Kernel kernel;
  double C = 1.0;
  double epsilon = 0.0;
  Matrix support;  // preprocessed support vectors
  Vector coef;
  double intercept = 0.0;
  Vector alpha;       // 2T dual variables [lambda; lambda*]
  double objective = 0.0;
  double kkt_gap = 0.0;
  long iterations = 0;
  int n_obs = 0;
  int n_free = 0;

  Vector predict(const Matrix& z) const;
  int n_support() const { return static_cast<int>(coef.size()); }
};

/// Solves the dual
///   min 1/2 (a - a*)'K(a - a*) + eps sum(a + a*) - y'(a - a*)
///   s.t. sum(a - a*) = 0, 0 <= a, a* <= C
/// by SMO with second-order working-set selection. The intercept is averaged
/// over free support vectors (midpoint of the feasible interval when none are free).
/// Throws ArgumentError for C <= 0 or eps < 0, ConvergenceError on hitting max_iter.
SvrFit fit_svr(const Matrix& z, const Vector& y, const Kernel& kernel, double C, double epsilon,
               const FitOptions& opts = {.intercept = true, .standardize = true}, const SvrControl& ctl = {});

/// Dual objective of a 2T-vector [a; a*] for a precomputed Gram matrix.
double svr_dual_objective(const Matrix& k, const Vector& y, double epsilon, const Vector& alpha);

}  // namespace macroml
