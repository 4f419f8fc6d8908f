#pragma once

#include <optional>
#include <string>
#include <vector>

#include "macroml/common/linalg.hpp"
#include "macroml/models/preprocess.hpp"

namespace macroml {

/// Linear predictor y = c + z'beta. `beta` lives in the preprocessed column
/// space; raw_coefficients() maps it back to the original units.
struct LinearFit {
  Preprocess pre;
  Vector beta;
  double ssr = 0.0;
  int n_obs = 0;
  int n_params = 0;     // slopes plus intercept when estimated
  bool is_ols = false;  // least-squares fit eligible for information criteria
  double kkt_violation = 0.0;
  int sweeps = 0;

  Vector predict(const Matrix& z) const;
  /// Intercept followed by slopes on the original column scale.
  Vector raw_coefficients() const;
};

/// Least squares through a column-pivoting QR.
/// Throws CollinearityError naming redundant columns (from `names` when given).
LinearFit fit_ols(const Matrix& z, const Vector& y, const FitOptions& opts = {},
                  const std::vector<std::string>* names = nullptr);

enum class RidgeMode { Primal, Dual };

/// argmin ||y - Z b||^2 + lambda ||b||^2, solved as (Z'Z + lambda I)^{-1} Z'y
/// (primal) or Z'(ZZ' + lambda I)^{-1} y (dual). lambda = 0 gives the
/// minimum-norm least-squares solution.
LinearFit fit_ridge(const Matrix& z, const Vector& y, double lambda, RidgeMode mode = RidgeMode::Primal,
                    const FitOptions& opts = {});

struct EnetControl {
  int max_sweeps = 100000;
  double tol = 1e-10;  // relative coordinate change that ends the descent
};

/// Coordinate descent on ||y - Z b||^2 + lambda * sum(alpha |b_k| + (1 - alpha) b_k^2).
/// Throws ConvergenceError carrying the last iterate and its KKT violation.
LinearFit fit_elastic_net(const Matrix& z, const Vector& y, double lambda, double alpha, const FitOptions& opts = {},
                          const EnetControl& ctl = {}, const Vector* warm_start = nullptr);

/// Largest violation of the elastic-net optimality conditions at `beta`
/// (for already-preprocessed Z and y).
double enet_kkt_violation(const Matrix& z, const Vector& y, const Vector& beta, double lambda, double alpha);

/// Predictions on z_new for every lambda in `lambdas` (columns follow input order).
Matrix ridge_path_predict(const Matrix& z, const Vector& y, const Matrix& z_new, const std::vector<double>& lambdas,
                          const FitOptions& opts = {});
Matrix enet_path_predict(const Matrix& z, const Vector& y, const Matrix& z_new, const std::vector<double>& lambdas,
                         double alpha, const FitOptions& opts = {}, const EnetControl& ctl = {});

}  // namespace macroml
