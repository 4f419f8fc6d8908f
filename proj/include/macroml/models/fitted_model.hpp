#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "macroml/models/forest.hpp"
#include "macroml/models/krr.hpp"
#include "macroml/models/linear.hpp"
#include "macroml/models/model_spec.hpp"
#include "macroml/models/svr.hpp"

namespace macroml {

/// A grid point. Design coordinates are lag orders and factor count; the
/// continuous coordinates are relative and resolved against the training data
/// at fit time (see ResolvedHyper).
struct HyperPoint {
  int p_y = 0;
  int p_f = 0;
  int n_factors = 0;
  double lambda = kMissing;   // relative: penalty = lambda * n_train
  double alpha = kMissing;    // elastic-net mixing
  double sigma = kMissing;    // relative: bandwidth = sigma * sqrt(n_cols)
  double cost = kMissing;     // relative: C = cost * sd(y)
  double epsilon = kMissing;  // relative: tube = epsilon * sd(y)
  int ladder_index = 0;       // position in the estimator ladder (ascending penalty)
  int n_columns = 0;          // design width, filled once the design is built

  bool same_design(const HyperPoint& o) const { return p_y == o.p_y && p_f == o.p_f && n_factors == o.n_factors; }
  std::string label() const;
};

/// Absolute hyperparameters for one training sample.
struct ResolvedHyper {
  double lambda = kMissing;
  double alpha = kMissing;
  double sigma = kMissing;
  double cost = kMissing;
  double epsilon = kMissing;
};

ResolvedHyper resolve_hyper(const ModelSpec& spec, const HyperPoint& p, Eigen::Index n_rows, Eigen::Index n_cols,
                            const Vector& y);

struct FitSettings {
  FitOptions linear{};            // penalised linear, KRR and SVR preprocessing
  ForestOptions forest{};         // seed is overwritten per fit
  int cv_trees = 0;               // trees used while tuning; 0 = forest.n_trees
  EnetControl enet{};
  SvrControl svr{};
};

struct FittedModel {
  std::variant<LinearFit, KrrFit, ForestFit, SvrFit> fit;
  HyperPoint hyper;
  ResolvedHyper resolved;
  std::uint64_t seed = 0;

  Vector predict(const Matrix& z) const;
  int n_obs() const;
  double ssr() const;
  int n_params() const;
  bool is_ols() const;
};

/// Fits `spec` at `point` on (z, y). Only the forest consumes `seed`.
FittedModel fit_model(const ModelSpec& spec, const HyperPoint& point, const Matrix& z, const Vector& y,
                      const FitSettings& settings, std::uint64_t seed, bool tuning = false);

}  // namespace macroml
