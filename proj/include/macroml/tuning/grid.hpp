#pragma once

#include <vector>

#include "macroml/models/fitted_model.hpp"
#include "macroml/models/model_spec.hpp"

namespace macroml {

/// Relative ladders for continuous hyperparameters (see HyperPoint).
struct Ladders {
  std::vector<double> lambda;
  std::vector<double> alpha;
  std::vector<double> sigma;
  std::vector<double> cost;
  std::vector<double> epsilon;

  static Ladders defaults();
};

struct Grid {
  std::vector<int> p_y{1, 3, 6, 12};
  std::vector<int> p_f{1, 3, 6, 12};
  std::vector<int> n_factors{3, 6, 10};
  Ladders ladders = Ladders::defaults();

  int max_lag() const;
};

std::vector<double> log_space(double lo, double hi, int n);
std::vector<double> lin_space(double lo, double hi, int n);

/// Lag/factor combinations searched for `spec` (full cartesian product).
std::vector<HyperPoint> design_points(const ModelSpec& spec, const Grid& grid);

/// Continuous-parameter combinations for `spec`, with ladder_index set in
/// enumeration order (penalty ascending as the slowest-moving coordinate).
std::vector<HyperPoint> ladder_points(const ModelSpec& spec, const Ladders& ladders);

/// Design point combined with a ladder point.
HyperPoint combine(const HyperPoint& design, const HyperPoint& ladder);

}  // namespace macroml
