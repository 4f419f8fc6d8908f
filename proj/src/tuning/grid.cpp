#include "macroml/tuning/grid.hpp"

#include <algorithm>
#include <cmath>

#include "macroml/common/error.hpp"

namespace macroml {

std::vector<double> log_space(double lo, double hi, int n) {
  if (n == 1) return {lo};
  std::vector<double> v(n);
  const double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i < n; ++i) v[i] = std::pow(10.0, a + (b - a) * i / (n - 1));
  return v;
}

std::vector<double> lin_space(double lo, double hi, int n) {
  if (n == 1) return {lo};
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

Ladders Ladders::defaults() {
  Ladders l;
  l.lambda = log_space(1e-4, 10.0, 10);
  l.alpha = lin_space(0.05, 0.95, 10);
  l.sigma = log_space(0.25, 8.0, 10);
  l.cost = log_space(1e-2, 1e2, 10);
  l.epsilon = log_space(1e-3, 1.0, 10);
  return l;
}

int Grid::max_lag() const {
  int m = 0;
  for (int p : p_y) m = std::max(m, p);
  for (int p : p_f) m = std::max(m, p);
  return m;
}

std::vector<HyperPoint> design_points(const ModelSpec& spec, const Grid& grid) {
  std::vector<HyperPoint> out;
  if (grid.p_y.empty()) throw ArgumentError("empty p_y grid");
  if (!spec.data_rich) {
    for (int py : grid.p_y) out.push_back(HyperPoint{.p_y = py});
    return out;
  }
  if (grid.p_f.empty()) throw ArgumentError("empty p_f grid");
  if (spec.uses_factors()) {
    if (grid.n_factors.empty()) throw ArgumentError("empty factor-count grid");
    for (int py : grid.p_y)
      for (int pf : grid.p_f)
        for (int k : grid.n_factors) out.push_back(HyperPoint{.p_y = py, .p_f = pf, .n_factors = k});
    return out;
  }
  for (int py : grid.p_y)
    for (int pf : grid.p_f) out.push_back(HyperPoint{.p_y = py, .p_f = pf});
  return out;
}

std::vector<HyperPoint> ladder_points(const ModelSpec& spec, const Ladders& l) {
  std::vector<HyperPoint> out;
  auto need = [&](const std::vector<double>& v, const char* what) {
    if (v.empty()) throw ArgumentError(spec.name + ": empty " + what + " ladder");
  };
  switch (spec.estimator) {
    case Estimator::Ols:
    case Estimator::Forest:
      out.emplace_back();
      break;
    case Estimator::Ridge:
      need(l.lambda, "lambda");
      for (double lam : l.lambda) out.push_back(HyperPoint{.lambda = lam});
      break;
    case Estimator::ElasticNet: {
      need(l.lambda, "lambda");
      const std::vector<double> alphas = spec.fixed_alpha ? std::vector<double>{*spec.fixed_alpha} : l.alpha;
      need(alphas, "alpha");
      for (double lam : l.lambda)
        for (double a : alphas) out.push_back(HyperPoint{.lambda = lam, .alpha = a});
      break;
    }
    case Estimator::Krr:
      need(l.lambda, "lambda");
      need(l.sigma, "sigma");
      for (double lam : l.lambda)
        for (double s : l.sigma) out.push_back(HyperPoint{.lambda = lam, .sigma = s});
      break;
    case Estimator::Svr: {
      need(l.cost, "C");
      need(l.epsilon, "epsilon");
      const std::vector<double> sig = spec.kernel == KernelType::Rbf ? l.sigma : std::vector<double>{kMissing};
      need(sig, "sigma");
      for (auto it = l.cost.rbegin(); it != l.cost.rend(); ++it)
        for (double e : l.epsilon)
          for (double s : sig) out.push_back(HyperPoint{.sigma = s, .cost = *it, .epsilon = e});
      break;
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i].ladder_index = static_cast<int>(i);
  return out;
}

HyperPoint combine(const HyperPoint& design, const HyperPoint& ladder) {
  HyperPoint p = ladder;
  p.p_y = design.p_y;
  p.p_f = design.p_f;
  p.n_factors = design.n_factors;
  p.n_columns = design.n_columns;
  return p;
}

}  // namespace macroml
