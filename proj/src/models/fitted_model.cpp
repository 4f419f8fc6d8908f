#include "macroml/models/fitted_model.hpp"

#include <cstdio>

#include "macroml/common/error.hpp"

namespace macroml {

std::string HyperPoint::label() const {
  std::string s = "p_y=" + std::to_string(p_y) + ";p_f=" + std::to_string(p_f) + ";K=" + std::to_string(n_factors);
  auto add = [&](const char* key, double v) {
    if (is_missing(v)) return;
    char buf[64];
    std::snprintf(buf, sizeof buf, ";%s=%.6g", key, v);
    s += buf;
  };
  add("lambda", lambda);
  add("alpha", alpha);
  add("sigma", sigma);
  add("C", cost);
  add("eps", epsilon);
  return s;
}

ResolvedHyper resolve_hyper(const ModelSpec& spec, const HyperPoint& p, Eigen::Index n_rows, Eigen::Index n_cols,
                            const Vector& y) {
  ResolvedHyper r;
  double sd = 1.0;
  if (y.size() > 1) {
    const double v = (y.array() - y.mean()).square().sum() / static_cast<double>(y.size() - 1);
    if (v > 0) sd = std::sqrt(v);
  }
  auto need = [&](double v, const char* what) {
    if (is_missing(v)) throw ArgumentError(spec.name + " grid point lacks " + what);
    return v;
  };
  switch (spec.estimator) {
    case Estimator::Ols:
    case Estimator::Forest:
      break;
    case Estimator::Ridge:
      r.lambda = need(p.lambda, "lambda") * static_cast<double>(n_rows);
      break;
    case Estimator::ElasticNet:
      r.lambda = need(p.lambda, "lambda") * static_cast<double>(n_rows);
      r.alpha = spec.fixed_alpha ? *spec.fixed_alpha : need(p.alpha, "alpha");
      break;
    case Estimator::Krr:
      r.lambda = need(p.lambda, "lambda") * static_cast<double>(n_rows);
      r.sigma = need(p.sigma, "sigma") * std::sqrt(static_cast<double>(n_cols));
      break;
    case Estimator::Svr:
      r.cost = need(p.cost, "C") * sd;
      r.epsilon = need(p.epsilon, "epsilon") * sd;
      if (spec.kernel == KernelType::Rbf) r.sigma = need(p.sigma, "sigma") * std::sqrt(static_cast<double>(n_cols));
      break;
  }
  return r;
}

FittedModel fit_model(const ModelSpec& spec, const HyperPoint& point, const Matrix& z, const Vector& y,
                      const FitSettings& settings, std::uint64_t seed, bool tuning) {
  FittedModel m;
  m.hyper = point;
  m.hyper.n_columns = static_cast<int>(z.cols());
  m.seed = seed;
  m.resolved = resolve_hyper(spec, point, z.rows(), z.cols(), y);
  const auto& r = m.resolved;
  switch (spec.estimator) {
    case Estimator::Ols:
      m.fit = fit_ols(z, y, FitOptions{true, false});
      break;
    case Estimator::Ridge:
      m.fit = fit_ridge(z, y, r.lambda, RidgeMode::Primal, settings.linear);
      break;
    case Estimator::ElasticNet:
      m.fit = fit_elastic_net(z, y, r.lambda, r.alpha, settings.linear, settings.enet);
      break;
    case Estimator::Krr:
      m.fit = fit_krr(z, y, r.lambda, Kernel{KernelType::Rbf, r.sigma}, settings.linear);
      break;
    case Estimator::Forest: {
      ForestOptions fo = settings.forest;
      fo.seed = seed;
      if (tuning && settings.cv_trees > 0) fo.n_trees = settings.cv_trees;
      m.fit = fit_random_forest(z, y, fo);
      break;
    }
    case Estimator::Svr:
      m.fit = fit_svr(z, y, Kernel{spec.kernel, is_missing(r.sigma) ? 1.0 : r.sigma}, r.cost, r.epsilon,
                      settings.linear, settings.svr);
      break;
  }
  return m;
}

Vector FittedModel::predict(const Matrix& z) const {
  return std::visit([&](const auto& f) -> Vector { return f.predict(z); }, fit);
}

int FittedModel::n_obs() const {
  return std::visit([](const auto& f) { return f.n_obs; }, fit);
}

double FittedModel::ssr() const {
  if (const auto* l = std::get_if<LinearFit>(&fit)) return l->ssr;
  if (const auto* k = std::get_if<KrrFit>(&fit)) return k->ssr;
  return kMissing;
}

int FittedModel::n_params() const {
  if (const auto* l = std::get_if<LinearFit>(&fit)) return l->n_params;
  return 0;
}

bool FittedModel::is_ols() const {
  const auto* l = std::get_if<LinearFit>(&fit);
  return l && l->is_ols;
}

}  // namespace macroml
