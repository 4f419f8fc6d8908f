#include "macroml/eval/regression.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "macroml/common/csv.hpp"
#include "macroml/common/error.hpp"
#include "macroml/eval/hac.hpp"

namespace macroml {
namespace {

struct GroupKey {
  YearMonth t;
  std::string variable;
  int h;
  auto operator<=>(const GroupKey&) const = default;
};

GroupKey group_of(const RecordKey& k) { return {k.t, k.variable, k.h}; }

std::string fmt(double x) { return std::isfinite(x) ? csv::format_double(x) : "NA"; }

}  // namespace

std::string to_string(Feature f) {
  switch (f) {
    case Feature::NL: return "NL";
    case Feature::SH: return "SH";
    case Feature::CV: return "CV";
    case Feature::LF: return "LF";
    case Feature::X: return "X";
  }
  return "?";
}

Feature parse_feature(const std::string& text) {
  for (auto f : {Feature::NL, Feature::SH, Feature::CV, Feature::LF, Feature::X})
    if (to_string(f) == text) return f;
  throw ArgumentError("unknown feature '" + text + "' (NL, SH, CV, LF, X)");
}

FeatureDummies FeatureDummies::from_roster() {
  FeatureDummies d;
  d.tags_ = std::make_shared<std::map<std::string, FeatureTags>>();
  for (const auto& m : model_roster()) (*d.tags_)[m.name] = m.tags;
  return d;
}

const FeatureTags& FeatureDummies::tags(const std::string& model) const {
  const auto it = tags_->find(model);
  if (it == tags_->end()) throw ArgumentError("no feature coding for model '" + model + "'");
  return it->second;
}

std::vector<Regressor> FeatureDummies::regressors(Feature f, const std::vector<std::string>& models) const {
  for (const auto& m : models) this->tags(m);
  // regressors keep the coding alive after this object goes away
  auto tags = [map = tags_](const std::string& model) -> const FeatureTags& { return map->at(model); };
  auto binary = [tags](const std::string& name, bool FeatureTags::*field) {
    return Regressor{name, [tags, field](const RecordKey& k) { return tags(k.model).*field ? 1.0 : 0.0; }};
  };
  auto categorical = [&](const std::string& prefix, std::string FeatureTags::*field, std::vector<std::string> base) {
    std::set<std::string> levels;
    for (const auto& m : models) levels.insert(this->tags(m).*field);
    std::string baseline = *levels.begin();
    for (const auto& b : base)
      if (levels.count(b)) {
        baseline = b;
        break;
      }
    std::vector<Regressor> out;
    for (const auto& level : levels)
      if (level != baseline)
        out.push_back({prefix + "=" + level,
                       [tags, field, level](const RecordKey& k) { return tags(k.model).*field == level ? 1.0 : 0.0; }});
    return out;
  };
  switch (f) {
    case Feature::NL: return {binary("NL", &FeatureTags::nl)};
    case Feature::LF: return {binary("LF", &FeatureTags::lf)};
    case Feature::X: return {binary("X", &FeatureTags::x)};
    case Feature::SH: return categorical("SH", &FeatureTags::sh, {"PCA", "None"});
    case Feature::CV: return categorical("CV", &FeatureTags::cv, {"BIC"});
  }
  return {};
}

int EvalRegressionResult::index(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  throw ArgumentError("regression has no term '" + name + "'");
}

void EvalRegressionResult::write_csv(std::ostream& out) const {
  csv::write_record(out, {"term", "coefficient", "std_error", "t_stat", "p_value", "stars", "n_obs", "n_groups",
                          "n_dates", "r2_within", "bandwidth", "degenerate", "dropped_rows"});
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto j = static_cast<Eigen::Index>(i);
    const bool finite_p = std::isfinite(p(j));
    csv::write_record(out, {names[i], fmt(coef(j)), fmt(se(j)), fmt(t(j)), fmt(p(j)),
                            finite_p ? std::string(p(j) < 0.01 ? "***" : p(j) < 0.05 ? "**" : p(j) < 0.1 ? "*" : "") : "",
                            std::to_string(n_obs), std::to_string(n_groups), std::to_string(n_dates), fmt(r2),
                            std::to_string(bandwidth), degenerate ? "1" : "0",
                            std::to_string(dropped_rows + dropped_singletons)});
  }
}

Matrix demean_within(const std::vector<RecordKey>& keys, const Matrix& m) {
  if (static_cast<Eigen::Index>(keys.size()) != m.rows()) throw ArgumentError("demean: keys misaligned");
  std::map<GroupKey, std::pair<RowVector, int>> sums;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    auto [it, fresh] = sums.try_emplace(group_of(keys[i]), RowVector::Zero(m.cols()), 0);
    it->second.first += m.row(static_cast<Eigen::Index>(i));
    ++it->second.second;
  }
  Matrix out = m;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto& [s, n] = sums.at(group_of(keys[i]));
    out.row(static_cast<Eigen::Index>(i)) -= s / n;
  }
  return out;
}

EvalRegressionResult fe_regression(const ValuePanel& panel, const std::vector<std::string>& models,
                                   const std::vector<Regressor>& regressors, const FeRegressionOptions& opts) {
  if (regressors.empty()) throw ArgumentError("regression needs at least one regressor");
  const std::set<std::string> wanted(models.begin(), models.end());
  EvalRegressionResult res;
  const auto k = static_cast<Eigen::Index>(regressors.size());

  std::vector<RecordKey> keys;
  std::vector<std::vector<double>> rows;
  for (const auto& [key, v] : panel) {
    if (!wanted.count(key.model) || !std::isfinite(v)) continue;
    std::vector<double> row{v};
    bool ok = true;
    for (const auto& r : regressors) {
      row.push_back(r.value(key));
      ok = ok && std::isfinite(row.back());
    }
    if (!ok) {
      ++res.dropped_rows;
      continue;
    }
    keys.push_back(key);
    rows.push_back(std::move(row));
  }
  std::map<GroupKey, int> counts;
  for (const auto& key : keys) ++counts[group_of(key)];
  std::vector<RecordKey> kept_keys;
  std::vector<int> date_ids;
  Matrix data(0, k + 1);
  {
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (counts[group_of(keys[i])] < 2) ++res.dropped_singletons;
      else kept.push_back(i);
    }
    data.resize(static_cast<Eigen::Index>(kept.size()), k + 1);
    for (std::size_t r = 0; r < kept.size(); ++r) {
      for (Eigen::Index c = 0; c <= k; ++c) data(static_cast<Eigen::Index>(r), c) = rows[kept[r]][c];
      kept_keys.push_back(keys[kept[r]]);
    }
  }
  res.n_obs = static_cast<int>(kept_keys.size());
  std::set<GroupKey> groups;
  for (const auto& key : kept_keys) groups.insert(group_of(key));
  res.n_groups = static_cast<int>(groups.size());
  if (res.n_obs == 0) throw ArgumentError("regression has no usable observations (need groups with at least two models)");
  // keys arrive in (t, h, variable, model) order, so dates are contiguous
  for (const auto& key : kept_keys) {
    if (date_ids.empty() || key.t != kept_keys[date_ids.size() - 1].t) date_ids.push_back(date_ids.empty() ? 0 : date_ids.back() + 1);
    else date_ids.push_back(date_ids.back());
  }
  res.n_dates = date_ids.back() + 1;
  res.bandwidth = opts.bandwidth.value_or(newey_west_bandwidth(res.n_dates));

  const Matrix demeaned = demean_within(kept_keys, data);
  const Vector y = demeaned.col(0);
  std::vector<Eigen::Index> active;
  for (Eigen::Index c = 0; c < k; ++c) {
    const double scale = std::max(1.0, data.col(c + 1).norm());
    if (demeaned.col(c + 1).norm() <= 1e-12 * scale) {
      if (!opts.allow_zero_columns)
        throw CollinearityError("regressor '" + regressors[c].name +
                                    "' has no variation within (t, variable, h) groups",
                                {regressors[c].name});
      res.unidentified.push_back(regressors[c].name);
    } else {
      active.push_back(c);
    }
  }
  Matrix x(demeaned.rows(), static_cast<Eigen::Index>(active.size()));
  for (std::size_t j = 0; j < active.size(); ++j) x.col(static_cast<Eigen::Index>(j)) = demeaned.col(active[j] + 1);

  res.names.clear();
  for (const auto& r : regressors) res.names.push_back(r.name);
  res.coef = Vector::Zero(k);
  res.cov = Matrix::Zero(k, k);
  if (!active.empty()) {
    Eigen::ColPivHouseholderQR<Matrix> qr(x);
    qr.setThreshold(1e-10);
    if (qr.rank() < x.cols()) {
      std::vector<std::string> redundant;
      std::string list;
      for (Eigen::Index j = qr.rank(); j < x.cols(); ++j) {
        redundant.push_back(regressors[active[qr.colsPermutation().indices()(j)]].name);
        list += (list.empty() ? "" : ", ") + redundant.back();
      }
      throw CollinearityError("collinear regressors after removing fixed effects: " + list, redundant);
    }
    const auto fit = ols_hac(x, y, res.bandwidth, &date_ids);
    const double sst = y.squaredNorm();
    const double ssr = fit.residuals.squaredNorm();
    res.r2 = sst > 0 ? 1.0 - ssr / sst : 0.0;
    res.degenerate = ssr <= 1e-18 * std::max(sst, 1e-300) || ssr == 0.0;
    for (std::size_t a = 0; a < active.size(); ++a) {
      res.coef(active[a]) = fit.beta(static_cast<Eigen::Index>(a));
      for (std::size_t b = 0; b < active.size(); ++b)
        res.cov(active[a], active[b]) = res.degenerate ? 0.0 : fit.cov(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }
  }
  res.se = res.cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  res.t = Vector::Constant(k, kMissing);
  res.p = Vector::Constant(k, kMissing);
  for (Eigen::Index c = 0; c < k; ++c)
    if (res.se(c) > 0) {
      res.t(c) = res.coef(c) / res.se(c);
      res.p(c) = std::erfc(std::abs(res.t(c)) / std::sqrt(2.0));
    }
  for (const auto& name : res.unidentified) res.se(res.index(name)) = kMissing;
  return res;
}

EvalRegressionResult treatment_regression(const ValuePanel& panel, const std::vector<std::string>& models,
                                          const std::vector<Feature>& features, const FeatureDummies& dummies,
                                          const std::vector<Regressor>& extra, const FeRegressionOptions& opts) {
  std::vector<Regressor> regs;
  for (auto f : features) {
    auto r = dummies.regressors(f, models);
    regs.insert(regs.end(), r.begin(), r.end());
  }
  regs.insert(regs.end(), extra.begin(), extra.end());
  return fe_regression(panel, models, regs, opts);
}

EvalRegressionResult heterogeneity_regression(const ValuePanel& panel, const std::vector<std::string>& models,
                                              const std::map<YearMonth, double>& xi, const FeatureDummies& dummies,
                                              const FeRegressionOptions& opts) {
  auto nl = dummies.regressors(Feature::NL, models).front();
  auto lagged = [&xi](const RecordKey& k) {
    const auto it = xi.find(k.t - k.h);
    return it == xi.end() ? kMissing : it->second;
  };
  auto o = opts;
  o.allow_zero_columns = true;
  return fe_regression(panel, models, {nl, interact(nl, "NL*xi", lagged)}, o);
}

Regressor interact(const Regressor& r, const std::string& name, std::function<double(const RecordKey&)> with) {
  return {name, [base = r.value, with = std::move(with)](const RecordKey& k) { return base(k) * with(k); }};
}

std::map<YearMonth, double> standardize_series(const std::map<YearMonth, double>& xi) {
  double mean = 0.0, ss = 0.0;
  int n = 0;
  for (const auto& [t, v] : xi)
    if (std::isfinite(v)) mean += v, ++n;
  if (n < 2) throw ArgumentError("standardization needs at least two observations");
  mean /= n;
  for (const auto& [t, v] : xi)
    if (std::isfinite(v)) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1));
  if (!(sd > 0)) throw DomainError("series is constant; cannot standardize");
  std::map<YearMonth, double> out;
  for (const auto& [t, v] : xi)
    if (std::isfinite(v)) out[t] = (v - mean) / sd;
  return out;
}

}  // namespace macroml
