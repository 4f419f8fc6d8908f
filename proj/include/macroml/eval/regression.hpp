#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "macroml/eval/tables.hpp"
#include "macroml/models/model_spec.hpp"

namespace macroml {

enum class Feature { NL, SH, CV, LF, X };
std::string to_string(Feature f);
Feature parse_feature(const std::string& text);

struct Regressor {
  std::string name;
  std::function<double(const RecordKey&)> value;  // NaN drops the row
};

/// Feature indicators per model. SH and CV are categorical; SH levels are
/// measured against PCA when present in the model set (None otherwise) and CV
/// levels against BIC.
class FeatureDummies {
 public:
  static FeatureDummies from_roster();
  const FeatureTags& tags(const std::string& model) const;
  std::vector<Regressor> regressors(Feature f, const std::vector<std::string>& models) const;

 private:
  std::shared_ptr<std::map<std::string, FeatureTags>> tags_;
};

struct EvalRegressionResult {
  std::vector<std::string> names;
  Vector coef;
  Matrix cov;
  Vector se;
  Vector t;
  Vector p;
  double r2 = 0.0;  // within
  int n_obs = 0;
  int n_groups = 0;
  int n_dates = 0;
  int bandwidth = 0;
  int dropped_singletons = 0;  // rows in single-member groups
  int dropped_rows = 0;        // rows with a missing regressor
  bool degenerate = false;     // residuals vanish; standard errors are zero
  std::vector<std::string> unidentified;  // identically zero after demeaning (reported as 0)

  int index(const std::string& name) const;
  double coefficient(const std::string& name) const { return coef(index(name)); }
  double std_error(const std::string& name) const { return se(index(name)); }
  void write_csv(std::ostream& out) const;
};

struct FeRegressionOptions {
  std::optional<int> bandwidth;  // default: Newey-West rule on the number of dates
  bool allow_zero_columns = false;
};

/// Removes (t, variable, h) group means from each column.
Matrix demean_within(const std::vector<RecordKey>& keys, const Matrix& m);

/// OLS of the panel on the regressors after removing (t, variable, h) fixed
/// effects, restricted to `models`. Standard errors are Driscoll-Kraay:
/// moments are summed within each target date, then Bartlett-weighted over
/// dates. Throws CollinearityError naming redundant regressors.
EvalRegressionResult fe_regression(const ValuePanel& panel, const std::vector<std::string>& models,
                                   const std::vector<Regressor>& regressors, const FeRegressionOptions& opts = {});

EvalRegressionResult treatment_regression(const ValuePanel& panel, const std::vector<std::string>& models,
                                          const std::vector<Feature>& features,
                                          const FeatureDummies& dummies = FeatureDummies::from_roster(),
                                          const std::vector<Regressor>& extra = {},
                                          const FeRegressionOptions& opts = {});

/// NL + NL * xi_{t-h} on models that differ only by NL. Rows whose xi value
/// is missing are dropped and counted.
EvalRegressionResult heterogeneity_regression(const ValuePanel& panel, const std::vector<std::string>& models,
                                              const std::map<YearMonth, double>& xi,
                                              const FeatureDummies& dummies = FeatureDummies::from_roster(),
                                              const FeRegressionOptions& opts = {});

/// Multiplies a regressor by a date indicator or series.
Regressor interact(const Regressor& r, const std::string& name, std::function<double(const RecordKey&)> with);

/// Standardizes a series to mean zero and unit variance.
std::map<YearMonth, double> standardize_series(const std::map<YearMonth, double>& xi);

}  // namespace macroml
