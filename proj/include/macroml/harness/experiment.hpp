#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "macroml/data/predictors.hpp"
#include "macroml/data/raw_panel.hpp"
#include "macroml/data/transforms.hpp"
#include "macroml/harness/config.hpp"
#include "macroml/harness/store.hpp"
#include "macroml/tuning/tuner.hpp"

namespace macroml {

/// Designs for one (variable, horizon, model) drawn from a transformed panel.
/// Rows start at window_start + grid.max_lag() for every design point.
class PanelDesignProvider : public DesignProvider {
 public:
  PanelDesignProvider(std::shared_ptr<const TransformedPanel> panel, std::vector<double> stationary,
                      TargetSeries target, const ModelSpec& spec, const Grid& grid, YearMonth window_start);

  Problem build(const HyperPoint& design, YearMonth cutoff, YearMonth last_row) const override;
  int horizon() const override { return target_.h; }
  YearMonth first_row() const { return first_row_; }
  /// Target dated `date` (NaN outside the sample).
  double target_at(YearMonth date) const;

 private:
  std::shared_ptr<const TransformedPanel> panel_;
  std::vector<double> stationary_;
  TargetSeries target_;
  const ModelSpec* spec_;
  int max_factors_;
  YearMonth window_start_;
  YearMonth first_row_;
};

/// Panel-level inputs shared by all work items.
struct PreparedPanel {
  RawPanel raw;
  std::shared_ptr<const TransformedPanel> transformed;
  YearMonth window_start;  // first row where every transform is defined

  static PreparedPanel from(const RawPanel& raw);
  PanelDesignProvider provider(const VariableSpec& v, int h, double scale, const ModelSpec& spec,
                               const Grid& grid) const;
};

struct RunOptions {
  int jobs = 1;
  const ForecastStore* resume = nullptr;
  int audit_records = 100;
};

struct RunResult {
  ForecastStore store;  // resumed records plus everything computed in this run
  std::map<std::string, int> failures;  // per model
  std::map<std::string, int> attempts;  // per model
  int items_total = 0;
  int items_skipped = 0;  // already complete in the resumed store
  int new_records = 0;
  int audits_passed = 0;
  int audits_failed = 0;
  std::vector<std::string> warnings;
  double seconds = 0.0;
};

/// Expanding-window pseudo-out-of-sample run. Work items are
/// (variable, horizon, model, refresh block); hyperparameters are tuned at the
/// first origin of each block and frozen for the block while coefficients are
/// re-estimated at every origin. Results do not depend on opts.jobs.
RunResult run_experiment(const ExperimentConfig& config, const RawPanel& panel, const RunOptions& opts = {});

/// Forecast origins oos_start - h .. oos_end - h.
std::vector<YearMonth> forecast_origins(const ExperimentConfig& config, int h);

}  // namespace macroml
