#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "macroml/common/year_month.hpp"
#include "macroml/models/fitted_model.hpp"
#include "macroml/tuning/grid.hpp"

namespace macroml {

/// Design for one estimation problem. `y` holds the direct-forecast target of
/// each row, NaN where it is not yet observed at the information cutoff.
struct Problem {
  std::vector<YearMonth> row_dates;  // forecast origins
  Matrix z;
  Vector y;
  std::vector<std::string> column_names;

  /// Leading rows whose target is known.
  int known_rows() const;
  std::optional<int> row_of(YearMonth d) const;
};

/// Supplies designs for a fixed (variable, horizon). Every design shares the
/// same first row so that criteria compare equal samples.
class DesignProvider {
 public:
  virtual ~DesignProvider() = default;
  /// Rows first_row()..last_row built from information dated <= cutoff
  /// (rows after the cutoff use cutoff-dated loadings and statistics).
  virtual Problem build(const HyperPoint& design, YearMonth cutoff, YearMonth last_row) const = 0;
  virtual int horizon() const = 0;
};

enum class Criterion { AIC, BIC };

/// T ln(SSR/T) + 2k (AIC) or + k ln T (BIC), k counting the intercept.
/// Throws UnsupportedError for non-least-squares fits, ArgumentError when k = 0.
double score_ic(const FittedModel& fit, Criterion c);

struct ScoreRow {
  HyperPoint point;
  double score = kMissing;  // +inf when the point failed to fit
};

struct TuneDecision {
  HyperPoint chosen;
  std::vector<ScoreRow> score_table;
  YearMonth decided_at;
  YearMonth frozen_until;
  Tuner method = Tuner::BIC;
};

struct TuningOptions {
  int kfold = 5;
  double poos_share = 0.25;
  int poos_step = 12;
  int min_train = 120;
  int refresh_months = 24;
};

struct TuneContext {
  const ModelSpec* spec = nullptr;
  const DesignProvider* provider = nullptr;
  Grid grid;
  FitSettings settings;
  TuningOptions options;
  YearMonth cutoff;        // tuning information date
  std::uint64_t seed = 0;  // K-fold partition and forest seeds
};

/// Picks the lowest score; ties go to fewer columns, then the smaller ladder
/// index, then the earlier design point.
TuneDecision select_best(std::vector<ScoreRow> rows, YearMonth decided_at, int refresh_months, Tuner method);

TuneDecision tune_ic(const TuneContext& ctx, Criterion c);

/// Validation over the last poos_share of the known rows, re-estimating at
/// every poos_step-row block with information up to the block origin.
/// Throws ArgumentError when fewer than min_train rows are known or the
/// validation span is shorter than h + poos_step.
TuneDecision poos_cv(const TuneContext& ctx);

/// Random partition of the known rows into k folds (fixed by ctx.seed).
/// Throws ArgumentError for k < 2 or fewer than 5k rows.
TuneDecision kfold_cv(const TuneContext& ctx);

/// Fold index of each of n rows.
std::vector<int> kfold_assignment(int n, int k, std::uint64_t seed);

/// Dispatches on ctx.spec->tuner.
TuneDecision tune(const TuneContext& ctx);

/// Mean squared validation error of each ladder point for one split.
std::vector<double> score_ladder(const ModelSpec& spec, const std::vector<HyperPoint>& ladder, const Matrix& z_train,
                                 const Vector& y_train, const Matrix& z_val, const Vector& y_val,
                                 const FitSettings& settings, std::uint64_t seed);

enum class RefreshAction { Reuse, Retune };

/// Retune iff the newest decision is at least refresh_months old (or none exists).
RefreshAction refresh_schedule(const std::vector<TuneDecision>& history, YearMonth now, int refresh_months = 24);

}  // namespace macroml
