#pragma once

#include <optional>
#include <string>
#include <vector>

#include "macroml/common/linalg.hpp"
#include "macroml/common/year_month.hpp"
#include "macroml/data/factors.hpp"
#include "macroml/data/raw_panel.hpp"

namespace macroml {

/// How the data-rich block enters the regression.
///   None: own lags, plus lags of the first K factors when K > 0 (H- / ARDI H+)
///   B1:   own lags plus lags of every panel series
///   B2:   own lags plus lags of all principal components of the panel
///   B3:   all principal components of the lagged block [own lags, panel lags]
enum class Rotation { None, B1, B2, B3 };

std::string to_string(Rotation r);

struct LagSpec {
  int p_y = 0;        // own lags 0..p_y
  int p_f = 0;        // panel/factor lags 0..p_f
  int n_factors = 0;  // K, used by Rotation::None
};

/// Time-aligned inputs known at an estimation cutoff. Rows beyond the cutoff
/// (if any) are projections with cutoff-dated statistics.
struct PredictorInputs {
  std::vector<YearMonth> dates;
  Vector y_stationary;
  std::optional<Matrix> x;        // standardised panel, rows aligned to dates
  std::optional<Matrix> factors;  // principal-component scores, rows aligned to dates
};

struct PredictorSet {
  YearMonth origin;
  std::vector<YearMonth> row_dates;
  Matrix z;
  std::vector<std::string> column_names;
  std::vector<int> column_lags;  // data date of a cell = row date - lag
  int n_y_cols = 0;
  int n_factor_cols = 0;
  int n_extra_cols = 0;
  Standardization standardization;  // from rows dated <= train_last

  /// Latest observation date referenced by any cell.
  YearMonth max_data_date() const;
  std::optional<int> row_of(YearMonth date) const;
};

/// Builds the design for rows dated first_row..origin. Standardisation (and the
/// B3 rotation) use rows dated <= train_last only.
/// Throws ArgumentError when the rotation needs panel data or factors that are
/// absent, or when a lag reaches before the first input date.
PredictorSet assemble_predictors(const PredictorInputs& in, Rotation rotation, const LagSpec& lags,
                                 YearMonth first_row, YearMonth origin, YearMonth train_last);

/// Panel after per-series tcode transforms (NaN where undefined).
struct TransformedPanel {
  std::vector<YearMonth> dates;
  std::vector<std::string> names;
  Matrix x;

  static TransformedPanel from(const RawPanel& raw);
  std::optional<int> row_of(YearMonth d) const;
};

struct WindowRequest {
  YearMonth start;      // first usable row (panel start + transform losses)
  YearMonth cutoff;     // statistics and loadings use rows <= cutoff
  YearMonth extend_to;  // rows after cutoff are projected, never used for estimation
  int n_factors = 0;    // 0: none, -1: all components
  bool need_x = false;
};

/// Estimation window of a panel. Series with any missing value inside
/// [start, extend_to] are left out of X.
struct Window {
  YearMonth cutoff;
  std::vector<int> series;  // columns of the transformed panel kept in X
  PredictorInputs inputs;
};

Window make_window(const TransformedPanel& panel, const std::vector<double>& y_stationary_full,
                   const WindowRequest& req);

}  // namespace macroml
