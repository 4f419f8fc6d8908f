#pragma once

#include <span>
#include <string>
#include <vector>

#include "macroml/common/linalg.hpp"

namespace macroml {

/// McCracken-Ng stationarity transforms. Leading entries that cannot be
/// computed are NaN; NaN inputs propagate.
///   1 x   2 dx   3 d2x   4 log x   5 dlog x   6 d2log x   7 d(x_t/x_{t-1} - 1)
/// Throws DomainError (naming the index) for non-positive values under codes 4-6,
/// ArgumentError for codes outside 1..7.
std::vector<double> apply_tcode(std::span<const double> series, int code);

enum class TargetKind { LevelI0, AvgLogGrowth, AvgDiff };

std::string to_string(TargetKind kind);
TargetKind parse_target_kind(const std::string& text);

/// Direct-forecast target y^{(h)}. values[i] is the target whose date is i, i.e.
/// the value forecast from origin i - h; entries with i < h are NaN.
struct TargetSeries {
  std::string variable;
  int h = 0;
  TargetKind kind = TargetKind::LevelI0;
  std::vector<double> values;

  /// Target for origin row t (NaN when t + h leaves the sample).
  double at_origin(int t) const {
    const std::size_t i = static_cast<std::size_t>(t + h);
    return (t >= 0 && i < values.size()) ? values[i] : kMissing;
  }
};

/// LevelI0: scale * y_{t+h};  AvgLogGrowth: (scale/h) ln(Y_{t+h}/Y_t);  AvgDiff: (scale/h)(Y_{t+h} - Y_t).
/// `scale` = 12 annualises monthly growth rates (and is applied to levels
/// too, so every target shares the reporting units). An h at least as long as the
/// series yields an all-missing target and logs a warning.
TargetSeries build_target(std::span<const double> levels, TargetKind kind, int h, double scale = 1.0);

/// The one-period stationary counterpart used for own-lag predictors:
/// level, dlog, or d, matching the target kind.
std::vector<double> stationary_series(std::span<const double> levels, TargetKind kind);

}  // namespace macroml
