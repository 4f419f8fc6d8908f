#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "macroml/common/linalg.hpp"
#include "macroml/common/year_month.hpp"

namespace macroml {

/// Dated monthly panel of raw (untransformed) series with their transformation codes.
/// Missing cells are NaN. Immutable once ingested.
struct RawPanel {
  std::vector<YearMonth> dates;
  std::vector<std::string> names;
  std::vector<int> tcodes;
  Matrix values;  // T x N

  int n_periods() const { return static_cast<int>(dates.size()); }
  int n_series() const { return static_cast<int>(names.size()); }

  std::optional<int> find(const std::string& name) const;
  /// Throws ArgumentError naming the series when absent.
  int require(const std::string& name) const;
  /// Row of `date`, or nullopt when outside the panel.
  std::optional<int> row_of(YearMonth date) const;

  /// Checks the RawPanel invariants; throws ValidationError.
  void validate() const;
};

/// Reads a FRED-MD style CSV: header row of series names (first cell labels the
/// date column), a transformation-code row, then one row per month. Blank
/// trailing lines are ignored; empty/NA cells are missing.
RawPanel ingest_fredmd(const std::filesystem::path& csv_path);

/// Writes the normalised cache form (ISO dates, "transform" row) that
/// ingest_fredmd reads back unchanged.
void write_panel_csv(const RawPanel& panel, const std::filesystem::path& path);

}  // namespace macroml
