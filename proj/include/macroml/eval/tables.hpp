#pragma once

#include <compare>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "macroml/eval/tests.hpp"
#include "macroml/harness/store.hpp"

namespace macroml {

using ValuePanel = std::map<RecordKey, double>;
using DateMask = std::function<bool(YearMonth)>;

struct TargetKey {
  std::string variable;
  int h = 0;
  auto operator<=>(const TargetKey&) const = default;
};

/// Per (variable, horizon): mean squared (or absolute) deviation of the
/// realized targets around their evaluation-sample mean.
std::map<TargetKey, double> benchmark_denominators(const ForecastStore& store, LossKind kind);

/// 1 - loss / denominator, multiplied by `scale` (100 gives points).
/// Throws ArgumentError naming (v,h) for a missing or non-positive denominator.
ValuePanel pseudo_r2(const LossPanel& losses, const std::map<TargetKey, double>& denominators, double scale = 1.0);

struct CellKey {
  std::string variable;
  int h = 0;
  std::string model;
  auto operator<=>(const CellKey&) const = default;
};

struct RmspeEntry {
  std::optional<double> rmspe;
  std::optional<double> relative;  // against the reference on common dates
  int n = 0;
};

/// Root MSPE of every model and its ratio to `reference` per (variable, h),
/// optionally restricted to target dates where `mask` holds. An empty masked
/// sample leaves the entry empty.
std::map<CellKey, RmspeEntry> relative_rmspe_table(const ForecastStore& store, const std::string& reference,
                                                   const DateMask& mask = {});

struct AppendixCell {
  std::optional<double> relative;
  std::optional<double> dm_p;
  std::string stars;
  bool in_mcs = false;
  bool is_min = false;
};

struct AppendixTable {
  std::string variable;
  std::string reference;
  std::vector<int> horizons;
  std::vector<std::string> models;
  std::map<std::pair<std::string, int>, AppendixCell> cells;
  std::map<int, std::optional<double>> reference_rmspe;

  /// model,h1,h1_dm,h1_mcs,h1_min,h3,... with the reference RMSPE as first row.
  void write_csv(std::ostream& out) const;
};

/// One table per variable: relative RMSPE, DM stars against the reference
/// and MCS membership, per horizon.
std::vector<AppendixTable> appendix_tables(const ForecastStore& store, const std::string& reference,
                                           const DateMask& mask = {}, const McsOptions& mcs = {});

/// Aligned squared-error matrix (dates x models) for one (variable, h) over the
/// dates where every listed model has a record and the mask holds.
Matrix aligned_losses(const ForecastStore& store, const std::string& variable, int h,
                      const std::vector<std::string>& models, const DateMask& mask = {},
                      std::vector<YearMonth>* dates = nullptr, LossKind kind = LossKind::Squared);

/// Recession months from a peak,trough CSV: months after each peak through the trough.
std::set<YearMonth> load_recession_months(const std::filesystem::path& path);

}  // namespace macroml
