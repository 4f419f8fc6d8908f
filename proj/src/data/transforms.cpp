#include "macroml/data/transforms.hpp"

#include <cctype>
#include <cmath>
#include <spdlog/spdlog.h>

#include "macroml/common/error.hpp"

namespace macroml {
namespace {

std::vector<double> diff(const std::vector<double>& x) {
  std::vector<double> out(x.size(), kMissing);
  for (std::size_t i = 1; i < x.size(); ++i) out[i] = x[i] - x[i - 1];
  return out;
}

std::vector<double> log_checked(std::span<const double> x) {
  std::vector<double> out(x.size(), kMissing);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (is_missing(x[i])) continue;
    if (x[i] <= 0) throw DomainError("log transform of non-positive value " + std::to_string(x[i]) + " at index " +
                                     std::to_string(i));
    out[i] = std::log(x[i]);
  }
  return out;
}

}  // namespace

std::vector<double> apply_tcode(std::span<const double> series, int code) {
  std::vector<double> x(series.begin(), series.end());
  switch (code) {
    case 1:
      return x;
    case 2:
      return diff(x);
    case 3:
      return diff(diff(x));
    case 4:
      return log_checked(series);
    case 5:
      return diff(log_checked(series));
    case 6:
      return diff(diff(log_checked(series)));
    case 7: {
      std::vector<double> growth(x.size(), kMissing);
      for (std::size_t i = 1; i < x.size(); ++i) growth[i] = x[i] / x[i - 1] - 1.0;
      return diff(growth);
    }
    default:
      throw ArgumentError("transformation code " + std::to_string(code) + " outside 1..7");
  }
}

std::string to_string(TargetKind kind) {
  switch (kind) {
    case TargetKind::LevelI0:
      return "LEVEL_I0";
    case TargetKind::AvgLogGrowth:
      return "AVG_LOG_GROWTH";
    case TargetKind::AvgDiff:
      return "AVG_DIFF";
  }
  return "?";
}

TargetKind parse_target_kind(const std::string& raw) {
  std::string text = raw;
  for (auto& c : text) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (text == "LEVEL_I0") return TargetKind::LevelI0;
  if (text == "AVG_LOG_GROWTH") return TargetKind::AvgLogGrowth;
  if (text == "AVG_DIFF") return TargetKind::AvgDiff;
  throw ParseError("unknown target kind '" + raw + "' (LEVEL_I0, AVG_LOG_GROWTH, AVG_DIFF)");
}

TargetSeries build_target(std::span<const double> levels, TargetKind kind, int h, double scale) {
  if (h < 1) throw ArgumentError("horizon must be >= 1, got " + std::to_string(h));
  TargetSeries out;
  out.h = h;
  out.kind = kind;
  out.values.assign(levels.size(), kMissing);
  if (static_cast<std::size_t>(h) >= levels.size()) {
    spdlog::warn("horizon {} leaves no target inside a sample of length {}", h, levels.size());
    return out;
  }
  std::vector<double> logs;
  if (kind == TargetKind::AvgLogGrowth) logs = log_checked(levels);
  for (std::size_t i = static_cast<std::size_t>(h); i < levels.size(); ++i) {
    switch (kind) {
      case TargetKind::LevelI0:
        out.values[i] = scale * levels[i];
        break;
      case TargetKind::AvgLogGrowth:
        out.values[i] = scale / h * (logs[i] - logs[i - h]);
        break;
      case TargetKind::AvgDiff:
        out.values[i] = scale / h * (levels[i] - levels[i - h]);
        break;
    }
  }
  return out;
}

std::vector<double> stationary_series(std::span<const double> levels, TargetKind kind) {
  switch (kind) {
    case TargetKind::LevelI0:
      return apply_tcode(levels, 1);
    case TargetKind::AvgLogGrowth:
      return apply_tcode(levels, 5);
    case TargetKind::AvgDiff:
      return apply_tcode(levels, 2);
  }
  return {};
}

}  // namespace macroml
