#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "macroml/common/year_month.hpp"

namespace macroml {

struct RecordKey {
  YearMonth t;  // target date
  int h = 0;
  std::string variable;
  std::string model;

  auto operator<=>(const RecordKey&) const = default;
};

struct ForecastRecord {
  YearMonth t;
  int h = 0;
  std::string variable;
  std::string model;
  double yhat = 0.0;
  double y = 0.0;
  double e = 0.0;  // y - yhat
  YearMonth tune_vintage;

  RecordKey key() const { return {t, h, variable, model}; }
  bool operator==(const ForecastRecord&) const = default;
};

/// Forecast records keyed by (t, h, variable, model); later writes win.
class ForecastStore {
 public:
  static constexpr std::uint32_t kSchemaVersion = 1;

  /// Returns true when an existing record was replaced.
  bool put(const ForecastRecord& r);
  /// Returns the number of overwritten keys.
  int merge(const ForecastStore& other);

  bool contains(const RecordKey& k) const { return records_.count(k) > 0; }
  const ForecastRecord* find(const RecordKey& k) const;
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const std::map<RecordKey, ForecastRecord>& records() const { return records_; }

  std::vector<std::string> models() const;
  std::vector<std::string> variables() const;
  std::vector<int> horizons() const;

  bool operator==(const ForecastStore&) const = default;

 private:
  std::map<RecordKey, ForecastRecord> records_;
};

/// Binary columnar file ("MLFS" magic, schema version, string tables, columns).
void persist(const ForecastStore& store, const std::filesystem::path& path);
/// CSV interchange form: date,horizon,variable,model,yhat,y,e,tune_vintage.
void export_csv(const ForecastStore& store, const std::filesystem::path& path);
/// Loads either form (detected from the leading bytes). Throws SchemaError on a
/// version or header mismatch.
ForecastStore load_store(const std::filesystem::path& path);

enum class LossKind { Squared, Absolute };

/// Losses keyed like the store. Absent keys come back as nullopt, never zero.
class LossPanel {
 public:
  std::optional<double> get(const RecordKey& k) const;
  const std::map<RecordKey, double>& values() const { return values_; }
  void set(const RecordKey& k, double v) { values_[k] = v; }
  LossKind kind = LossKind::Squared;

 private:
  std::map<RecordKey, double> values_;
};

LossPanel compute_error_panel(const ForecastStore& store, LossKind loss);

}  // namespace macroml
