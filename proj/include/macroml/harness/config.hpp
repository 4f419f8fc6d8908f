#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "macroml/common/year_month.hpp"
#include "macroml/data/transforms.hpp"
#include "macroml/models/fitted_model.hpp"
#include "macroml/tuning/grid.hpp"
#include "macroml/tuning/tuner.hpp"

namespace macroml {

struct VariableSpec {
  std::string name;
  TargetKind kind = TargetKind::AvgLogGrowth;
};

struct ExperimentConfig {
  std::string data;  // panel CSV; resolved to an absolute path on load
  double target_scale = 12.0;
  std::vector<VariableSpec> variables;
  std::vector<int> horizons{1, 3, 9, 12, 24};
  YearMonth oos_start{1980, 1};
  YearMonth oos_end{2017, 12};
  std::vector<std::string> models;
  std::uint64_t seed = 20190101;
  int jobs = 1;
  TuningOptions tuning;
  Grid grid;
  ForestOptions forest;
  int cv_trees = 0;
  int min_history = 240;         // oos_start must trail the panel start by this many months
  bool restrict_horizons = true;  // horizons limited to {1,3,9,12,24}

  /// Collects every schema violation; throws SchemaError listing them.
  void validate() const;
  FitSettings fit_settings() const;
  std::string to_json() const;
  std::uint64_t hash() const;
};

/// Reads a YAML config (a run manifest is accepted too: its embedded config is
/// used). Relative data paths resolve against $MACROML_DATA_DIR when set,
/// otherwise against the config file's directory.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});

}  // namespace macroml
