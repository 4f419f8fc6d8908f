#include "macroml/harness/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "macroml/common/error.hpp"
#include "macroml/common/rng.hpp"
#include "macroml/models/model_spec.hpp"

namespace macroml {

namespace {

using Issues = std::vector<std::string>;

template <class T>
void read(const YAML::Node& node, const char* key, T& out, Issues& issues, const std::string& where = "") {
  const auto n = node[key];
  if (!n) return;
  try {
    out = n.as<T>();
  } catch (const YAML::Exception&) {
    issues.push_back(where + key + ": cannot read '" + YAML::Dump(n) + "'");
  }
}

void read_date(const YAML::Node& node, const char* key, YearMonth& out, Issues& issues) {
  const auto n = node[key];
  if (!n) return;
  try {
    out = YearMonth::parse(n.as<std::string>());
  } catch (const std::exception& e) {
    issues.push_back(std::string(key) + ": " + e.what());
  }
}

/// A ladder is a list or {lo, hi, n, spacing: log|linear}.
void read_ladder(const YAML::Node& grid, const char* key, std::vector<double>& out, Issues& issues) {
  const auto n = grid[key];
  if (!n) return;
  try {
    if (n.IsSequence()) {
      out = n.as<std::vector<double>>();
    } else if (n.IsMap()) {
      const double lo = n["lo"].as<double>(), hi = n["hi"].as<double>();
      const int count = n["n"].as<int>();
      const std::string spacing = n["spacing"] ? n["spacing"].as<std::string>() : "log";
      if (count < 1) throw std::runtime_error("n must be positive");
      if (spacing == "log") {
        if (!(lo > 0 && hi > 0)) throw std::runtime_error("log ladder needs positive ends");
        out = log_space(lo, hi, count);
      } else if (spacing == "linear") {
        out = lin_space(lo, hi, count);
      } else {
        throw std::runtime_error("spacing must be log or linear");
      }
    } else {
      out = {n.as<double>()};
    }
  } catch (const std::exception& e) {
    issues.push_back(std::string("grid.") + key + ": " + e.what());
  }
}

std::filesystem::path resolve_data(const std::string& data, const std::filesystem::path& base_dir) {
  std::filesystem::path p(data);
  if (p.empty() || p.is_absolute()) return p;
  if (const char* dir = std::getenv("MACROML_DATA_DIR"); dir && *dir) return std::filesystem::path(dir) / p;
  return base_dir.empty() ? std::filesystem::absolute(p) : std::filesystem::absolute(base_dir / p);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  if (root && root.IsMap() && root["config"] && root["config_hash"]) root = root["config"];
  if (!root || !root.IsMap()) throw SchemaError("config: top level must be a mapping");

  static const std::set<std::string> known{"data",    "target_scale", "variables",   "horizons",      "oos_start",
                                           "oos_end", "models",       "seed",        "jobs",          "tuning",
                                           "grid",    "forest",       "min_history", "restrict_horizons"};
  Issues issues;
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    if (!known.count(key)) issues.push_back("unknown key '" + key + "'");
  }

  ExperimentConfig c;
  read(root, "data", c.data, issues);
  read(root, "target_scale", c.target_scale, issues);
  read(root, "horizons", c.horizons, issues);
  read_date(root, "oos_start", c.oos_start, issues);
  read_date(root, "oos_end", c.oos_end, issues);
  read(root, "models", c.models, issues);
  read(root, "seed", c.seed, issues);
  read(root, "jobs", c.jobs, issues);
  read(root, "min_history", c.min_history, issues);
  read(root, "restrict_horizons", c.restrict_horizons, issues);

  if (const auto vars = root["variables"]) {
    if (!vars.IsSequence()) issues.push_back("variables: expected a list");
    for (const auto& v : vars) {
      VariableSpec vs;
      try {
        if (v.IsScalar()) {
          vs.name = v.as<std::string>();
        } else {
          vs.name = v["name"].as<std::string>();
          if (v["kind"]) vs.kind = parse_target_kind(v["kind"].as<std::string>());
        }
        c.variables.push_back(vs);
      } catch (const std::exception& e) {
        issues.push_back(std::string("variables: ") + e.what());
      }
    }
  }
  if (const auto t = root["tuning"]) {
    read(t, "refresh_months", c.tuning.refresh_months, issues, "tuning.");
    read(t, "kfold", c.tuning.kfold, issues, "tuning.");
    read(t, "poos_share", c.tuning.poos_share, issues, "tuning.");
    read(t, "poos_step", c.tuning.poos_step, issues, "tuning.");
    read(t, "min_train", c.tuning.min_train, issues, "tuning.");
  }
  if (const auto g = root["grid"]) {
    read(g, "p_y", c.grid.p_y, issues, "grid.");
    read(g, "p_f", c.grid.p_f, issues, "grid.");
    read(g, "n_factors", c.grid.n_factors, issues, "grid.");
    read_ladder(g, "lambda", c.grid.ladders.lambda, issues);
    read_ladder(g, "alpha", c.grid.ladders.alpha, issues);
    read_ladder(g, "sigma", c.grid.ladders.sigma, issues);
    read_ladder(g, "cost", c.grid.ladders.cost, issues);
    read_ladder(g, "epsilon", c.grid.ladders.epsilon, issues);
  }
  if (const auto f = root["forest"]) {
    read(f, "trees", c.forest.n_trees, issues, "forest.");
    read(f, "cv_trees", c.cv_trees, issues, "forest.");
    read(f, "min_leaf", c.forest.min_leaf, issues, "forest.");
    read(f, "mtry_frac", c.forest.mtry_frac, issues, "forest.");
    read(f, "max_depth", c.forest.max_depth, issues, "forest.");
  }
  if (!issues.empty()) {
    std::string msg = "config has " + std::to_string(issues.size()) + " problem(s):";
    for (const auto& i : issues) msg += "\n  - " + i;
    throw SchemaError(msg);
  }
  if (!c.data.empty()) c.data = resolve_data(c.data, base_dir).lexically_normal().string();
  for (auto& m : c.models)
    if (auto canon = canonical_model_name(m)) m = *canon;
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::filesystem::absolute(path).parent_path());
}

void ExperimentConfig::validate() const {
  Issues issues;
  if (data.empty()) issues.push_back("data: missing panel path");
  if (variables.empty()) issues.push_back("variables: at least one required");
  if (horizons.empty()) issues.push_back("horizons: at least one required");
  static const std::set<int> standard_h{1, 3, 9, 12, 24};
  for (int h : horizons) {
    if (h < 1) issues.push_back("horizons: " + std::to_string(h) + " is not positive");
    else if (restrict_horizons && !standard_h.count(h))
      issues.push_back("horizons: " + std::to_string(h) + " not in {1,3,9,12,24} (set restrict_horizons: false)");
  }
  if (oos_end < oos_start) issues.push_back("oos_end precedes oos_start");
  if (models.empty()) issues.push_back("models: at least one required");
  for (const auto& m : models)
    if (!canonical_model_name(m)) issues.push_back("models: unknown model '" + m + "'");
  std::set<std::string> seen;
  for (const auto& m : models)
    if (!seen.insert(m).second) issues.push_back("models: duplicate '" + m + "'");
  if (jobs < 1) issues.push_back("jobs must be positive");
  if (!(target_scale > 0)) issues.push_back("target_scale must be positive");
  if (tuning.refresh_months < 1) issues.push_back("tuning.refresh_months must be positive");
  if (tuning.kfold < 2) issues.push_back("tuning.kfold must be at least 2");
  if (!(tuning.poos_share > 0 && tuning.poos_share < 1)) issues.push_back("tuning.poos_share must lie in (0,1)");
  if (tuning.poos_step < 1) issues.push_back("tuning.poos_step must be positive");
  for (int p : grid.p_y)
    if (p < 0) issues.push_back("grid.p_y entries must be non-negative");
  for (int p : grid.p_f)
    if (p < 0) issues.push_back("grid.p_f entries must be non-negative");
  for (int k : grid.n_factors)
    if (k < 1) issues.push_back("grid.n_factors entries must be positive");
  if (grid.p_y.empty()) issues.push_back("grid.p_y must not be empty");
  for (double l : grid.ladders.lambda)
    if (!(l > 0)) issues.push_back("grid.lambda entries must be positive");
  for (double a : grid.ladders.alpha)
    if (!(a >= 0 && a <= 1)) issues.push_back("grid.alpha entries must lie in [0,1]");
  for (double s : grid.ladders.sigma)
    if (!(s > 0)) issues.push_back("grid.sigma entries must be positive");
  for (double s : grid.ladders.cost)
    if (!(s > 0)) issues.push_back("grid.cost entries must be positive");
  for (double s : grid.ladders.epsilon)
    if (!(s >= 0)) issues.push_back("grid.epsilon entries must be non-negative");
  if (forest.n_trees < 1) issues.push_back("forest.trees must be positive");
  if (cv_trees < 0) issues.push_back("forest.cv_trees must be non-negative");
  if (forest.min_leaf < 1) issues.push_back("forest.min_leaf must be positive");
  if (!(forest.mtry_frac > 0 && forest.mtry_frac <= 1)) issues.push_back("forest.mtry_frac must lie in (0,1]");
  if (min_history < 0) issues.push_back("min_history must be non-negative");
  if (!issues.empty()) {
    std::string msg = "config has " + std::to_string(issues.size()) + " problem(s):";
    for (const auto& i : issues) msg += "\n  - " + i;
    throw SchemaError(msg);
  }
}

FitSettings ExperimentConfig::fit_settings() const {
  FitSettings s;
  s.forest = forest;
  s.cv_trees = cv_trees;
  return s;
}

std::string ExperimentConfig::to_json() const {
  nlohmann::ordered_json j;
  j["data"] = data;
  j["target_scale"] = target_scale;
  auto vars = nlohmann::ordered_json::array();
  for (const auto& v : variables) vars.push_back({{"name", v.name}, {"kind", to_string(v.kind)}});
  j["variables"] = vars;
  j["horizons"] = horizons;
  j["oos_start"] = oos_start.str();
  j["oos_end"] = oos_end.str();
  j["models"] = models;
  j["seed"] = seed;
  j["jobs"] = jobs;
  j["tuning"] = {{"refresh_months", tuning.refresh_months},
                 {"kfold", tuning.kfold},
                 {"poos_share", tuning.poos_share},
                 {"poos_step", tuning.poos_step},
                 {"min_train", tuning.min_train}};
  j["grid"] = {{"p_y", grid.p_y},
               {"p_f", grid.p_f},
               {"n_factors", grid.n_factors},
               {"lambda", grid.ladders.lambda},
               {"alpha", grid.ladders.alpha},
               {"sigma", grid.ladders.sigma},
               {"cost", grid.ladders.cost},
               {"epsilon", grid.ladders.epsilon}};
  j["forest"] = {{"trees", forest.n_trees},
                 {"cv_trees", cv_trees},
                 {"min_leaf", forest.min_leaf},
                 {"mtry_frac", forest.mtry_frac},
                 {"max_depth", forest.max_depth}};
  j["min_history"] = min_history;
  j["restrict_horizons"] = restrict_horizons;
  return j.dump(2);
}

std::uint64_t ExperimentConfig::hash() const {
  auto copy = *this;
  copy.jobs = 1;  // scheduling does not change results
  return fnv1a(copy.to_json());
}

}  // namespace macroml
