#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <json.hpp>
#include <set>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "macroml/common/csv.hpp"
#include "macroml/common/error.hpp"
#include "macroml/data/raw_panel.hpp"
#include "macroml/data/synthetic.hpp"
#include "macroml/eval/regression.hpp"
#include "macroml/harness/config.hpp"
#include "macroml/harness/experiment.hpp"

namespace macroml::cli {
namespace {

namespace fs = std::filesystem;

void log_to_stderr() {
  static const bool once = [] {
    auto logger = spdlog::stderr_color_mt("macroml");
    spdlog::set_default_logger(logger);
    return true;
  }();
  (void)once;
}

std::string slug(const std::string& s) {
  std::string out;
  for (char c : s) out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '.' ? c : '_');
  return out;
}

std::string fmt(double x) { return std::isfinite(x) ? csv::format_double(x) : "NA"; }

std::ofstream open_out(const fs::path& dir, const std::string& name, std::vector<fs::path>& written) {
  fs::create_directories(dir);
  const auto path = dir / name;
  std::ofstream f(path);
  if (!f) throw ArgumentError("cannot write " + path.string());
  written.push_back(path);
  return f;
}

// ---------------------------------------------------------------- ingest

struct IngestArgs {
  std::string data, out;
};

int cmd_ingest(const IngestArgs& a, std::ostream& out) {
  try {
    const auto panel = ingest_fredmd(a.data);
    if (!a.out.empty()) write_panel_csv(panel, a.out);
    out << panel.n_series() << " series, " << panel.dates.front().str() << ".." << panel.dates.back().str() << "\n";
    return 0;
  } catch (const ValidationError& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string out;
  SyntheticPanelOptions opts;
  std::string start = "1960-01";
};

int cmd_simulate(SimulateArgs a, std::ostream& out) {
  a.opts.start = YearMonth::parse(a.start);
  const auto panel = synthetic_panel(a.opts);
  write_panel_csv(panel, a.out);
  out << panel.n_series() << " series, " << panel.dates.front().str() << ".." << panel.dates.back().str() << "\n";
  return 0;
}

// ---------------------------------------------------------------- run

struct RunArgs {
  std::string config, store, csv, manifest;
  int jobs = 0;
  int audit = 100;
};

int cmd_run(const RunArgs& a, std::ostream& out) {
  auto config = load_config(a.config);
  if (a.jobs > 0) config.jobs = a.jobs;
  const auto panel = ingest_fredmd(config.data);

  std::optional<ForecastStore> previous;
  if (fs::exists(a.store)) {
    previous = load_store(a.store);
    spdlog::info("resuming from {} ({} records)", a.store, previous->size());
  }
  RunOptions opts;
  opts.jobs = config.jobs;
  opts.resume = previous ? &*previous : nullptr;
  opts.audit_records = a.audit;
  const auto result = run_experiment(config, panel, opts);

  if (result.new_records > 0 || !previous) persist(result.store, a.store);
  const fs::path csv_path = a.csv.empty() ? fs::path(a.store + ".csv") : fs::path(a.csv);
  export_csv(result.store, csv_path);

  nlohmann::ordered_json m;
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config.hash()));
  m["config_hash"] = hash;
  m["version"] = MACROML_VERSION;
  m["seed"] = config.seed;
  m["jobs"] = config.jobs;
  m["seconds"] = result.seconds;
  m["records"] = result.store.size();
  m["new_records"] = result.new_records;
  m["items_total"] = result.items_total;
  m["items_skipped"] = result.items_skipped;
  m["failures"] = result.failures;
  m["attempts"] = result.attempts;
  m["audits"] = {{"passed", result.audits_passed}, {"failed", result.audits_failed}};
  m["warnings"] = result.warnings;
  m["config"] = nlohmann::ordered_json::parse(config.to_json());
  const fs::path manifest = a.manifest.empty() ? fs::path(a.store + ".manifest.json") : fs::path(a.manifest);
  std::ofstream(manifest) << m.dump(2) << "\n";

  out << result.store.size() << " records (" << result.new_records << " new), " << result.items_skipped << "/"
      << result.items_total << " work items already complete\n";
  if (result.audits_failed > 0) {
    spdlog::error("{} look-ahead audit(s) failed", result.audits_failed);
    return 3;
  }
  return 0;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string store, spec, out;
  std::string reference = "AR,BIC";
  std::vector<std::string> models;
  std::vector<std::string> variables;
  std::vector<int> horizons;
  std::string recessions;
  double alpha = 0.25;
  int reps = 999;
  int block = 12;
  std::uint64_t seed = 2011;
  std::string model_a, model_b;
  int window = 60;
  std::vector<std::string> features{"NL"};
  std::string loss = "squared";
  std::string regressand = "r2";
  std::string xi;
  std::string xi_column;
};

ForecastStore filtered(const ForecastStore& s, const EvalArgs& a) {
  ForecastStore out;
  for (const auto& [k, r] : s.records()) {
    if (!a.variables.empty() && std::find(a.variables.begin(), a.variables.end(), k.variable) == a.variables.end())
      continue;
    if (!a.horizons.empty() && std::find(a.horizons.begin(), a.horizons.end(), k.h) == a.horizons.end()) continue;
    if (!a.models.empty() && std::find(a.models.begin(), a.models.end(), k.model) == a.models.end() &&
        k.model != a.reference)
      continue;
    out.put(r);
  }
  return out;
}

void require_models(const ForecastStore& s, const std::vector<std::string>& wanted) {
  const auto have = s.models();
  for (const auto& m : wanted)
    if (std::find(have.begin(), have.end(), m) == have.end()) {
      std::string list;
      for (const auto& h : have) list += (list.empty() ? "" : "; ") + h;
      throw ArgumentError("model '" + m + "' is not in the store; available: " + list);
    }
}

std::vector<std::string> canonical(std::vector<std::string> models) {
  for (auto& m : models)
    if (auto c = canonical_model_name(m)) m = *c;
  return models;
}

std::map<YearMonth, double> read_xi(const std::string& path, const std::string& column) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open " + path);
  std::string line;
  std::getline(in, line);
  const auto header = csv::split_record(line);
  std::size_t col = 1;
  if (!column.empty()) {
    const auto it = std::find(header.begin(), header.end(), column);
    if (it == header.end()) throw ArgumentError("column '" + column + "' not in " + path);
    col = static_cast<std::size_t>(it - header.begin());
  }
  if (header.size() <= col) throw SchemaError(path + ": expected date and value columns");
  std::map<YearMonth, double> xi;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = csv::split_record(line);
    if (f.size() <= col || f[col].empty() || f[col] == "NA") continue;
    xi[YearMonth::parse(f[0])] = std::stod(f[col]);
  }
  return xi;
}

int cmd_eval(EvalArgs a, std::ostream& out) {
  a.reference = canonical({a.reference})[0];
  a.models = canonical(a.models);
  if (!a.model_a.empty()) a.model_a = canonical({a.model_a})[0];
  if (!a.model_b.empty()) a.model_b = canonical({a.model_b})[0];
  const auto full = load_store(a.store);
  require_models(full, a.models);
  const auto store = filtered(full, a);
  if (store.empty()) throw ArgumentError("no records left after filtering");
  const fs::path dir = a.out;
  std::vector<fs::path> written;

  std::set<YearMonth> recession;
  if (!a.recessions.empty()) recession = load_recession_months(a.recessions);
  const DateMask in_recession = [&recession](YearMonth t) { return recession.count(t) > 0; };
  McsOptions mcs{a.alpha, a.reps, a.block, a.seed};
  const LossKind kind = a.loss == "absolute" ? LossKind::Absolute : LossKind::Squared;

  std::vector<std::pair<std::string, int>> targets;
  for (const auto& v : store.variables())
    for (int h : store.horizons()) targets.emplace_back(v, h);

  if (a.spec == "tables") {
    require_models(store, {a.reference});
    for (const auto& t : appendix_tables(store, a.reference, {}, mcs)) {
      auto f = open_out(dir, "table_" + slug(t.variable) + ".csv", written);
      t.write_csv(f);
    }
    if (!recession.empty())
      for (const auto& t : appendix_tables(store, a.reference, in_recession, mcs)) {
        auto f = open_out(dir, "table_" + slug(t.variable) + "_recessions.csv", written);
        t.write_csv(f);
      }
  } else if (a.spec == "dm" || a.spec == "fluctuation") {
    if (a.model_a.empty()) throw ArgumentError("--model-a is required");
    if (a.model_b.empty()) a.model_b = a.reference;
    require_models(store, {a.model_a, a.model_b});
    const std::string tag = slug(a.model_a) + "_vs_" + slug(a.model_b);
    if (a.spec == "dm") {
      auto f = open_out(dir, "dm_" + tag + ".csv", written);
      csv::write_record(f, {"variable", "horizon", "n", "statistic", "p_value", "stars"});
      for (const auto& [v, h] : targets) {
        const Matrix l = aligned_losses(store, v, h, {a.model_a, a.model_b}, {}, nullptr, kind);
        std::vector<std::string> row{v, std::to_string(h), std::to_string(l.rows())};
        if (l.rows() < 30) {
          row.insert(row.end(), {"NA", "NA", ""});
        } else {
          const auto r = dm_test({l.col(0).data(), l.col(0).data() + l.rows()},
                                 {l.col(1).data(), l.col(1).data() + l.rows()}, h);
          row.insert(row.end(), {fmt(r.statistic), fmt(r.p_value), significance_stars(r.p_value)});
        }
        csv::write_record(f, row);
      }
    } else {
      auto f = open_out(dir, "fluctuation_" + tag + "_w" + std::to_string(a.window) + ".csv", written);
      csv::write_record(f, {"variable", "horizon", "date", "statistic", "critical_05", "critical_10"});
      for (const auto& [v, h] : targets) {
        std::vector<YearMonth> dates;
        const Matrix l = aligned_losses(store, v, h, {a.model_a, a.model_b}, {}, &dates, kind);
        if (l.rows() < a.window) {
          spdlog::warn("{} h={}: {} dates, shorter than the window", v, h, l.rows());
          continue;
        }
        const auto r = fluctuation_test({l.col(0).data(), l.col(0).data() + l.rows()},
                                        {l.col(1).data(), l.col(1).data() + l.rows()}, a.window, h);
        for (std::size_t i = 0; i < r.path.size(); ++i)
          csv::write_record(f, {v, std::to_string(h), dates[i + a.window - 1].str(), fmt(r.path[i]),
                                fmt(r.critical_05), fmt(r.critical_10)});
      }
    }
  } else if (a.spec == "mcs") {
    const auto models = a.models.empty() ? store.models() : a.models;
    auto f = open_out(dir, "mcs_alpha" + slug(csv::format_double(a.alpha)) + ".csv", written);
    csv::write_record(f, {"variable", "horizon", "model", "mcs_p", "in_set"});
    for (const auto& [v, h] : targets) {
      const Matrix l = aligned_losses(store, v, h, models, {}, nullptr, kind);
      if (l.rows() < 2) continue;
      const auto r = model_confidence_set(l, models, mcs);
      for (const auto& m : models) {
        const bool in = std::find(r.survivors.begin(), r.survivors.end(), m) != r.survivors.end();
        csv::write_record(f, {v, std::to_string(h), m, fmt(r.mcs_p.at(m)), in ? "1" : "0"});
      }
    }
  } else if (a.spec == "treatment" || a.spec == "heterogeneity") {
    const auto models = a.models.empty() ? store.models() : a.models;
    const auto losses = compute_error_panel(store, kind);
    ValuePanel panel;
    if (a.regressand == "r2") panel = pseudo_r2(losses, benchmark_denominators(store, kind), 100.0);
    else if (a.regressand == "loss") panel = losses.values();
    else throw ArgumentError("--regressand must be r2 or loss");
    const auto dummies = FeatureDummies::from_roster();
    EvalRegressionResult res;
    std::string name;
    if (a.spec == "treatment") {
      std::vector<Feature> features;
      for (const auto& f : a.features) features.push_back(parse_feature(f));
      std::vector<Regressor> extra;
      if (!recession.empty())
        for (auto f : features)
          for (const auto& r : dummies.regressors(f, models))
            extra.push_back(interact(r, r.name + "*rec", [&recession](const RecordKey& k) {
              return recession.count(k.t) ? 1.0 : 0.0;
            }));
      res = treatment_regression(panel, models, features, dummies, extra);
      std::string feats;
      for (const auto& f : a.features) feats += (feats.empty() ? "" : "_") + f;
      name = "treatment_" + feats + "_" + a.regressand + (recession.empty() ? "" : "_rec") + ".csv";
    } else {
      if (a.xi.empty()) throw ArgumentError("--xi is required for heterogeneity");
      const auto xi = standardize_series(read_xi(a.xi, a.xi_column));
      res = heterogeneity_regression(panel, models, xi, dummies);
      name = "heterogeneity_" + slug(a.xi_column.empty() ? fs::path(a.xi).stem().string() : a.xi_column) + ".csv";
      if (res.dropped_rows) spdlog::warn("{} rows dropped for missing conditioning values", res.dropped_rows);
    }
    auto f = open_out(dir, name, written);
    res.write_csv(f);
  } else {
    throw ArgumentError("unknown eval spec '" + a.spec + "'");
  }
  for (const auto& p : written) out << p.string() << "\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out) {
  log_to_stderr();
  CLI::App app{"Macro forecasting horse race: ingest, run, evaluate"};
  app.set_version_flag("--version", MACROML_VERSION);
  app.require_subcommand(1);
  std::string level = "info";
  app.add_option("--log-level", level, "trace, debug, info, warn, error")->capture_default_str();

  IngestArgs ia;
  auto* ingest = app.add_subcommand("ingest", "Validate a FRED-MD CSV and write the normalised cache");
  ingest->add_option("--data", ia.data, "FRED-MD CSV")->required()->check(CLI::ExistingFile);
  ingest->add_option("--out", ia.out, "normalised panel CSV");

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Write a synthetic FRED-MD-shaped panel");
  sim->add_option("--out", sa.out, "panel CSV")->required();
  sim->add_option("--series", sa.opts.n_series)->capture_default_str();
  sim->add_option("--periods", sa.opts.periods)->capture_default_str();
  sim->add_option("--start", sa.start)->capture_default_str();
  sim->add_option("--seed", sa.opts.seed)->capture_default_str();

  RunArgs ra;
  auto* runc = app.add_subcommand("run", "Pseudo-out-of-sample forecasting run (resumable)");
  runc->add_option("--config", ra.config, "YAML config or run manifest")->required()->check(CLI::ExistingFile);
  runc->add_option("--store", ra.store, "forecast store")->required();
  runc->add_option("--jobs", ra.jobs, "worker threads (overrides the config)");
  runc->add_option("--csv", ra.csv, "CSV export (default STORE.csv)");
  runc->add_option("--manifest", ra.manifest, "run manifest (default STORE.manifest.json)");
  runc->add_option("--audit", ra.audit, "records re-fitted on truncated data")->capture_default_str();

  EvalArgs ea;
  auto* ev = app.add_subcommand("eval", "Evaluation tables, tests and regressions");
  ev->add_option("--store", ea.store)->required()->check(CLI::ExistingFile);
  ev->add_option("--spec", ea.spec)
      ->required()
      ->check(CLI::IsMember({"tables", "treatment", "heterogeneity", "mcs", "dm", "fluctuation"}));
  ev->add_option("--out", ea.out, "output directory")->required();
  ev->add_option("--reference", ea.reference)->capture_default_str();
  ev->add_option("--models", ea.models, "restrict to these models");
  ev->add_option("--variables", ea.variables);
  ev->add_option("--horizons", ea.horizons);
  ev->add_option("--recessions", ea.recessions, "peak,trough CSV")->check(CLI::ExistingFile);
  ev->add_option("--alpha", ea.alpha, "MCS level")->capture_default_str();
  ev->add_option("--reps", ea.reps, "MCS bootstrap replications")->capture_default_str();
  ev->add_option("--block", ea.block, "MCS block length")->capture_default_str();
  ev->add_option("--seed", ea.seed)->capture_default_str();
  ev->add_option("--model-a", ea.model_a);
  ev->add_option("--model-b", ea.model_b, "defaults to the reference");
  ev->add_option("--window", ea.window, "fluctuation window")->capture_default_str();
  ev->add_option("--features", ea.features, "NL SH CV LF X")->capture_default_str();
  ev->add_option("--loss", ea.loss)->check(CLI::IsMember({"squared", "absolute"}))->capture_default_str();
  ev->add_option("--regressand", ea.regressand)->check(CLI::IsMember({"r2", "loss"}))->capture_default_str();
  ev->add_option("--xi", ea.xi, "CSV with a date column and conditioning series");
  ev->add_option("--xi-column", ea.xi_column);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream msg, err;
    const int code = app.exit(e, msg, err);
    out << msg.str();
    std::cerr << err.str();
    return code;
  }
  spdlog::set_level(spdlog::level::from_str(level));

  try {
    if (*ingest) return cmd_ingest(ia, out);
    if (*sim) return cmd_simulate(sa, out);
    if (*runc) return cmd_run(ra, out);
    if (*ev) return cmd_eval(ea, out);
  } catch (const SchemaError& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const ValidationError& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 1;
}

}  // namespace macroml::cli
