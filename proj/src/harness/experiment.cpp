#include "macroml/harness/experiment.hpp"

#include <omp.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>

#include "macroml/common/error.hpp"
#include "macroml/common/rng.hpp"

namespace macroml {

PanelDesignProvider::PanelDesignProvider(std::shared_ptr<const TransformedPanel> panel, std::vector<double> stationary,
                                         TargetSeries target, const ModelSpec& spec, const Grid& grid,
                                         YearMonth window_start)
    : panel_(std::move(panel)),
      stationary_(std::move(stationary)),
      target_(std::move(target)),
      spec_(&spec),
      max_factors_(0),
      window_start_(window_start),
      first_row_(window_start + grid.max_lag()) {
  if (spec.uses_factors())
    for (int k : grid.n_factors) max_factors_ = std::max(max_factors_, k);
}

double PanelDesignProvider::target_at(YearMonth date) const {
  const auto r = panel_->row_of(date);
  return r ? target_.values[*r] : kMissing;
}

Problem PanelDesignProvider::build(const HyperPoint& design, YearMonth cutoff, YearMonth last_row) const {
  const bool need_x = spec_->rotation == Rotation::B1 || spec_->rotation == Rotation::B3;
  int factors = 0;
  if (spec_->uses_factors()) factors = max_factors_;
  if (spec_->data_rich && spec_->rotation == Rotation::B2) factors = -1;
  if (spec_->uses_factors() && design.n_factors > max_factors_)
    throw ArgumentError("factor count " + std::to_string(design.n_factors) + " exceeds the grid");

  WindowRequest req{window_start_, cutoff, std::max(cutoff, last_row), factors, need_x};
  const Window w = make_window(*panel_, stationary_, req);
  LagSpec lags{design.p_y, spec_->data_rich ? design.p_f : 0, spec_->uses_factors() ? design.n_factors : 0};
  const PredictorSet ps = assemble_predictors(w.inputs, spec_->data_rich ? spec_->rotation : Rotation::None, lags,
                                              first_row_, last_row, std::min(cutoff - target_.h, last_row));
  Problem pb;
  pb.row_dates = ps.row_dates;
  pb.z = ps.z;
  pb.column_names = ps.column_names;
  pb.y.resize(ps.z.rows());
  for (Eigen::Index r = 0; r < pb.y.size(); ++r) {
    const YearMonth target_date = pb.row_dates[r] + target_.h;
    pb.y(r) = target_date <= cutoff ? target_at(target_date) : kMissing;
  }
  return pb;
}

PreparedPanel PreparedPanel::from(const RawPanel& raw) {
  PreparedPanel p;
  p.raw = raw;
  p.transformed = std::make_shared<TransformedPanel>(TransformedPanel::from(raw));
  p.window_start = raw.dates.front() + 2;
  return p;
}

PanelDesignProvider PreparedPanel::provider(const VariableSpec& v, int h, double scale, const ModelSpec& spec,
                                            const Grid& grid) const {
  const int col = raw.require(v.name);
  std::vector<double> levels(raw.values.col(col).data(), raw.values.col(col).data() + raw.values.rows());
  auto stationary = stationary_series(levels, v.kind);
  YearMonth start = window_start;
  for (int t = 0; t < static_cast<int>(stationary.size()) && is_missing(stationary[t]); ++t)
    start = std::max(start, raw.dates[t] + 1);
  return PanelDesignProvider(transformed, std::move(stationary), build_target(levels, v.kind, h, scale), spec, grid,
                             start);
}

std::vector<YearMonth> forecast_origins(const ExperimentConfig& config, int h) {
  std::vector<YearMonth> out;
  for (YearMonth t = config.oos_start; t <= config.oos_end; t += 1) out.push_back(t - h);
  return out;
}

namespace {

struct WorkItem {
  int variable;
  int h;
  int model;
  std::vector<YearMonth> origins;  // one refresh block
};

struct ItemResult {
  std::vector<ForecastRecord> records;
  std::vector<TuneDecision> decisions;
  int attempts = 0;
  int failures = 0;
};

std::uint64_t item_seed(std::uint64_t seed, const std::string& model, const std::string& var, int h, YearMonth d) {
  return derive_seed(seed, model + "|" + var + "|" + std::to_string(h) + "|" + d.str());
}

/// Fits the frozen point at origin `tau` and returns the forecast of the target dated tau + h.
double forecast_at(const ModelSpec& spec, const PanelDesignProvider& prov, const HyperPoint& point, YearMonth tau,
                   const FitSettings& settings, std::uint64_t seed) {
  const Problem pb = prov.build(point, tau, tau);
  const int n = pb.known_rows();
  if (n < 1) throw ArgumentError("no training rows at " + tau.str());
  if (pb.row_dates.back() != tau || pb.row_dates[n - 1] + prov.horizon() > tau)
    throw std::logic_error("design at " + tau.str() + " uses targets beyond its origin");
  const auto fit = fit_model(spec, point, pb.z.topRows(n), pb.y.head(n), settings, seed);
  return fit.predict(pb.z.bottomRows(1))(0);
}

RawPanel truncate(const RawPanel& raw, YearMonth last) {
  RawPanel p = raw;
  const int rows = last - raw.dates.front() + 1;
  p.dates.resize(rows);
  p.values = raw.values.topRows(rows);
  return p;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config, const RawPanel& panel, const RunOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  config.validate();
  if (panel.dates.empty()) throw ArgumentError("empty panel");
  if (config.oos_start - panel.dates.front() < config.min_history)
    throw ArgumentError("oos_start " + config.oos_start.str() + " leaves fewer than " +
                        std::to_string(config.min_history) + " months of history");
  for (const auto& v : config.variables) panel.require(v.name);

  const PreparedPanel prepared = PreparedPanel::from(panel);
  std::vector<const ModelSpec*> specs;
  for (const auto& m : config.models) specs.push_back(&find_model(m));
  const FitSettings settings = config.fit_settings();
  const YearMonth last_date = panel.dates.back();

  RunResult result;
  std::vector<WorkItem> items;
  for (int vi = 0; vi < static_cast<int>(config.variables.size()); ++vi)
    for (int h : config.horizons)
      for (int mi = 0; mi < static_cast<int>(specs.size()); ++mi) {
        const auto origins = forecast_origins(config, h);
        for (std::size_t b = 0; b < origins.size(); b += config.tuning.refresh_months) {
          WorkItem it{vi, h, mi, {}};
          for (std::size_t k = b; k < std::min(origins.size(), b + config.tuning.refresh_months); ++k)
            it.origins.push_back(origins[k]);
          items.push_back(std::move(it));
        }
      }
  result.items_total = static_cast<int>(items.size());

  std::vector<char> skip(items.size(), 0);
  if (opts.resume) {
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto& it = items[i];
      bool complete = true;
      for (auto tau : it.origins) {
        if (tau + it.h > last_date) continue;
        complete &= opts.resume->contains(
            {tau + it.h, it.h, config.variables[it.variable].name, specs[it.model]->name});
      }
      skip[i] = complete;
    }
  }

  std::vector<ItemResult> out(items.size());
  const int jobs = std::max(1, opts.jobs);
  omp_set_max_active_levels(1);
  const int n_items = static_cast<int>(items.size());
  std::atomic<int> done{0};

#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
  for (int i = 0; i < n_items; ++i) {
    if (skip[i]) continue;
    const auto& it = items[i];
    const auto& v = config.variables[it.variable];
    const auto& spec = *specs[it.model];
    auto& res = out[i];
    const auto prov = prepared.provider(v, it.h, config.target_scale, spec, config.grid);
    for (auto tau : it.origins) {
      if (tau + it.h > last_date) continue;
      ++res.attempts;
      try {
        if (refresh_schedule(res.decisions, tau, config.tuning.refresh_months) == RefreshAction::Retune) {
          TuneContext ctx{&spec, &prov, config.grid, settings, config.tuning, tau,
                          item_seed(config.seed, spec.name, v.name, it.h, tau)};
          res.decisions.push_back(tune(ctx));
        }
        const auto& d = res.decisions.back();
        const double yhat = forecast_at(spec, prov, d.chosen, tau, settings,
                                        item_seed(config.seed ^ 0x5eedULL, spec.name, v.name, it.h, tau));
        const double y = prov.target_at(tau + it.h);
        if (!std::isfinite(yhat) || !std::isfinite(y)) throw DomainError("non-finite forecast or target");
        res.records.push_back({tau + it.h, it.h, v.name, spec.name, yhat, y, y - yhat, d.decided_at});
      } catch (const Error& e) {
        ++res.failures;
        spdlog::warn("{} {} h={} origin {}: {}", spec.name, v.name, it.h, tau.str(), e.what());
      }
    }
    spdlog::info("[{}/{}] {} {} h={} from {}", ++done, n_items, spec.name, v.name, it.h, it.origins.front().str());
  }

  if (opts.resume) result.store = *opts.resume;
  std::vector<std::pair<std::size_t, std::size_t>> fresh;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& name = specs[items[i].model]->name;
    result.attempts[name] += out[i].attempts;
    result.failures[name] += out[i].failures;
    for (std::size_t r = 0; r < out[i].records.size(); ++r) {
      result.store.put(out[i].records[r]);
      fresh.emplace_back(i, r);
    }
    if (skip[i]) ++result.items_skipped;
  }
  result.new_records = static_cast<int>(fresh.size());

  for (const auto& [name, n] : result.attempts) {
    const int f = result.failures[name];
    if (n > 0 && f > 0.01 * n) {
      result.warnings.push_back(name + ": " + std::to_string(f) + " of " + std::to_string(n) + " forecasts failed");
      spdlog::warn("{}", result.warnings.back());
    }
  }

  // Rebuild a sample of forecasts from a panel cut at their origin.
  Rng rng(derive_seed(config.seed, "audit"));
  const std::size_t n_audit = std::min<std::size_t>(fresh.size(), std::max(0, opts.audit_records));
  for (std::size_t k = 0; k < n_audit; ++k) {
    const std::size_t pick = k + uniform_index(rng, fresh.size() - k);
    std::swap(fresh[k], fresh[pick]);
    const auto [i, r] = fresh[k];
    const auto& it = items[i];
    const auto& rec = out[i].records[r];
    const auto& spec = *specs[it.model];
    const YearMonth tau = rec.t - rec.h;
    const TuneDecision* d = nullptr;
    for (const auto& dec : out[i].decisions)
      if (dec.decided_at <= tau) d = &dec;
    try {
      const auto cut = PreparedPanel::from(truncate(panel, tau));
      const auto prov = cut.provider(config.variables[it.variable], it.h, config.target_scale, spec, config.grid);
      const double yhat = forecast_at(spec, prov, d->chosen, tau, settings,
                                      item_seed(config.seed ^ 0x5eedULL, spec.name, rec.variable, it.h, tau));
      if (yhat == rec.yhat) {
        ++result.audits_passed;
      } else {
        ++result.audits_failed;
        spdlog::error("lookahead audit: {} {} h={} at {} differs ({} vs {})", spec.name, rec.variable, rec.h,
                      tau.str(), yhat, rec.yhat);
      }
    } catch (const std::exception& e) {
      ++result.audits_failed;
      spdlog::error("lookahead audit failed at {}: {}", tau.str(), e.what());
    }
  }

  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace macroml
