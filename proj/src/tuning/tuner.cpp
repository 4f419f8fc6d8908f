#include "macroml/tuning/tuner.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "macroml/common/error.hpp"
#include "macroml/common/rng.hpp"

namespace macroml {

int Problem::known_rows() const {
  int n = 0;
  while (n < y.size() && !is_missing(y(n))) ++n;
  return n;
}

std::optional<int> Problem::row_of(YearMonth d) const {
  if (row_dates.empty()) return std::nullopt;
  const int r = d - row_dates.front();
  if (r < 0 || r >= static_cast<int>(row_dates.size())) return std::nullopt;
  return r;
}

double score_ic(const FittedModel& fit, Criterion c) {
  if (!fit.is_ols()) throw UnsupportedError("information criteria need a least-squares fit");
  const int k = fit.n_params();
  if (k <= 0) throw ArgumentError("information criterion with zero parameters");
  const double t = fit.n_obs();
  const double fit_term = t * std::log(std::max(fit.ssr(), 1e-300) / t);
  return c == Criterion::AIC ? fit_term + 2.0 * k : fit_term + k * std::log(t);
}

TuneDecision select_best(std::vector<ScoreRow> rows, YearMonth decided_at, int refresh_months, Tuner method) {
  if (rows.empty()) throw ArgumentError("empty score table");
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return std::tie(rows[a].point.n_columns, rows[a].point.ladder_index) <
           std::tie(rows[b].point.n_columns, rows[b].point.ladder_index);
  });
  std::size_t best = rows.size();
  for (auto i : order) {
    if (!std::isfinite(rows[i].score)) continue;
    if (best == rows.size() || rows[i].score < rows[best].score) best = i;
  }
  if (best == rows.size()) throw Error("every grid point failed to fit");
  TuneDecision d;
  d.chosen = rows[best].point;
  d.score_table = std::move(rows);
  d.decided_at = decided_at;
  d.frozen_until = decided_at + (refresh_months - 1);
  d.method = method;
  return d;
}

namespace {

const ModelSpec& spec_of(const TuneContext& ctx) {
  if (!ctx.spec || !ctx.provider) throw ArgumentError("tuning context lacks a model or design provider");
  return *ctx.spec;
}

Matrix take_rows(const Matrix& m, const std::vector<int>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  return out;
}

Vector take(const Vector& v, const std::vector<int>& rows) {
  Vector out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(rows[i]);
  return out;
}

double mse(const Vector& pred, const Vector& y) { return (pred - y).squaredNorm() / static_cast<double>(y.size()); }

}  // namespace

std::vector<double> score_ladder(const ModelSpec& spec, const std::vector<HyperPoint>& ladder, const Matrix& z_train,
                                 const Vector& y_train, const Matrix& z_val, const Vector& y_val,
                                 const FitSettings& settings, std::uint64_t seed) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> out(ladder.size(), inf);
  auto guarded = [&](auto&& body) {
    try {
      body();
    } catch (const Error& e) {
      spdlog::debug("{}: grid point failed: {}", spec.name, e.what());
    }
  };
  const auto n = z_train.rows(), d = z_train.cols();
  switch (spec.estimator) {
    case Estimator::Ridge:
      guarded([&] {
        std::vector<double> lam;
        for (const auto& p : ladder) lam.push_back(resolve_hyper(spec, p, n, d, y_train).lambda);
        const Matrix pred = ridge_path_predict(z_train, y_train, z_val, lam, settings.linear);
        for (std::size_t i = 0; i < ladder.size(); ++i) out[i] = mse(pred.col(static_cast<Eigen::Index>(i)), y_val);
      });
      return out;
    case Estimator::ElasticNet: {
      std::vector<double> alphas;
      for (const auto& p : ladder) {
        const double a = resolve_hyper(spec, p, n, d, y_train).alpha;
        if (std::find(alphas.begin(), alphas.end(), a) == alphas.end()) alphas.push_back(a);
      }
      for (double a : alphas)
        guarded([&] {
          std::vector<std::size_t> idx;
          std::vector<double> lam;
          for (std::size_t i = 0; i < ladder.size(); ++i) {
            const auto r = resolve_hyper(spec, ladder[i], n, d, y_train);
            if (r.alpha != a) continue;
            idx.push_back(i);
            lam.push_back(r.lambda);
          }
          const Matrix pred = enet_path_predict(z_train, y_train, z_val, lam, a, settings.linear, settings.enet);
          for (std::size_t j = 0; j < idx.size(); ++j) out[idx[j]] = mse(pred.col(static_cast<Eigen::Index>(j)), y_val);
        });
      return out;
    }
    case Estimator::Krr: {
      std::vector<double> sigmas;
      for (const auto& p : ladder)
        if (std::find(sigmas.begin(), sigmas.end(), p.sigma) == sigmas.end()) sigmas.push_back(p.sigma);
      for (double s : sigmas)
        guarded([&] {
          std::vector<std::size_t> idx;
          std::vector<double> lam;
          double sig_abs = 0.0;
          for (std::size_t i = 0; i < ladder.size(); ++i) {
            if (ladder[i].sigma != s) continue;
            const auto r = resolve_hyper(spec, ladder[i], n, d, y_train);
            idx.push_back(i);
            lam.push_back(r.lambda);
            sig_abs = r.sigma;
          }
          const Matrix pred =
              krr_path_predict(z_train, y_train, z_val, Kernel{KernelType::Rbf, sig_abs}, lam, settings.linear);
          for (std::size_t j = 0; j < idx.size(); ++j) out[idx[j]] = mse(pred.col(static_cast<Eigen::Index>(j)), y_val);
        });
      return out;
    }
    case Estimator::Ols:
    case Estimator::Forest:
    case Estimator::Svr:
      for (std::size_t i = 0; i < ladder.size(); ++i)
        guarded([&] {
          const auto m = fit_model(spec, ladder[i], z_train, y_train, settings, seed, true);
          out[i] = mse(m.predict(z_val), y_val);
        });
      return out;
  }
  return out;
}

TuneDecision tune_ic(const TuneContext& ctx, Criterion c) {
  const auto& spec = spec_of(ctx);
  if (spec.estimator != Estimator::Ols)
    throw UnsupportedError(spec.name + ": information criteria apply to least-squares models only");
  const int h = ctx.provider->horizon();
  std::vector<ScoreRow> rows;
  for (auto design : design_points(spec, ctx.grid)) {
    Problem pb = ctx.provider->build(design, ctx.cutoff, ctx.cutoff - h);
    design.n_columns = static_cast<int>(pb.z.cols());
    ScoreRow row{design, std::numeric_limits<double>::infinity()};
    try {
      const int n = pb.known_rows();
      const auto fit = fit_model(spec, design, pb.z.topRows(n), pb.y.head(n), ctx.settings, ctx.seed, true);
      row.score = score_ic(fit, c);
    } catch (const Error& e) {
      spdlog::debug("{}: {} failed: {}", spec.name, design.label(), e.what());
    }
    rows.push_back(row);
  }
  return select_best(std::move(rows), ctx.cutoff, ctx.options.refresh_months,
                     c == Criterion::AIC ? Tuner::AIC : Tuner::BIC);
}

TuneDecision poos_cv(const TuneContext& ctx) {
  const auto& spec = spec_of(ctx);
  const int h = ctx.provider->horizon();
  const int step = ctx.options.poos_step;
  if (step < 1) throw ArgumentError("POOS step must be positive");
  const auto ladder = ladder_points(spec, ctx.grid.ladders);
  std::vector<ScoreRow> rows;

  for (auto design : design_points(spec, ctx.grid)) {
    const Problem full = ctx.provider->build(design, ctx.cutoff, ctx.cutoff - h);
    design.n_columns = static_cast<int>(full.z.cols());
    const int n = full.known_rows();
    if (n < ctx.options.min_train)
      throw ArgumentError("POOS-CV needs at least " + std::to_string(ctx.options.min_train) +
                          " training rows, have " + std::to_string(n));
    const int n_val = static_cast<int>(std::floor(ctx.options.poos_share * n));
    if (n_val < h + step)
      throw ArgumentError("POOS-CV validation span of " + std::to_string(n_val) + " rows is shorter than h + " +
                          std::to_string(step));
    std::vector<double> sse(ladder.size(), 0.0);
    int count = 0;
    for (int b = n - n_val; b < n; b += step) {
      const int e = std::min(b + step, n);
      const YearMonth origin = full.row_dates[b];
      const Problem est = ctx.provider->build(design, origin, full.row_dates[e - 1]);
      const int n_est = est.known_rows();
      if (n_est < 1 || est.row_dates[n_est - 1] + h > origin)
        throw std::logic_error("POOS-CV estimation sample overlaps its validation targets");
      const auto vb = est.row_of(origin);
      if (!vb) throw std::logic_error("POOS-CV block origin outside its design");
      const Matrix z_val = est.z.middleRows(*vb, e - b);
      const Vector y_val = full.y.segment(b, e - b);
      const auto block = score_ladder(spec, ladder, est.z.topRows(n_est), est.y.head(n_est), z_val, y_val,
                                      ctx.settings, derive_seed(ctx.seed, static_cast<std::uint64_t>(b)));
      for (std::size_t i = 0; i < ladder.size(); ++i) sse[i] += block[i] * (e - b);
      count += e - b;
    }
    for (std::size_t i = 0; i < ladder.size(); ++i) {
      auto p = combine(design, ladder[i]);
      rows.push_back({p, sse[i] / count});
    }
  }
  return select_best(std::move(rows), ctx.cutoff, ctx.options.refresh_months, Tuner::PoosCV);
}

std::vector<int> kfold_assignment(int n, int k, std::uint64_t seed) {
  if (k < 2) throw ArgumentError("K-fold needs k >= 2, got " + std::to_string(k));
  if (n < 5 * k) throw ArgumentError("K-fold with k=" + std::to_string(k) + " needs at least " +
                                     std::to_string(5 * k) + " rows, have " + std::to_string(n));
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[uniform_index(rng, static_cast<std::uint64_t>(i) + 1)]);
  std::vector<int> fold(n);
  for (int pos = 0; pos < n; ++pos) fold[perm[pos]] = pos % k;
  return fold;
}

TuneDecision kfold_cv(const TuneContext& ctx) {
  const auto& spec = spec_of(ctx);
  const int h = ctx.provider->horizon();
  const int k = ctx.options.kfold;
  const auto ladder = ladder_points(spec, ctx.grid.ladders);
  std::vector<ScoreRow> rows;
  for (auto design : design_points(spec, ctx.grid)) {
    const Problem pb = ctx.provider->build(design, ctx.cutoff, ctx.cutoff - h);
    design.n_columns = static_cast<int>(pb.z.cols());
    const int n = pb.known_rows();
    const auto fold = kfold_assignment(n, k, ctx.seed);
    std::vector<double> total(ladder.size(), 0.0);
    for (int f = 0; f < k; ++f) {
      std::vector<int> tr, va;
      for (int i = 0; i < n; ++i) (fold[i] == f ? va : tr).push_back(i);
      const auto s = score_ladder(spec, ladder, take_rows(pb.z, tr), take(pb.y, tr), take_rows(pb.z, va),
                                  take(pb.y, va), ctx.settings, derive_seed(ctx.seed, static_cast<std::uint64_t>(f)));
      for (std::size_t i = 0; i < ladder.size(); ++i) total[i] += s[i] / k;
    }
    for (std::size_t i = 0; i < ladder.size(); ++i) rows.push_back({combine(design, ladder[i]), total[i]});
  }
  return select_best(std::move(rows), ctx.cutoff, ctx.options.refresh_months, Tuner::KFoldCV);
}

TuneDecision tune(const TuneContext& ctx) {
  switch (spec_of(ctx).tuner) {
    case Tuner::AIC:
      return tune_ic(ctx, Criterion::AIC);
    case Tuner::BIC:
      return tune_ic(ctx, Criterion::BIC);
    case Tuner::PoosCV:
      return poos_cv(ctx);
    case Tuner::KFoldCV:
      return kfold_cv(ctx);
  }
  throw ArgumentError("unknown tuner");
}

RefreshAction refresh_schedule(const std::vector<TuneDecision>& history, YearMonth now, int refresh_months) {
  if (history.empty()) return RefreshAction::Retune;
  return now - history.back().decided_at >= refresh_months ? RefreshAction::Retune : RefreshAction::Reuse;
}

}  // namespace macroml
