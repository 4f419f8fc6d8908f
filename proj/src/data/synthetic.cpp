#include "macroml/data/synthetic.hpp"

#include <cmath>
#include <random>

#include "macroml/common/error.hpp"
#include "macroml/common/rng.hpp"

namespace macroml {

namespace {

/// Box-Muller on the portable uniform stream, so panels match across platforms.
struct Normal {
  Rng rng;
  bool has_spare = false;
  double spare = 0.0;

  double operator()() {
    if (has_spare) {
      has_spare = false;
      return spare;
    }
    double u1;
    do u1 = uniform_unit(rng);
    while (u1 <= 0.0);
    const double u2 = uniform_unit(rng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare = r * std::sin(2.0 * M_PI * u2);
    has_spare = true;
    return r * std::cos(2.0 * M_PI * u2);
  }
};

}  // namespace

RawPanel synthetic_panel(const SyntheticPanelOptions& opts) {
  if (opts.n_series < 3) throw ArgumentError("synthetic panel needs at least 3 series");
  if (opts.periods < 120) throw ArgumentError("synthetic panel needs at least 120 periods");
  Normal nd{Rng(opts.seed)};
  const int T = opts.periods, r = opts.n_factors, N = opts.n_series;

  Matrix f(T, r);
  for (int k = 0; k < r; ++k) {
    const double phi = 0.85 - 0.15 * k;
    double prev = 0.0;
    for (int t = 0; t < T; ++t) {
      prev = phi * prev + std::sqrt(1 - phi * phi) * nd();
      f(t, k) = prev;
    }
  }

  RawPanel p;
  for (int t = 0; t < T; ++t) p.dates.push_back(opts.start + t);
  p.values.resize(T, N);

  // INDPRO: monthly growth with a threshold effect in the first factor.
  p.names.push_back("INDPRO");
  p.tcodes.push_back(5);
  double lv = std::log(20.0);
  for (int t = 0; t < T; ++t) {
    const double f1 = t > 0 ? f(t - 1, 0) : 0.0;
    const double g = 0.0018 + 0.004 * f1 + 0.004 * std::min(f(t, 1), 0.0) - 0.002 * (f1 * f1 - 1.0) + 0.004 * nd();
    lv += g;
    p.values(t, 0) = std::exp(lv);
  }

  // UNRATE: mean-reverting level pushed by the first factor.
  p.names.push_back("UNRATE");
  p.tcodes.push_back(2);
  double u = 5.5;
  for (int t = 0; t < T; ++t) {
    u += -0.02 * (u - 5.8) - 0.08 * f(t, 0) + 0.05 * std::tanh(2.0 * f(t, 2)) + 0.1 * nd();
    p.values(t, 1) = std::round(u * 10.0) / 10.0;
  }

  // CPI: I(1) log-inflation.
  p.names.push_back("CPIAUCSL");
  p.tcodes.push_back(6);
  double infl = 0.003, lp = std::log(30.0);
  for (int t = 0; t < T; ++t) {
    infl += 0.05 * (0.003 - infl) + 0.0004 * f(t, 1) + 0.0005 * nd();
    lp += infl;
    p.values(t, 2) = std::exp(lp);
  }

  const int codes[] = {5, 2, 1, 5, 4, 2, 5, 6, 1, 5};
  for (int j = 3; j < N; ++j) {
    const int code = codes[j % 10];
    p.names.push_back("S" + std::to_string(j));
    p.tcodes.push_back(code);
    Vector load(r);
    for (int k = 0; k < r; ++k) load(k) = nd() * (k == 0 ? 1.0 : 0.6);
    const double noise = 0.5 + 0.5 * std::abs(nd());
    double acc = 0.0, acc2 = 0.0;
    for (int t = 0; t < T; ++t) {
      const double x = f.row(t).dot(load) + noise * nd();
      double level;
      switch (code) {
        case 1:
          level = x;
          break;
        case 2:
          acc += 0.1 * x;
          level = acc;
          break;
        case 4:
          level = std::exp(3.0 + 0.1 * x);
          break;
        case 6:
          acc2 += 0.0002 * x;
          acc += 0.002 + acc2;
          level = std::exp(2.0 + acc);
          break;
        default:
          acc += 0.002 + 0.005 * x;
          level = std::exp(3.0 + acc);
          break;
      }
      p.values(t, j) = level;
    }
  }
  for (int j = 0; j < std::min(opts.late_series, N - 3); ++j)
    for (int t = 0; t < std::min(60, T - 30); ++t) p.values(t, N - 1 - j) = kMissing;
  p.validate();
  return p;
}

}  // namespace macroml
