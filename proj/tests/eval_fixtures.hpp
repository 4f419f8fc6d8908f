#pragma once

#include <map>
#include <string>
#include <vector>

#include "macroml/eval/regression.hpp"
#include "support.hpp"

namespace testing {

inline const std::vector<std::string> kLinearModels{"AR,K-fold", "ARDI,K-fold"};
inline const std::vector<std::string> kNonlinearModels{"RFAR,K-fold", "RFARDI,K-fold"};

inline std::vector<std::string> nl_model_set() {
  auto m = kLinearModels;
  m.insert(m.end(), kNonlinearModels.begin(), kNonlinearModels.end());
  return m;
}

/// Standardized AR(1) conditioning series over [start - 24, start + dates).
inline std::map<macroml::YearMonth, double> xi_series(macroml::YearMonth start, int dates, std::uint64_t seed) {
  const int n = dates + 24;
  const macroml::Vector e = randn(n + 50, seed);
  std::vector<double> x(n + 50, 0.0);
  for (int i = 1; i < n + 50; ++i) x[i] = 0.7 * x[i - 1] + e(i);
  std::map<macroml::YearMonth, double> out;
  for (int i = 0; i < n; ++i) out[start - 24 + i] = x[i + 50];
  return macroml::standardize_series(out);
}

struct PlantedPanel {
  macroml::ValuePanel r2;
  std::map<macroml::YearMonth, double> xi;
};

/// Pseudo-R2 panel in points: common (t,v,h) shocks, NL models gain
/// N(effect, 1) plus gamma * xi_{t-h}, and AR(1) idiosyncratic noise.
inline PlantedPanel planted_r2_panel(std::uint64_t seed, double effect, double gamma, int dates = 240) {
  using namespace macroml;
  PlantedPanel p;
  const YearMonth start(1990, 1);
  p.xi = xi_series(start, dates, seed * 7 + 1);
  const std::vector<std::string> vars{"INDPRO", "UNRATE"};
  const std::vector<int> hs{1, 12};
  const auto models = nl_model_set();
  const Matrix shocks = randn(dates, 4, seed * 7 + 2) * 20.0;
  const Matrix bumps = randn(dates * 4, models.size(), seed * 7 + 3);
  const Matrix innov = randn(dates * 4, models.size(), seed * 7 + 4) * 3.0;
  int cell = 0;
  for (const auto& v : vars)
    for (int h : hs) {
      for (std::size_t m = 0; m < models.size(); ++m) {
        const bool nl = m >= kLinearModels.size();
        double u = 0.0;
        for (int t = 0; t < dates; ++t) {
          const int row = cell * dates + t;
          u = 0.5 * u + innov(row, static_cast<Eigen::Index>(m));
          const YearMonth date = start + t;
          double val = shocks(t, cell) + u;
          if (nl) val += effect + bumps(row, static_cast<Eigen::Index>(m)) + gamma * p.xi.at(date - h);
          p.r2[{date, h, v, models[m]}] = val;
        }
      }
      ++cell;
    }
  return p;
}

}  // namespace testing
