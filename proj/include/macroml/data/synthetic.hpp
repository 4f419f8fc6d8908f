#pragma once

#include <cstdint>

#include "macroml/common/year_month.hpp"
#include "macroml/data/raw_panel.hpp"

namespace macroml {

struct SyntheticPanelOptions {
  int n_series = 40;  // including INDPRO, UNRATE and CPIAUCSL
  YearMonth start{1960, 1};
  int periods = 12 * 58;
  int n_factors = 3;
  int late_series = 2;  // series whose first 60 values are missing
  std::uint64_t seed = 1;
};

/// FRED-MD-shaped panel driven by a few persistent factors. INDPRO (tcode 5)
/// and UNRATE (tcode 2) load on the factors, the former with a nonlinear term.
RawPanel synthetic_panel(const SyntheticPanelOptions& opts = {});

}  // namespace macroml
