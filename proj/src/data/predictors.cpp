#include "macroml/data/predictors.hpp"

#include <algorithm>

#include "macroml/common/error.hpp"
#include "macroml/data/transforms.hpp"

namespace macroml {

std::string to_string(Rotation r) {
  switch (r) {
    case Rotation::None:
      return "NONE";
    case Rotation::B1:
      return "B1";
    case Rotation::B2:
      return "B2";
    case Rotation::B3:
      return "B3";
  }
  return "?";
}

YearMonth PredictorSet::max_data_date() const {
  YearMonth latest = row_dates.empty() ? origin : row_dates.front();
  int min_lag = column_lags.empty() ? 0 : *std::min_element(column_lags.begin(), column_lags.end());
  for (auto d : row_dates) latest = std::max(latest, d - min_lag);
  return latest;
}

std::optional<int> PredictorSet::row_of(YearMonth date) const {
  if (row_dates.empty()) return std::nullopt;
  const int r = date - row_dates.front();
  if (r < 0 || r >= static_cast<int>(row_dates.size())) return std::nullopt;
  return r;
}

namespace {

struct Block {
  Matrix z;
  std::vector<std::string> names;
  std::vector<int> lags;
};

/// Lags 0..p of every column of `source` for rows first..last (indices into source).
Block lag_block(const Matrix& source, int first, int last, int p, const std::string& prefix) {
  const int rows = last - first + 1;
  Block b;
  b.z.resize(rows, source.cols() * (p + 1));
  int c = 0;
  for (Eigen::Index col = 0; col < source.cols(); ++col)
    for (int j = 0; j <= p; ++j, ++c) {
      b.z.col(c) = source.col(col).segment(first - j, rows);
      b.names.push_back(prefix + std::to_string(col + 1) + "_lag" + std::to_string(j));
      b.lags.push_back(j);
    }
  return b;
}

}  // namespace

PredictorSet assemble_predictors(const PredictorInputs& in, Rotation rotation, const LagSpec& lags,
                                 YearMonth first_row, YearMonth origin, YearMonth train_last) {
  if (in.dates.empty()) throw ArgumentError("empty predictor inputs");
  if (lags.p_y < 0 || lags.p_f < 0 || lags.n_factors < 0) throw ArgumentError("negative lag order");
  if (origin < first_row) throw ArgumentError("origin precedes first row");
  const YearMonth d0 = in.dates.front();
  const int first = first_row - d0;
  const int last = origin - d0;
  if (last >= static_cast<int>(in.dates.size()))
    throw ArgumentError("origin " + origin.str() + " beyond predictor inputs");

  const bool uses_panel_lags = rotation == Rotation::B1 || rotation == Rotation::B3;
  const bool uses_factors = rotation == Rotation::B2 || (rotation == Rotation::None && lags.n_factors > 0);
  const int max_lag = std::max(lags.p_y, (uses_panel_lags || uses_factors) ? lags.p_f : 0);
  if (first - max_lag < 0)
    throw ArgumentError("lag " + std::to_string(max_lag) + " at row " + first_row.str() + " reaches before " +
                        d0.str());
  if (uses_panel_lags && !in.x) throw ArgumentError("rotation " + to_string(rotation) + " requires panel data X");
  if (uses_factors && !in.factors) throw ArgumentError("rotation " + to_string(rotation) + " requires factors");
  if (rotation == Rotation::None && lags.n_factors > 0 && in.factors->cols() < lags.n_factors)
    throw ArgumentError("requested " + std::to_string(lags.n_factors) + " factors, only " +
                        std::to_string(in.factors->cols()) + " available");

  PredictorSet ps;
  ps.origin = origin;
  for (int r = first; r <= last; ++r) ps.row_dates.push_back(in.dates[r]);
  const int train_rows = std::clamp(train_last - first_row + 1, 0, last - first + 1);

  std::vector<Block> blocks;
  blocks.push_back(lag_block(Matrix(in.y_stationary), first, last, lags.p_y, "y"));
  for (auto& n : blocks.back().names) n = "y_lag" + n.substr(n.find("_lag") + 4);
  ps.n_y_cols = lags.p_y + 1;

  switch (rotation) {
    case Rotation::None:
      if (lags.n_factors > 0) {
        blocks.push_back(lag_block(in.factors->leftCols(lags.n_factors), first, last, lags.p_f, "F"));
        ps.n_factor_cols = static_cast<int>(blocks.back().z.cols());
      }
      break;
    case Rotation::B1:
    case Rotation::B3:
      blocks.push_back(lag_block(*in.x, first, last, lags.p_f, "X"));
      ps.n_extra_cols = static_cast<int>(blocks.back().z.cols());
      break;
    case Rotation::B2:
      blocks.push_back(lag_block(*in.factors, first, last, lags.p_f, "F"));
      ps.n_factor_cols = static_cast<int>(blocks.back().z.cols());
      break;
  }

  Eigen::Index cols = 0;
  for (const auto& b : blocks) cols += b.z.cols();
  ps.z.resize(last - first + 1, cols);
  Eigen::Index c = 0;
  for (const auto& b : blocks) {
    ps.z.middleCols(c, b.z.cols()) = b.z;
    c += b.z.cols();
    ps.column_names.insert(ps.column_names.end(), b.names.begin(), b.names.end());
    ps.column_lags.insert(ps.column_lags.end(), b.lags.begin(), b.lags.end());
  }

  if (rotation == Rotation::B3) {
    if (train_rows < 2) throw ArgumentError("B3 rotation needs at least two training rows");
    const Standardization h_std = Standardization::fit(ps.z.topRows(train_rows));
    const Matrix h_train = h_std.apply(Matrix(ps.z.topRows(train_rows)));
    const int n_comp = static_cast<int>(std::min<Eigen::Index>(train_rows, ps.z.cols()));
    const FactorSet pcs = extract_factors(h_train, n_comp);
    ps.z = h_std.apply(ps.z) * pcs.loadings;
    ps.column_names.clear();
    ps.column_lags.assign(n_comp, 0);
    for (int k = 0; k < n_comp; ++k) ps.column_names.push_back("PC" + std::to_string(k + 1));
    ps.n_y_cols = 0;
    ps.n_factor_cols = 0;
    ps.n_extra_cols = n_comp;
  }

  ps.standardization = train_rows > 0 ? Standardization::fit(ps.z.topRows(train_rows))
                                      : Standardization::identity(ps.z.cols());
  return ps;
}

TransformedPanel TransformedPanel::from(const RawPanel& raw) {
  TransformedPanel tp;
  tp.dates = raw.dates;
  tp.names = raw.names;
  tp.x.resize(raw.values.rows(), raw.values.cols());
  for (int j = 0; j < raw.n_series(); ++j) {
    std::vector<double> col(raw.values.col(j).data(), raw.values.col(j).data() + raw.values.rows());
    std::vector<double> tr;
    try {
      tr = apply_tcode(col, raw.tcodes[j]);
    } catch (const DomainError& e) {
      throw DomainError("series '" + raw.names[j] + "': " + e.what());
    }
    for (int t = 0; t < raw.n_periods(); ++t) tp.x(t, j) = tr[t];
  }
  return tp;
}

std::optional<int> TransformedPanel::row_of(YearMonth d) const {
  if (dates.empty()) return std::nullopt;
  const int r = d - dates.front();
  if (r < 0 || r >= static_cast<int>(dates.size())) return std::nullopt;
  return r;
}

Window make_window(const TransformedPanel& panel, const std::vector<double>& y_stationary_full,
                   const WindowRequest& req) {
  const auto s = panel.row_of(req.start);
  const auto c = panel.row_of(req.cutoff);
  const auto e = panel.row_of(req.extend_to);
  if (!s || !c || !e || *c < *s || *e < *c)
    throw ArgumentError("window " + req.start.str() + ".." + req.cutoff.str() + ".." + req.extend_to.str() +
                        " outside panel");
  const int rows = *e - *s + 1;
  const int est_rows = *c - *s + 1;

  Window w;
  w.cutoff = req.cutoff;
  auto& in = w.inputs;
  for (int r = *s; r <= *e; ++r) in.dates.push_back(panel.dates[r]);
  in.y_stationary.resize(rows);
  for (int r = 0; r < rows; ++r) {
    in.y_stationary(r) = y_stationary_full[*s + r];
    if (is_missing(in.y_stationary(r)))
      throw ArgumentError("target series missing at " + panel.dates[*s + r].str());
  }

  if (req.need_x || req.n_factors != 0) {
    for (Eigen::Index j = 0; j < panel.x.cols(); ++j) {
      if (!panel.x.col(j).segment(*s, rows).array().isNaN().any()) w.series.push_back(static_cast<int>(j));
    }
    if (w.series.empty()) throw ArgumentError("no panel series complete over the window");
    Matrix x(rows, static_cast<Eigen::Index>(w.series.size()));
    for (std::size_t k = 0; k < w.series.size(); ++k) x.col(k) = panel.x.col(w.series[k]).segment(*s, rows);
    const Standardization st = Standardization::fit(x.topRows(est_rows));
    const Matrix x_std = st.apply(x);
    if (req.n_factors != 0) {
      const int max_k = static_cast<int>(std::min<Eigen::Index>(est_rows, x.cols()));
      const int k = req.n_factors < 0 ? max_k : std::min(req.n_factors, max_k);
      const FactorSet fs = extract_factors(x_std.topRows(est_rows), k);
      in.factors = fs.project(x_std);
    }
    if (req.need_x) in.x = x_std;
  }
  return w;
}

}  // namespace macroml
