#include "macroml/eval/tables.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <spdlog/spdlog.h>

#include "macroml/common/csv.hpp"
#include "macroml/common/error.hpp"
#include "macroml/models/model_spec.hpp"

namespace macroml {
namespace {

std::string target_label(const std::string& v, int h) { return "(" + v + ", h=" + std::to_string(h) + ")"; }

using Series = std::map<YearMonth, const ForecastRecord*>;

std::map<CellKey, Series> by_cell(const ForecastStore& store) {
  std::map<CellKey, Series> out;
  for (const auto& [k, r] : store.records()) out[{k.variable, k.h, k.model}][k.t] = &r;
  return out;
}

double loss_of(const ForecastRecord& r, LossKind kind) { return kind == LossKind::Squared ? r.e * r.e : std::abs(r.e); }

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::vector<std::string> roster_order(std::vector<std::string> models, const std::string& first) {
  auto rank = [](const std::string& m) -> std::size_t {
    const auto& roster = model_roster();
    for (std::size_t i = 0; i < roster.size(); ++i)
      if (roster[i].name == m) return i;
    return roster.size();
  };
  std::stable_sort(models.begin(), models.end(), [&](const std::string& a, const std::string& b) {
    if ((a == first) != (b == first)) return a == first;
    return std::pair(rank(a), a) < std::pair(rank(b), b);
  });
  return models;
}

}  // namespace

std::map<TargetKey, double> benchmark_denominators(const ForecastStore& store, LossKind kind) {
  std::map<TargetKey, std::map<YearMonth, double>> ys;
  for (const auto& [k, r] : store.records()) ys[{k.variable, k.h}].emplace(k.t, r.y);
  std::map<TargetKey, double> out;
  for (const auto& [key, series] : ys) {
    double mean = 0.0;
    for (const auto& [t, y] : series) mean += y;
    mean /= static_cast<double>(series.size());
    double s = 0.0;
    for (const auto& [t, y] : series) s += kind == LossKind::Squared ? (y - mean) * (y - mean) : std::abs(y - mean);
    out[key] = s / static_cast<double>(series.size());
  }
  return out;
}

ValuePanel pseudo_r2(const LossPanel& losses, const std::map<TargetKey, double>& denominators, double scale) {
  ValuePanel out;
  for (const auto& [k, loss] : losses.values()) {
    const auto it = denominators.find({k.variable, k.h});
    if (it == denominators.end()) throw ArgumentError("no benchmark denominator for " + target_label(k.variable, k.h));
    if (!(it->second > 0))
      throw ArgumentError("benchmark denominator is zero for " + target_label(k.variable, k.h));
    out[k] = scale * (1.0 - loss / it->second);
  }
  return out;
}

std::map<CellKey, RmspeEntry> relative_rmspe_table(const ForecastStore& store, const std::string& reference,
                                                   const DateMask& mask) {
  const auto cells = by_cell(store);
  std::map<CellKey, RmspeEntry> out;
  for (const auto& [cell, series] : cells) {
    const auto ref = cells.find({cell.variable, cell.h, reference});
    if (ref == cells.end())
      throw ArgumentError("reference model '" + reference + "' missing for " + target_label(cell.variable, cell.h));
    RmspeEntry e;
    double own = 0.0, num = 0.0, den = 0.0;
    int n_own = 0;
    for (const auto& [t, r] : series) {
      if (mask && !mask(t)) continue;
      own += r->e * r->e;
      ++n_own;
      const auto it = ref->second.find(t);
      if (it == ref->second.end()) continue;
      num += r->e * r->e;
      den += it->second->e * it->second->e;
      ++e.n;
    }
    if (n_own > 0) e.rmspe = std::sqrt(own / n_own);
    if (e.n > 0 && den > 0) e.relative = std::sqrt(num / den);
    out[cell] = e;
  }
  return out;
}

Matrix aligned_losses(const ForecastStore& store, const std::string& variable, int h,
                      const std::vector<std::string>& models, const DateMask& mask, std::vector<YearMonth>* dates,
                      LossKind kind) {
  std::vector<Series> cols(models.size());
  for (const auto& [k, r] : store.records())
    if (k.variable == variable && k.h == h)
      for (std::size_t j = 0; j < models.size(); ++j)
        if (k.model == models[j]) cols[j][k.t] = &r;
  for (std::size_t j = 0; j < models.size(); ++j)
    if (cols[j].empty())
      throw ArgumentError("model '" + models[j] + "' has no forecasts for " + target_label(variable, h));
  std::vector<YearMonth> common;
  for (const auto& [t, r] : cols[0]) {
    if (mask && !mask(t)) continue;
    bool all = true;
    for (std::size_t j = 1; j < cols.size() && all; ++j) all = cols[j].count(t) > 0;
    if (all) common.push_back(t);
  }
  Matrix out(static_cast<Eigen::Index>(common.size()), static_cast<Eigen::Index>(models.size()));
  for (std::size_t i = 0; i < common.size(); ++i)
    for (std::size_t j = 0; j < models.size(); ++j) out(i, j) = loss_of(*cols[j].at(common[i]), kind);
  if (dates) *dates = std::move(common);
  return out;
}

std::vector<AppendixTable> appendix_tables(const ForecastStore& store, const std::string& reference,
                                           const DateMask& mask, const McsOptions& mcs) {
  const auto rel = relative_rmspe_table(store, reference, mask);
  std::map<std::string, AppendixTable> tables;
  for (const auto& [cell, entry] : rel) {
    auto& tab = tables[cell.variable];
    tab.variable = cell.variable;
    tab.reference = reference;
    if (std::find(tab.horizons.begin(), tab.horizons.end(), cell.h) == tab.horizons.end()) tab.horizons.push_back(cell.h);
    if (std::find(tab.models.begin(), tab.models.end(), cell.model) == tab.models.end()) tab.models.push_back(cell.model);
    tab.cells[{cell.model, cell.h}].relative = entry.relative;
    if (cell.model == reference) tab.reference_rmspe[cell.h] = entry.rmspe;
  }
  std::vector<AppendixTable> out;
  for (auto& [v, tab] : tables) {
    std::sort(tab.horizons.begin(), tab.horizons.end());
    tab.models = roster_order(tab.models, reference);
    for (int h : tab.horizons) {
      std::vector<std::string> present;
      for (const auto& m : tab.models)
        if (rel.count({v, h, m})) present.push_back(m);
      for (const auto& m : present) {
        if (m == reference) continue;
        const Matrix pair = aligned_losses(store, v, h, {m, reference}, mask);
        if (pair.rows() < 30) continue;
        try {
          const auto dm = dm_test({pair.col(0).data(), pair.col(0).data() + pair.rows()},
                                  {pair.col(1).data(), pair.col(1).data() + pair.rows()}, h);
          auto& c = tab.cells[{m, h}];
          c.dm_p = dm.p_value;
          c.stars = significance_stars(dm.p_value);
        } catch (const DomainError& e) {
          spdlog::warn("DM {} vs {} {}: {}", m, reference, target_label(v, h), e.what());
        }
      }
      const Matrix all = aligned_losses(store, v, h, present, mask);
      if (all.rows() >= 2) {
        const auto set = model_confidence_set(all, present, mcs);
        for (const auto& m : set.survivors) tab.cells[{m, h}].in_mcs = true;
      }
      std::optional<double> best;
      for (const auto& m : present)
        if (const auto r = tab.cells[{m, h}].relative; r && (!best || *r < *best)) best = r;
      for (const auto& m : present)
        if (const auto r = tab.cells[{m, h}].relative; r && best && *r == *best) tab.cells[{m, h}].is_min = true;
    }
    out.push_back(std::move(tab));
  }
  return out;
}

void AppendixTable::write_csv(std::ostream& out) const {
  std::vector<std::string> header{"model"};
  for (int h : horizons)
    for (const char* suffix : {"", "_dm", "_mcs", "_min"}) header.push_back("h" + std::to_string(h) + suffix);
  csv::write_record(out, header);
  std::vector<std::string> row{reference + " (RMSPE)"};
  for (int h : horizons) {
    const auto it = reference_rmspe.find(h);
    row.push_back(it != reference_rmspe.end() && it->second ? fixed(*it->second, 4) : "");
    row.insert(row.end(), {"", "", ""});
  }
  csv::write_record(out, row);
  for (const auto& m : models) {
    row = {m};
    for (int h : horizons) {
      const auto it = cells.find({m, h});
      if (it == cells.end()) {
        row.insert(row.end(), {"", "", "", ""});
        continue;
      }
      const auto& c = it->second;
      row.push_back(c.relative ? fixed(*c.relative, 3) : "");
      row.push_back(c.stars);
      row.push_back(c.in_mcs ? "1" : "0");
      row.push_back(c.is_min ? "1" : "0");
    }
    csv::write_record(out, row);
  }
}

std::set<YearMonth> load_recession_months(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open recession dates " + path.string());
  std::string line;
  std::getline(in, line);
  const auto header = csv::split_record(line);
  if (header.size() < 2 || header[0] != "peak" || header[1] != "trough")
    throw SchemaError(path.string() + ": expected header peak,trough");
  std::set<YearMonth> months;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = csv::split_record(line);
    if (f.size() < 2) throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected peak,trough");
    const YearMonth peak = YearMonth::parse(f[0]), trough = YearMonth::parse(f[1]);
    if (trough < peak) throw ParseError(path.string() + ":" + std::to_string(lineno) + ": trough precedes peak");
    for (YearMonth m = peak + 1; m <= trough; m += 1) months.insert(m);
  }
  return months;
}

}  // namespace macroml
