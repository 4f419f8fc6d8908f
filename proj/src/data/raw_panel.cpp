#include "macroml/data/raw_panel.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "macroml/common/csv.hpp"
#include "macroml/common/error.hpp"

namespace macroml {
namespace {

std::string trimmed(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& cell, double& out) {
  const std::string s = trimmed(cell);
  if (s.empty() || s == "NA" || s == "NaN" || s == "nan" || s == ".") {
    out = kMissing;
    return true;
  }
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool blank(const std::vector<std::string>& cells) {
  for (const auto& c : cells)
    if (!trimmed(c).empty()) return false;
  return true;
}

}  // namespace

std::optional<int> RawPanel::find(const std::string& name) const {
  for (int j = 0; j < n_series(); ++j)
    if (names[j] == name) return j;
  return std::nullopt;
}

int RawPanel::require(const std::string& name) const {
  if (auto j = find(name)) return *j;
  throw ArgumentError("series '" + name + "' not in panel");
}

std::optional<int> RawPanel::row_of(YearMonth date) const {
  if (dates.empty()) return std::nullopt;
  const int r = date - dates.front();
  if (r < 0 || r >= n_periods()) return std::nullopt;
  return r;
}

void RawPanel::validate() const {
  if (static_cast<int>(tcodes.size()) != n_series())
    throw ValidationError("tcode count " + std::to_string(tcodes.size()) + " != series count " +
                          std::to_string(n_series()));
  if (values.rows() != n_periods() || values.cols() != n_series())
    throw ValidationError("value matrix shape does not match dates x names");
  for (int t = 1; t < n_periods(); ++t)
    if (dates[t] - dates[t - 1] != 1)
      throw ValidationError("dates not consecutive months at " + dates[t - 1].str() + " -> " + dates[t].str());
  for (int j = 0; j < n_series(); ++j) {
    if (tcodes[j] < 1 || tcodes[j] > 7)
      throw ValidationError("series '" + names[j] + "' has transformation code " + std::to_string(tcodes[j]) +
                            " outside 1..7");
    int present = 0;
    for (int t = 0; t < n_periods(); ++t) present += !is_missing(values(t, j));
    if (present < 24)
      throw ValidationError("series '" + names[j] + "' has only " + std::to_string(present) +
                            " observations (need >= 24)");
  }
}

RawPanel ingest_fredmd(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw ArgumentError("cannot open " + csv_path.string());

  std::string line;
  int line_no = 0;
  auto next = [&](std::vector<std::string>& cells) {
    while (std::getline(in, line)) {
      ++line_no;
      cells = csv::split_record(line);
      if (!blank(cells)) return true;
    }
    return false;
  };

  std::vector<std::string> cells;
  if (!next(cells)) throw ParseError(csv_path.string() + ": empty file");
  RawPanel panel;
  for (std::size_t j = 1; j < cells.size(); ++j) panel.names.push_back(trimmed(cells[j]));
  const std::size_t n = panel.names.size();
  if (n == 0) throw ParseError(csv_path.string() + ": header has no series");

  if (!next(cells)) throw ParseError(csv_path.string() + ": missing transformation-code row");
  if (cells.size() < n + 1) throw ParseError(csv_path.string() + ": transformation-code row too short");
  for (std::size_t j = 0; j < n; ++j) {
    double code = 0;
    if (!parse_number(cells[j + 1], code) || std::isnan(code) || code != std::floor(code))
      throw ParseError(csv_path.string() + ": bad transformation code '" + cells[j + 1] + "' for series '" +
                       panel.names[j] + "'");
    panel.tcodes.push_back(static_cast<int>(code));
  }
  for (std::size_t j = 0; j < n; ++j)
    if (panel.tcodes[j] < 1 || panel.tcodes[j] > 7)
      throw ValidationError("series '" + panel.names[j] + "' has transformation code " +
                            std::to_string(panel.tcodes[j]) + " outside 1..7");

  std::vector<std::vector<double>> rows;
  while (next(cells)) {
    YearMonth date;
    try {
      date = YearMonth::parse(cells[0]);
    } catch (const ParseError& e) {
      throw ParseError(csv_path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!panel.dates.empty() && date - panel.dates.back() != 1)
      throw ValidationError(csv_path.string() + " line " + std::to_string(line_no) + ": date " + date.str() +
                            " does not follow " + panel.dates.back().str());
    std::vector<double> row(n, kMissing);
    for (std::size_t j = 0; j < n && j + 1 < cells.size(); ++j)
      if (!parse_number(cells[j + 1], row[j]))
        throw ParseError(csv_path.string() + " line " + std::to_string(line_no) + ": bad number '" +
                         cells[j + 1] + "' for series '" + panel.names[j] + "'");
    panel.dates.push_back(date);
    rows.push_back(std::move(row));
  }

  panel.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n));
  for (std::size_t t = 0; t < rows.size(); ++t)
    for (std::size_t j = 0; j < n; ++j) panel.values(t, j) = rows[t][j];
  panel.validate();
  return panel;
}

void write_panel_csv(const RawPanel& panel, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot write " + path.string());
  std::vector<std::string> fields{"date"};
  fields.insert(fields.end(), panel.names.begin(), panel.names.end());
  csv::write_record(out, fields);
  fields.assign(1, "transform");
  for (int c : panel.tcodes) fields.push_back(std::to_string(c));
  csv::write_record(out, fields);
  for (int t = 0; t < panel.n_periods(); ++t) {
    fields.assign(1, panel.dates[t].str());
    for (int j = 0; j < panel.n_series(); ++j) fields.push_back(csv::format_double(panel.values(t, j)));
    csv::write_record(out, fields);
  }
}

}  // namespace macroml
