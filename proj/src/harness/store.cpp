#include "macroml/harness/store.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>

#include "macroml/common/csv.hpp"
#include "macroml/common/error.hpp"

namespace macroml {

static_assert(std::endian::native == std::endian::little, "store format assumes little-endian hosts");

bool ForecastStore::put(const ForecastRecord& r) {
  if (!std::isfinite(r.e) || !std::isfinite(r.yhat) || !std::isfinite(r.y))
    throw ArgumentError("forecast record for " + r.model + " at " + r.t.str() + " is not finite");
  auto [it, inserted] = records_.insert_or_assign(r.key(), r);
  return !inserted;
}

int ForecastStore::merge(const ForecastStore& other) {
  int overwritten = 0;
  for (const auto& [k, r] : other.records_) overwritten += put(r) ? 1 : 0;
  return overwritten;
}

const ForecastRecord* ForecastStore::find(const RecordKey& k) const {
  auto it = records_.find(k);
  return it == records_.end() ? nullptr : &it->second;
}

std::vector<std::string> ForecastStore::models() const {
  std::set<std::string> s;
  for (const auto& [k, r] : records_) s.insert(k.model);
  return {s.begin(), s.end()};
}

std::vector<std::string> ForecastStore::variables() const {
  std::set<std::string> s;
  for (const auto& [k, r] : records_) s.insert(k.variable);
  return {s.begin(), s.end()};
}

std::vector<int> ForecastStore::horizons() const {
  std::set<int> s;
  for (const auto& [k, r] : records_) s.insert(k.h);
  return {s.begin(), s.end()};
}

namespace {

constexpr char kMagic[4] = {'M', 'L', 'F', 'S'};

template <class T>
void put_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get_pod(std::istream& in) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw SchemaError("truncated store file");
  return v;
}

template <class T>
void put_column(std::ostream& out, const std::vector<T>& v) {
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <class T>
std::vector<T> get_column(std::istream& in, std::size_t n) {
  std::vector<T> v(n);
  if (!in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T))))
    throw SchemaError("truncated store file");
  return v;
}

void put_strings(std::ostream& out, const std::vector<std::string>& s) {
  put_pod<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  for (const auto& x : s) {
    put_pod<std::uint32_t>(out, static_cast<std::uint32_t>(x.size()));
    out.write(x.data(), static_cast<std::streamsize>(x.size()));
  }
}

std::vector<std::string> get_strings(std::istream& in) {
  const auto n = get_pod<std::uint32_t>(in);
  std::vector<std::string> s(n);
  for (auto& x : s) {
    const auto len = get_pod<std::uint32_t>(in);
    if (len > (1u << 20)) throw SchemaError("corrupt string table");
    x.resize(len);
    if (!in.read(x.data(), len)) throw SchemaError("truncated store file");
  }
  return s;
}

const std::vector<std::string> kCsvHeader{"date", "horizon", "variable", "model", "yhat", "y", "e", "tune_vintage"};

ForecastStore load_csv(std::istream& in, const std::filesystem::path& path) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(path.string() + ": empty store");
  if (csv::split_record(line) != kCsvHeader) throw SchemaError(path.string() + ": unexpected store header");
  ForecastStore store;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = csv::split_record(line);
    if (f.size() != kCsvHeader.size()) throw ParseError(path.string() + " line " + std::to_string(line_no));
    try {
      ForecastRecord r;
      r.t = YearMonth::parse(f[0]);
      r.h = std::stoi(f[1]);
      r.variable = f[2];
      r.model = f[3];
      r.yhat = std::stod(f[4]);
      r.y = std::stod(f[5]);
      r.e = std::stod(f[6]);
      r.tune_vintage = YearMonth::parse(f[7]);
      store.put(r);
    } catch (const std::exception& e) {
      throw ParseError(path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return store;
}

}  // namespace

void persist(const ForecastStore& store, const std::filesystem::path& path) {
  const auto variables = store.variables();
  const auto models = store.models();
  auto index_of = [](const std::vector<std::string>& table, const std::string& s) {
    return static_cast<std::uint32_t>(std::lower_bound(table.begin(), table.end(), s) - table.begin());
  };
  const std::size_t n = store.size();
  std::vector<std::int32_t> t, h, vintage;
  std::vector<std::uint32_t> v, m;
  std::vector<double> yhat, y, e;
  for (auto* col : {&t, &h, &vintage}) col->reserve(n);
  for (const auto& [k, r] : store.records()) {
    t.push_back(r.t.index());
    h.push_back(r.h);
    v.push_back(index_of(variables, r.variable));
    m.push_back(index_of(models, r.model));
    yhat.push_back(r.yhat);
    y.push_back(r.y);
    e.push_back(r.e);
    vintage.push_back(r.tune_vintage.index());
  }
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ArgumentError("cannot write " + tmp.string());
    out.write(kMagic, 4);
    put_pod<std::uint32_t>(out, ForecastStore::kSchemaVersion);
    put_strings(out, variables);
    put_strings(out, models);
    put_pod<std::uint64_t>(out, n);
    put_column(out, t);
    put_column(out, h);
    put_column(out, v);
    put_column(out, m);
    put_column(out, yhat);
    put_column(out, y);
    put_column(out, e);
    put_column(out, vintage);
    if (!out) throw ArgumentError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void export_csv(const ForecastStore& store, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ArgumentError("cannot write " + path.string());
  csv::write_record(out, kCsvHeader);
  for (const auto& [k, r] : store.records())
    csv::write_record(out, {r.t.str(), std::to_string(r.h), r.variable, r.model, csv::format_double(r.yhat),
                            csv::format_double(r.y), csv::format_double(r.e), r.tune_vintage.str()});
}

ForecastStore load_store(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open store " + path.string());
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() < 4 || std::memcmp(magic, kMagic, 4) != 0) {
    in.clear();
    in.seekg(0);
    return load_csv(in, path);
  }
  const auto version = get_pod<std::uint32_t>(in);
  if (version != ForecastStore::kSchemaVersion)
    throw SchemaError(path.string() + ": store schema version " + std::to_string(version) + ", expected " +
                      std::to_string(ForecastStore::kSchemaVersion));
  const auto variables = get_strings(in);
  const auto models = get_strings(in);
  const auto n = get_pod<std::uint64_t>(in);
  const auto t = get_column<std::int32_t>(in, n);
  const auto h = get_column<std::int32_t>(in, n);
  const auto v = get_column<std::uint32_t>(in, n);
  const auto m = get_column<std::uint32_t>(in, n);
  const auto yhat = get_column<double>(in, n);
  const auto y = get_column<double>(in, n);
  const auto e = get_column<double>(in, n);
  const auto vintage = get_column<std::int32_t>(in, n);
  ForecastStore store;
  for (std::size_t i = 0; i < n; ++i) {
    if (v[i] >= variables.size() || m[i] >= models.size()) throw SchemaError("corrupt string index");
    store.put({YearMonth::from_index(t[i]), h[i], variables[v[i]], models[m[i]], yhat[i], y[i], e[i],
               YearMonth::from_index(vintage[i])});
  }
  return store;
}

std::optional<double> LossPanel::get(const RecordKey& k) const {
  auto it = values_.find(k);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

LossPanel compute_error_panel(const ForecastStore& store, LossKind loss) {
  LossPanel p;
  p.kind = loss;
  for (const auto& [k, r] : store.records()) p.set(k, loss == LossKind::Squared ? r.e * r.e : std::abs(r.e));
  return p;
}

}  // namespace macroml
