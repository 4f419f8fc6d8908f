#include <cmath>
#include <numeric>

#include "doctest.h"
#include "macroml/common/error.hpp"
#include "macroml/data/factors.hpp"
#include "macroml/data/predictors.hpp"
#include "macroml/data/raw_panel.hpp"
#include "macroml/data/transforms.hpp"
#include "macroml/models/linear.hpp"
#include "support.hpp"

using namespace macroml;

namespace {

std::string toy_csv(int rows, const std::string& codes = "1,5,2") {
  std::string s = "sasdate,A,B,C\nTransform:," + codes + "\n";
  for (int t = 0; t < rows; ++t) {
    const YearMonth d = YearMonth(2000, 1) + t;
    s += std::to_string(d.month()) + "/1/" + std::to_string(d.year()) + "," + std::to_string(1.0 + 0.1 * t) + "," +
         std::to_string(100.0 * std::exp(0.01 * t)) + "," + std::to_string(5.0 + std::sin(t)) + "\n";
  }
  return s + "\n\n";
}

}  // namespace

TEST_CASE("year-month parsing accepts the common FRED layouts") {
  CHECK(YearMonth::parse("1960-01-01") == YearMonth(1960, 1));
  CHECK(YearMonth::parse("1960:03") == YearMonth(1960, 3));
  CHECK(YearMonth::parse("12/1/2017") == YearMonth(2017, 12));
  CHECK(YearMonth::parse("2017M12") == YearMonth(2017, 12));
  CHECK_THROWS_AS(YearMonth::parse("2017-13"), ParseError);
  CHECK(YearMonth(2017, 12) - YearMonth(1980, 1) == 455);
}

TEST_CASE("ingest a toy panel") {
  testing::TempDir dir("ingest");
  const auto p = ingest_fredmd(dir.write("toy.csv", toy_csv(30)));
  CHECK(p.n_series() == 3);
  CHECK(p.tcodes == std::vector<int>{1, 5, 2});
  CHECK(p.n_periods() == 30);
  CHECK(p.dates.front() == YearMonth(2000, 1));

  SUBCASE("cache round trip") {
    write_panel_csv(p, dir.file("cache.csv"));
    const auto q = ingest_fredmd(dir.file("cache.csv"));
    CHECK(q.names == p.names);
    CHECK(q.dates == p.dates);
    CHECK(q.values.isApprox(p.values, 0.0));
  }
}

TEST_CASE("ingest rejects a bad tcode and names the series") {
  testing::TempDir dir("tcode");
  try {
    ingest_fredmd(dir.write("bad.csv", toy_csv(30, "1,9,2")));
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("'B'") != std::string::npos);
  }
}

TEST_CASE("ingest reports the line of a malformed date") {
  testing::TempDir dir("date");
  std::string csv = toy_csv(30);
  csv.replace(csv.find("3/1/2000"), 8, "zz/1/2000");
  try {
    ingest_fredmd(dir.write("bad.csv", csv));
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 5") != std::string::npos);
  }
}

TEST_CASE("panel needs 24 observations per series") {
  testing::TempDir dir("short");
  CHECK_THROWS_AS(ingest_fredmd(dir.write("short.csv", toy_csv(20))), ValidationError);
}

TEST_CASE("tcode transforms") {
  const std::vector<double> a{3, 1, 4};
  CHECK(apply_tcode(a, 1) == a);
  const auto d = apply_tcode(std::vector<double>{5, 7, 10}, 2);
  CHECK(std::isnan(d[0]));
  CHECK(d[1] == 2);
  CHECK(d[2] == 3);
  const double e = std::exp(1.0);
  const auto g = apply_tcode(std::vector<double>{1, e, e * e}, 5);
  CHECK(std::isnan(g[0]));
  CHECK(g[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g[2] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(apply_tcode(std::vector<double>{1, -2, 3}, 4), DomainError);
  CHECK_THROWS_AS(apply_tcode(a, 8), ArgumentError);

  const auto d2 = apply_tcode(std::vector<double>{1, 2, 4, 8}, 3);
  CHECK(d2[3] == 2.0);
  const auto c7 = apply_tcode(std::vector<double>{1, 2, 3}, 7);
  CHECK(c7[2] == doctest::Approx(0.5 - 1.0));
}

TEST_CASE("first difference then cumulative sum restores the series") {
  const auto x = testing::randn(200, 3);
  std::vector<double> s(x.data(), x.data() + x.size());
  const auto d = apply_tcode(s, 2);
  double acc = s[0];
  for (std::size_t i = 1; i < s.size(); ++i) {
    acc += d[i];
    CHECK(std::abs(acc - s[i]) < 1e-10);
  }
}

TEST_CASE("direct-forecast targets") {
  const std::vector<double> lv{100, 110, 121};
  const auto g = build_target(lv, TargetKind::AvgLogGrowth, 2);
  CHECK(g.values[2] == doctest::Approx(std::log(1.1)).epsilon(1e-14));
  CHECK(std::isnan(g.values[1]));
  CHECK(g.at_origin(0) == g.values[2]);

  const auto u = build_target(std::vector<double>{5.0, 5.5, 6.5}, TargetKind::AvgDiff, 2);
  CHECK(u.values[2] == doctest::Approx(0.75));

  const std::vector<double> lvl{1, 2, 3, 4};
  const auto l = build_target(lvl, TargetKind::LevelI0, 1);
  CHECK(std::isnan(l.values[0]));
  for (int t = 0; t < 3; ++t) CHECK(l.at_origin(t) == lvl[t + 1]);

  const auto empty = build_target(lvl, TargetKind::LevelI0, 10);
  CHECK(std::all_of(empty.values.begin(), empty.values.end(), [](double v) { return std::isnan(v); }));
  CHECK_THROWS_AS(build_target(lvl, TargetKind::LevelI0, 0), ArgumentError);

  const auto annual = build_target(lv, TargetKind::AvgLogGrowth, 2, 12.0);
  CHECK(annual.values[2] == doctest::Approx(12.0 * std::log(1.1)));
}

TEST_CASE("standardisation is idempotent") {
  const Matrix x = testing::randn(80, 5, 7) * 3.0;
  const Matrix s1 = Standardization::fit(x).apply(x);
  const Matrix s2 = Standardization::fit(s1).apply(s1);
  CHECK((s1 - s2).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("principal components") {
  SUBCASE("identical columns put all variance in the first component") {
    Matrix x(40, 2);
    x.col(0) = testing::randn(40, 1);
    x.col(1) = x.col(0);
    const auto fs = extract_factors(x, 1);
    CHECK(fs.variance_share(0) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("orthonormal columns give equal eigenvalues") {
    const Matrix q = Eigen::HouseholderQR<Matrix>(testing::randn(30, 4, 2)).householderQ() * Matrix::Identity(30, 4);
    const auto fs = extract_factors(q, 4);
    for (int j = 1; j < 4; ++j) CHECK(fs.eigenvalues(j) == doctest::Approx(fs.eigenvalues(0)).epsilon(1e-10));
  }
  SUBCASE("full reconstruction, orthogonality, ordering, signs") {
    const Matrix x = Standardization::fit(testing::randn(50, 10, 3)).apply(testing::randn(50, 10, 3));
    const auto fs = extract_factors(x, 10);
    CHECK((fs.factors * fs.loadings.transpose() - x).cwiseAbs().maxCoeff() < 1e-8);
    const Matrix gram = fs.factors.transpose() * fs.factors;
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 10; ++j)
        if (i != j) CHECK(std::abs(gram(i, j)) < 1e-8 * 50);
    for (int j = 1; j < fs.eigenvalues.size(); ++j) CHECK(fs.eigenvalues(j) <= fs.eigenvalues(j - 1));
    for (int j = 0; j < 10; ++j) {
      Eigen::Index arg;
      fs.loadings.col(j).cwiseAbs().maxCoeff(&arg);
      CHECK(fs.loadings(arg, j) > 0);
    }
    CHECK_THROWS_AS(extract_factors(x, 11), ArgumentError);
  }
}

namespace {

PredictorInputs inputs_for(int rows, int n, std::uint64_t seed) {
  PredictorInputs in;
  for (int t = 0; t < rows; ++t) in.dates.push_back(YearMonth(1990, 1) + t);
  in.y_stationary = testing::randn(rows, seed);
  const Matrix x = testing::randn(rows, n, seed + 1);
  in.x = Standardization::fit(x).apply(x);
  in.factors = extract_factors(*in.x, n).factors;
  return in;
}

}  // namespace

TEST_CASE("predictor set column counts") {
  const auto in = inputs_for(120, 10, 11);
  const YearMonth first = in.dates[12], origin = in.dates[119];

  const auto poor = assemble_predictors(in, Rotation::None, {1, 0, 0}, first, origin, origin);
  CHECK(poor.z.cols() == 2);
  CHECK(poor.column_names == std::vector<std::string>{"y_lag0", "y_lag1"});
  CHECK(poor.z(0, 1) == in.y_stationary(11));

  const auto ardi = assemble_predictors(in, Rotation::None, {3, 6, 3}, first, origin, origin);
  CHECK(ardi.z.cols() == 4 + 7 * 3);
  CHECK(ardi.n_factor_cols == 21);

  const auto b2 = assemble_predictors(in, Rotation::B2, {1, 1, 0}, first, origin, origin);
  CHECK(b2.n_factor_cols == 20);
  CHECK(b2.z.cols() == 2 + 20);

  const auto b1 = assemble_predictors(in, Rotation::B1, {1, 1, 0}, first, origin, origin);
  CHECK(b1.n_extra_cols == 20);

  const auto b3 = assemble_predictors(in, Rotation::B3, {5, 1, 0}, first, origin, origin);
  CHECK(b3.z.cols() == 26);
  const Matrix c = b3.z.transpose() * b3.z;
  for (int i = 0; i < 26; ++i)
    for (int j = 0; j < 26; ++j)
      if (i != j) CHECK(std::abs(c(i, j)) < 1e-8 * 108);

  PredictorInputs no_x = in;
  no_x.x.reset();
  CHECK_THROWS_AS(assemble_predictors(no_x, Rotation::B1, {1, 1, 0}, first, origin, origin), ArgumentError);
  CHECK_THROWS_AS(assemble_predictors(in, Rotation::None, {1, 1, 0}, in.dates[0], origin, origin), ArgumentError);
}

TEST_CASE("no predictor cell is dated after its origin") {
  const auto in = inputs_for(150, 6, 21);
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    const int o = 20 + static_cast<int>(rng() % 120);
    for (auto rot : {Rotation::None, Rotation::B1, Rotation::B2, Rotation::B3}) {
      const auto ps = assemble_predictors(in, rot, {3, 3, 2}, in.dates[12], in.dates[o], in.dates[o]);
      CHECK(ps.max_data_date() <= in.dates[o]);
      CHECK(ps.row_dates.back() == in.dates[o]);
    }
  }
}

TEST_CASE("all principal components span the panel") {
  const auto in = inputs_for(140, 10, 31);
  const YearMonth first = in.dates[12], origin = in.dates[139];
  const auto b1 = assemble_predictors(in, Rotation::B1, {1, 1, 0}, first, origin, origin);
  const auto b2 = assemble_predictors(in, Rotation::B2, {1, 1, 0}, first, origin, origin);
  const Vector y = testing::randn(b1.z.rows(), 99);
  const auto f1 = fit_ols(b1.z, y, {true, false});
  const auto f2 = fit_ols(b2.z, y, {true, false});
  CHECK((f1.predict(b1.z) - f2.predict(b2.z)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("training-row standardisation ignores later rows") {
  auto in = inputs_for(120, 4, 41);
  const YearMonth first = in.dates[12], origin = in.dates[119], train_last = in.dates[100];
  const auto a = assemble_predictors(in, Rotation::B1, {1, 1, 0}, first, origin, train_last);
  in.x->bottomRows(19).array() += 100.0;
  in.y_stationary.tail(19).array() += 100.0;
  const auto b = assemble_predictors(in, Rotation::B1, {1, 1, 0}, first, origin, train_last);
  CHECK((a.standardization.mean - b.standardization.mean).norm() == 0.0);
  CHECK((a.standardization.scale - b.standardization.scale).norm() == 0.0);
}

TEST_CASE("windows drop incomplete series and extract factors up to the cutoff") {
  RawPanel raw;
  const int rows = 100;
  for (int t = 0; t < rows; ++t) raw.dates.push_back(YearMonth(1970, 1) + t);
  raw.names = {"a", "b", "c", "late"};
  raw.tcodes = {1, 2, 5, 1};
  raw.values = testing::randn(rows, 4, 51).array().abs() + 1.0;
  for (int t = 0; t < 40; ++t) raw.values(t, 3) = kMissing;
  const auto tp = TransformedPanel::from(raw);
  CHECK(std::isnan(tp.x(0, 1)));
  std::vector<double> ys(rows);
  for (int t = 0; t < rows; ++t) ys[t] = tp.x(t, 0);

  WindowRequest req{raw.dates[2], raw.dates[70], raw.dates[80], 2, true};
  const auto w = make_window(tp, ys, req);
  CHECK(w.series == std::vector<int>{0, 1, 2});
  CHECK(w.inputs.factors->cols() == 2);
  CHECK(w.inputs.dates.size() == 79);

  auto tp2 = tp;
  tp2.x.bottomRows(20).array() += 50.0;
  const auto w2 = make_window(tp2, ys, req);
  CHECK((w.inputs.factors->topRows(69) - w2.inputs.factors->topRows(69)).cwiseAbs().maxCoeff() == 0.0);
}
