#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "eval_fixtures.hpp"
#include "macroml/common/error.hpp"
#include "macroml/eval/hac.hpp"
#include "macroml/eval/regression.hpp"
#include "macroml/eval/tests.hpp"

using namespace macroml;

namespace {

std::vector<double> to_vec(const Vector& v) { return {v.data(), v.data() + v.size()}; }

std::vector<double> ar1(int n, double phi, std::uint64_t seed) {
  const Vector e = testing::randn(n + 100, seed);
  std::vector<double> x(n + 100, 0.0);
  for (int i = 1; i < n + 100; ++i) x[i] = phi * x[i - 1] + e(i);
  return {x.begin() + 100, x.end()};
}

ForecastStore store_from(const std::map<std::string, Vector>& errors, const Vector& y, const std::string& var = "X",
                         int h = 1) {
  ForecastStore s;
  for (const auto& [m, e] : errors)
    for (Eigen::Index i = 0; i < e.size(); ++i)
      s.put({YearMonth(1990, 1) + static_cast<int>(i), h, var, m, y(i) - e(i), y(i), e(i), YearMonth(1989, 1)});
  return s;
}

}  // namespace

TEST_CASE("Newey-West bandwidth") {
  CHECK(newey_west_bandwidth(100) == 4);
  CHECK(newey_west_bandwidth(456) == 5);
  CHECK(newey_west_bandwidth(0) == 0);
}

TEST_CASE("HAC covariance") {
  SUBCASE("zero residuals give a zero matrix") {
    CHECK(hac_covariance(Matrix::Zero(50, 3), 4).isZero(0));
  }
  SUBCASE("bandwidth 0 matches the classical covariance under homoskedastic noise") {
    double ratio = 0.0;
    for (std::uint64_t s = 0; s < 500; ++s) {
      Matrix x(200, 2);
      x.col(0).setOnes();
      x.col(1) = testing::randn(200, 10 + s);
      const Vector y = x * Vector::Ones(2) + testing::randn(200, 5000 + s);
      const auto fit = ols_hac(x, y, 0);
      const Matrix classical = ols_classical_cov(x, fit.residuals);
      ratio += std::sqrt(fit.cov(1, 1) / classical(1, 1));
    }
    CHECK(std::abs(ratio / 500 - 1.0) < 0.05);
  }
  SUBCASE("AR(1) residuals inflate the HAC standard error") {
    int wins = 0;
    for (std::uint64_t s = 0; s < 500; ++s) {
      const auto u = ar1(200, 0.5, 20 + s);
      const Matrix x = Matrix::Ones(200, 1);
      const Vector y = Eigen::Map<const Vector>(u.data(), 200);
      const auto fit = ols_hac(x, y, newey_west_bandwidth(200));
      wins += fit.cov(0, 0) > ols_classical_cov(x, fit.residuals)(0, 0);
    }
    CHECK(wins >= 475);
  }
  SUBCASE("clustered moments sum within keys") {
    const Matrix g = testing::randn(6, 2, 3);
    const std::vector<int> keys{0, 0, 1, 1, 1, 2};
    Matrix x = Matrix::Ones(6, 1);
    const Vector y = testing::randn(6, 4);
    const auto fit = ols_hac(x, y, 0, &keys);
    const Vector u = fit.residuals;
    const double s = std::pow(u(0) + u(1), 2) + std::pow(u(2) + u(3) + u(4), 2) + u(5) * u(5);
    CHECK(fit.cov(0, 0) == doctest::Approx(s / 36.0));
  }
}

TEST_CASE("Diebold-Mariano") {
  const auto a = to_vec(testing::randn(200, 1));
  SUBCASE("identical losses") {
    const auto r = dm_test(a, a, 1);
    CHECK(r.statistic == 0.0);
    CHECK(r.p_value == 1.0);
  }
  SUBCASE("antisymmetry") {
    const auto b = to_vec(testing::randn(200, 2));
    for (int h : {1, 3, 12}) CHECK(dm_test(a, b, h).statistic == -dm_test(b, a, h).statistic);
  }
  SUBCASE("mean shift of half a standard deviation") {
    double sum = 0.0;
    int close = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
      const Vector d = testing::randn(1000, 100 + s).array() + 0.5;
      const auto r = dm_test(to_vec(d), std::vector<double>(1000, 0.0), 1);
      sum += r.statistic;
      close += std::abs(r.statistic - 0.5 * std::sqrt(1000.0)) <= 1.5;
    }
    CHECK(std::abs(sum / 100 - 15.81) < 0.5);
    CHECK(close >= 75);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(dm_test(std::vector<double>(20, 1.0), std::vector<double>(20, 0.0), 1), ArgumentError);
    CHECK_THROWS_AS(dm_test(std::vector<double>(40, 1.0), std::vector<double>(41, 0.0), 1), ArgumentError);
    CHECK_THROWS_AS(dm_test(std::vector<double>(40, 1.0), std::vector<double>(40, 0.0), 1), DomainError);
  }
  CHECK(significance_stars(0.005) == "***");
  CHECK(significance_stars(0.03) == "**");
  CHECK(significance_stars(0.07) == "*");
  CHECK(significance_stars(0.2).empty());
}

TEST_CASE("fluctuation test") {
  const auto a = to_vec(testing::randn(200, 5));
  const auto b = to_vec(testing::randn(200, 6));
  SUBCASE("identical losses give a flat path") {
    const auto r = fluctuation_test(a, a, 60, 1);
    CHECK(r.path.size() == 141);
    CHECK(std::all_of(r.path.begin(), r.path.end(), [](double x) { return x == 0.0; }));
  }
  SUBCASE("full window equals the DM statistic") {
    for (int h : {1, 12}) {
      const auto r = fluctuation_test(a, b, 200, h);
      REQUIRE(r.path.size() == 1);
      CHECK(r.path[0] == doctest::Approx(dm_test(a, b, h).statistic).epsilon(1e-12));
      CHECK(r.critical_05 == doctest::Approx(1.96));
    }
  }
  SUBCASE("planted break") {
    std::vector<double> d(240);
    const Vector e = testing::randn(240, 9);
    for (int i = 0; i < 240; ++i) d[i] = (i >= 120 ? 1.5 : 0.0) + e(i);
    const auto r = fluctuation_test(d, std::vector<double>(240, 0.0), 48, 1);
    const auto first = std::find_if(r.path.begin(), r.path.end(), [&](double x) { return x > r.critical_05; });
    REQUIRE(first != r.path.end());
    CHECK(first - r.path.begin() + 47 >= 120);
    CHECK(r.rejects_05);
  }
  SUBCASE("critical values and errors") {
    CHECK(fluctuation_critical_value(0.3, 0.05) == doctest::Approx(3.012));
    CHECK(fluctuation_critical_value(0.25, 0.05) == doctest::Approx((3.179 + 3.012) / 2));
    CHECK(fluctuation_critical_value(0.05, 0.10) == doctest::Approx(3.170));
    CHECK_THROWS_AS(fluctuation_test(a, b, 23, 1), ArgumentError);
    CHECK_THROWS_AS(fluctuation_test(a, b, 201, 1), ArgumentError);
  }
}

TEST_CASE("model confidence set") {
  SUBCASE("single model survives") {
    const auto r = model_confidence_set(testing::randn(100, 1, 1), {"A"}, {0.01});
    CHECK(r.survivors == std::vector<std::string>{"A"});
  }
  SUBCASE("strictly dominated model is removed") {
    Matrix l(150, 2);
    l.col(1) = testing::randn(150, 2).array().square();
    l.col(0) = l.col(1).array() + 1.0;
    const auto r = model_confidence_set(l, {"A", "B"}, {0.1});
    CHECK(r.survivors == std::vector<std::string>{"B"});
    CHECK(r.eliminated == std::vector<std::string>{"A"});
  }
  SUBCASE("no differential variance keeps everyone") {
    Matrix l(100, 3);
    l.col(0) = testing::randn(100, 3);
    l.col(1) = l.col(0);
    l.col(2) = l.col(0);
    const auto r = model_confidence_set(l, {"A", "B", "C"});
    CHECK(r.survivors.size() == 3);
    for (const auto& [m, p] : r.mcs_p) CHECK(p == 1.0);
  }
  SUBCASE("nested across levels and p-values monotone in elimination order") {
    for (std::uint64_t s = 0; s < 10; ++s) {
      Matrix l = testing::randn(120, 5, 40 + s).array().square();
      l.col(3).array() += 0.3;
      l.col(4).array() += 0.1;
      const std::vector<std::string> names{"a", "b", "c", "d", "e"};
      McsOptions o;
      o.seed = s;
      o.alpha = 0.10;
      const auto wide = model_confidence_set(l, names, o);
      o.alpha = 0.25;
      const auto narrow = model_confidence_set(l, names, o);
      for (const auto& m : narrow.survivors)
        CHECK(std::find(wide.survivors.begin(), wide.survivors.end(), m) != wide.survivors.end());
      double last = 0.0;
      for (const auto& m : wide.eliminated) {
        CHECK(wide.mcs_p.at(m) >= last);
        last = wide.mcs_p.at(m);
      }
    }
  }
  SUBCASE("bootstrap is identical with and without threads") {
    const Matrix l = testing::randn(100, 4, 8);
    CHECK(mcs_bootstrap_means(l, 200, 12, 5) == mcs_bootstrap_means_serial(l, 200, 12, 5));
  }
}

TEST_CASE("pseudo R2") {
  ForecastStore s;
  const Vector y = (Vector(4) << 1.0, -1.0, 1.0, -1.0).finished();
  s = store_from({{"M", Vector::Zero(4)}}, y);
  const auto den = benchmark_denominators(s, LossKind::Squared);
  CHECK(den.at({"X", 1}) == 1.0);
  CHECK(pseudo_r2(compute_error_panel(s, LossKind::Squared), den).begin()->second == 1.0);

  LossPanel lp;
  lp.set({YearMonth(1990, 1), 1, "X", "M"}, 1.0);
  CHECK(pseudo_r2(lp, den).begin()->second == 0.0);
  CHECK(pseudo_r2(lp, den, 100.0).begin()->second == 0.0);
  lp.set({YearMonth(1990, 1), 1, "X", "M"}, 0.5);
  const auto mad = benchmark_denominators(s, LossKind::Absolute);
  CHECK(pseudo_r2(lp, mad).begin()->second == 0.5);

  const auto flat = store_from({{"M", Vector::Zero(3)}}, Vector::Ones(3), "FLAT", 3);
  try {
    pseudo_r2(compute_error_panel(flat, LossKind::Squared), benchmark_denominators(flat, LossKind::Squared));
    FAIL("expected ArgumentError");
  } catch (const ArgumentError& e) {
    CHECK(std::string(e.what()).find("(FLAT, h=3)") != std::string::npos);
  }
}

TEST_CASE("relative RMSPE table") {
  const Vector y = testing::randn(60, 1);
  const auto s = store_from({{"AR,BIC", testing::randn(60, 2)}, {"ARDI,BIC", testing::randn(60, 3) * 0.5}}, y);
  const auto tab = relative_rmspe_table(s, "AR,BIC");
  CHECK(*tab.at({"X", 1, "AR,BIC"}).relative == 1.0);
  CHECK(*tab.at({"X", 1, "ARDI,BIC"}).relative < 1.0);
  const auto masked = relative_rmspe_table(s, "AR,BIC", [](YearMonth) { return false; });
  CHECK_FALSE(masked.at({"X", 1, "ARDI,BIC"}).relative.has_value());
  CHECK_THROWS_AS(relative_rmspe_table(s, "RRAR,K-fold"), ArgumentError);

  const auto tables = appendix_tables(s, "AR,BIC");
  REQUIRE(tables.size() == 1);
  const auto& c = tables[0].cells.at({"ARDI,BIC", 1});
  CHECK(c.stars == "***");
  CHECK(c.in_mcs);
  CHECK(c.is_min);
  CHECK_FALSE(tables[0].cells.at({"AR,BIC", 1}).in_mcs);
  std::ostringstream out;
  tables[0].write_csv(out);
  CHECK(out.str().rfind("model,h1,h1_dm,h1_mcs,h1_min\n\"AR,BIC (RMSPE)\",", 0) == 0);
}

TEST_CASE("recession months") {
  testing::TempDir dir("eval");
  const auto path = dir.write("r.csv", "peak,trough\n2007-12,2009-06\n2001-03,2001-11\n");
  const auto m = load_recession_months(path);
  CHECK(m.size() == 18 + 8);
  CHECK_FALSE(m.count(YearMonth(2007, 12)));
  CHECK(m.count(YearMonth(2009, 6)));
  CHECK_THROWS_AS(load_recession_months(dir.write("bad.csv", "start,end\n")), SchemaError);
}

TEST_CASE("within transform") {
  const auto p = testing::planted_r2_panel(1, 5.0, 0.0, 36);
  std::vector<RecordKey> keys;
  Matrix m(static_cast<Eigen::Index>(p.r2.size()), 2);
  Eigen::Index i = 0;
  for (const auto& [k, v] : p.r2) {
    keys.push_back(k);
    m(i, 0) = v;
    m(i++, 1) = k.model.size();
  }
  const Matrix once = demean_within(keys, m);
  CHECK((demean_within(keys, once) - once).cwiseAbs().maxCoeff() < 1e-12);
  std::map<std::tuple<YearMonth, std::string, int>, double> sums;
  for (std::size_t r = 0; r < keys.size(); ++r) sums[{keys[r].t, keys[r].variable, keys[r].h}] += once(r, 0);
  for (const auto& [g, s] : sums) CHECK(std::abs(s) < 1e-8);
}

TEST_CASE("treatment regression") {
  SUBCASE("one model has no within variation") {
    const auto p = testing::planted_r2_panel(2, 5.0, 0.0, 40);
    CHECK_THROWS_AS(treatment_regression(p.r2, {"AR,K-fold"}, {Feature::NL}), ArgumentError);
    CHECK_THROWS_AS(treatment_regression(p.r2, {"AR,K-fold", "ARDI,K-fold"}, {Feature::NL}), CollinearityError);
  }
  SUBCASE("constant contrast") {
    ValuePanel panel;
    const Vector base = testing::randn(50, 3);
    for (int t = 0; t < 50; ++t) {
      panel[{YearMonth(2000, 1) + t, 1, "X", "AR,K-fold"}] = base(t);
      panel[{YearMonth(2000, 1) + t, 1, "X", "RFAR,K-fold"}] = base(t) + 2.5;
    }
    const auto r = treatment_regression(panel, {"AR,K-fold", "RFAR,K-fold"}, {Feature::NL});
    CHECK(r.coefficient("NL") == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(r.degenerate);
    CHECK(r.std_error("NL") == 0.0);
    CHECK(r.n_groups == 50);
  }
  SUBCASE("planted NL effect") {
    int covered = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
      const auto p = testing::planted_r2_panel(100 + s, 5.0, 0.0);
      const auto r = treatment_regression(p.r2, testing::nl_model_set(), {Feature::NL});
      covered += std::abs(r.coefficient("NL") - 5.0) <= 2.0 * r.std_error("NL");
    }
    CHECK(covered >= 90);
  }
  SUBCASE("collinear dummies name the redundant level") {
    const auto p = testing::planted_r2_panel(3, 5.0, 0.0, 40);
    try {
      treatment_regression(p.r2, testing::nl_model_set(), {Feature::NL, Feature::X, Feature::SH});
      FAIL("expected CollinearityError");
    } catch (const CollinearityError& e) {
      REQUIRE(e.columns.size() == 1);
      CHECK((e.columns[0] == "X" || e.columns[0] == "SH=None" || e.columns[0] == "NL"));
    }
  }
  SUBCASE("singleton groups are dropped") {
    auto p = testing::planted_r2_panel(4, 5.0, 0.0, 30);
    p.r2[{YearMonth(1980, 1), 1, "INDPRO", "AR,K-fold"}] = 1.0;
    const auto r = treatment_regression(p.r2, testing::nl_model_set(), {Feature::NL});
    CHECK(r.dropped_singletons == 1);
  }
  SUBCASE("squared-error and R2 regressions agree in sign") {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto p = testing::planted_r2_panel(200 + s, s % 2 ? 3.0 : -3.0, 0.0, 60);
      const double denom = 2.5;
      ValuePanel mse;
      for (const auto& [k, v] : p.r2) mse[k] = denom * (1.0 - v / 100.0);
      const auto a = treatment_regression(mse, testing::nl_model_set(), {Feature::NL});
      const auto b = treatment_regression(p.r2, testing::nl_model_set(), {Feature::NL});
      CHECK(std::signbit(a.coefficient("NL")) != std::signbit(b.coefficient("NL")));
    }
  }
  SUBCASE("categorical coding") {
    const auto d = FeatureDummies::from_roster();
    const auto sh = d.regressors(Feature::SH, {"ARDI,K-fold", "RRARDI,K-fold", "KRR-ARDI,K-fold"});
    REQUIRE(sh.size() == 2);
    CHECK(sh[0].name == "SH=Ridge-PCA");
    CHECK(sh[1].name == "SH=Ridge-PCR");
    const auto cv = d.regressors(Feature::CV, {"AR,BIC", "AR,AIC", "AR,POOS-CV", "AR,K-fold"});
    REQUIRE(cv.size() == 3);
    CHECK(cv[0].value({YearMonth(2000, 1), 1, "X", "AR,AIC"}) == 1.0);
    CHECK(cv[0].value({YearMonth(2000, 1), 1, "X", "AR,BIC"}) == 0.0);
  }
  SUBCASE("recession interaction") {
    const auto p = testing::planted_r2_panel(5, 5.0, 0.0, 60);
    const auto nl = FeatureDummies::from_roster().regressors(Feature::NL, testing::nl_model_set()).front();
    const auto rec = interact(nl, "NL*rec", [](const RecordKey& k) { return k.t.month() <= 6 ? 1.0 : 0.0; });
    const auto r = treatment_regression(p.r2, testing::nl_model_set(), {Feature::NL}, FeatureDummies::from_roster(), {rec});
    CHECK(r.names == std::vector<std::string>{"NL", "NL*rec"});
    CHECK(std::abs(r.coefficient("NL*rec")) < 4 * r.std_error("NL*rec"));
  }
}

TEST_CASE("heterogeneity regression") {
  SUBCASE("zero conditioning series reduces to the treatment regression") {
    auto p = testing::planted_r2_panel(6, 5.0, 0.0, 60);
    for (auto& [t, v] : p.xi) v = 0.0;
    const auto h = heterogeneity_regression(p.r2, testing::nl_model_set(), p.xi);
    const auto t = treatment_regression(p.r2, testing::nl_model_set(), {Feature::NL});
    CHECK(h.coefficient("NL") == doctest::Approx(t.coefficient("NL")).epsilon(1e-12));
    CHECK(h.unidentified == std::vector<std::string>{"NL*xi"});
  }
  SUBCASE("planted interaction") {
    int covered = 0;
    for (std::uint64_t s = 0; s < 50; ++s) {
      const auto p = testing::planted_r2_panel(300 + s, 5.0, 10.0);
      const auto r = heterogeneity_regression(p.r2, testing::nl_model_set(), p.xi);
      covered += std::abs(r.coefficient("NL*xi") - 10.0) <= 2.0 * r.std_error("NL*xi");
    }
    CHECK(covered >= 45);
  }
  SUBCASE("missing conditioning values drop rows") {
    auto p = testing::planted_r2_panel(7, 5.0, 10.0, 60);
    const auto first = p.xi.begin()->first;
    auto xi = p.xi;
    for (int i = 0; i < 30; ++i) xi.erase(first + i);
    const auto r = heterogeneity_regression(p.r2, testing::nl_model_set(), xi);
    CHECK(r.dropped_rows > 0);
    CHECK(r.n_obs + r.dropped_rows == static_cast<int>(p.r2.size()));
  }
}
