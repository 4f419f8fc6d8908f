#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "macroml/common/error.hpp"
#include "macroml/models/fitted_model.hpp"
#include "macroml/models/forest.hpp"
#include "macroml/models/kernels.hpp"
#include "macroml/models/krr.hpp"
#include "macroml/models/linear.hpp"
#include "macroml/models/model_spec.hpp"
#include "macroml/models/svr.hpp"
#include "qp_reference.hpp"
#include "support.hpp"

using namespace macroml;

namespace {
const FitOptions raw{false, false};
}

TEST_CASE("OLS") {
  Matrix z(2, 1);
  z << 1, 2;
  Vector y(2);
  y << 1, 2;
  CHECK(fit_ols(Matrix(Matrix::Constant(3, 1, 0.0).array() + Vector::LinSpaced(3, 1, 3).array()),
                Vector::LinSpaced(3, 1, 3), raw)
            .beta(0) == doctest::Approx(1.0));

  const Matrix x = testing::randn(40, 3, 1);
  const Vector c = Vector::Constant(40, 2.5);
  const auto fc = fit_ols(x, c);
  CHECK(fc.raw_coefficients().tail(3).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(fc.raw_coefficients()(0) == doctest::Approx(2.5));

  const Vector yr = testing::randn(40, 2);
  const auto f = fit_ols(x, yr, {true, false});
  const Vector resid = yr - f.predict(x);
  CHECK((x.transpose() * resid).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(std::abs(resid.sum()) < 1e-8);
  Matrix xi(40, 4);
  xi << Vector::Ones(40), x;
  const Vector normal_eq = (xi.transpose() * xi).ldlt().solve(xi.transpose() * yr);
  CHECK((f.raw_coefficients() - normal_eq).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(f.n_params == 4);

  Matrix dup(40, 3);
  dup << x.col(0), x.col(1), x.col(0) * 2.0;
  const std::vector<std::string> names{"a", "b", "c"};
  try {
    fit_ols(dup, yr, {}, &names);
    FAIL("expected collinearity");
  } catch (const CollinearityError& e) {
    REQUIRE(e.columns.size() == 1);
    CHECK((e.columns[0] == "a" || e.columns[0] == "c"));
  }
}

TEST_CASE("ridge closed form and primal/dual equivalence") {
  Matrix z(2, 1);
  z << 1, 2;
  Vector y(2);
  y << 1, 2;
  const double expected = (z.transpose() * y)(0) / ((z.transpose() * z)(0) + 3.0);
  CHECK(expected == doctest::Approx(0.625));
  CHECK(fit_ridge(z, y, 3.0, RidgeMode::Primal, raw).beta(0) == doctest::Approx(0.625).epsilon(1e-14));
  CHECK(fit_ridge(z, y, 3.0, RidgeMode::Dual, raw).beta(0) == doctest::Approx(0.625).epsilon(1e-14));
  CHECK_THROWS_AS(fit_ridge(z, y, -1.0), ArgumentError);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const int n = 20 + static_cast<int>(seed) * 3, p = 5 + static_cast<int>(seed) * 4;
    const Matrix x = testing::randn(n, p, 100 + seed);
    const Vector yy = testing::randn(n, 200 + seed);
    const double lam = 0.1 * (1 + seed);
    const auto a = fit_ridge(x, yy, lam, RidgeMode::Primal);
    const auto b = fit_ridge(x, yy, lam, RidgeMode::Dual);
    CHECK((a.predict(x) - b.predict(x)).cwiseAbs().maxCoeff() < 1e-8);
  }

  const Matrix x = testing::randn(60, 4, 9);
  const Vector yy = testing::randn(60, 10);
  CHECK((fit_ridge(x, yy, 0.0).raw_coefficients() - fit_ols(x, yy).raw_coefficients()).cwiseAbs().maxCoeff() <
        1e-8);

  double prev = std::numeric_limits<double>::infinity();
  for (double lam : {0.0, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0}) {
    const double norm = fit_ridge(x, yy, lam).beta.norm();
    CHECK(norm <= prev + 1e-12);
    prev = norm;
  }

  const std::vector<double> ladder{0.0, 0.5, 5.0};
  const Matrix path = ridge_path_predict(x, yy, x.topRows(7), ladder);
  for (int l = 0; l < 3; ++l)
    CHECK((path.col(l) - fit_ridge(x, yy, ladder[l]).predict(x.topRows(7))).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("elastic net") {
  Matrix z(2, 1);
  z << 2, 0;  // Z'Z = 4
  Vector y(2);
  y << 5, 0;  // Z'y = 10
  CHECK(fit_elastic_net(z, y, 4.0, 1.0, raw).beta(0) == doctest::Approx(2.0).epsilon(1e-12));

  const Matrix x = testing::randn(50, 4, 3);
  const Vector yy = testing::randn(50, 4);
  SUBCASE("lambda 0 is OLS") {
    CHECK((fit_elastic_net(x, yy, 0.0, 0.5).raw_coefficients() - fit_ols(x, yy).raw_coefficients())
              .cwiseAbs()
              .maxCoeff() < 1e-6);
  }
  SUBCASE("alpha 0 is ridge with the same lambda") {
    for (double lam : {0.5, 5.0, 50.0})
      CHECK((fit_elastic_net(x, yy, lam, 0.0).beta - fit_ridge(x, yy, lam).beta).cwiseAbs().maxCoeff() < 1e-6);
  }
  SUBCASE("orthonormal design is soft-thresholded OLS") {
    const Matrix q = Eigen::HouseholderQR<Matrix>(testing::randn(30, 3, 5)).householderQ() * Matrix::Identity(30, 3);
    const Vector yq = testing::randn(30, 6) * 2.0;
    for (double alpha : {0.3, 1.0})
      for (double lam : {0.2, 1.0, 3.0}) {
        const auto f = fit_elastic_net(q, yq, lam, alpha, raw);
        for (int k = 0; k < 3; ++k) {
          const double b = q.col(k).dot(yq);
          const double t = lam * alpha / 2.0;
          const double sb = (std::abs(b) > t ? (b > 0 ? b - t : b + t) : 0.0) / (1.0 + lam * (1.0 - alpha));
          CHECK(std::abs(f.beta(k) - sb) < 1e-6);
        }
      }
  }
  SUBCASE("lasso subgradient conditions") {
    const Matrix xs = testing::randn(60, 12, 7);
    const Vector ys = xs.col(0) * 2.0 - xs.col(3) + testing::randn(60, 8) * 0.5;
    for (double lam : {1.0, 10.0, 60.0}) {
      const auto f = fit_elastic_net(xs, ys, lam, 1.0, raw);
      const Vector g = 2.0 * xs.transpose() * (ys - xs * f.beta);
      for (int k = 0; k < 12; ++k) {
        if (f.beta(k) == 0.0)
          CHECK(std::abs(g(k)) <= lam + 1e-6);
        else
          CHECK(std::abs(g(k) - lam * (f.beta(k) > 0 ? 1 : -1)) < 1e-6);
      }
    }
  }
  SUBCASE("non-convergence carries the iterate") {
    EnetControl tight{1, 1e-30};
    try {
      fit_elastic_net(x, yy, 0.1, 0.5, {}, tight);
      FAIL("expected a convergence error");
    } catch (const ConvergenceError& e) {
      CHECK(e.last_iterate.size() == 4);
      CHECK(e.gap >= 0.0);
    }
  }
  SUBCASE("warm path matches cold fits") {
    const std::vector<double> ladder{0.1, 1.0, 10.0};
    const Matrix path = enet_path_predict(x, yy, x, ladder, 0.5);
    for (int l = 0; l < 3; ++l)
      CHECK((path.col(l) - fit_elastic_net(x, yy, ladder[l], 0.5).predict(x)).cwiseAbs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("kernels") {
  const Kernel rbf{KernelType::Rbf, std::sqrt(2.0)};
  RowVector a(1), b(1);
  a << 0;
  b << 2;
  CHECK(rbf(a, b) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(rbf(b, b) == 1.0);
  const Matrix x = testing::randn(37, 5, 4);
  CHECK((gram(x, x, rbf) - gram_serial(x, x, rbf)).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(gram(x, x, Kernel{KernelType::Rbf, 0.0}), DomainError);
}

TEST_CASE("kernel ridge") {
  const Matrix x = testing::randn(40, 6, 12);
  const Vector y = testing::randn(40, 13);
  const Matrix xn = testing::randn(9, 6, 14);
  for (double lam : {0.01, 1.0, 30.0}) {
    const auto k = fit_krr(x, y, lam, Kernel{KernelType::Linear, 1.0});
    const auto r = fit_ridge(x, y, lam, RidgeMode::Dual);
    CHECK((k.predict(xn) - r.predict(xn)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((k.predict(x) - r.predict(x)).cwiseAbs().maxCoeff() < 1e-8);
  }
  const Kernel rbf{KernelType::Rbf, 2.0};
  const std::vector<double> ladder{0.1, 1.0};
  const Matrix path = krr_path_predict(x, y, xn, rbf, ladder);
  for (int l = 0; l < 2; ++l)
    CHECK((path.col(l) - fit_krr(x, y, ladder[l], rbf).predict(xn)).cwiseAbs().maxCoeff() < 1e-9);
  CHECK_THROWS_AS(fit_krr(x, y, 0.0, rbf), ArgumentError);
}

TEST_CASE("random forest") {
  const Matrix x = testing::randn(120, 4, 21);
  SUBCASE("constant target") {
    const auto f = fit_random_forest(x, Vector::Constant(120, 3.25), {.n_trees = 20, .seed = 1});
    CHECK((f.predict(x).array() == 3.25).all());
  }
  SUBCASE("depth zero predicts the mean") {
    const Vector y = testing::randn(120, 22);
    const auto f = fit_random_forest(x, y, {.n_trees = 1, .max_depth = 0, .bootstrap = false});
    CHECK((f.predict(x).array() - y.mean()).abs().maxCoeff() < 1e-12);
  }
  SUBCASE("step function") {
    Vector y(120);
    for (int i = 0; i < 120; ++i) y(i) = x(i, 0) > 0 ? 1.0 : 0.0;
    const double var = (y.array() - y.mean()).square().mean();
    const auto exhaustive =
        fit_random_forest(x, y, {.n_trees = 1, .mtry_frac = 1.0, .min_leaf = 1, .bootstrap = false});
    CHECK(exhaustive.trees[0].nodes[0].feature == 0);
    CHECK((exhaustive.predict(x) - y).squaredNorm() == 0.0);
    const auto f = fit_random_forest(x, y, {.n_trees = 500, .mtry_frac = 1.0 / 3.0, .min_leaf = 1, .seed = 7});
    CHECK((f.predict(x) - y).squaredNorm() / 120 < var / 10);
  }
  SUBCASE("parallel build matches the serial reference bit for bit") {
    const Vector y = x.col(1).array().sin() + testing::randn(120, 23).array() * 0.1;
    const ForestOptions o{.n_trees = 60, .seed = 99};
    const auto a = fit_random_forest(x, y, o);
    const auto b = fit_random_forest_serial(x, y, o);
    CHECK((a.predict(x) - b.predict_serial(x)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.oob_mse == b.oob_mse);
    const auto c = fit_random_forest(x, y, o);
    CHECK((a.predict(x) - c.predict(x)).cwiseAbs().maxCoeff() == 0.0);

    auto rev = a;
    std::reverse(rev.trees.begin(), rev.trees.end());
    CHECK((rev.predict(x) - a.predict(x)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::isfinite(a.oob_mse));
  }
  CHECK_THROWS_AS(fit_random_forest(x.topRows(9), Vector::Zero(9), {}), ArgumentError);
}

TEST_CASE("support vector regression") {
  SUBCASE("all points inside the tube") {
    const Matrix x = testing::randn(25, 2, 31);
    const Vector y = Vector::Constant(25, 4.0) + testing::randn(25, 32) * 0.01;
    const auto f = fit_svr(x, y, Kernel{KernelType::Rbf, 1.0}, 1.0, 0.5);
    CHECK(f.n_support() == 0);
    const Vector p = f.predict(x);
    CHECK((p.array() - p(0)).abs().maxCoeff() == 0.0);
    CHECK(((y.array() - p(0)).abs() <= 0.5).all());
  }
  SUBCASE("noiseless line is recovered") {
    const Matrix x = testing::randn(30, 2, 33);
    const Vector y = 1.5 + 2.0 * x.col(0).array() - 0.5 * x.col(1).array();
    const auto f = fit_svr(x, y, Kernel{KernelType::Linear, 1.0}, 1e4, 0.0, raw);
    const Matrix xn = testing::randn(10, 2, 34);
    const Vector yn = 1.5 + 2.0 * xn.col(0).array() - 0.5 * xn.col(1).array();
    CHECK((f.predict(xn) - yn).cwiseAbs().maxCoeff() < 1e-4);
  }
  SUBCASE("dual objective matches projected gradient on random problems") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const int t = 10 + static_cast<int>(seed) * 4;
      const Matrix x = testing::randn(t, 3, 40 + seed);
      const Vector y = x.col(0).array().sin() + testing::randn(t, 50 + seed).array() * 0.3;
      const Kernel k{seed % 2 ? KernelType::Linear : KernelType::Rbf, 1.5};
      const auto f = fit_svr(x, y, k, 2.0, 0.1, raw);
      const Matrix g = gram(x, x, k);
      const Vector ref = testing::svr_dual_reference(g, y, 2.0, 0.1);
      CHECK(std::abs(f.objective - svr_dual_objective(g, y, 0.1, ref)) < 1e-6);
      CHECK((f.alpha.array() >= 0.0).all());
      CHECK((f.alpha.array() <= 2.0).all());
      CHECK(f.kkt_gap < 1e-6);
      CHECK(f.n_support() <= t);
      const Vector fx = f.predict(x);
      for (int i = 0; i < t; ++i)
        if (std::abs(y(i) - fx(i)) < 0.1 - 1e-6) CHECK(f.alpha(i) - f.alpha(i + t) == 0.0);
    }
  }
  CHECK_THROWS_AS(fit_svr(testing::randn(5, 1, 1), testing::randn(5, 2), Kernel{}, 0.0, 0.1), ArgumentError);
}

TEST_CASE("model roster mirrors the model table") {
  const auto& r = model_roster();
  CHECK(r.size() == 46);
  std::set<std::string> names;
  for (const auto& m : r) {
    names.insert(m.name);
    CHECK(canonical_model_name(m.name) == m.name);
    if (m.information_criterion()) CHECK(m.estimator == Estimator::Ols);
    CHECK(m.tags.lf == (m.loss == Loss::EpsInsensitive));
    CHECK(m.tags.cv == to_string(m.tuner));
  }
  CHECK(names.size() == 46);
  CHECK(find_model("KRRARDI,K-fold").name == "KRR-ARDI,K-fold");
  CHECK(find_model("KRR,ARDI,K-fold").name == "KRR-ARDI,K-fold");
  CHECK(find_model("ARDI,BIC").tags.sh == "PCA");
  CHECK(find_model("RFARDI,K-fold").tags.nl);
  CHECK_FALSE(find_model("SVR-ARDI,Lin,POOS-CV").tags.nl);
  CHECK(find_model("SVR-AR,RBF,K-fold").tags.nl);
  CHECK(find_model("(B2,alpha=1),POOS-CV").tags.sh == "Lasso-PCA");
  CHECK(find_model("(B3,alpha=0),K-fold").tags.sh == "Ridge-PCR");
  CHECK(find_model("(B1,alpha=cv),K-fold").tags.sh == "EN");
  CHECK_THROWS_AS(find_model("NN,K-fold"), ArgumentError);
}

TEST_CASE("fit dispatch resolves relative hyperparameters") {
  const Matrix x = testing::randn(80, 4, 61);
  const Vector y = testing::randn(80, 62);
  HyperPoint p;
  p.lambda = 0.1;
  p.sigma = 1.0;
  const auto m = fit_model(find_model("KRR-AR,K-fold"), p, x, y, {}, 0);
  CHECK(m.resolved.lambda == doctest::Approx(8.0));
  CHECK(m.resolved.sigma == doctest::Approx(2.0));
  const auto o = fit_model(find_model("AR,BIC"), {}, x, y, {}, 0);
  CHECK(o.is_ols());
  CHECK(o.n_params() == 5);
  CHECK_THROWS_AS(fit_model(find_model("RRAR,K-fold"), HyperPoint{}, x, y, {}, 0), ArgumentError);
}
