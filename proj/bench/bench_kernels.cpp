#include <benchmark/benchmark.h>

#include <random>

#include "macroml/eval/tests.hpp"
#include "macroml/models/forest.hpp"
#include "macroml/models/kernels.hpp"

using namespace macroml;

namespace {

Matrix randn(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = nd(rng);
  return m;
}

void BM_gram(benchmark::State& state) {
  const Matrix z = randn(state.range(0), 40, 1);
  const Kernel k{KernelType::Rbf, 3.0};
  for (auto _ : state) benchmark::DoNotOptimize(gram(z, z, k));
}

void BM_gram_serial(benchmark::State& state) {
  const Matrix z = randn(state.range(0), 40, 1);
  const Kernel k{KernelType::Rbf, 3.0};
  for (auto _ : state) benchmark::DoNotOptimize(gram_serial(z, z, k));
}

void BM_forest(benchmark::State& state) {
  const Matrix z = randn(state.range(0), 30, 2);
  const Vector y = z.col(0).array().sin() + z.col(1).array() * z.col(2).array();
  ForestOptions o;
  o.n_trees = 100;
  for (auto _ : state) benchmark::DoNotOptimize(fit_random_forest(z, y, o));
}

void BM_forest_serial(benchmark::State& state) {
  const Matrix z = randn(state.range(0), 30, 2);
  const Vector y = z.col(0).array().sin() + z.col(1).array() * z.col(2).array();
  ForestOptions o;
  o.n_trees = 100;
  for (auto _ : state) benchmark::DoNotOptimize(fit_random_forest_serial(z, y, o));
}

void BM_mcs_bootstrap(benchmark::State& state) {
  const Matrix l = randn(456, state.range(0), 3).array().square();
  for (auto _ : state) benchmark::DoNotOptimize(mcs_bootstrap_means(l, 999, 12, 7));
}

void BM_mcs_bootstrap_serial(benchmark::State& state) {
  const Matrix l = randn(456, state.range(0), 3).array().square();
  for (auto _ : state) benchmark::DoNotOptimize(mcs_bootstrap_means_serial(l, 999, 12, 7));
}

}  // namespace

BENCHMARK(BM_gram)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gram_serial)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_forest)->Arg(300)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_forest_serial)->Arg(300)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_mcs_bootstrap)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_mcs_bootstrap_serial)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
