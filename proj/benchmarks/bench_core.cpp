#include <benchmark/benchmark.h>

#include <random>

#include "pmedian/pmedian.hpp"

using namespace pmedian;

namespace {

Eigen::MatrixXd random_spd(int d, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = n(rng);
  return a * a.transpose() + Eigen::MatrixXd::Identity(d, d);
}

void BM_SqrtSpd(benchmark::State& state) {
  Rng rng(1);
  const SpdMatrix s(random_spd(static_cast<int>(state.range(0)), rng));
  for (auto _ : state) benchmark::DoNotOptimize(sqrt_spd(s));
}
BENCHMARK(BM_SqrtSpd)->Arg(2)->Arg(5)->Arg(10)->Arg(50);

void BM_BuresWassersteinLogDist(benchmark::State& state) {
  Rng rng(2);
  const int d = static_cast<int>(state.range(0));
  const Factor f = Factor::spd_bures_wasserstein(d);
  const FactorPoint a = SpdMatrix(random_spd(d, rng)), b = SpdMatrix(random_spd(d, rng));
  for (auto _ : state) benchmark::DoNotOptimize(f.log_dist(a, b));
}
BENCHMARK(BM_BuresWassersteinLogDist)->Arg(2)->Arg(5)->Arg(10);

WeightedSample multivariate_sample(int n, int d, Rng& rng) {
  std::vector<ProductPoint> pts;
  for (int i = 0; i < n; ++i) pts.push_back(sample_multivariate(DrawKind::Signal, d, 0.5, rng));
  return WeightedSample::uniform(multivariate_gaussian_manifold(d), std::move(pts));
}

void BM_WeiszfeldMultivariate(benchmark::State& state) {
  Rng rng(3);
  const WeightedSample s = multivariate_sample(static_cast<int>(state.range(0)), 5, rng);
  const ProductPoint init = product_mean(s);
  SolverConfig cfg;
  cfg.method = SolverMethod::Weiszfeld;
  for (auto _ : state) benchmark::DoNotOptimize(weiszfeld_solve(s, init, cfg));
}
BENCHMARK(BM_WeiszfeldMultivariate)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_HybridUnivariate(benchmark::State& state) {
  Rng rng(4);
  std::vector<ProductPoint> pts;
  for (int i = 0; i < state.range(0); ++i) pts.push_back(sample_univariate(DrawKind::Signal, rng));
  const WeightedSample s = WeightedSample::uniform(univariate_gaussian_manifold(), std::move(pts));
  for (auto _ : state) benchmark::DoNotOptimize(solve_median(s, SolverConfig{}));
}
BENCHMARK(BM_HybridUnivariate)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_ProductMeanBuresWasserstein(benchmark::State& state) {
  Rng rng(5);
  const WeightedSample s = multivariate_sample(200, static_cast<int>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(product_mean(s));
}
BENCHMARK(BM_ProductMeanBuresWasserstein)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
