#include <benchmark/benchmark.h>

#include <cmath>

#include "gmc/asymptotics.hpp"
#include "gmc/bessel.hpp"
#include "gmc/detail/walkers.hpp"
#include "gmc/fusion_toy.hpp"
#include "gmc/measure.hpp"

using namespace gmc;

static void BM_EvalSd(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  double c = 0.05;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval_Sd(d, c));
    c += 0.009;
    if (c > 0.99) c = 0.05;
  }
}
BENCHMARK(BM_EvalSd)->Arg(2)->Arg(3)->Arg(4);

static void BM_BuildCovMatrix(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto k = KernelDescriptor::l_exact(0.0, 1);
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) pts.push_back(Point::of((i + 0.5) / n));
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_cov_matrix(k, pts, 1.0 / n));
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_BuildCovMatrix)->Arg(64)->Arg(256)->Arg(1024)->Complexity();

static void BM_FieldBlock(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto k = KernelDescriptor::l_exact(0.0, 1);
  auto grid = GridSpec::regular(1, Box{Point::of(0.0), Point::of(1.0)}, 1.0 / n);
  FieldSampler sampler(k, grid, 1.0 / n);
  RngPolicy rng{1};
  Eigen::MatrixXd block;
  uint64_t first = 0;
  for (auto _ : state) {
    sampler.sample_block(rng, first, 64, block, 1);
    benchmark::DoNotOptimize(block);
    first += 64;
  }
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_FieldBlock)->Arg(128)->Arg(512);

static void BM_MassBatch(benchmark::State& state) {
  const double eps = std::exp(-5.0);
  auto k = KernelDescriptor::l_exact(0.0, 1);
  auto grid = GridSpec::regular(1, Box{Point::of(0.0), Point::of(1.0)}, eps);
  FieldSampler sampler(k, grid, eps);
  RngPolicy rng{2};
  const auto A = SetSpec::box1d(0.0, 1.0);
  const auto g = DensitySpec::constant(1.0);
  uint64_t first = 0;
  for (auto _ : state) {
    auto m = sample_mass_batch(sampler, true, 0.0, A, g, rng, first, 512, 1);
    benchmark::DoNotOptimize(m);
    first += 512;
  }
  state.SetItemsProcessed(state.iterations() * 512);
}
BENCHMARK(BM_MassBatch);

static void BM_Bes3Steps(benchmark::State& state) {
  RngStream rng = RngStream::derive(3, 5, 0);
  detail::Bes3Walk w(1e-2, &rng, 0.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(w.step(1e-2));
    if (w.beta > 50.0) w = detail::Bes3Walk(1e-2, &rng, 0.0);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Bes3Steps);

static void BM_SampleIx(benchmark::State& state) {
  RngStream rng = RngStream::derive(4, 10, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_Ix(1.0, 2, IxSample::Method::Reversal, 1e-2, 1e-3, rng));
  }
}
BENCHMARK(BM_SampleIx);

static void BM_EstimateTail(benchmark::State& state) {
  SyntheticPareto u{1.0, 1.0};
  RngStream rng = RngStream::derive(5, 12, 0);
  std::vector<double> xs(100000);
  for (auto& v : xs) v = u.draw(rng);
  std::vector<double> grid;
  for (int i = 0; i < 40; ++i) grid.push_back(std::pow(10.0, i / 13.0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_tail(xs, grid));
  }
}
BENCHMARK(BM_EstimateTail);

BENCHMARK_MAIN();
