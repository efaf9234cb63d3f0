// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>
#include <omp.h>

#include <numbers>

#include "smoothfix/density.hpp"
#include "smoothfix/fourier.hpp"
#include "smoothfix/popdyn.hpp"
#include "smoothfix/reference.hpp"

using namespace smoothfix;

namespace {

const WeightModel& model() {
  static const auto m = WeightModel::polya(8);
  return m;
}

const SamplePool& pool() {
  static const auto p = run(model(), 100000, 20, 7).pool;
  return p;
}

std::vector<Complex> frequencies() {
  const std::vector<double> radii{1.0, 5.0, 10.0, 50.0};
  return polar_grid(radii, 16);
}

void set_threads(benchmark::State& state) { omp_set_num_threads(static_cast<int>(state.range(0))); }

void BM_iterate_reference(benchmark::State& state) {
  const auto& p = pool();  // built outside the timed loop
  for (auto _ : state) benchmark::DoNotOptimize(reference::iterate(p, model(), 1));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pool().size()));
}

void BM_iterate(benchmark::State& state) {
  set_threads(state);
  const auto& p = pool();
  for (auto _ : state) benchmark::DoNotOptimize(iterate(p, model(), 1));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pool().size()));
}

void BM_ecf_grid_reference(benchmark::State& state) {
  const auto xis = frequencies();
  for (auto _ : state) benchmark::DoNotOptimize(reference::ecf_grid(pool().samples, xis));
}

void BM_ecf_grid(benchmark::State& state) {
  set_threads(state);
  const auto xis = frequencies();
  for (auto _ : state) benchmark::DoNotOptimize(ecf_grid(pool().samples, xis));
}

// Residual grid: exact per-draw ECF products (serial reference loop) against
// the interpolated table.
void BM_residual_exact(benchmark::State& state) {
  const std::vector<Complex> xi{std::polar(2.0, 0.3)};
  std::vector<Complex> small(pool().samples.begin(), pool().samples.begin() + 10000);
  for (auto _ : state) benchmark::DoNotOptimize(fixed_point_residual(small, model(), xi[0], 1000, 1));
}

void BM_residual_table(benchmark::State& state) {
  set_threads(state);
  const std::vector<Complex> xi{std::polar(2.0, 0.3)};
  std::vector<Complex> small(pool().samples.begin(), pool().samples.begin() + 10000);
  ResidualOptions opt;
  opt.M = 1000;
  opt.seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(fixed_point_residual_grid(small, model(), xi, opt));
}

void BM_kde2d_reference(benchmark::State& state) {
  std::vector<Complex> small(pool().samples.begin(), pool().samples.begin() + 10000);
  const auto grid = default_grid(small, 64);
  const auto bw = default_bandwidth(small);
  for (auto _ : state) benchmark::DoNotOptimize(reference::kde2d(small, grid, bw));
}

void BM_kde2d(benchmark::State& state) {
  set_threads(state);
  std::vector<Complex> small(pool().samples.begin(), pool().samples.begin() + 10000);
  const auto grid = default_grid(small, 64);
  const auto bw = default_bandwidth(small);
  for (auto _ : state) benchmark::DoNotOptimize(kde2d(small, grid, bw));
}

void thread_counts(benchmark::internal::Benchmark* b) {
  const int max = omp_get_max_threads();
  for (int t = 1; t < max; t *= 2) b->Arg(t);
  b->Arg(max);
}

}  // namespace

BENCHMARK(BM_iterate_reference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_iterate)->Apply(thread_counts)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ecf_grid_reference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ecf_grid)->Apply(thread_counts)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_residual_exact)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_residual_table)->Apply(thread_counts)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_kde2d_reference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_kde2d)->Apply(thread_counts)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
