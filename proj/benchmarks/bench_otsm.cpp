#include <random>

#include <benchmark/benchmark.h>

#include "otsm/otsm.hpp"

namespace {

using namespace otsm;

void BM_PolarProject(benchmark::State& state) {
  const auto d = static_cast<Index>(state.range(0));
  std::mt19937_64 rng(1);
  const Matrix b = random_gaussian(d, 3, rng);
  for (auto _ : state) benchmark::DoNotOptimize(polar_project(b));
}
BENCHMARK(BM_PolarProject)->Arg(5)->Arg(20)->Arg(100);

void BM_SolveHardSpectral(benchmark::State& state) {
  const OtsmProblem p = hard_example(3, 2);
  SolverConfig config;
  config.init = SpectralInit{};
  for (auto _ : state) benchmark::DoNotOptimize(solve(p, config).final_objective());
}
BENCHMARK(BM_SolveHardSpectral)->Unit(benchmark::kMillisecond);

void BM_SolveSynthetic(benchmark::State& state) {
  const auto synth = synth_procrustes(5, 100, static_cast<Index>(state.range(0)), 3, 0.1, 11);
  SolverConfig config;
  config.init = SpectralInit{};
  for (auto _ : state) benchmark::DoNotOptimize(solve(synth.problem, config).iterations);
}
BENCHMARK(BM_SolveSynthetic)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_Certify(benchmark::State& state) {
  const auto synth = synth_procrustes(5, 100, static_cast<Index>(state.range(0)), 3, 0.1, 12);
  const BlockOrthogonal x = solve(synth.problem).solution;
  for (auto _ : state) benchmark::DoNotOptimize(certify(synth.problem, x).lmin_full);
}
BENCHMARK(BM_Certify)->Arg(5)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_GridCell(benchmark::State& state) {
  ExperimentGrid grid;
  grid.d_values = {10};
  grid.sigma_values = {10.0};
  grid.reps = 2;
  for (auto _ : state) benchmark::DoNotOptimize(run_grid(grid).size());
}
BENCHMARK(BM_GridCell)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
