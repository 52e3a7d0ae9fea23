#include <benchmark/benchmark.h>

#include "matherkit/critical.hpp"
#include "matherkit/potential.hpp"

using namespace matherkit;

namespace {

PhaseGrid grid_of(int nx) {
  PhaseGrid g;
  g.nx = nx;
  g.nv = nx / 2 + 1;
  return g;
}

void BM_BuildKernel(benchmark::State& state) {
  const PhaseGrid g = grid_of(static_cast<int>(state.range(0)));
  const auto spec = LagrangianSpec::pendulum();
  for (auto _ : state) benchmark::DoNotOptimize(build_kernel(spec, g, CohomologyClass(0.5)));
}
BENCHMARK(BM_BuildKernel)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_LaxOleinik(benchmark::State& state) {
  const PhaseGrid g = grid_of(static_cast<int>(state.range(0)));
  const ActionKernel k = build_kernel(LagrangianSpec::pendulum(), g, CohomologyClass(1.5));
  for (auto _ : state) benchmark::DoNotOptimize(alpha_lax_oleinik(k).alpha);
}
BENCHMARK(BM_LaxOleinik)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_AlphaLp(benchmark::State& state) {
  const PhaseGrid g = grid_of(static_cast<int>(state.range(0)));
  LpOptions opt;
  opt.fourier_order = std::min(32, g.nx / 2 - 1);
  const auto spec = LagrangianSpec::pendulum();
  for (auto _ : state) benchmark::DoNotOptimize(alpha_lp(spec, g, CohomologyClass(1.5), opt).alpha);
}
BENCHMARK(BM_AlphaLp)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_PotentialSweep(benchmark::State& state) {
  const PhaseGrid g = grid_of(static_cast<int>(state.range(0)));
  const ActionKernel k = build_kernel(LagrangianSpec::pendulum(), g, CohomologyClass(0.0));
  const double a = alpha_lax_oleinik(k).alpha;
  for (auto _ : state) benchmark::DoNotOptimize(potential_sweep(k, a, 50, 200));
}
BENCHMARK(BM_PotentialSweep)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
