#include <benchmark/benchmark.h>

#include <delaystab/diagnostics.hpp>
#include <delaystab/models.hpp>

using namespace delaystab;

namespace {

void BM_SemigroupConstants(benchmark::State& state) {
  const DelaySystem s = build_wave_boundary_1d(static_cast<int>(state.range(0)), 1.0, 0.0, 1.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(estimate_semigroup_constants(s.A, 200.0, 100, 0.01, s.gram).M);
}
BENCHMARK(BM_SemigroupConstants)->Arg(25)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_Admissibility(benchmark::State& state) {
  const DelaySystem s = build_wave_damped_boundary_delay_1d(50, 1.0, 0.0, 1.0);
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_admissibility(s, 1.0, m).C3);
}
BENCHMARK(BM_Admissibility)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_ReflectionScan(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(sup_scan(1.0, -200.0, 200.0, 1e-3).sup);
}
BENCHMARK(BM_ReflectionScan)->Unit(benchmark::kMillisecond);

}  // namespace
