#include <benchmark/benchmark.h>

#include <delaystab/linalg.hpp>
#include <delaystab/models.hpp>
#include <delaystab/solver.hpp>

using namespace delaystab;

namespace {

void BM_MethodOfStepsDampedWave(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const DelaySystem s = build_wave_damped_boundary_delay_1d(N, 1.0, 0.2, 1.0);
  const Vector U0 = Vector::LinSpaced(s.dim(), 1.0, -1.0);
  const History h = History::constant(1.0, 128, Vector::Zero(1));
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_method_of_steps(s, U0, h, {1.0 / 128, 10.0}).norms.back());
  state.SetItemsProcessed(state.iterations() * 1280);
}
BENCHMARK(BM_MethodOfStepsDampedWave)->Arg(25)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_DuhamelToy(benchmark::State& state) {
  const std::vector<double> spectrum{-1.0, -2.0, -3.0, -4.0};
  const DelaySystem s = build_linear_toy(spectrum, 1, 1.0, 0.3, 1.0);
  const History h = History::constant(1.0, static_cast<int>(state.range(0)), Vector::Ones(4));
  for (auto _ : state)
    benchmark::DoNotOptimize(duhamel_oracle(s, Vector::Ones(4), h, 10.0, 4).norms.back());
}
BENCHMARK(BM_DuhamelToy)->Arg(128)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_TransportScalar(benchmark::State& state) {
  const int n_rho = static_cast<int>(state.range(0));
  const DelaySystem s = build_scalar(-1.0, 1.0, 0.5, 1.0);
  const History h = History::constant(1.0, 2 * n_rho, Vector::Ones(1));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        solve_transport_augmented(s, Vector::Ones(1), h, {0.5 / n_rho, 5.0}, n_rho).norms.back());
}
BENCHMARK(BM_TransportScalar)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_Expm(benchmark::State& state) {
  const DelaySystem s = build_wave_boundary_1d(static_cast<int>(state.range(0)), 1.0, 0.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(linalg::expm(0.5 * s.A).norm());
}
BENCHMARK(BM_Expm)->Arg(25)->Arg(50)->Arg(100)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
