// Micro-benchmarks for the hot paths: transforms, right-hand sides, one
// integrator step, and the dense eigensolves of the stability module.

#include <benchmark/benchmark.h>

#include "kflow/dynamics.hpp"
#include "kflow/initial_conditions.hpp"
#include "kflow/spectral.hpp"
#include "kflow/stability.hpp"

using namespace kflow;

namespace {

SpectralField sample(int n) {
  RandomFieldSpec spec;
  spec.subspace = Subspace::Full;
  return random_field(TorusGrid(1.5, n, n), spec);
}

void BM_RoundTripFFT(benchmark::State& state) {
  const auto w = sample(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto phys = w.to_physical();
    benchmark::DoNotOptimize(SpectralField::from_physical(w.grid(), std::span<const cplx>(phys)));
  }
}
BENCHMARK(BM_RoundTripFFT)->Arg(64)->Arg(128)->Arg(256);

void BM_RhsNSE(benchmark::State& state) {
  const auto w = sample(static_cast<int>(state.range(0)));
  const Integrator it(EvolutionModel::nse(1e-3), w.grid());
  for (auto _ : state) benchmark::DoNotOptimize(it.rhs(w, 0.0));
}
BENCHMARK(BM_RhsNSE)->Arg(64)->Arg(128)->Arg(256);

void BM_RhsLNSBar(benchmark::State& state) {
  const auto w = sample(static_cast<int>(state.range(0)));
  const Integrator it(EvolutionModel::lns_bar(1e-3), w.grid());
  for (auto _ : state) benchmark::DoNotOptimize(it.rhs(w, 0.0));
}
BENCHMARK(BM_RhsLNSBar)->Arg(64)->Arg(128)->Arg(256);

void BM_StepNSE(benchmark::State& state) {
  const auto w = sample(static_cast<int>(state.range(0)));
  const Integrator it(EvolutionModel::nse(1e-3), w.grid());
  const SimState s{w, 0.0, it.model()};
  for (auto _ : state) benchmark::DoNotOptimize(it.step(s, 1e-3));
}
BENCHMARK(BM_StepNSE)->Arg(64)->Arg(128);

void BM_UnstableModes(benchmark::State& state) {
  const BaseFlow f = kolmogorov_flow(0.5);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(unstable_modes(f, 0.5, 1, n, 1e-6));
}
BENCHMARK(BM_UnstableModes)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_IndexCheck(benchmark::State& state) {
  const BaseFlow f = kolmogorov_flow(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(index_check(f, 0.5, 3, 128));
}
BENCHMARK(BM_IndexCheck)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
