// Serial reference vs OpenMP for the independent-point kernels.

#include <benchmark/benchmark.h>

#include "lambda_forge/raman.hpp"
#include "lambda_forge/sweep.hpp"

using namespace lf;

namespace {

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

Execution mode(const benchmark::State& s) { return s.range(0) ? Execution::parallel : Execution::serial; }

void BM_SnailSweep(benchmark::State& state) {
  const auto flux = linspace(0.0, 7.0, 2001);
  for (auto _ : state) benchmark::DoNotOptimize(snail_sweep(0.4, 3, 175e9, 5, 60.0, flux, mode(state)));
}

void BM_SpectrumSweep(benchmark::State& state) {
  const CircuitSpec spec = CircuitSpec::calibrated_defaults();
  const auto flux = linspace(6.0, 7.0, 8);
  for (auto _ : state) benchmark::DoNotOptimize(spectrum_sweep(spec, flux, 6, mode(state)));
}

void BM_Chevron(benchmark::State& state) {
  LambdaParams p;
  p.epsilon = 50.8e6;
  p.g3 = 3e6;
  p.gamma_down = 0.6 / 5.7e-6;
  p.gamma_up = 0.4 / 5.7e-6;
  const auto deltas = linspace(-1e6, 1e6, 8);
  const auto times = linspace(0.0, 1e-6, 50);
  const QState rho0 = thermal_state(p.dim_r, 0.94);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_raman_rabi(p, deltas, times, rho0, mode(state)));
}

}  // namespace

BENCHMARK(BM_SnailSweep)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SpectrumSweep)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Chevron)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
