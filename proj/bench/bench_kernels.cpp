// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "ptbore/campaign.hpp"
#include "ptbore/scenario.hpp"

namespace {

using namespace ptbore;

Scenario short_scenario() {
  Scenario sc = paper_sec4_scenario();
  sc.t_end = 20.0;
  sc.output_decimation = 100;
  return sc;
}

const GuidanceConfig& config() {
  static const GuidanceConfig cfg = paper_sec4_scenario().guidance;
  return cfg;
}

const std::vector<UnitVec3>& initials() {
  static const auto v = sample_initials(config(), 16, 1, 0.0174533);
  return v;
}

void BM_batch_serial(benchmark::State& state) {
  const Scenario sc = short_scenario();
  for (auto _ : state) benchmark::DoNotOptimize(batch_serial(sc, initials()));
}

void BM_batch_parallel(benchmark::State& state) {
  const Scenario sc = short_scenario();
  for (auto _ : state) benchmark::DoNotOptimize(batch_parallel(sc, initials()));
}

void BM_residual_scan_serial(benchmark::State& state) {
  const CriticalPointProblem prob(1, config());
  for (auto _ : state) {
    benchmark::DoNotOptimize(residual_scan_serial(prob, static_cast<std::size_t>(state.range(0))));
  }
}

void BM_residual_scan_parallel(benchmark::State& state) {
  const CriticalPointProblem prob(1, config());
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        residual_scan_parallel(prob, static_cast<std::size_t>(state.range(0))));
  }
}

}  // namespace

BENCHMARK(BM_batch_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_batch_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_residual_scan_serial)->Arg(10000)->Arg(1000000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_residual_scan_parallel)->Arg(10000)->Arg(1000000)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
