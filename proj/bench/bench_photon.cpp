// Serial reference vs OpenMP kernels for the photon-statistics simulations.
//
//   ./bench_photon --benchmark_counters_tabular=true
//
// Set OMP_NUM_THREADS to compare thread counts; the outputs are identical.

#include <benchmark/benchmark.h>

#include "qcomm/photon_stats.hpp"

namespace {

using namespace qcomm::photon;

PulseTrainSpec train(double mu, std::uint64_t n) {
  PulseTrainSpec p;
  p.mean_pairs_per_pulse = mu;
  p.n_pulses = n;
  return p;
}

const std::array<DetectorSpec, 2> kDetectors{DetectorSpec{0.64, 100.0, 60.0, 30.0},
                                             DetectorSpec{0.64, 100.0, 60.0, 30.0}};

template <auto Simulate>
void BM_Streams(benchmark::State& state) {
  const auto spec = train(0.1, static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Simulate(spec, {0.8, 0.8}, kDetectors, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Build>
void BM_Histogram(benchmark::State& state) {
  const auto streams = simulate_streams(train(0.1, static_cast<std::uint64_t>(state.range(0))), {1.0, 1.0},
                                        kDetectors, 2);
  for (auto _ : state) benchmark::DoNotOptimize(Build(streams.a, streams.b, 16, 40000));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(streams.a.timestamps_ps.size()));
}

template <auto Simulate>
void BM_Herald(benchmark::State& state) {
  const auto spec = train(0.1, static_cast<std::uint64_t>(state.range(0)));
  const HeraldSetup setup{0.9, 0.9, LightSource::Spdc};
  for (auto _ : state) benchmark::DoNotOptimize(Simulate(spec, setup, 3));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK(BM_Streams<reference::simulate_streams>)->Name("streams/serial")->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Streams<simulate_streams>)->Name("streams/openmp")->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Histogram<reference::build_histogram>)->Name("histogram/serial")->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Histogram<build_histogram>)->Name("histogram/openmp")->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Herald<reference::simulate_heralded_counts>)->Name("herald/serial")->Arg(1 << 22)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Herald<simulate_heralded_counts>)->Name("herald/openmp")->Arg(1 << 22)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
