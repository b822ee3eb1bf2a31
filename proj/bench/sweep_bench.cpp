#include <benchmark/benchmark.h>

#include "lzs/sweep.hpp"

namespace {

// A 24 x 60 slice of the standard map: wide enough in tau to include slow cells.
const lzs::GridSpec kGrid{lzs::AxisRange{-2.0, 10.0, 24}, lzs::AxisRange{0.01, 4.0, 60}, -5.0};
const lzs::QubitSpectrum kSpectrum = lzs::QubitSpectrum::two_level(2.0, 2.0);

void BM_SweepSerial(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(lzs::run_sweep_serial(kGrid, kSpectrum, lzs::StepperConfig{}));
    state.SetItemsProcessed(state.iterations() * 24 * 60);
}

void BM_SweepParallel(benchmark::State& state) {
    lzs::SweepOptions opts;
    opts.workers = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(lzs::run_sweep(kGrid, kSpectrum, lzs::StepperConfig{}, opts));
    state.SetItemsProcessed(state.iterations() * 24 * 60);
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SweepParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
