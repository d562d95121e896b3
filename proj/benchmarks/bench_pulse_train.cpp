#include <benchmark/benchmark.h>

#include "sspd/io.hpp"
#include "sspd/oracle.hpp"
#include "sspd/pulse_train.hpp"

namespace {

sspd::PulseTrain make_train(long long slots) {
    sspd::PulseTrain train;
    train.mean_photons_per_pulse = 5.0;
    train.slot_period = 1e-9;
    train.num_slots = slots;
    return train;
}

void BM_evolve(benchmark::State& state) {
    const sspd::io::DetectorBundle d = sspd::io::builtin_preset("ch5");
    const sspd::PulseTrain train = make_train(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(sspd::evolve(d.params, d.curve, train));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_evolve)->Range(256, 16384)->Complexity();

void BM_evolve_untruncated(benchmark::State& state) {
    const sspd::io::DetectorBundle d = sspd::io::builtin_preset("ch5");
    const sspd::PulseTrain train = make_train(state.range(0));
    sspd::EvolveOptions options;
    options.truncate = false;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sspd::evolve(d.params, d.curve, train, options));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_evolve_untruncated)->Range(256, 4096)->Complexity();

void BM_markov_exact(benchmark::State& state) {
    const sspd::io::DetectorBundle d = sspd::io::builtin_preset("ch5");
    const sspd::PulseTrain train = make_train(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(sspd::markov_exact(d.params, d.curve, train));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_markov_exact)->Range(256, 4096)->Complexity();

void BM_stationary_state(benchmark::State& state) {
    const sspd::io::DetectorBundle d = sspd::io::builtin_preset("ch5");
    const sspd::SlotHazards hazards =
        sspd::make_slot_hazards(d.params, d.curve, make_train(16));
    for (auto _ : state) {
        benchmark::DoNotOptimize(sspd::stationary_state(hazards));
    }
}
BENCHMARK(BM_stationary_state);

void BM_simulate(benchmark::State& state) {
    const sspd::io::DetectorBundle d = sspd::io::builtin_preset("ch5");
    const sspd::PulseTrain train = make_train(64);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sspd::simulate(d.params, d.curve, train, 2000, 7));
    }
}
BENCHMARK(BM_simulate);

}  // namespace

BENCHMARK_MAIN();
