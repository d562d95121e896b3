#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "sspd/io.hpp"
#include "sspd/oracle.hpp"
#include "sspd/pulse_train.hpp"

using namespace sspd;

namespace {

struct RandomConfig {
    DetectorParams params;
    EfficiencyCurve curve;
    PulseTrain train;
    EvolveOptions options;
};

RandomConfig draw_config(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    DetectorParams p;
    p.name = "random";
    p.critical_current = 5e-6 + 25e-6 * u(rng);
    p.kinetic_inductance = 0.5e-6 + 2.5e-6 * u(rng);
    p.operating_bias = (0.5 + 0.45 * u(rng)) * p.critical_current;
    p.base_efficiency = 0.01 + 0.89 * u(rng);
    p.dark_count_rate = 1e4 * u(rng);
    p.discriminator_threshold = (0.05 + 0.9 * u(rng)) * p.amplifier_gain *
                                p.load_resistance * p.operating_bias;

    const double anchor_ratio = 0.3 + 0.6 * u(rng);
    const double anchor_relative = 1e-4 + 0.9 * u(rng);
    EfficiencyCurve curve =
        EfficiencyCurve::two_point(p.operating_fraction(), anchor_ratio, anchor_relative);

    const double tau = recovery_time_constant(p);
    PulseTrain train;
    train.slot_period = (0.1 + 4.9 * u(rng)) * tau;
    train.mean_photons_per_pulse = 50.0 * u(rng);
    train.num_slots = 1 + static_cast<long long>(199.0 * u(rng));

    EvolveOptions options;
    options.mode = u(rng) < 0.5 ? GMode::paper_approx : GMode::exact_age;
    return {p, curve, train, options};
}

}  // namespace

TEST_CASE("recursion matches the exact age chain over randomized configurations") {
    std::mt19937_64 rng(20240817);
    for (int i = 0; i < 60; ++i) {
        CAPTURE(i);
        const RandomConfig cfg = draw_config(rng);
        const TraceResult trace = evolve(cfg.params, cfg.curve, cfg.train, cfg.options);
        const MarkovResult chain =
            markov_exact(cfg.params, cfg.curve, cfg.train, std::nullopt, cfg.options);
        const CompareReport rep = compare(trace, chain);
        CHECK(rep.max_abs_deviation <= 1e-9);
        CHECK(rep.pass);
    }
}

TEST_CASE("probability bounds hold at every slot for randomized configurations") {
    std::mt19937_64 rng(987654321);
    for (int i = 0; i < 25; ++i) {
        CAPTURE(i);
        const RandomConfig cfg = draw_config(rng);
        const TraceResult trace = evolve(cfg.params, cfg.curve, cfg.train, cfg.options);
        for (std::size_t n = 0; n < trace.s_on.size(); ++n) {
            CAPTURE(n);
            CHECK(trace.s_off[n] >= 0.0);
            CHECK(trace.s_off[n] <= 1.0);
            CHECK(trace.s_on[n] >= 0.0);
            CHECK(trace.s_on[n] <= 1.0);
            CHECK(trace.s_off[n] + trace.s_on[n] == doctest::Approx(1.0).epsilon(1e-14));
            CHECK(trace.g[n] >= 0.0);
            CHECK(trace.g[n] <= 1.0);
            CHECK(trace.p_on[n] <= trace.s_on[n] + 1e-15);
            CHECK(trace.p_click[n] <= trace.s_on[n] + 1e-15);
            CHECK(trace.p_on[n] >= 0.0);
            CHECK(trace.p_click[n] >= 0.0);
        }
    }
}

TEST_CASE("age pooling below the hazard horizon is rejected once mass reaches it") {
    const io::DetectorBundle d = io::builtin_preset("ch5");
    PulseTrain train;
    train.mean_photons_per_pulse = 1000.0;
    train.slot_period = 1e-9;
    train.num_slots = 30;
    CHECK_THROWS_WITH_AS(markov_exact(d.params, d.curve, train, 10),
                         doctest::Contains("pool"), std::runtime_error);
    CHECK_THROWS_AS(markov_exact(d.params, d.curve, train, 1), std::invalid_argument);
}

TEST_CASE("an explicit cap beyond horizon and registrable age equals the default") {
    const io::DetectorBundle d = io::builtin_preset("ch5");
    PulseTrain train;
    train.mean_photons_per_pulse = 5.0;
    train.slot_period = 1e-8;
    train.num_slots = 150;

    const SlotHazards hz = make_slot_hazards(d.params, d.curve, train);
    const MarkovResult a = markov_exact(d.params, d.curve, train);
    const MarkovResult b = markov_exact(d.params, d.curve, train,
                                        std::max(hz.horizon + 1, hz.registrable_age));
    for (std::size_t i = 0; i < a.s_on.size(); ++i) {
        CHECK(a.s_on[i] == doctest::Approx(b.s_on[i]).epsilon(1e-13));
        CHECK(a.p_click[i] == doctest::Approx(b.p_click[i]).epsilon(1e-13));
    }
}

TEST_CASE("Monte Carlo sampling is deterministic for a fixed seed") {
    const io::DetectorBundle d = io::builtin_preset("ch5");
    PulseTrain train;
    train.mean_photons_per_pulse = 5.0;
    train.slot_period = 1e-8;
    train.num_slots = 40;

    const SimulateResult a = simulate(d.params, d.curve, train, 2000, 42);
    const SimulateResult b = simulate(d.params, d.curve, train, 2000, 42);
    CHECK(a.s_on == b.s_on);
    CHECK(a.p_click == b.p_click);

    const SimulateResult c = simulate(d.params, d.curve, train, 2000, 43);
    bool any_different = false;
    for (std::size_t i = 0; i < a.s_on.size(); ++i)
        if (a.s_on[i] != c.s_on[i]) any_different = true;
    CHECK(any_different);

    CHECK_THROWS_AS(simulate(d.params, d.curve, train, 0, 42), std::invalid_argument);
}

TEST_CASE("Monte Carlo frequencies sit within binomial error of the exact chain") {
    const io::DetectorBundle d = io::builtin_preset("ch5");
    PulseTrain train;
    train.mean_photons_per_pulse = 5.0;
    train.slot_period = 1e-8;
    train.num_slots = 100;

    const TraceResult trace = evolve(d.params, d.curve, train);
    const MarkovResult chain = markov_exact(d.params, d.curve, train);
    const SimulateResult mc = simulate(d.params, d.curve, train, 100000, 7);
    const CompareReport rep = compare(trace, chain, &mc);
    CHECK(rep.max_abs_deviation <= 1e-9);
    CHECK(rep.coverage_3sigma >= 0.95);
    CHECK(rep.pass);
}

TEST_CASE("comparison report flags mismatched lengths and threshold violations") {
    const io::DetectorBundle d = io::builtin_preset("ch5");
    PulseTrain train;
    train.mean_photons_per_pulse = 2.0;
    train.slot_period = 1e-8;
    train.num_slots = 20;

    const TraceResult trace = evolve(d.params, d.curve, train);
    MarkovResult chain = markov_exact(d.params, d.curve, train);

    MarkovResult shorter = chain;
    shorter.s_on.pop_back();
    CHECK_THROWS_AS(compare(trace, shorter), std::invalid_argument);

    chain.p_click[5] += 5e-9;
    const CompareReport rep = compare(trace, chain);
    CHECK_FALSE(rep.deviation_pass);
    CHECK_FALSE(rep.pass);
    CHECK(rep.max_abs_deviation >= 4e-9);
}
