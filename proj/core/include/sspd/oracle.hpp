#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sspd/pulse_train.hpp"

namespace sspd {

/// Exact forward evaluation of the renewal process as a Markov chain over
/// "slots since the last transition".  Independent of the evolve() recursion
/// (forward age propagation instead of the backward renewal sum), but consumes
/// the same hazard table, so the two must agree to floating-point accumulation
/// error.  Ages at and above `age_cap` are pooled into one state; the pooling
/// is exact whenever the cap lies beyond both the hazard horizon and the
/// registrable age (the default cap guarantees this).  With a user-forced
/// smaller cap, more than 1e-9 probability mass reaching the pooled state is
/// an error.
struct MarkovResult {
    std::vector<double> s_off;
    std::vector<double> s_on;
    std::vector<double> g;
    std::vector<double> p_on;
    std::vector<double> p_click;
};

MarkovResult markov_exact(const DetectorParams& params, const EfficiencyCurve& curve,
                          const PulseTrain& train,
                          std::optional<long long> age_cap = std::nullopt,
                          const EvolveOptions& options = {});

/// Seeded Monte Carlo of the same per-slot renewal walk.  Deterministic for a
/// fixed (seed, trials): each trial draws from its own substream derived from
/// (seed, trial index), so results do not depend on execution order.
struct SimulateResult {
    std::vector<double> s_on;             // empirical transition frequency per slot
    std::vector<double> p_click;          // empirical registered-click frequency per slot
    std::vector<double> s_on_stderr;      // binomial standard errors
    std::vector<double> p_click_stderr;
    long long trials = 0;
    std::uint64_t seed = 0;
};

SimulateResult simulate(const DetectorParams& params, const EfficiencyCurve& curve,
                        const PulseTrain& train, long long trials, std::uint64_t seed,
                        const EvolveOptions& options = {});

/// Deviation statistics between the recursion, the exact chain and (optionally)
/// the Monte Carlo frequencies.
struct CompareReport {
    double max_abs_deviation = 0.0;   // recursion vs exact, across all trace sequences
    std::vector<double> z;            // per-slot (mc - exact) / binomial sigma, on s_on
    double coverage_3sigma = 1.0;     // fraction of slots with |z| <= 3
    double deviation_threshold = 0.0;
    double min_coverage = 0.0;
    bool deviation_pass = true;
    bool coverage_pass = true;
    bool pass = true;
};

CompareReport compare(const TraceResult& trace, const MarkovResult& oracle,
                      const SimulateResult* mc = nullptr,
                      double deviation_threshold = 1e-9, double min_coverage = 0.95);

}  // namespace sspd
