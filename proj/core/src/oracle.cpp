#include "sspd/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace sspd {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& eng) {
    // 53 random bits -> [0, 1) with full double resolution.
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace

MarkovResult markov_exact(const DetectorParams& params, const EfficiencyCurve& curve,
                          const PulseTrain& train, std::optional<long long> age_cap,
                          const EvolveOptions& options) {
    const SlotHazards hz = make_slot_hazards(params, curve, train, options);
    const long long k_reg = hz.registrable_age;
    const long long default_cap = std::max({4 * hz.horizon, k_reg + 2, 64LL});
    const long long cap = age_cap ? *age_cap : default_cap;
    if (cap < 2) throw std::invalid_argument("age cap must be at least 2");
    const bool pooling_exact = cap >= hz.horizon + 1 && cap >= k_reg;

    std::vector<double> age(static_cast<std::size_t>(cap) + 1, 0.0);  // age[k], k in 1..cap
    double never_mass = 1.0;
    const double q_never = std::exp(-hz.never_exponent);
    const double p_never = -std::expm1(-hz.never_exponent);

    std::vector<double> p_of_age(static_cast<std::size_t>(cap) + 1, 0.0);
    std::vector<double> q_of_age(static_cast<std::size_t>(cap) + 1, 0.0);
    for (long long k = 1; k <= cap; ++k) {
        p_of_age[static_cast<std::size_t>(k)] = hz.transition(k);
        q_of_age[static_cast<std::size_t>(k)] = hz.survival(k);
    }

    const long long n_slots = train.num_slots;
    MarkovResult out;
    out.s_off.resize(static_cast<std::size_t>(n_slots));
    out.s_on.resize(static_cast<std::size_t>(n_slots));
    out.g.resize(static_cast<std::size_t>(n_slots));
    out.p_on.resize(static_cast<std::size_t>(n_slots));
    out.p_click.resize(static_cast<std::size_t>(n_slots));

    for (long long n = 1; n <= n_slots; ++n) {
        if (!pooling_exact && age[static_cast<std::size_t>(cap)] > 1e-9) {
            std::ostringstream os;
            os << "age cap " << cap << " pools states whose hazards still differ (horizon "
               << hz.horizon << ", registrable age " << k_reg << ") and "
               << age[static_cast<std::size_t>(cap)]
               << " probability mass has reached the pooled state; raise the cap";
            throw std::runtime_error(os.str());
        }

        double total = never_mass;
        double s_on = never_mass * p_never;
        double registrable_mass = never_mass;
        double p_click = never_mass * p_never;
        for (long long k = 1; k <= cap; ++k) {
            const double m = age[static_cast<std::size_t>(k)];
            total += m;
            const double t = m * p_of_age[static_cast<std::size_t>(k)];
            s_on += t;
            if (k >= k_reg) {
                registrable_mass += m;
                p_click += t;
            }
        }
        if (std::abs(total - 1.0) > 1e-12) {
            std::ostringstream os;
            os << "age-chain mass drifted to " << total << " at slot " << n;
            throw std::logic_error(os.str());
        }

        const double s_off = 1.0 - s_on;
        double g = std::min(1.0, registrable_mass);
        if (options.mode == GMode::paper_approx)
            g = (n == 1) ? 1.0 : out.s_off[static_cast<std::size_t>(n - 2)];

        out.s_off[static_cast<std::size_t>(n - 1)] = s_off;
        out.s_on[static_cast<std::size_t>(n - 1)] = s_on;
        out.g[static_cast<std::size_t>(n - 1)] = g;
        out.p_on[static_cast<std::size_t>(n - 1)] = s_on * g;
        out.p_click[static_cast<std::size_t>(n - 1)] = std::min(s_on, p_click);

        // Advance: transitioned mass re-enters at age 1, surviving mass ages by
        // one slot, the pooled state keeps its own survivors.
        std::vector<double> next(static_cast<std::size_t>(cap) + 1, 0.0);
        next[1] = s_on;
        for (long long k = 1; k < cap; ++k)
            next[static_cast<std::size_t>(k + 1)] =
                age[static_cast<std::size_t>(k)] * q_of_age[static_cast<std::size_t>(k)];
        next[static_cast<std::size_t>(cap)] +=
            age[static_cast<std::size_t>(cap)] * q_of_age[static_cast<std::size_t>(cap)];
        age.swap(next);
        never_mass *= q_never;
    }
    return out;
}

SimulateResult simulate(const DetectorParams& params, const EfficiencyCurve& curve,
                        const PulseTrain& train, long long trials, std::uint64_t seed,
                        const EvolveOptions& options) {
    if (trials < 1) throw std::invalid_argument("simulate: need at least one trial");
    const SlotHazards hz = make_slot_hazards(params, curve, train, options);
    const long long k_reg = hz.registrable_age;
    const long long n_slots = train.num_slots;
    const double p_never = -std::expm1(-hz.never_exponent);

    std::vector<long long> on_count(static_cast<std::size_t>(n_slots), 0);
    std::vector<long long> click_count(static_cast<std::size_t>(n_slots), 0);

    for (long long trial = 0; trial < trials; ++trial) {
        std::mt19937_64 eng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(trial) + 1)));
        long long age = 0;  // 0 = never tripped
        for (long long n = 0; n < n_slots; ++n) {
            const double p = age == 0 ? p_never : hz.transition(age);
            if (uniform01(eng) < p) {
                ++on_count[static_cast<std::size_t>(n)];
                if (age == 0 || age >= k_reg) ++click_count[static_cast<std::size_t>(n)];
                age = 1;
            } else if (age != 0) {
                ++age;
            }
        }
    }

    SimulateResult out;
    out.trials = trials;
    out.seed = seed;
    out.s_on.resize(static_cast<std::size_t>(n_slots));
    out.p_click.resize(static_cast<std::size_t>(n_slots));
    out.s_on_stderr.resize(static_cast<std::size_t>(n_slots));
    out.p_click_stderr.resize(static_cast<std::size_t>(n_slots));
    const double inv = 1.0 / static_cast<double>(trials);
    for (long long n = 0; n < n_slots; ++n) {
        const double f_on = static_cast<double>(on_count[static_cast<std::size_t>(n)]) * inv;
        const double f_click = static_cast<double>(click_count[static_cast<std::size_t>(n)]) * inv;
        out.s_on[static_cast<std::size_t>(n)] = f_on;
        out.p_click[static_cast<std::size_t>(n)] = f_click;
        out.s_on_stderr[static_cast<std::size_t>(n)] = std::sqrt(f_on * (1.0 - f_on) * inv);
        out.p_click_stderr[static_cast<std::size_t>(n)] =
            std::sqrt(f_click * (1.0 - f_click) * inv);
    }
    return out;
}

CompareReport compare(const TraceResult& trace, const MarkovResult& oracle,
                      const SimulateResult* mc, double deviation_threshold,
                      double min_coverage) {
    const std::size_t n = trace.s_on.size();
    if (oracle.s_on.size() != n)
        throw std::invalid_argument("compare: recursion and age-chain traces differ in length");
    if (mc && mc->s_on.size() != n)
        throw std::invalid_argument("compare: Monte Carlo trace differs in length");

    CompareReport rep;
    rep.deviation_threshold = deviation_threshold;
    rep.min_coverage = min_coverage;

    const std::vector<double>* pairs[5][2] = {
        {&trace.s_off, &oracle.s_off}, {&trace.s_on, &oracle.s_on}, {&trace.g, &oracle.g},
        {&trace.p_on, &oracle.p_on},   {&trace.p_click, &oracle.p_click},
    };
    for (auto& pr : pairs) {
        for (std::size_t i = 0; i < n; ++i)
            rep.max_abs_deviation =
                std::max(rep.max_abs_deviation, std::abs((*pr[0])[i] - (*pr[1])[i]));
    }
    rep.deviation_pass = rep.max_abs_deviation <= deviation_threshold;

    if (mc) {
        rep.z.resize(n);
        std::size_t within = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double p = oracle.s_on[i];
            const double sigma = std::sqrt(std::max(0.0, p * (1.0 - p)) /
                                           static_cast<double>(mc->trials));
            rep.z[i] = (mc->s_on[i] - p) / std::max(sigma, 1e-300);
            if (std::abs(rep.z[i]) <= 3.0) ++within;
        }
        rep.coverage_3sigma = n == 0 ? 1.0 : static_cast<double>(within) / static_cast<double>(n);
        rep.coverage_pass = rep.coverage_3sigma >= min_coverage;
    }
    rep.pass = rep.deviation_pass && rep.coverage_pass;
    return rep;
}

}  // namespace sspd
