#include "sspd/pulse_train.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sspd/units.hpp"

namespace sspd {

namespace {

// Ceiling with a snap window so that ratios a hair above an integer (from
// forming t/T out of previously rounded doubles) do not spill into the next slot.
long long ceil_snapped(double value) {
    return static_cast<long long>(std::ceil(value - 1e-9));
}

double gamma_for_bias(const DetectorParams& params, const EfficiencyCurve& curve,
                      const EvolveOptions& options, double slot_period, double bias_fraction) {
    if (options.bias_dependent_dark && curve.has_dark_points())
        return curve.dark_rate_at(bias_fraction) * slot_period;
    return params.dark_count_rate * slot_period;
}

}  // namespace

void PulseTrain::validate() const {
    if (mean_photons_per_pulse < 0.0)
        throw std::invalid_argument("pulse train: mean photon number must be non-negative");
    if (!(slot_period > 0.0))
        throw std::invalid_argument("pulse train: slot period must be positive");
    if (num_slots < 1) throw std::invalid_argument("pulse train: need at least one slot");
    if (!(wavelength > 0.0))
        throw std::invalid_argument("pulse train: wavelength must be positive");
}

long long registrable_age_slots(double threshold_recovery_s, double slot_period_s) {
    if (!(slot_period_s > 0.0))
        throw std::invalid_argument("registrable_age_slots: slot period must be positive");
    if (threshold_recovery_s <= 0.0) return 1;
    return 1 + std::max<long long>(0, ceil_snapped(threshold_recovery_s / slot_period_s));
}

double SlotHazards::age_exponent(long long age) const {
    if (age < 1) throw std::invalid_argument("age must be >= 1");
    if (age <= horizon) return exponent[static_cast<std::size_t>(age - 1)];
    return saturated_exponent;
}

double SlotHazards::survival(long long age) const { return std::exp(-age_exponent(age)); }

double SlotHazards::transition(long long age) const { return -std::expm1(-age_exponent(age)); }

double SlotHazards::cumulative(long long m) const {
    if (m < 0) throw std::invalid_argument("cumulative: negative age span");
    if (m <= horizon) return prefix[static_cast<std::size_t>(m)];
    return prefix[static_cast<std::size_t>(horizon)] +
           static_cast<double>(m - horizon) * saturated_exponent;
}

double SlotHazards::survival_through(long long m) const { return std::exp(-cumulative(m)); }

SlotHazards make_slot_hazards(const DetectorParams& params, const EfficiencyCurve& curve,
                              const PulseTrain& train, const EvolveOptions& options) {
    params.validate();
    train.validate();
    if (!(options.horizon_tolerance > 0.0) || !(options.horizon_tolerance < 1.0))
        throw std::invalid_argument("horizon tolerance must lie in (0, 1)");

    const double tau = recovery_time_constant(params);
    const double beta_t = train.slot_period / tau;
    const double mu = train.mean_photons_per_pulse;

    SlotHazards hz;
    hz.slot_period = train.slot_period;
    hz.horizon = options.horizon_override
                     ? *options.horizon_override
                     : static_cast<long long>(std::ceil(std::log(1.0 / options.horizon_tolerance) /
                                                        beta_t));
    hz.horizon = std::max<long long>(1, hz.horizon);
    if (static_cast<double>(hz.horizon) > options.work_budget)
        throw std::runtime_error("hazard horizon alone exceeds the work budget");

    hz.exponent.resize(static_cast<std::size_t>(hz.horizon));
    hz.prefix.resize(static_cast<std::size_t>(hz.horizon) + 1);
    hz.prefix[0] = 0.0;
    for (long long k = 1; k <= hz.horizon; ++k) {
        const double i_b = bias_current(params, static_cast<double>(k) * train.slot_period);
        const double eta = efficiency_at_bias(curve, params, i_b);
        const double gamma =
            gamma_for_bias(params, curve, options, train.slot_period, i_b / params.critical_current);
        hz.exponent[static_cast<std::size_t>(k - 1)] = gamma + mu * eta;
        hz.prefix[static_cast<std::size_t>(k)] =
            hz.prefix[static_cast<std::size_t>(k - 1)] + hz.exponent[static_cast<std::size_t>(k - 1)];
    }
    const double gamma_op = gamma_for_bias(params, curve, options, train.slot_period,
                                           params.operating_fraction());
    const double eta_op = efficiency_at_bias(curve, params, params.operating_bias);
    hz.saturated_exponent = gamma_op + mu * eta_op;
    hz.never_exponent = hz.saturated_exponent;
    hz.registrable_age = registrable_age_slots(time_to_threshold(params), train.slot_period);
    return hz;
}

TraceResult evolve(const DetectorParams& params, const EfficiencyCurve& curve,
                   const PulseTrain& train, const EvolveOptions& options) {
    const SlotHazards hz = make_slot_hazards(params, curve, train, options);
    const long long n_slots = train.num_slots;
    const long long k_reg = hz.registrable_age;

    if (!options.truncate) {
        const double quadratic_work = static_cast<double>(n_slots) * static_cast<double>(n_slots);
        if (quadratic_work > options.work_budget) {
            std::ostringstream os;
            os << "untruncated recursion over " << n_slots << " slots needs ~" << quadratic_work
               << " operations, above the work budget of " << options.work_budget
               << "; enable hazard truncation (EvolveOptions::truncate) for O(slots * horizon)";
            throw std::runtime_error(os.str());
        }
    }
    const long long memory =
        options.truncate ? std::min<long long>(n_slots, hz.horizon) : n_slots;
    const long long gate_span = std::min<long long>(n_slots, k_reg);
    const double work = static_cast<double>(n_slots) * static_cast<double>(memory + 2 * gate_span);
    if (work > options.work_budget) {
        std::ostringstream os;
        os << "recursion over " << n_slots << " slots with horizon " << memory
           << " and registrable age " << k_reg << " needs ~" << work
           << " operations, above the work budget of " << options.work_budget;
        throw std::runtime_error(os.str());
    }

    // Survival through the first m post-transition pulses, Q(m); beyond the
    // truncation horizon the factors are the saturated constant.
    const long long q_len = std::max(memory, std::min<long long>(k_reg, n_slots)) + 1;
    std::vector<double> q_through(static_cast<std::size_t>(q_len));
    for (long long m = 0; m < q_len; ++m)
        q_through[static_cast<std::size_t>(m)] = hz.survival_through(m);
    const double q_sat = std::exp(-hz.saturated_exponent);
    const double q_horizon = q_through[static_cast<std::size_t>(
        std::min<long long>(memory, q_len - 1))];

    TraceResult out;
    out.s_off.resize(static_cast<std::size_t>(n_slots));
    out.s_on.resize(static_cast<std::size_t>(n_slots));
    out.g.resize(static_cast<std::size_t>(n_slots));
    out.p_on.resize(static_cast<std::size_t>(n_slots));
    out.p_click.resize(static_cast<std::size_t>(n_slots));

    std::vector<double> w(static_cast<std::size_t>(n_slots) + 1, 0.0);  // w[j] = s_on at slot j
    double tail = 0.0;  // saturated part of the renewal sum when truncating

    for (long long n = 1; n <= n_slots; ++n) {
        const double never_term = std::exp(-static_cast<double>(n) * hz.never_exponent);
        double renewal = 0.0;
        if (options.truncate) {
            const long long span = std::min(n - 1, memory);
            for (long long m = 1; m <= span; ++m)
                renewal += w[static_cast<std::size_t>(n - m)] * q_through[static_cast<std::size_t>(m)];
            if (n - memory - 1 >= 1)
                tail = q_sat * tail + q_horizon * q_sat * w[static_cast<std::size_t>(n - memory - 1)];
            renewal += tail;
        } else {
            for (long long m = 1; m <= n - 1; ++m)
                renewal += w[static_cast<std::size_t>(n - m)] * hz.survival_through(m);
        }
        double s_off = never_term + renewal;
        s_off = std::min(1.0, std::max(0.0, s_off));
        const double s_on = 1.0 - s_off;
        w[static_cast<std::size_t>(n)] = s_on;

        // Pre-pulse age distribution: P(age = k) = w[n-k] Q(k-1), P(no prior
        // transition) = exp(-(n-1) * never).  The registration gate is applied
        // as a complement over the sub-threshold ages.
        double sub_age_mass = 0.0;    // P(age < registrable)
        double sub_age_clicks = 0.0;  // P(age < registrable and pulse n transitions)
        const long long sub_span = std::min(n - 1, k_reg - 1);
        for (long long k = 1; k <= sub_span; ++k) {
            const double occupancy =
                w[static_cast<std::size_t>(n - k)] *
                (options.truncate ? q_through[static_cast<std::size_t>(std::min(k - 1, q_len - 1))]
                                  : hz.survival_through(k - 1));
            sub_age_mass += occupancy;
            sub_age_clicks += occupancy * hz.transition(k);
        }
        const double g_exact = std::min(1.0, std::max(0.0, 1.0 - sub_age_mass));
        const double p_click = std::min(s_on, std::max(0.0, s_on - sub_age_clicks));

        double g = g_exact;
        if (options.mode == GMode::paper_approx)
            g = (n == 1) ? 1.0 : out.s_off[static_cast<std::size_t>(n - 2)];

        out.s_off[static_cast<std::size_t>(n - 1)] = s_off;
        out.s_on[static_cast<std::size_t>(n - 1)] = s_on;
        out.g[static_cast<std::size_t>(n - 1)] = g;
        out.p_on[static_cast<std::size_t>(n - 1)] = s_on * g;
        out.p_click[static_cast<std::size_t>(n - 1)] = p_click;
    }

    const StationaryResult st = stationary_state(hz);
    out.steady_click_rate = (options.mode == GMode::exact_age ? st.click_probability
                                                              : st.paper_click_probability) /
                            train.slot_period;

    // Sliding-window convergence of the mode's click sequence.
    const std::vector<double>& seq =
        options.mode == GMode::exact_age ? out.p_click : out.p_on;
    const int window = std::max(1, options.convergence_window);
    int quiet = 0;
    for (long long n = 1; n < n_slots; ++n) {
        const double a = seq[static_cast<std::size_t>(n)];
        const double b = seq[static_cast<std::size_t>(n - 1)];
        const double rel = std::abs(a - b) / std::max(std::abs(a), 1e-30);
        quiet = rel < options.convergence_rel_tol ? quiet + 1 : 0;
        if (quiet >= window) {
            out.converged_at_slot = n + 1;
            break;
        }
    }
    return out;
}

StationaryResult stationary_state(const SlotHazards& hz) {
    StationaryResult st;
    const double p_sat = -std::expm1(-hz.saturated_exponent);
    const double r_after_horizon = hz.survival_through(hz.horizon);  // R(horizon + 1)

    double cycle = 0.0;  // E[slots per transition cycle] = sum_k R(k)
    for (long long k = 1; k <= hz.horizon; ++k) cycle += hz.survival_through(k - 1);
    double reach_tail = 0.0;  // sum_{k > horizon} R(k)
    if (p_sat > 0.0) {
        reach_tail = r_after_horizon / p_sat;
    } else if (r_after_horizon > 0.0) {
        // No hazard beyond the horizon and mass still alive: cycles never end.
        return st;
    }
    cycle += reach_tail;
    if (!(cycle > 0.0) || !std::isfinite(cycle)) return st;

    const long long k_reg = hz.registrable_age;
    const double reach_registrable = hz.survival_through(k_reg - 1);  // R(k_reg)
    double tail_from_registrable = 0.0;  // sum_{k >= k_reg} R(k)
    if (k_reg <= hz.horizon) {
        for (long long k = k_reg; k <= hz.horizon; ++k)
            tail_from_registrable += hz.survival_through(k - 1);
        tail_from_registrable += reach_tail;
    } else if (p_sat > 0.0) {
        tail_from_registrable = reach_registrable / p_sat;
    }

    st.expected_cycle_slots = cycle;
    st.transition_probability = 1.0 / cycle;
    st.click_probability = reach_registrable / cycle;
    st.product_click_probability = st.transition_probability * (tail_from_registrable / cycle);
    st.paper_click_probability = st.transition_probability * (1.0 - st.transition_probability);
    return st;
}

double steady_state_click_rate(const DetectorParams& params, const EfficiencyCurve& curve,
                               const PulseTrain& train, const EvolveOptions& options) {
    const SlotHazards hz = make_slot_hazards(params, curve, train, options);
    const StationaryResult st = stationary_state(hz);
    const double p = options.mode == GMode::exact_age ? st.click_probability
                                                      : st.paper_click_probability;
    return p / train.slot_period;
}

double apply_discriminator_limit(double rate, double r_max, LimitMode mode) {
    if (rate < 0.0) throw std::invalid_argument("apply_discriminator_limit: negative rate");
    if (!(r_max > 0.0))
        throw std::invalid_argument("apply_discriminator_limit: maximum rate must be positive");
    switch (mode) {
        case LimitMode::hard: return std::min(rate, r_max);
        case LimitMode::nonparalyzable: return rate / (1.0 + rate / r_max);
    }
    throw std::logic_error("apply_discriminator_limit: unknown mode");
}

double photons_from_power(double power_w, double rep_rate_hz, double wavelength_m) {
    if (power_w < 0.0) throw std::invalid_argument("photons_from_power: negative power");
    if (!(rep_rate_hz > 0.0))
        throw std::invalid_argument("photons_from_power: repetition rate must be positive");
    return (power_w / rep_rate_hz) / photon_energy(wavelength_m);
}

std::vector<SweepRow> power_sweep(const DetectorParams& params, const EfficiencyCurve& curve,
                                  double rep_rate_hz, const std::vector<double>& power_dbm,
                                  const SweepOptions& options) {
    if (power_dbm.empty()) throw std::invalid_argument("power_sweep: empty power list");
    if (!(rep_rate_hz > 0.0))
        throw std::invalid_argument("power_sweep: repetition rate must be positive");
    std::vector<SweepRow> rows;
    rows.reserve(power_dbm.size());
    for (double dbm : power_dbm) {
        try {
            SweepRow row;
            row.power_dbm = dbm;
            row.photons_per_pulse =
                photons_from_power(dbm_to_watts(dbm), rep_rate_hz, options.wavelength);
            PulseTrain train;
            train.mean_photons_per_pulse = row.photons_per_pulse;
            train.slot_period = 1.0 / rep_rate_hz;
            train.num_slots = 1;
            train.wavelength = options.wavelength;
            row.model_rate_hz = steady_state_click_rate(params, curve, train, options.evolve);
            row.observed_rate_hz =
                apply_discriminator_limit(row.model_rate_hz, options.r_max, options.limit);
            rows.push_back(row);
        } catch (const std::exception& e) {
            std::ostringstream os;
            os << "power point " << dbm << " dBm: " << e.what();
            throw std::runtime_error(os.str());
        }
    }
    return rows;
}

}  // namespace sspd
