#include "sspd/attack.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sspd/units.hpp"

namespace sspd {

namespace {

long long ceil_snapped(double value) {
    return static_cast<long long>(std::ceil(value - 1e-9));
}

/// Stationary registered-click rate of a full-rate train at the given power.
double rate_at_power_dbm(const DetectorParams& params, const EfficiencyCurve& curve,
                         double rep_rate_hz, double dbm, const MinPowerOptions& options) {
    PulseTrain train;
    train.mean_photons_per_pulse =
        photons_from_power(dbm_to_watts(dbm), rep_rate_hz, options.wavelength);
    train.slot_period = 1.0 / rep_rate_hz;
    train.num_slots = 1;
    train.wavelength = options.wavelength;
    EvolveOptions evolve;
    evolve.mode = options.mode;
    return steady_state_click_rate(params, curve, train, evolve);
}

}  // namespace

AttackPlan blinding_schedule(const DetectorParams& params, const EfficiencyCurve& curve,
                             double epsilon) {
    params.validate();
    if (!(epsilon > 0.0) || !(epsilon < 1.0))
        throw std::invalid_argument("blinding_schedule: escape tolerance must lie in (0, 1)");

    const double period = time_to_threshold(params);
    const double bias_at_threshold = threshold_bias_fraction(params) * params.operating_bias;
    const double eta = efficiency_at_bias(curve, params, bias_at_threshold);
    if (eta <= 0.0) {
        std::ostringstream os;
        os << "blinding_schedule: detector " << params.name
           << " has zero detection efficiency at the threshold bias ("
           << bias_at_threshold / params.critical_current
           << " of the critical current); no photon number can re-trip it there";
        throw std::runtime_error(os.str());
    }

    AttackPlan plan;
    plan.target = params.name;
    plan.blinding_period = period;
    plan.photons_per_blinding_pulse = static_cast<double>(
        std::max<long long>(1, ceil_snapped(-std::log(epsilon) / eta)));
    plan.retrip_probability = -std::expm1(-plan.photons_per_blinding_pulse * eta);
    return plan;
}

MinPowerResult min_blinding_power(const DetectorParams& params, const EfficiencyCurve& curve,
                                  double rep_rate_hz, double max_count_rate,
                                  const MinPowerOptions& options) {
    if (!(rep_rate_hz > 0.0))
        throw std::invalid_argument("min_blinding_power: repetition rate must be positive");
    if (!(max_count_rate >= 0.0))
        throw std::invalid_argument("min_blinding_power: count-rate bound must be non-negative");
    if (!(options.bracket_high_dbm > options.bracket_low_dbm))
        throw std::invalid_argument("min_blinding_power: empty power bracket");
    if (!(options.tolerance_db > 0.0))
        throw std::invalid_argument("min_blinding_power: tolerance must be positive");

    double lo = options.bracket_low_dbm;
    double hi = options.bracket_high_dbm;
    const double rate_hi = rate_at_power_dbm(params, curve, rep_rate_hz, hi, options);
    if (rate_hi > max_count_rate) {
        std::ostringstream os;
        os << "min_blinding_power: even " << hi << " dBm leaves the count rate at " << rate_hi
           << " events/s, above the bound of " << max_count_rate
           << "; widen the bracket upward";
        throw std::runtime_error(os.str());
    }
    const double rate_lo = rate_at_power_dbm(params, curve, rep_rate_hz, lo, options);

    MinPowerResult res;
    if (rate_lo <= max_count_rate) {
        res.degenerate_lower_edge = true;
        res.power_dbm = lo;
        res.power_w = dbm_to_watts(lo);
        res.achieved_rate_hz = rate_lo;
        return res;
    }

    int iterations = 0;
    while (hi - lo > options.tolerance_db) {
        const double mid = 0.5 * (lo + hi);
        const double rate_mid = rate_at_power_dbm(params, curve, rep_rate_hz, mid, options);
        if (rate_mid <= max_count_rate)
            hi = mid;
        else
            lo = mid;
        ++iterations;
    }
    res.power_dbm = hi;
    res.power_w = dbm_to_watts(hi);
    res.achieved_rate_hz = rate_at_power_dbm(params, curve, rep_rate_hz, hi, options);
    res.iterations = iterations;
    return res;
}

ForcingReport double_pulse_port_control(const DetectorParams& blinded,
                                        const EfficiencyCurve& blinded_curve,
                                        const DetectorParams& forced,
                                        const EfficiencyCurve& forced_curve,
                                        const AttackPlan& plan, double pulse_separation_s) {
    blinded.validate();
    forced.validate();
    if (!plan.forcing_photons_per_pulse)
        throw std::invalid_argument(
            "double_pulse_port_control: the plan carries no forcing intensity");
    if (!(plan.blinding_period > 0.0))
        throw std::invalid_argument("double_pulse_port_control: plan has no blinding period");
    if (!(pulse_separation_s > 0.0))
        throw std::invalid_argument("double_pulse_port_control: pulse separation must be positive");

    const double eta_forced = efficiency_at_bias(forced_curve, forced, forced.operating_bias);
    const double gamma_sep = forced.dark_count_rate * pulse_separation_s;

    ForcingReport rep;
    rep.p_first = -std::expm1(-gamma_sep - *plan.forcing_photons_per_pulse * eta_forced);
    rep.p_cumulative = 1.0 - (1.0 - rep.p_first) * (1.0 - rep.p_first);

    const double eta_blinded = efficiency_at_bias(
        blinded_curve, blinded, bias_current(blinded, plan.blinding_period));
    rep.blinded_retrip_probability =
        -std::expm1(-plan.photons_per_blinding_pulse * eta_blinded);
    rep.blinded_escape_per_pulse = 1.0 - rep.blinded_retrip_probability;
    return rep;
}

CoincidenceReport coincidence_countermeasure(const DetectorParams& blinded,
                                             const EfficiencyCurve& blinded_curve,
                                             const DetectorParams& forced,
                                             const EfficiencyCurve& forced_curve,
                                             const AttackPlan& plan, double baseline_per_slot,
                                             double rep_rate_hz, CoincidenceMode mode) {
    blinded.validate();
    if (!(plan.blinding_period > 0.0))
        throw std::invalid_argument("coincidence_countermeasure: plan has no blinding period");
    if (!(plan.photons_per_blinding_pulse > 0.0))
        throw std::invalid_argument("coincidence_countermeasure: plan has no blinding intensity");
    if (!(rep_rate_hz > 0.0))
        throw std::invalid_argument("coincidence_countermeasure: repetition rate must be positive");
    if (!(baseline_per_slot > 0.0))
        throw std::invalid_argument(
            "coincidence_countermeasure: baseline coincidence probability must be positive");

    CoincidenceReport rep;
    rep.mode = mode;
    rep.interval_slots = std::max<long long>(1, ceil_snapped(plan.blinding_period * rep_rate_hz));
    const double slot_period = 1.0 / rep_rate_hz;

    double eta_escape = 0.0;
    double eta_next = 0.0;
    switch (mode) {
        case CoincidenceMode::threshold:
            eta_escape = efficiency_at_bias(
                blinded_curve, blinded, threshold_bias_fraction(blinded) * blinded.operating_bias);
            eta_next = efficiency_at_bias(blinded_curve, blinded,
                                          bias_current(blinded, 2.0 * plan.blinding_period));
            break;
        case CoincidenceMode::age_resolved:
            eta_escape = efficiency_at_bias(
                blinded_curve, blinded,
                bias_current(blinded, static_cast<double>(rep.interval_slots) * slot_period));
            eta_next = efficiency_at_bias(
                blinded_curve, blinded,
                bias_current(blinded, 2.0 * static_cast<double>(rep.interval_slots) * slot_period));
            break;
    }

    const double half_photons = 0.5 * plan.photons_per_blinding_pulse;
    const double gamma_period = blinded.dark_count_rate * plan.blinding_period;
    rep.escape_probability = std::exp(-half_photons * eta_escape - gamma_period);
    rep.next_click_probability = -std::expm1(-half_photons * eta_next - gamma_period);

    rep.forced_click_probability = 1.0;
    if (plan.forcing_photons_per_pulse) {
        const ForcingReport forcing =
            double_pulse_port_control(blinded, blinded_curve, forced, forced_curve, plan);
        rep.forced_click_probability = forcing.p_cumulative;
    }

    rep.per_event =
        rep.escape_probability * rep.next_click_probability * rep.forced_click_probability;
    rep.normalized_per_slot = rep.per_event / static_cast<double>(rep.interval_slots);
    rep.baseline_per_slot = baseline_per_slot;
    rep.ratio_vs_baseline = rep.normalized_per_slot / baseline_per_slot;
    return rep;
}

double dps_double_pulse_power(const AttackPlan& plan, double wavelength_m, int n_detectors) {
    if (!(plan.blinding_period > 0.0))
        throw std::invalid_argument("dps_double_pulse_power: plan has no blinding period");
    if (plan.photons_per_blinding_pulse < 0.0)
        throw std::invalid_argument("dps_double_pulse_power: negative photon number");
    if (n_detectors < 1)
        throw std::invalid_argument("dps_double_pulse_power: need at least one detector");
    const double n = static_cast<double>(n_detectors);
    return n * n * plan.photons_per_blinding_pulse * photon_energy(wavelength_m) /
           plan.blinding_period;
}

}  // namespace sspd
