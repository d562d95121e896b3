#include "sspd/detector.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sspd {

namespace {

[[noreturn]] void reject(const std::string& field, double value, const std::string& why) {
    std::ostringstream os;
    os << "detector parameter " << field << " = " << value << ": " << why;
    throw std::invalid_argument(os.str());
}

}  // namespace

void DetectorParams::validate() const {
    if (!(critical_current > 0.0)) reject("critical_current", critical_current, "must be positive");
    if (!(kinetic_inductance > 0.0))
        reject("kinetic_inductance", kinetic_inductance, "must be positive");
    if (!(load_resistance > 0.0)) reject("load_resistance", load_resistance, "must be positive");
    if (shunt_resistance < 0.0) reject("shunt_resistance", shunt_resistance, "must be non-negative");
    if (!(amplifier_gain > 0.0)) reject("amplifier_gain", amplifier_gain, "must be positive");
    if (discriminator_threshold < 0.0)
        reject("discriminator_threshold", discriminator_threshold, "must be non-negative");
    if (!(operating_bias > 0.0) || !(operating_bias < critical_current))
        reject("operating_bias", operating_bias,
               "must lie strictly between 0 and the critical current");
    if (base_efficiency < 0.0 || base_efficiency > 1.0)
        reject("base_efficiency", base_efficiency, "must lie in [0, 1]");
    if (dark_count_rate < 0.0) reject("dark_count_rate", dark_count_rate, "must be non-negative");
    const double full_pulse = amplifier_gain * operating_bias * load_resistance;
    if (!(discriminator_threshold < full_pulse))
        reject("discriminator_threshold", discriminator_threshold,
               "at or above the full-bias output pulse; no click could ever be registered");
}

double recovery_time_constant(const DetectorParams& params) {
    return params.kinetic_inductance / params.load_resistance;
}

double bias_current(const DetectorParams& params, double t) {
    if (t < 0.0) throw std::invalid_argument("bias_current: time must be non-negative");
    const double tau = recovery_time_constant(params);
    return params.operating_bias * -std::expm1(-t / tau);
}

double time_to_bias_fraction(const DetectorParams& params, double phi) {
    if (!(phi > 0.0) || !(phi < 1.0))
        throw std::invalid_argument(
            "time_to_bias_fraction: fraction must lie in (0, 1); the asymptote is never reached");
    return -recovery_time_constant(params) * std::log1p(-phi);
}

double threshold_bias_fraction(const DetectorParams& params) {
    const double fraction = params.discriminator_threshold /
                            (params.amplifier_gain * params.load_resistance *
                             params.operating_bias);
    if (fraction >= 1.0)
        throw std::invalid_argument(
            "threshold_bias_fraction: threshold at or above the full-bias output pulse");
    return fraction;
}

double time_to_threshold(const DetectorParams& params) {
    const double fraction = threshold_bias_fraction(params);
    if (fraction == 0.0) return 0.0;
    return time_to_bias_fraction(params, fraction);
}

double efficiency_at_bias(const EfficiencyCurve& curve, const DetectorParams& params,
                          double i_b) {
    if (i_b < 0.0 || i_b > params.critical_current)
        throw std::invalid_argument(
            "efficiency_at_bias: bias current must lie in [0, critical_current]");
    const double eta = params.base_efficiency * curve.relative(i_b / params.critical_current);
    return std::min(1.0, std::max(0.0, eta));
}

double click_probability(double mean_photons, double eta, double gamma_slot) {
    if (mean_photons < 0.0) throw std::invalid_argument("click_probability: negative photon number");
    if (eta < 0.0 || eta > 1.0)
        throw std::invalid_argument("click_probability: efficiency must lie in [0, 1]");
    if (gamma_slot < 0.0)
        throw std::invalid_argument("click_probability: negative dark probability");
    return -std::expm1(-gamma_slot - mean_photons * eta);
}

EfficiencyCurve default_two_point_curve(const DetectorParams& params, double anchor_ratio,
                                        double anchor_relative) {
    return EfficiencyCurve::two_point(params.operating_fraction(), anchor_ratio,
                                      anchor_relative);
}

}  // namespace sspd
