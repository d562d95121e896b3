#pragma once

#include <string>

#include "sspd/efficiency_curve.hpp"

namespace sspd {

/// Electrical and optical parameters of a single superconducting nanowire detector.
/// All values are SI.
struct DetectorParams {
    std::string name;
    double critical_current = 0.0;           // A
    double kinetic_inductance = 0.0;         // H
    double load_resistance = 25.0;           // ohm
    double shunt_resistance = 50.0;          // ohm (metadata only)
    double amplifier_gain = 100.0;           // voltage gain of the readout chain
    double discriminator_threshold = 0.020;  // V, at the discriminator input
    double operating_bias = 0.0;             // A (I_0)
    double base_efficiency = 0.0;            // detection efficiency at I_0
    double dark_count_rate = 0.0;            // 1 / s

    /// Throws std::invalid_argument naming the offending field.  Rejects a
    /// discriminator threshold at or above gain * operating_bias * load_resistance,
    /// since no output pulse could ever be registered.
    void validate() const;

    double operating_fraction() const { return operating_bias / critical_current; }
};

/// Bias-current recovery time constant tau = L_k / R_L.
double recovery_time_constant(const DetectorParams& params);

/// Bias current a time t after a transition: I_0 (1 - exp(-t / tau)).  t must be >= 0.
double bias_current(const DetectorParams& params, double t);

/// Time at which the recovering bias reaches the fraction phi of I_0 (0 < phi < 1).
double time_to_bias_fraction(const DetectorParams& params, double phi);

/// Minimum I_b / I_0 whose output pulse reaches the discriminator threshold:
/// V_th / (gain * R_L * I_0).  Throws if the result is >= 1.
double threshold_bias_fraction(const DetectorParams& params);

/// Recovery time to the threshold bias fraction; 0 when the threshold is 0.
double time_to_threshold(const DetectorParams& params);

/// eta0 * f(i_b / I_c), clamped to [0, 1].  i_b must lie in [0, I_c].
double efficiency_at_bias(const EfficiencyCurve& curve, const DetectorParams& params,
                          double i_b);

/// Click probability of a single coherent pulse: 1 - exp(-gamma_slot - mean_photons * eta).
double click_probability(double mean_photons, double eta, double gamma_slot);

inline constexpr double kDefaultBiasRatio = 0.906;  // I_0 / I_c when unspecified
inline constexpr double kDefaultAnchorRatio = 0.72;
inline constexpr double kDefaultAnchorRelative = 0.00122 / 0.18;

/// Default two-point efficiency curve anchored at (anchor_ratio * I_0, anchor_relative * eta0)
/// and (I_0, eta0), log-linear in between and zero below the anchor.
EfficiencyCurve default_two_point_curve(const DetectorParams& params,
                                        double anchor_ratio = kDefaultAnchorRatio,
                                        double anchor_relative = kDefaultAnchorRelative);

}  // namespace sspd
