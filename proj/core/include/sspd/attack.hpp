#pragma once

#include <optional>
#include <string>

#include "sspd/pulse_train.hpp"

namespace sspd {

/// A tailored bright-pulse schedule that holds one detector re-tripping below
/// the discriminator threshold, optionally combined with a forcing intensity
/// for the partner detector.
struct AttackPlan {
    std::string target;
    double blinding_period = 0.0;            // s, pulse interval of the tailored train
    double photons_per_blinding_pulse = 0.0;
    double retrip_probability = 0.0;         // per-pulse re-trip probability achieved
    std::optional<double> forcing_photons_per_pulse;
};

/// Build the minimal-energy hold schedule: period equal to the threshold
/// recovery time, photon number the smallest integer whose re-trip probability
/// at the threshold bias is at least 1 - epsilon.  Errors when the efficiency
/// curve is zero at the threshold bias (no finite photon number can re-trip
/// the wire there).
AttackPlan blinding_schedule(const DetectorParams& params, const EfficiencyCurve& curve,
                             double epsilon = 1e-5);

struct MinPowerOptions {
    double bracket_low_dbm = -60.0;
    double bracket_high_dbm = -10.0;
    double tolerance_db = 0.1;
    double wavelength = 1550e-9;
    GMode mode = GMode::exact_age;
};

struct MinPowerResult {
    double power_w = 0.0;
    double power_dbm = 0.0;
    double achieved_rate_hz = 0.0;
    int iterations = 0;
    /// True when even the lower bracket edge already satisfies the bound
    /// (degenerate request, e.g. an infinite rate bound).
    bool degenerate_lower_edge = false;
};

/// Smallest input power of a full-rate pulse train whose stationary registered
/// count rate stays at or below max_count_rate.  Bisection over dBm to
/// `tolerance_db`; errors with bracket diagnostics when the bound is never met.
MinPowerResult min_blinding_power(const DetectorParams& params, const EfficiencyCurve& curve,
                                  double rep_rate_hz, double max_count_rate = 300.0,
                                  const MinPowerOptions& options = {});

struct ForcingReport {
    double p_first = 0.0;                    // click probability of the first forcing pulse
    double p_cumulative = 0.0;               // click probability of the 1 ns double pulse
    double blinded_escape_per_pulse = 0.0;   // 1 - retrip of the blinded target
    double blinded_retrip_probability = 0.0;
};

/// Click probabilities of the forced (fully biased) detector under the bright
/// double pulse, while the plan's target stays blinded.  The second pulse sees
/// full bias only when the first did not transition, so the cumulative click
/// probability is 1 - (1 - p1)^2.
ForcingReport double_pulse_port_control(const DetectorParams& blinded,
                                        const EfficiencyCurve& blinded_curve,
                                        const DetectorParams& forced,
                                        const EfficiencyCurve& forced_curve,
                                        const AttackPlan& plan,
                                        double pulse_separation_s = 1e-9);

/// How the blinded detector's bias is evaluated in the coincidence estimate:
/// `threshold` uses the bias exactly at the threshold recovery time (the
/// continuous-time reading), `age_resolved` uses the bias at the actual
/// slot-grid arrival ages of the schedule.
enum class CoincidenceMode { threshold, age_resolved };

struct CoincidenceReport {
    CoincidenceMode mode = CoincidenceMode::age_resolved;
    double escape_probability = 0.0;        // blinded target survives the half-power pulse
    double next_click_probability = 0.0;    // ... and re-trips registrably at the next pulse
    double forced_click_probability = 0.0;  // partner port clicks at the double pulse
    double per_event = 0.0;                 // simultaneous clicks per blinding event
    long long interval_slots = 0;           // blinding period in clock slots
    double normalized_per_slot = 0.0;       // per_event / interval_slots
    double baseline_per_slot = 0.0;
    double ratio_vs_baseline = 0.0;
};

/// Simultaneous-click probability when the receiver flips its output port so a
/// blinding double pulse splits half/half between the ports: the blinded
/// target escapes the half-power pulse, recovers past the threshold and clicks
/// at the next pulse together with the forced port.
CoincidenceReport coincidence_countermeasure(const DetectorParams& blinded,
                                             const EfficiencyCurve& blinded_curve,
                                             const DetectorParams& forced,
                                             const EfficiencyCurve& forced_curve,
                                             const AttackPlan& plan, double baseline_per_slot,
                                             double rep_rate_hz = 1e9,
                                             CoincidenceMode mode = CoincidenceMode::age_resolved);

/// Average optical power of the plan scaled to a double-pulse receiver with
/// n_detectors of equal recovery time (n^2 times the single-detector energy per
/// blinding period).
double dps_double_pulse_power(const AttackPlan& plan, double wavelength_m = 1550e-9,
                              int n_detectors = 2);

}  // namespace sspd
