#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sspd/detector.hpp"
#include "sspd/efficiency_curve.hpp"

namespace sspd {

/// A periodic train of identical coherent pulses.
struct PulseTrain {
    double mean_photons_per_pulse = 0.0;  // |alpha|^2
    double slot_period = 0.0;             // s
    long long num_slots = 0;
    double wavelength = 1550e-9;          // m, used only for power conversions

    void validate() const;
};

/// How the registered-click probability of a transition is gated.
///
/// paper_approx: g(n) = s_off(n-1) (the previous slot's superconducting
/// probability stands in for "recovered above threshold"), g(1) = 1.
/// exact_age:    g(n) = exact probability that the pre-pulse bias has recovered
/// above the discriminator threshold, computed from the renewal age distribution.
enum class GMode { paper_approx, exact_age };

struct EvolveOptions {
    GMode mode = GMode::exact_age;
    /// Replace per-age survival factors by their saturated value beyond the
    /// horizon where the bias is within `horizon_tolerance` of I_0.  Turns the
    /// quadratic recursion into O(N * horizon).
    bool truncate = true;
    double horizon_tolerance = 1e-4;
    std::optional<long long> horizon_override;
    /// Abort (with an explanatory error) when the slot loop would exceed this
    /// many inner operations.
    double work_budget = 1e9;
    /// Use the curve's dark-rate samples instead of the constant dark rate.
    bool bias_dependent_dark = false;
    /// Steady-state detection: relative tolerance and sliding window (slots).
    double convergence_rel_tol = 1e-6;
    int convergence_window = 10;
};

/// Smallest slot age whose transition is registered by the discriminator.  A
/// transition at pre-pulse age k produces a registrable output pulse when the
/// bias had recovered above the threshold a full slot before the pulse, i.e.
/// (k - 1) * slot_period >= threshold recovery time.  A never-tripped detector
/// always registers.
long long registrable_age_slots(double threshold_recovery_s, double slot_period_s);

/// Per-age survival exponents shared by the recursion, the age-chain oracle and
/// the Monte Carlo sampler, so that all three evaluate the identical hazard model.
/// exponent[k-1] (age k in 1..horizon) is gamma_slot(k) + mu * eta0 * f(I_b(k T) / I_c);
/// ages beyond the horizon use saturated_exponent, the never-tripped state uses
/// never_exponent (full operating bias).
struct SlotHazards {
    std::vector<double> exponent;
    std::vector<double> prefix;  // prefix[m] = sum of exponent[0..m-1]; prefix[0] = 0
    double saturated_exponent = 0.0;
    double never_exponent = 0.0;
    long long horizon = 0;
    long long registrable_age = 1;
    double slot_period = 0.0;

    double age_exponent(long long age) const;
    double survival(long long age) const;    // exp(-age_exponent)
    double transition(long long age) const;  // 1 - survival
    /// Sum of age exponents 1..m (saturated tail beyond the horizon).
    double cumulative(long long m) const;
    /// Probability of surviving m consecutive pulses after a transition, exp(-cumulative(m)).
    double survival_through(long long m) const;
};

SlotHazards make_slot_hazards(const DetectorParams& params, const EfficiencyCurve& curve,
                              const PulseTrain& train, const EvolveOptions& options = {});

/// Per-slot state and click probabilities (index 0 holds slot 1).
///
/// s_on[n] is the probability that pulse n+1 drives the wire normal; s_off is
/// its complement.  p_on = s_on * g is the discriminator-gated form; p_click is
/// the joint probability that the pulse both causes a transition and arrives at
/// a registrable age, which is what a counter measures.  steady_click_rate is
/// the stationary registered-click rate consistent with the selected mode.
struct TraceResult {
    std::vector<double> s_off;
    std::vector<double> s_on;
    std::vector<double> g;
    std::vector<double> p_on;
    std::vector<double> p_click;
    double steady_click_rate = 0.0;
    std::optional<long long> converged_at_slot;
};

/// Evolve the per-slot transition recursion for train.num_slots slots.
TraceResult evolve(const DetectorParams& params, const EfficiencyCurve& curve,
                   const PulseTrain& train, const EvolveOptions& options = {});

/// Closed-form stationary behaviour of the renewal age chain.
struct StationaryResult {
    double expected_cycle_slots = 0.0;       // mean slots between transitions
    double transition_probability = 0.0;     // stationary per-slot transition probability
    double click_probability = 0.0;          // stationary joint registered-click probability
    double product_click_probability = 0.0;  // stationary s_on * g with exact g
    double paper_click_probability = 0.0;    // stationary s_on * s_off
};

StationaryResult stationary_state(const SlotHazards& hazards);

/// Stationary registered-click rate (events / s) for the given mode.
double steady_state_click_rate(const DetectorParams& params, const EfficiencyCurve& curve,
                               const PulseTrain& train, const EvolveOptions& options = {});

enum class LimitMode { hard, nonparalyzable };

/// Saturate a model rate at the discriminator's maximum counting rate.
double apply_discriminator_limit(double rate, double r_max, LimitMode mode);

/// Mean photon number per pulse of a train of the given average power.
double photons_from_power(double power_w, double rep_rate_hz, double wavelength_m);

struct SweepRow {
    double power_dbm = 0.0;
    double photons_per_pulse = 0.0;
    double model_rate_hz = 0.0;
    double observed_rate_hz = 0.0;
};

struct SweepOptions {
    double r_max = 68e6;
    LimitMode limit = LimitMode::hard;
    double wavelength = 1550e-9;
    EvolveOptions evolve;
};

/// One row per input power: photon conversion, stationary model rate, and the
/// rate after the discriminator limit.
std::vector<SweepRow> power_sweep(const DetectorParams& params, const EfficiencyCurve& curve,
                                  double rep_rate_hz, const std::vector<double>& power_dbm,
                                  const SweepOptions& options = {});

}  // namespace sspd
