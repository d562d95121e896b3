#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "sspd/attack.hpp"
#include "sspd/io.hpp"

using namespace sspd;

TEST_CASE("hold schedule pins the period at the threshold recovery time") {
    const io::DetectorBundle d = io::builtin_preset("ch5");
    const AttackPlan plan = blinding_schedule(d.params, d.curve);
    CHECK(plan.target == "CH5");
    CHECK(plan.blinding_period == doctest::Approx(5.7144326257858022e-08).epsilon(1e-14));
    CHECK(plan.photons_per_blinding_pulse == 9317.0);
    CHECK(plan.retrip_probability == doctest::Approx(0.99999000874991906).epsilon(1e-14));
    CHECK_FALSE(plan.forcing_photons_per_pulse.has_value());

    const io::DetectorBundle d2 = io::builtin_preset("ch2");
    const AttackPlan plan2 = blinding_schedule(d2.params, d2.curve);
    CHECK(plan2.blinding_period == doctest::Approx(1.2989975951062187e-08).epsilon(1e-14));
    CHECK(plan2.photons_per_blinding_pulse == 24965.0);
    CHECK(plan2.retrip_probability == doctest::Approx(0.9999900043974802).epsilon(1e-14));

    CHECK_THROWS_AS(blinding_schedule(d.params, d.curve, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(blinding_schedule(d.params, d.curve, 1.0), std::invalid_argument);
}

TEST_CASE("hold schedule reports detectors whose curve dies before the threshold bias") {
    // The bundled two-point curve is zero below 72 % of the operating bias; a
    // detector whose discriminator threshold sits below that point cannot be
    // held by any finite pulse energy, and the schedule must say so instead of
    // returning a bogus plan.
    for (const char* name : {"ch4", "ch6"}) {
        CAPTURE(name);
        const io::DetectorBundle d = io::builtin_preset(name);
        CHECK_THROWS_WITH_AS(blinding_schedule(d.params, d.curve),
                             doctest::Contains("zero detection efficiency"),
                             std::runtime_error);
    }
}

TEST_CASE("minimum blinding power bisects to the documented tolerance") {
    const io::DetectorBundle ch5 = io::builtin_preset("ch5");
    const MinPowerResult r5 = min_blinding_power(ch5.params, ch5.curve, 1e9);
    CHECK(r5.power_dbm == doctest::Approx(-29.82421875).epsilon(1e-12));
    CHECK(r5.achieved_rate_hz <= 300.0);
    CHECK(r5.iterations == 9);
    CHECK_FALSE(r5.degenerate_lower_edge);

    const io::DetectorBundle ch2 = io::builtin_preset("ch2");
    const MinPowerResult r2 = min_blinding_power(ch2.params, ch2.curve, 1e9);
    CHECK(r2.power_dbm == doctest::Approx(-24.55078125).epsilon(1e-12));
    CHECK(r2.power_dbm - r5.power_dbm == doctest::Approx(5.2734375).epsilon(1e-9));
}

TEST_CASE("minimum blinding power reports degenerate and unsatisfiable brackets") {
    const io::DetectorBundle d = io::builtin_preset("ch5");

    const MinPowerResult loose = min_blinding_power(d.params, d.curve, 1e9, 1e12);
    CHECK(loose.degenerate_lower_edge);
    CHECK(loose.power_dbm == doctest::Approx(-60.0));

    MinPowerOptions narrow;
    narrow.bracket_high_dbm = -45.0;  // the rate there is still millions of events/s
    CHECK_THROWS_WITH_AS(min_blinding_power(d.params, d.curve, 1e9, 300.0, narrow),
                         doctest::Contains("bracket"), std::runtime_error);

    MinPowerOptions empty;
    empty.bracket_low_dbm = -10.0;
    empty.bracket_high_dbm = -60.0;
    CHECK_THROWS_AS(min_blinding_power(d.params, d.curve, 1e9, 300.0, empty),
                    std::invalid_argument);
}

TEST_CASE("bright double pulse forces the fully biased partner with near certainty") {
    const io::DetectorBundle blinded = io::builtin_preset("ch5");
    const io::DetectorBundle forced = io::builtin_preset("ch2");

    AttackPlan plan = blinding_schedule(blinded.params, blinded.curve);
    plan.forcing_photons_per_pulse = 19.182189614274101;
    const ForcingReport rep = double_pulse_port_control(blinded.params, blinded.curve,
                                                        forced.params, forced.curve, plan);
    CHECK(rep.p_first == doctest::Approx(0.89400001059999945).epsilon(1e-12));
    CHECK(rep.p_cumulative == doctest::Approx(0.98876400224719974).epsilon(1e-12));
    CHECK(rep.blinded_retrip_probability ==
          doctest::Approx(plan.retrip_probability).epsilon(1e-9));
    CHECK(rep.blinded_escape_per_pulse ==
          doctest::Approx(1.0 - plan.retrip_probability).epsilon(1e-6));

    AttackPlan no_forcing = blinding_schedule(blinded.params, blinded.curve);
    CHECK_THROWS_AS(double_pulse_port_control(blinded.params, blinded.curve, forced.params,
                                              forced.curve, no_forcing),
                    std::invalid_argument);
    CHECK_THROWS_AS(double_pulse_port_control(blinded.params, blinded.curve, forced.params,
                                              forced.curve, plan, 0.0),
                    std::invalid_argument);
}

TEST_CASE("port-flip countermeasure produces simultaneous clicks well above baseline") {
    const io::DetectorBundle blinded = io::builtin_preset("ch5");
    const io::DetectorBundle forced = io::builtin_preset("ch2");
    AttackPlan plan = blinding_schedule(blinded.params, blinded.curve);
    plan.forcing_photons_per_pulse = 19.182189614274101;
    const double baseline = 1.2e-9;

    const CoincidenceReport th = coincidence_countermeasure(
        blinded.params, blinded.curve, forced.params, forced.curve, plan, baseline, 1e9,
        CoincidenceMode::threshold);
    CHECK(th.interval_slots == 58);
    CHECK(th.escape_probability == doctest::Approx(0.0031608758110650064).epsilon(1e-12));
    CHECK(th.next_click_probability == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(th.per_event == doctest::Approx(0.0031253602175549994).epsilon(1e-12));
    CHECK(th.normalized_per_slot == doctest::Approx(5.3885520992327577e-05).epsilon(1e-12));
    CHECK(th.ratio_vs_baseline == doctest::Approx(44904.600826939648).epsilon(1e-12));

    const CoincidenceReport age = coincidence_countermeasure(
        blinded.params, blinded.curve, forced.params, forced.curve, plan, baseline, 1e9,
        CoincidenceMode::age_resolved);
    CHECK(age.interval_slots == 58);
    CHECK(age.escape_probability == doctest::Approx(0.0017895117571922095).epsilon(1e-12));
    CHECK(age.per_event == doctest::Approx(0.0017694048071097881).epsilon(1e-12));
    CHECK(age.normalized_per_slot == doctest::Approx(3.0506979432927383e-05).epsilon(1e-12));
    CHECK(age.ratio_vs_baseline == doctest::Approx(25422.48286077282).epsilon(1e-12));

    // Without a forcing intensity the partner-port factor drops out.
    AttackPlan bare = blinding_schedule(blinded.params, blinded.curve);
    const CoincidenceReport open = coincidence_countermeasure(
        blinded.params, blinded.curve, forced.params, forced.curve, bare, baseline, 1e9,
        CoincidenceMode::threshold);
    CHECK(open.forced_click_probability == 1.0);
    CHECK(open.per_event ==
          doctest::Approx(open.escape_probability * open.next_click_probability));

    CHECK_THROWS_AS(
        coincidence_countermeasure(blinded.params, blinded.curve, forced.params, forced.curve,
                                   plan, 0.0),
        std::invalid_argument);
}

TEST_CASE("hold-schedule power scales with the detector count squared") {
    const io::DetectorBundle ch5 = io::builtin_preset("ch5");
    const io::DetectorBundle ch2 = io::builtin_preset("ch2");
    const AttackPlan p5 = blinding_schedule(ch5.params, ch5.curve);
    const AttackPlan p2 = blinding_schedule(ch2.params, ch2.curve);

    CHECK(dps_double_pulse_power(p5) ==
          doctest::Approx(8.3581084950015557e-08).epsilon(1e-12));
    CHECK(dps_double_pulse_power(p2) ==
          doctest::Approx(9.852087240301658e-07).epsilon(1e-12));
    CHECK(dps_double_pulse_power(p5, 1550e-9, 1) ==
          doctest::Approx(8.3581084950015557e-08 / 4.0).epsilon(1e-12));

    AttackPlan broken = p5;
    broken.blinding_period = 0.0;
    CHECK_THROWS_AS(dps_double_pulse_power(broken), std::invalid_argument);
    CHECK_THROWS_AS(dps_double_pulse_power(p5, 1550e-9, 0), std::invalid_argument);
}
