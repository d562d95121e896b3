#include "sspd/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "sspd/attack.hpp"
#include "sspd/io.hpp"
#include "sspd/oracle.hpp"
#include "sspd/pulse_train.hpp"
#include "sspd/units.hpp"
#include "sspd/version.hpp"

namespace sspd::cli {

namespace {

using io::format_double;

/// Ordered resolved-config header: every run starts with the tool version and
/// the full flag set actually in effect, so outputs are self-describing.
class Report {
public:
    explicit Report(const std::string& command) {
        header_.emplace_back("tool", std::string("sspdsim ") + kVersion);
        header_.emplace_back("command", command);
    }
    void config(const std::string& key, const std::string& value) {
        header_.emplace_back(key, value);
    }
    void config(const std::string& key, double value) { config(key, format_double(value)); }
    void config(const std::string& key, long long value) {
        config(key, std::to_string(value));
    }
    void line(const std::string& text) { body_ += text + "\n"; }
    void kv(const std::string& key, const std::string& value) { line(key + "=" + value); }
    void kv(const std::string& key, double value) { kv(key, format_double(value)); }
    void kv(const std::string& key, long long value) { kv(key, std::to_string(value)); }

    std::string str() const {
        std::string out;
        for (const auto& [k, v] : header_) out += "# " + k + "=" + v + "\n";
        out += body_;
        return out;
    }

private:
    std::vector<std::pair<std::string, std::string>> header_;
    std::string body_;
};

void emit(const Report& report, const std::string& out_path) {
    const std::string text = report.str();
    if (out_path.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file " + out_path);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("cannot write output file " + out_path);
}

std::vector<double> parse_power_range(const std::string& spec) {
    std::vector<std::string> parts;
    std::string cell;
    std::istringstream is(spec);
    while (std::getline(is, cell, ':')) parts.push_back(cell);
    if (parts.size() != 3)
        throw std::invalid_argument("power range '" + spec + "': expected start:stop:step in dBm");
    double v[3];
    for (int i = 0; i < 3; ++i) {
        std::size_t used = 0;
        try {
            v[i] = std::stod(parts[static_cast<std::size_t>(i)], &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != parts[static_cast<std::size_t>(i)].size() ||
            parts[static_cast<std::size_t>(i)].empty())
            throw std::invalid_argument("power range '" + spec + "': '" +
                                        parts[static_cast<std::size_t>(i)] + "' is not a number");
    }
    if (!(v[2] > 0.0)) throw std::invalid_argument("power range: step must be positive");
    if (v[0] > v[1]) throw std::invalid_argument("power range: start must not exceed stop");
    const auto count = static_cast<long long>(std::floor((v[1] - v[0]) / v[2] + 1e-9)) + 1;
    std::vector<double> powers;
    powers.reserve(static_cast<std::size_t>(count));
    for (long long i = 0; i < count; ++i) powers.push_back(v[0] + static_cast<double>(i) * v[2]);
    return powers;
}

GMode parse_mode(const std::string& mode) {
    if (mode == "exact") return GMode::exact_age;
    if (mode == "paper") return GMode::paper_approx;
    throw std::invalid_argument("mode must be 'exact' or 'paper', got '" + mode + "'");
}

LimitMode parse_limit(const std::string& limit) {
    if (limit == "hard") return LimitMode::hard;
    if (limit == "nonparalyzable") return LimitMode::nonparalyzable;
    throw std::invalid_argument("limit must be 'hard' or 'nonparalyzable', got '" + limit + "'");
}

void append_trace_csv(Report& report, const DetectorParams& params, const EfficiencyCurve& curve,
                      double photons_per_slot, double rep_rate_hz, long long slots, GMode mode) {
    PulseTrain train;
    train.mean_photons_per_pulse = photons_per_slot;
    train.slot_period = 1.0 / rep_rate_hz;
    train.num_slots = slots;
    EvolveOptions options;
    options.mode = mode;
    const TraceResult trace = evolve(params, curve, train, options);
    report.line("slot,s_off,s_on,g,p_on,p_click");
    for (long long n = 0; n < slots; ++n) {
        const auto i = static_cast<std::size_t>(n);
        report.line(std::to_string(n + 1) + "," + format_double(trace.s_off[i]) + "," +
                    format_double(trace.s_on[i]) + "," + format_double(trace.g[i]) + "," +
                    format_double(trace.p_on[i]) + "," + format_double(trace.p_click[i]));
    }
}

/// Photon number per forcing pulse that makes the first-pulse click probability
/// hit the requested target on the fully biased partner detector.
double solve_forcing_photons(const DetectorParams& forced, const EfficiencyCurve& forced_curve,
                             double p1_target, double separation_s) {
    if (!(p1_target > 0.0) || !(p1_target < 1.0))
        throw std::invalid_argument("first-pulse click target must lie in (0, 1)");
    const double eta = efficiency_at_bias(forced_curve, forced, forced.operating_bias);
    if (eta <= 0.0)
        throw std::runtime_error("forced detector has zero efficiency at its operating bias");
    const double exponent = -std::log1p(-p1_target) - forced.dark_count_rate * separation_s;
    if (exponent <= 0.0)
        throw std::runtime_error(
            "dark counts alone exceed the first-pulse click target; nothing to solve");
    return exponent / eta;
}

int run_recover(const std::string& detector, const std::optional<double>& fraction,
                const std::optional<double>& rep_rate_hz, const std::string& out_path) {
    const io::DetectorBundle bundle = io::resolve_detector(detector);
    Report report("recover");
    report.config("detector", detector);
    report.config("detector_name", bundle.params.name);
    if (fraction) report.config("fraction", *fraction);
    if (rep_rate_hz) report.config("rep_rate_hz", *rep_rate_hz);

    report.kv("tau_s", recovery_time_constant(bundle.params));
    report.kv("threshold_bias_fraction", threshold_bias_fraction(bundle.params));
    report.kv("threshold_recovery_s", time_to_threshold(bundle.params));
    if (fraction) report.kv("time_to_fraction_s", time_to_bias_fraction(bundle.params, *fraction));
    if (rep_rate_hz) {
        if (!(*rep_rate_hz > 0.0))
            throw std::invalid_argument("repetition rate must be positive");
        report.kv("registrable_age_slots",
                  registrable_age_slots(time_to_threshold(bundle.params), 1.0 / *rep_rate_hz));
    }
    emit(report, out_path);
    return 0;
}

int run_sweep(const std::string& detector, double rep_rate_hz, const std::string& power_spec,
              double r_max, const std::string& limit, const std::string& mode, double wavelength,
              const std::string& out_path) {
    const io::DetectorBundle bundle = io::resolve_detector(detector);
    const std::vector<double> powers = parse_power_range(power_spec);

    SweepOptions options;
    options.r_max = r_max;
    options.limit = parse_limit(limit);
    options.wavelength = wavelength;
    options.evolve.mode = parse_mode(mode);
    const std::vector<SweepRow> rows =
        power_sweep(bundle.params, bundle.curve, rep_rate_hz, powers, options);

    Report report("sweep");
    report.config("detector", detector);
    report.config("detector_name", bundle.params.name);
    report.config("rep_rate_hz", rep_rate_hz);
    report.config("power_dbm", power_spec);
    report.config("r_max", r_max);
    report.config("limit", limit);
    report.config("mode", mode);
    report.config("wavelength_m", wavelength);

    report.line("power_dbm,photons_per_pulse,model_rate_hz,observed_rate_hz");
    for (const SweepRow& row : rows)
        report.line(format_double(row.power_dbm) + "," + format_double(row.photons_per_pulse) +
                    "," + format_double(row.model_rate_hz) + "," +
                    format_double(row.observed_rate_hz));
    emit(report, out_path);
    return 0;
}

int run_blind(const std::string& detector, double rep_rate_hz, double epsilon,
              double max_count_rate, double bracket_low, double bracket_high, double tolerance_db,
              const std::string& mode, double wavelength, int n_detectors, long long trace_slots,
              const std::string& out_path) {
    const io::DetectorBundle bundle = io::resolve_detector(detector);

    Report report("blind");
    report.config("detector", detector);
    report.config("detector_name", bundle.params.name);
    report.config("rep_rate_hz", rep_rate_hz);
    report.config("epsilon", epsilon);
    report.config("max_count_rate", max_count_rate);
    report.config("bracket_low_dbm", bracket_low);
    report.config("bracket_high_dbm", bracket_high);
    report.config("tolerance_db", tolerance_db);
    report.config("mode", mode);
    report.config("wavelength_m", wavelength);
    report.config("n_detectors", static_cast<long long>(n_detectors));
    report.config("trace_slots", trace_slots);

    const AttackPlan plan = blinding_schedule(bundle.params, bundle.curve, epsilon);
    report.kv("target", plan.target);
    report.kv("tau_s", recovery_time_constant(bundle.params));
    report.kv("threshold_bias_fraction", threshold_bias_fraction(bundle.params));
    report.kv("blinding_period_s", plan.blinding_period);
    report.kv("photons_per_blinding_pulse", plan.photons_per_blinding_pulse);
    report.kv("retrip_probability", plan.retrip_probability);
    report.kv("single_detector_power_w", dps_double_pulse_power(plan, wavelength, 1));
    report.kv("double_pulse_power_w", dps_double_pulse_power(plan, wavelength, n_detectors));

    MinPowerOptions options;
    options.bracket_low_dbm = bracket_low;
    options.bracket_high_dbm = bracket_high;
    options.tolerance_db = tolerance_db;
    options.wavelength = wavelength;
    options.mode = parse_mode(mode);
    const MinPowerResult min_power =
        min_blinding_power(bundle.params, bundle.curve, rep_rate_hz, max_count_rate, options);
    report.kv("min_power_dbm", min_power.power_dbm);
    report.kv("min_power_w", min_power.power_w);
    report.kv("achieved_rate_hz", min_power.achieved_rate_hz);
    report.kv("bisection_iterations", static_cast<long long>(min_power.iterations));
    report.kv("degenerate_lower_edge", static_cast<long long>(min_power.degenerate_lower_edge));

    if (trace_slots > 0)
        append_trace_csv(report, bundle.params, bundle.curve,
                         photons_from_power(min_power.power_w, rep_rate_hz, wavelength),
                         rep_rate_hz, trace_slots, options.mode);
    emit(report, out_path);
    return 0;
}

int run_force(const std::string& blinded, const std::string& forced, double epsilon,
              const std::optional<double>& forcing_photons, double p1_target,
              double separation_s, double rep_rate_hz, long long trace_slots,
              const std::string& out_path) {
    const io::DetectorBundle target = io::resolve_detector(blinded);
    const io::DetectorBundle partner = io::resolve_detector(forced);

    Report report("force");
    report.config("blinded", blinded);
    report.config("blinded_name", target.params.name);
    report.config("forced", forced);
    report.config("forced_name", partner.params.name);
    report.config("epsilon", epsilon);
    if (forcing_photons) report.config("forcing_photons", *forcing_photons);
    report.config("p1_target", p1_target);
    report.config("separation_s", separation_s);
    report.config("rep_rate_hz", rep_rate_hz);
    report.config("trace_slots", trace_slots);

    AttackPlan plan = blinding_schedule(target.params, target.curve, epsilon);
    plan.forcing_photons_per_pulse =
        forcing_photons ? *forcing_photons
                        : solve_forcing_photons(partner.params, partner.curve, p1_target,
                                                separation_s);
    const ForcingReport forcing = double_pulse_port_control(
        target.params, target.curve, partner.params, partner.curve, plan, separation_s);

    report.kv("blinding_period_s", plan.blinding_period);
    report.kv("photons_per_blinding_pulse", plan.photons_per_blinding_pulse);
    report.kv("forcing_photons_per_pulse", *plan.forcing_photons_per_pulse);
    report.kv("forcing_photons_source", forcing_photons ? "explicit" : "solved");
    report.kv("p_first", forcing.p_first);
    report.kv("p_cumulative", forcing.p_cumulative);
    report.kv("blinded_retrip_probability", forcing.blinded_retrip_probability);
    report.kv("blinded_escape_per_pulse", forcing.blinded_escape_per_pulse);

    if (trace_slots > 0) {
        const auto interval = static_cast<double>(std::max<long long>(
            1, registrable_age_slots(time_to_threshold(target.params), 1.0 / rep_rate_hz) - 1));
        append_trace_csv(report, target.params, target.curve,
                         plan.photons_per_blinding_pulse / interval, rep_rate_hz, trace_slots,
                         GMode::exact_age);
    }
    emit(report, out_path);
    return 0;
}

int run_coincidence(const std::string& blinded, const std::string& forced, double epsilon,
                    const std::optional<double>& forcing_photons, double p1_target,
                    double separation_s, double baseline_per_slot, double rep_rate_hz,
                    long long trace_slots, const std::string& out_path) {
    const io::DetectorBundle target = io::resolve_detector(blinded);
    const io::DetectorBundle partner = io::resolve_detector(forced);

    Report report("coincidence");
    report.config("blinded", blinded);
    report.config("blinded_name", target.params.name);
    report.config("forced", forced);
    report.config("forced_name", partner.params.name);
    report.config("epsilon", epsilon);
    if (forcing_photons) report.config("forcing_photons", *forcing_photons);
    report.config("p1_target", p1_target);
    report.config("separation_s", separation_s);
    report.config("baseline_per_slot", baseline_per_slot);
    report.config("rep_rate_hz", rep_rate_hz);
    report.config("trace_slots", trace_slots);

    AttackPlan plan = blinding_schedule(target.params, target.curve, epsilon);
    plan.forcing_photons_per_pulse =
        forcing_photons ? *forcing_photons
                        : solve_forcing_photons(partner.params, partner.curve, p1_target,
                                                separation_s);

    report.kv("blinding_period_s", plan.blinding_period);
    report.kv("photons_per_blinding_pulse", plan.photons_per_blinding_pulse);
    report.kv("forcing_photons_per_pulse", *plan.forcing_photons_per_pulse);

    bool first = true;
    for (const CoincidenceMode mode :
         {CoincidenceMode::threshold, CoincidenceMode::age_resolved}) {
        const CoincidenceReport rep = coincidence_countermeasure(
            target.params, target.curve, partner.params, partner.curve, plan, baseline_per_slot,
            rep_rate_hz, mode);
        const std::string prefix =
            mode == CoincidenceMode::threshold ? "threshold_" : "age_resolved_";
        if (first) {
            report.kv("interval_slots", rep.interval_slots);
            report.kv("forced_click_probability", rep.forced_click_probability);
            report.kv("baseline_per_slot", rep.baseline_per_slot);
            first = false;
        }
        report.kv(prefix + "escape_probability", rep.escape_probability);
        report.kv(prefix + "next_click_probability", rep.next_click_probability);
        report.kv(prefix + "per_event", rep.per_event);
        report.kv(prefix + "normalized_per_slot", rep.normalized_per_slot);
        report.kv(prefix + "ratio_vs_baseline", rep.ratio_vs_baseline);
    }

    if (trace_slots > 0) {
        const auto interval = static_cast<double>(std::max<long long>(
            1, registrable_age_slots(time_to_threshold(target.params), 1.0 / rep_rate_hz) - 1));
        append_trace_csv(report, target.params, target.curve,
                         plan.photons_per_blinding_pulse / interval, rep_rate_hz, trace_slots,
                         GMode::exact_age);
    }
    emit(report, out_path);
    return 0;
}

int run_validate(const std::string& detector, long long slots, long long trials,
                 std::uint64_t seed, double photons, double rep_rate_hz, const std::string& mode,
                 double deviation_threshold, double min_coverage, const std::string& out_path) {
    const io::DetectorBundle bundle = io::resolve_detector(detector);
    PulseTrain train;
    train.mean_photons_per_pulse = photons;
    train.slot_period = 1.0 / rep_rate_hz;
    train.num_slots = slots;
    EvolveOptions options;
    options.mode = parse_mode(mode);

    const TraceResult trace = evolve(bundle.params, bundle.curve, train, options);
    const MarkovResult chain =
        markov_exact(bundle.params, bundle.curve, train, std::nullopt, options);
    const SimulateResult mc = simulate(bundle.params, bundle.curve, train, trials, seed, options);
    const CompareReport cmp = compare(trace, chain, &mc, deviation_threshold, min_coverage);

    Report report("validate");
    report.config("detector", detector);
    report.config("detector_name", bundle.params.name);
    report.config("slots", slots);
    report.config("trials", trials);
    report.config("seed", std::to_string(seed));
    report.config("photons", photons);
    report.config("rep_rate_hz", rep_rate_hz);
    report.config("mode", mode);
    report.config("deviation_threshold", deviation_threshold);
    report.config("min_coverage", min_coverage);

    report.line("slot,recursion,exact,mc,mc_stderr,z");
    for (long long n = 0; n < slots; ++n) {
        const auto i = static_cast<std::size_t>(n);
        report.line(std::to_string(n + 1) + "," + format_double(trace.s_on[i]) + "," +
                    format_double(chain.s_on[i]) + "," + format_double(mc.s_on[i]) + "," +
                    format_double(mc.s_on_stderr[i]) + "," + format_double(cmp.z[i]));
    }
    report.line("# max_abs_deviation=" + format_double(cmp.max_abs_deviation));
    report.line("# coverage_3sigma=" + format_double(cmp.coverage_3sigma));
    report.line(std::string("# deviation_pass=") + (cmp.deviation_pass ? "1" : "0"));
    report.line(std::string("# coverage_pass=") + (cmp.coverage_pass ? "1" : "0"));
    report.line(std::string("# result=") + (cmp.pass ? "pass" : "fail"));
    emit(report, out_path);
    if (!cmp.pass) {
        std::cerr << "error: oracle comparison failed (max deviation "
                  << format_double(cmp.max_abs_deviation) << ", coverage "
                  << format_double(cmp.coverage_3sigma) << ")\n";
        return 3;
    }
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{
        "Simulator and analysis toolkit for single-photon detector response to bright "
        "optical pulse trains"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    // recover
    auto* recover = app.add_subcommand(
        "recover", "Bias recovery timescales of a detector");
    std::string rec_detector = "ch5";
    double rec_fraction = 0.0;
    double rec_rep_rate = 0.0;
    std::string rec_out;
    recover->add_option("--detector", rec_detector, "Detector file or preset name");
    auto* rec_fraction_opt = recover->add_option(
        "--fraction", rec_fraction, "Also report the recovery time to this bias fraction");
    auto* rec_rep_opt = recover->add_option(
        "--rep-rate-hz", rec_rep_rate,
        "Also report the first registrable slot age on this clock");
    recover->add_option("--out", rec_out, "Write the report to this file instead of stdout");

    // sweep
    auto* sweep = app.add_subcommand(
        "sweep", "Stationary count rate versus input power (CSV)");
    std::string sw_detector = "ch5";
    double sw_rep_rate = 1e9;
    std::string sw_power = "-60:-25:0.5";
    double sw_r_max = 68e6;
    std::string sw_limit = "hard";
    std::string sw_mode = "exact";
    double sw_wavelength = 1550e-9;
    std::string sw_out;
    sweep->add_option("--detector", sw_detector, "Detector file or preset name");
    sweep->add_option("--rep-rate-hz", sw_rep_rate, "Pulse repetition rate");
    sweep->add_option("--power-dbm", sw_power, "Power range start:stop:step in dBm");
    sweep->add_option("--r-max", sw_r_max, "Maximum counting rate of the discriminator");
    sweep->add_option("--limit", sw_limit, "Rate limit model: hard or nonparalyzable");
    sweep->add_option("--mode", sw_mode, "Registration gate: exact or paper");
    sweep->add_option("--wavelength-m", sw_wavelength, "Optical wavelength");
    sweep->add_option("--out", sw_out, "Write the CSV to this file instead of stdout");

    // blind
    auto* blind = app.add_subcommand(
        "blind", "Blinding schedule and minimum blinding power for a detector");
    std::string bl_detector = "ch5";
    double bl_rep_rate = 1e9;
    double bl_epsilon = 1e-5;
    double bl_max_rate = 300.0;
    double bl_low = -60.0;
    double bl_high = -10.0;
    double bl_tol = 0.1;
    std::string bl_mode = "exact";
    double bl_wavelength = 1550e-9;
    int bl_n_detectors = 2;
    long long bl_trace = 0;
    std::string bl_out;
    blind->add_option("--detector", bl_detector, "Detector file or preset name");
    blind->add_option("--rep-rate-hz", bl_rep_rate, "Pulse repetition rate");
    blind->add_option("--epsilon", bl_epsilon,
                      "Per-pulse escape tolerance of the hold schedule");
    blind->add_option("--max-count-rate", bl_max_rate,
                      "Count-rate bound defining 'blinded' for the power search");
    blind->add_option("--bracket-low-dbm", bl_low, "Lower power bracket edge");
    blind->add_option("--bracket-high-dbm", bl_high, "Upper power bracket edge");
    blind->add_option("--tolerance-db", bl_tol, "Bisection tolerance");
    blind->add_option("--mode", bl_mode, "Registration gate: exact or paper");
    blind->add_option("--wavelength-m", bl_wavelength, "Optical wavelength");
    blind->add_option("--n-detectors", bl_n_detectors,
                      "Detector count for the double-pulse power scaling");
    blind->add_option("--trace-slots", bl_trace,
                      "Append a per-slot trace CSV over this many slots at the minimum power");
    blind->add_option("--out", bl_out, "Write the report to this file instead of stdout");

    // force
    auto* force = app.add_subcommand(
        "force", "Click probabilities of the fully biased partner under a bright double pulse");
    std::string fo_blinded = "ch5";
    std::string fo_forced = "ch2";
    double fo_epsilon = 1e-5;
    double fo_forcing = 0.0;
    double fo_p1 = 0.894;
    double fo_sep = 1e-9;
    double fo_rep_rate = 1e9;
    long long fo_trace = 0;
    std::string fo_out;
    force->add_option("--blinded", fo_blinded, "Blinded detector file or preset name");
    force->add_option("--forced", fo_forced, "Partner detector file or preset name");
    force->add_option("--epsilon", fo_epsilon,
                      "Per-pulse escape tolerance of the hold schedule");
    auto* fo_forcing_opt = force->add_option(
        "--forcing-photons", fo_forcing,
        "Photons per forcing pulse (default: solved from --p1-target)");
    force->add_option("--p1-target", fo_p1,
                      "First-pulse click probability the forcing intensity is solved for");
    force->add_option("--separation-s", fo_sep, "Separation of the two forcing pulses");
    force->add_option("--rep-rate-hz", fo_rep_rate, "Clock rate used by the trace appendix");
    force->add_option("--trace-slots", fo_trace,
                      "Append a per-slot trace CSV of the blinded detector");
    force->add_option("--out", fo_out, "Write the report to this file instead of stdout");

    // coincidence
    auto* coincidence = app.add_subcommand(
        "coincidence", "Simultaneous-click probability under the port-flip countermeasure");
    std::string co_blinded = "ch5";
    std::string co_forced = "ch2";
    double co_epsilon = 1e-5;
    double co_forcing = 0.0;
    double co_p1 = 0.894;
    double co_sep = 1e-9;
    double co_baseline = 1.2e-9;
    double co_rep_rate = 1e9;
    long long co_trace = 0;
    std::string co_out;
    coincidence->add_option("--blinded", co_blinded, "Blinded detector file or preset name");
    coincidence->add_option("--forced", co_forced, "Partner detector file or preset name");
    coincidence->add_option("--epsilon", co_epsilon,
                            "Per-pulse escape tolerance of the hold schedule");
    auto* co_forcing_opt = coincidence->add_option(
        "--forcing-photons", co_forcing,
        "Photons per forcing pulse (default: solved from --p1-target)");
    coincidence->add_option("--p1-target", co_p1,
                            "First-pulse click probability the forcing intensity is solved for");
    coincidence->add_option("--separation-s", co_sep, "Separation of the two forcing pulses");
    coincidence->add_option("--baseline-per-slot", co_baseline,
                            "Per-slot simultaneous-click probability at normal operation");
    coincidence->add_option("--rep-rate-hz", co_rep_rate, "Receiver clock rate");
    coincidence->add_option("--trace-slots", co_trace,
                            "Append a per-slot trace CSV of the blinded detector");
    coincidence->add_option("--out", co_out,
                            "Write the report to this file instead of stdout");

    // validate
    auto* validate = app.add_subcommand(
        "validate", "Cross-check the recursion, the exact age chain and Monte Carlo");
    std::string va_detector = "ch5";
    long long va_slots = 100;
    long long va_trials = 100000;
    std::uint64_t va_seed = 7;
    double va_photons = 5.0;
    double va_rep_rate = 1e8;
    std::string va_mode = "exact";
    double va_threshold = 1e-9;
    double va_coverage = 0.95;
    std::string va_out;
    validate->add_option("--detector", va_detector, "Detector file or preset name");
    validate->add_option("--slots", va_slots, "Number of slots to evolve");
    validate->add_option("--trials", va_trials, "Monte Carlo trials");
    validate->add_option("--seed", va_seed, "Monte Carlo seed");
    validate->add_option("--photons", va_photons, "Mean photons per pulse");
    validate->add_option("--rep-rate-hz", va_rep_rate, "Pulse repetition rate");
    validate->add_option("--mode", va_mode, "Registration gate: exact or paper");
    validate->add_option("--deviation-threshold", va_threshold,
                         "Maximum allowed recursion-vs-chain deviation");
    validate->add_option("--min-coverage", va_coverage,
                         "Minimum fraction of slots within 3 sigma");
    validate->add_option("--out", va_out, "Write the report to this file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (recover->parsed())
            return run_recover(rec_detector,
                               rec_fraction_opt->count() ? std::optional<double>(rec_fraction)
                                                         : std::nullopt,
                               rec_rep_opt->count() ? std::optional<double>(rec_rep_rate)
                                                    : std::nullopt,
                               rec_out);
        if (sweep->parsed())
            return run_sweep(sw_detector, sw_rep_rate, sw_power, sw_r_max, sw_limit, sw_mode,
                             sw_wavelength, sw_out);
        if (blind->parsed())
            return run_blind(bl_detector, bl_rep_rate, bl_epsilon, bl_max_rate, bl_low, bl_high,
                             bl_tol, bl_mode, bl_wavelength, bl_n_detectors, bl_trace, bl_out);
        if (force->parsed())
            return run_force(fo_blinded, fo_forced, fo_epsilon,
                             fo_forcing_opt->count() ? std::optional<double>(fo_forcing)
                                                     : std::nullopt,
                             fo_p1, fo_sep, fo_rep_rate, fo_trace, fo_out);
        if (coincidence->parsed())
            return run_coincidence(co_blinded, co_forced, co_epsilon,
                                   co_forcing_opt->count() ? std::optional<double>(co_forcing)
                                                           : std::nullopt,
                                   co_p1, co_sep, co_baseline, co_rep_rate, co_trace, co_out);
        if (validate->parsed())
            return run_validate(va_detector, va_slots, va_trials, va_seed, va_photons,
                                va_rep_rate, va_mode, va_threshold, va_coverage, va_out);
        std::cerr << "error: no subcommand selected\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    static const char* const name = "sspdsim";
    argv.push_back(name);
    for (const std::string& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace sspd::cli
