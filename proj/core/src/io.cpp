#include "sspd/io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace sspd::io {

namespace {

std::string trimmed(const std::string& s) {
    std::size_t first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    std::size_t last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

double parse_field(const std::string& file, std::size_t row, const std::string& text) {
    const std::string t = trimmed(text);
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(t, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (t.empty() || used != t.size()) {
        std::ostringstream os;
        os << "curve file " << file << " row " << row << ": '" << text
           << "' is not a number";
        throw std::runtime_error(os.str());
    }
    return value;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

DetectorParams preset_ch2() {
    DetectorParams p;
    p.name = "CH2";
    p.critical_current = 12.2e-6;
    p.kinetic_inductance = 2.13e-6;
    p.discriminator_threshold = 3.9076e-3;
    p.operating_bias = kDefaultBiasRatio * p.critical_current;
    p.base_efficiency = 0.117;
    p.dark_count_rate = 100.0;
    return p;
}

DetectorParams preset_ch4() {
    DetectorParams p;
    p.name = "CH4";
    p.critical_current = 24e-6;
    p.kinetic_inductance = 1.14e-6;
    p.discriminator_threshold = 0.020;
    p.operating_bias = kDefaultBiasRatio * p.critical_current;
    p.base_efficiency = 0.121;
    p.dark_count_rate = 100.0;
    return p;
}

DetectorParams preset_ch5() {
    DetectorParams p;
    p.name = "CH5";
    p.critical_current = 24.5e-6;
    p.kinetic_inductance = 1.12e-6;
    p.discriminator_threshold = 0.040;
    p.operating_bias = 22.2e-6;
    p.base_efficiency = 0.18;
    p.dark_count_rate = 100.0;
    return p;
}

DetectorParams preset_ch6() {
    DetectorParams p;
    p.name = "CH6";
    p.critical_current = 13.1e-6;
    p.kinetic_inductance = 1.73e-6;
    p.discriminator_threshold = 0.020;
    p.operating_bias = kDefaultBiasRatio * p.critical_current;
    p.base_efficiency = 0.100;
    p.dark_count_rate = 100.0;
    return p;
}

EfficiencyCurve ch2_curve(const DetectorParams& params) {
    return EfficiencyCurve::from_absolute_points(
        {{0.12806310, 4.610e-4}, {0.906, 0.117}}, params.operating_fraction());
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    std::string out(buf);
    std::replace(out.begin(), out.end(), ',', '.');  // locale insurance
    return out;
}

EfficiencyCurve load_curve(const std::string& path, double operating_fraction) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open curve file " + path);

    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("curve file " + path + " is empty");
    const std::string header = trimmed(line);
    const bool with_dark = header == "bias_fraction,efficiency,dark_rate_hz";
    if (!with_dark && header != "bias_fraction,efficiency")
        throw std::runtime_error(
            "curve file " + path +
            ": header must be 'bias_fraction,efficiency' or "
            "'bias_fraction,efficiency,dark_rate_hz', got '" + header + "'");

    std::vector<EfficiencyCurve::Point> points;
    std::vector<EfficiencyCurve::DarkPoint> dark;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (trimmed(line).empty()) continue;
        const std::vector<std::string> cells = split_csv(line);
        const std::size_t expect = with_dark ? 3 : 2;
        if (cells.size() != expect) {
            std::ostringstream os;
            os << "curve file " << path << " row " << row << ": expected " << expect
               << " columns, got " << cells.size();
            throw std::runtime_error(os.str());
        }
        EfficiencyCurve::Point p;
        p.bias_fraction = parse_field(path, row, cells[0]);
        p.value = parse_field(path, row, cells[1]);
        points.push_back(p);
        if (with_dark)
            dark.push_back({p.bias_fraction, parse_field(path, row, cells[2])});
    }
    try {
        return EfficiencyCurve::from_absolute_points(points, operating_fraction, dark);
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error("curve file " + path + ": " + e.what());
    }
}

DetectorBundle load_detector(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open detector file " + path);

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const std::exception& e) {
        throw std::runtime_error("detector file " + path + ": " + e.what());
    }
    if (!doc.is_object())
        throw std::runtime_error("detector file " + path + ": top level must be an object");

    static const std::set<std::string> known = {
        "name",          "critical_current",        "kinetic_inductance",
        "load_resistance", "shunt_resistance",      "amplifier_gain",
        "discriminator_threshold", "operating_bias", "base_efficiency",
        "dark_count_rate", "curve_file",            "notes"};
    for (const auto& item : doc.items()) {
        if (!known.count(item.key()))
            throw std::runtime_error("detector file " + path + ": unknown key '" + item.key() +
                                     "'");
    }
    for (const std::string& required :
         {std::string("name"), std::string("critical_current"),
          std::string("kinetic_inductance"), std::string("base_efficiency")}) {
        if (!doc.contains(required))
            throw std::runtime_error("detector file " + path + ": missing required key '" +
                                     required + "'");
    }

    DetectorParams p;
    try {
        p.name = doc.at("name").get<std::string>();
        p.critical_current = doc.at("critical_current").get<double>();
        p.kinetic_inductance = doc.at("kinetic_inductance").get<double>();
        if (doc.contains("load_resistance"))
            p.load_resistance = doc.at("load_resistance").get<double>();
        if (doc.contains("shunt_resistance"))
            p.shunt_resistance = doc.at("shunt_resistance").get<double>();
        if (doc.contains("amplifier_gain"))
            p.amplifier_gain = doc.at("amplifier_gain").get<double>();
        if (doc.contains("discriminator_threshold"))
            p.discriminator_threshold = doc.at("discriminator_threshold").get<double>();
        p.operating_bias = doc.contains("operating_bias")
                               ? doc.at("operating_bias").get<double>()
                               : kDefaultBiasRatio * p.critical_current;
        p.base_efficiency = doc.at("base_efficiency").get<double>();
        if (doc.contains("dark_count_rate"))
            p.dark_count_rate = doc.at("dark_count_rate").get<double>();
        if (doc.contains("notes")) (void)doc.at("notes").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("detector file " + path + ": " + e.what());
    }
    p.validate();

    if (doc.contains("curve_file")) {
        const std::string rel = doc.at("curve_file").get<std::string>();
        const std::filesystem::path curve_path =
            std::filesystem::path(path).parent_path() / rel;
        return {p, load_curve(curve_path.string(), p.operating_fraction())};
    }
    return {p, default_two_point_curve(p)};
}

std::vector<std::string> builtin_preset_names() { return {"ch2", "ch4", "ch5", "ch6"}; }

DetectorBundle builtin_preset(const std::string& name) {
    const std::string key = lowercase(trimmed(name));
    if (key == "ch2") {
        const DetectorParams p = preset_ch2();
        return {p, ch2_curve(p)};
    }
    if (key == "ch4") {
        const DetectorParams p = preset_ch4();
        return {p, default_two_point_curve(p)};
    }
    if (key == "ch5") {
        const DetectorParams p = preset_ch5();
        return {p, default_two_point_curve(p)};
    }
    if (key == "ch6") {
        const DetectorParams p = preset_ch6();
        return {p, default_two_point_curve(p)};
    }
    std::ostringstream os;
    os << "unknown detector preset '" << name << "'; available:";
    for (const std::string& n : builtin_preset_names()) os << ' ' << n;
    throw std::invalid_argument(os.str());
}

DetectorBundle resolve_detector(const std::string& path_or_name) {
    std::error_code ec;
    if (std::filesystem::exists(path_or_name, ec)) return load_detector(path_or_name);
    std::string key = lowercase(trimmed(path_or_name));
    if (key.size() > 5 && key.substr(key.size() - 5) == ".json") key.resize(key.size() - 5);
    try {
        return builtin_preset(key);
    } catch (const std::invalid_argument&) {
        std::ostringstream os;
        os << "'" << path_or_name << "' is neither an existing detector file nor a preset;"
           << " available presets:";
        for (const std::string& n : builtin_preset_names()) os << ' ' << n;
        throw std::runtime_error(os.str());
    }
}

}  // namespace sspd::io
