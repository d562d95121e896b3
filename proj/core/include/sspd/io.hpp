#pragma once

#include <string>
#include <vector>

#include "sspd/detector.hpp"
#include "sspd/efficiency_curve.hpp"

namespace sspd::io {

/// A detector parameter set together with its efficiency curve (loaded from a
/// companion file or the default two-point form).
struct DetectorBundle {
    DetectorParams params;
    EfficiencyCurve curve;
};

/// Load a detector description from a JSON file.  Keys match the DetectorParams
/// field names (SI units); optional keys `curve_file` (path relative to the
/// JSON file) and `notes` (free text) are accepted; anything else is rejected
/// by name.  Missing optional fields take the documented defaults, including
/// operating_bias = 0.906 * critical_current.
DetectorBundle load_detector(const std::string& path);

/// Load an efficiency-curve CSV with header `bias_fraction,efficiency` or
/// `bias_fraction,efficiency,dark_rate_hz`.  Efficiencies are absolute and are
/// normalized to the given operating fraction on load.  Format errors name the
/// offending row.
EfficiencyCurve load_curve(const std::string& path, double operating_fraction);

/// Devices bundled with the toolkit.
std::vector<std::string> builtin_preset_names();
DetectorBundle builtin_preset(const std::string& name);

/// Resolve a CLI detector argument: an existing file path wins, otherwise the
/// argument (case-insensitive, with or without a .json suffix) must name a
/// bundled preset.
DetectorBundle resolve_detector(const std::string& path_or_name);

/// Full-precision, locale-independent double formatting used by every emitter.
std::string format_double(double value);

}  // namespace sspd::io
