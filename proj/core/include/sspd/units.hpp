#pragma once

#include <cmath>
#include <stdexcept>

namespace sspd {

inline constexpr double kPlanck = 6.62607015e-34;     // J s
inline constexpr double kSpeedOfLight = 299792458.0;  // m / s

/// Energy of a single photon at the given vacuum wavelength.
inline double photon_energy(double wavelength_m) {
    if (!(wavelength_m > 0.0))
        throw std::invalid_argument("photon_energy: wavelength must be positive");
    return kPlanck * kSpeedOfLight / wavelength_m;
}

inline double dbm_to_watts(double dbm) {
    return 1e-3 * std::pow(10.0, dbm / 10.0);
}

inline double watts_to_dbm(double watts) {
    if (!(watts > 0.0))
        throw std::invalid_argument("watts_to_dbm: power must be positive");
    return 10.0 * std::log10(watts / 1e-3);
}

}  // namespace sspd
