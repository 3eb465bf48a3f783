#pragma once

#include <cmath>

namespace qkdwdm {

inline constexpr double kPlanckJs = 6.62607015e-34;
inline constexpr double kSpeedOfLightMs = 2.99792458e8;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watts(double dbm) { return 1e-3 * db_to_linear(dbm); }
inline double watts_to_dbm(double w) { return linear_to_db(w * 1e3); }

// dB/km -> 1/km (power attenuation coefficient)
inline double db_per_km_to_nepers(double db_per_km) {
    return db_per_km * std::log(10.0) / 10.0;
}

inline double photon_energy_j(double wavelength_nm) {
    return kPlanckJs * kSpeedOfLightMs / (wavelength_nm * 1e-9);
}

} // namespace qkdwdm
