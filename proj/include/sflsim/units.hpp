#pragma once

#include <cmath>

namespace sflsim {

// Decibel helpers. Power quantities throughout; dBm is referenced to 1 mW.

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

inline double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }

inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts / 1e-3); }

inline double deg_to_rad(double deg) { return deg * M_PI / 180.0; }

inline double rad_to_deg(double rad) { return rad * 180.0 / M_PI; }

} // namespace sflsim
