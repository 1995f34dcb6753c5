#pragma once

#include <optional>

#include "sflsim/config.hpp"
#include "sflsim/rng.hpp"
#include "sflsim/scenario.hpp"

namespace sflsim {

// Air-to-ground link model. Path loss follows a distance log-law plus an
// elevation-dependent excess term that decays as the UAV climbs toward
// zenith. Noise is integrated over a fixed reference bandwidth so the
// per-Hz spectral efficiency does not depend on how bandwidth is later
// split among devices.
struct A2GChannelParams {
    double path_loss_exponent = 2.0; // phi
    double excess_loss_db = 20.0;    // eta
    double excess_offset_db = 30.0;  // k0
    double angle_offset_deg = 15.0;  // omega0
    double angle_atten_deg = 10.0;   // gamma
    double noise_psd_dbm_hz = -174.0;
    double noise_reference_bandwidth_hz = 1e6;

    static A2GChannelParams from_config(const Config& cfg);
    double noise_watts() const;
};

// UAV-to-satellite link. Free-space gain with antenna gains and a rain
// fade drawn from a Weibull distribution (or pinned by the override).
struct SatLinkParams {
    double uav_antenna_gain_dbi = 20.0;
    double sat_antenna_gain_dbi = 30.0;
    double carrier_wavelength_m = 0.015; // 20 GHz Ka-band
    double weibull_shape = 1.5;
    double weibull_scale_db = 3.0;
    std::optional<double> deterministic_rain_override_db;

    static SatLinkParams from_config(const Config& cfg);
};

double elevation_angle_deg(const DeviceSpec& device, const UavSpec& uav);

double path_loss_db(const DeviceSpec& device, const UavSpec& uav, const A2GChannelParams& params);

// R_{n,k} in bit/s/Hz; the uplink rate is a_{n,k} * l_{n,k} * B_k * R_{n,k}.
double spectral_efficiency(const DeviceSpec& device, const UavSpec& uav,
                           const A2GChannelParams& params);

double sample_rain_fade_db(const SatLinkParams& params, Rng& rng);

double sat_channel_gain(const UavSpec& uav, double sat_distance_m, const SatLinkParams& params,
                        double rain_fade_db);
double sat_channel_gain(const UavSpec& uav, double sat_distance_m, const SatLinkParams& params,
                        Rng& rng);

double sat_rate_bps(const UavSpec& uav, double bandwidth_hz, double channel_gain,
                    double noise_watts);

// Precomputed R_{n,k} for every device/UAV pair (NaN where k is not a
// candidate of n).
std::vector<std::vector<double>> rate_table(const Scenario& scenario,
                                            const A2GChannelParams& params);

} // namespace sflsim
