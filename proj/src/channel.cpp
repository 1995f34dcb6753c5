#include "sflsim/channel.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "sflsim/errors.hpp"
#include "sflsim/units.hpp"

namespace sflsim {

A2GChannelParams A2GChannelParams::from_config(const Config& cfg) {
    A2GChannelParams p;
    p.path_loss_exponent = cfg.get_double_or("channel", "path_loss_exponent", p.path_loss_exponent);
    p.excess_loss_db = cfg.get_double_or("channel", "excess_loss_db", p.excess_loss_db);
    p.excess_offset_db = cfg.get_double_or("channel", "excess_offset_db", p.excess_offset_db);
    p.angle_offset_deg = cfg.get_double_or("channel", "angle_offset_deg", p.angle_offset_deg);
    p.angle_atten_deg = cfg.get_double_or("channel", "angle_atten_deg", p.angle_atten_deg);
    p.noise_psd_dbm_hz = cfg.get_double_or("channel", "noise_psd_dbm_hz", p.noise_psd_dbm_hz);
    p.noise_reference_bandwidth_hz = cfg.get_double_or("channel", "noise_reference_bandwidth_hz",
                                                       p.noise_reference_bandwidth_hz);
    if (p.path_loss_exponent <= 0)
        throw ConfigError("channel.path_loss_exponent must be positive");
    if (p.angle_atten_deg <= 0) throw ConfigError("channel.angle_atten_deg must be positive");
    if (p.noise_reference_bandwidth_hz <= 0)
        throw ConfigError("channel.noise_reference_bandwidth_hz must be positive");
    return p;
}

double A2GChannelParams::noise_watts() const {
    return dbm_to_watts(noise_psd_dbm_hz) * noise_reference_bandwidth_hz;
}

SatLinkParams SatLinkParams::from_config(const Config& cfg) {
    SatLinkParams p;
    p.uav_antenna_gain_dbi = cfg.get_double_or("channel", "uav_antenna_gain_dbi",
                                               p.uav_antenna_gain_dbi);
    p.sat_antenna_gain_dbi = cfg.get_double_or("channel", "sat_antenna_gain_dbi",
                                               p.sat_antenna_gain_dbi);
    p.carrier_wavelength_m = cfg.get_double_or("channel", "carrier_wavelength_m",
                                               p.carrier_wavelength_m);
    p.weibull_shape = cfg.get_double_or("channel", "weibull_shape", p.weibull_shape);
    p.weibull_scale_db = cfg.get_double_or("channel", "weibull_scale_db", p.weibull_scale_db);
    if (cfg.has("channel", "deterministic_rain_override_db"))
        p.deterministic_rain_override_db =
            cfg.get_optional_double("channel", "deterministic_rain_override_db");
    if (p.carrier_wavelength_m <= 0)
        throw ConfigError("channel.carrier_wavelength_m must be positive");
    if (p.weibull_shape <= 0) throw ConfigError("channel.weibull_shape must be positive");
    if (p.weibull_scale_db < 0) throw ConfigError("channel.weibull_scale_db must be >= 0");
    return p;
}

double elevation_angle_deg(const DeviceSpec& device, const UavSpec& uav) {
    const double dx = uav.x_m - device.x_m;
    const double dy = uav.y_m - device.y_m;
    const double horiz = std::sqrt(dx * dx + dy * dy);
    return rad_to_deg(std::atan2(uav.z_m, horiz));
}

double path_loss_db(const DeviceSpec& device, const UavSpec& uav, const A2GChannelParams& params) {
    const double dx = uav.x_m - device.x_m;
    const double dy = uav.y_m - device.y_m;
    double s = std::sqrt(dx * dx + dy * dy);
    if (s < 1.0) s = 1.0;
    const double omega = elevation_angle_deg(device, uav);
    const double excess = params.excess_loss_db * (omega - params.angle_offset_deg) *
                          std::exp((params.angle_offset_deg - omega) / params.angle_atten_deg);
    return 10.0 * params.path_loss_exponent * std::log10(s) + excess + params.excess_offset_db;
}

double spectral_efficiency(const DeviceSpec& device, const UavSpec& uav,
                           const A2GChannelParams& params) {
    const double pl = path_loss_db(device, uav, params);
    const double rx_watts = dbm_to_watts(device.tx_power_dbm) * db_to_linear(-pl);
    return std::log2(1.0 + rx_watts / params.noise_watts());
}

double sample_rain_fade_db(const SatLinkParams& params, Rng& rng) {
    if (params.deterministic_rain_override_db) return *params.deterministic_rain_override_db;
    return rng.weibull(params.weibull_shape, params.weibull_scale_db);
}

double sat_channel_gain(const UavSpec& uav, double sat_distance_m, const SatLinkParams& params,
                        double rain_fade_db) {
    (void)uav;
    const double fspl = params.carrier_wavelength_m / (4.0 * std::numbers::pi * sat_distance_m);
    return db_to_linear(params.uav_antenna_gain_dbi) * db_to_linear(params.sat_antenna_gain_dbi) *
           fspl * fspl * db_to_linear(-rain_fade_db);
}

double sat_channel_gain(const UavSpec& uav, double sat_distance_m, const SatLinkParams& params,
                        Rng& rng) {
    return sat_channel_gain(uav, sat_distance_m, params, sample_rain_fade_db(params, rng));
}

double sat_rate_bps(const UavSpec& uav, double bandwidth_hz, double channel_gain,
                    double noise_watts) {
    const double snr = dbm_to_watts(uav.tx_power_dbm) * channel_gain / noise_watts;
    return bandwidth_hz * std::log2(1.0 + snr);
}

std::vector<std::vector<double>> rate_table(const Scenario& scenario,
                                            const A2GChannelParams& params) {
    const int num_devices = scenario.num_devices();
    const int num_uavs = scenario.num_uavs();
    std::vector<std::vector<double>> r(
        num_devices, std::vector<double>(num_uavs, std::numeric_limits<double>::quiet_NaN()));
    for (int n = 0; n < num_devices; ++n)
        for (const int k : scenario.candidates[n])
            r[n][k] = spectral_efficiency(scenario.devices[n], scenario.uavs[k], params);
    return r;
}

} // namespace sflsim
