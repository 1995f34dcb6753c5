#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sflsim/association.hpp"
#include "sflsim/config.hpp"

namespace sflsim {

struct DeviceSpec {
    int id = 0;
    double x_m = 0.0, y_m = 0.0;       // ground position inside the target area
    double flops = 0.0;                // compute capability f_n, FLOP/s
    double tx_power_dbm = 0.0;         // p_n^U
    std::vector<double> label_dist;    // p^n(c), sums to 1
};

struct UavSpec {
    int id = 0;
    double x_m = 0.0, y_m = 0.0, z_m = 0.0;
    double flops = 0.0;                // f_k, FLOP/s
    double tx_power_dbm = 0.0;         // p_k^U
    double coverage_radius_m = 0.0;
};

struct Scenario {
    std::vector<DeviceSpec> devices;
    std::vector<UavSpec> uavs;
    std::vector<std::vector<int>> candidates; // K_n: uav indices within coverage
    std::vector<double> global_dist;          // p(c)
    double area_width_m = 0.0;
    double area_height_m = 0.0;
    std::uint64_t seed = 0;

    int num_devices() const { return static_cast<int>(devices.size()); }
    int num_uavs() const { return static_cast<int>(uavs.size()); }
    int num_classes() const {
        return static_cast<int>(global_dist.size());
    }
};

enum class LabelScheme { Shard, Dirichlet };

struct ScenarioConfig {
    int num_devices = 50;
    int num_uavs = 4;
    double area_width_m = 2000.0;
    double area_height_m = 2000.0;
    double coverage_radius_m = 1500.0;
    double uav_altitude_m = 500.0;
    double device_flops_min = 5e9;
    double device_flops_max = 2e10;
    double uav_flops = 2e11;
    double device_tx_power_dbm = 28.0;
    double uav_tx_power_dbm = 33.0;
    int num_classes = 10;
    int classes_per_device = 4;
    LabelScheme label_scheme = LabelScheme::Shard;
    double dirichlet_alpha = 0.5;

    static ScenarioConfig from_config(const Config& cfg);
};

// Deterministic scenario synthesis: UAVs on a uniform grid over the target
// area, devices uniform i.i.d., candidate sets from horizontal distance
// against the coverage radius. A device left with no covering UAV is an
// error naming that device.
Scenario generate_scenario(const ScenarioConfig& config, std::uint64_t seed);

struct LabelAssignment {
    std::vector<std::vector<double>> per_device; // p^n(c)
    std::vector<double> global;                  // p(c), plain mean (equal data sizes)
};

LabelAssignment assign_label_distributions(int num_devices, int n_classes,
                                           int classes_per_device, LabelScheme scheme,
                                           double dirichlet_alpha, std::uint64_t seed);

// Per-UAV, per-class deviation magnitudes q_{k,c} = |sum_n a_{n,k} (p^n(c) - p(c))|.
// UAVs with no associated devices report all-zero rows.
std::vector<std::vector<double>> heterogeneity_of(const Association& assoc,
                                                  const Scenario& scenario);

// Structured-text snapshot for regression fixtures; load(save(s)) == s
// bit-for-bit (doubles are printed with round-trip precision).
std::string save_scenario(const Scenario& s);
Scenario load_scenario(const std::string& text);

} // namespace sflsim
