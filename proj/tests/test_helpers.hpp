#pragma once

#include <cmath>
#include <vector>

#include "sflsim/dnn_profile.hpp"
#include "sflsim/optimizer.hpp"
#include "sflsim/scenario.hpp"

namespace sflsim::testing {

struct LayerSpec {
    double flops;
    double act_bits;
    double param_bits;
};

// Profile with batch 1, one local iteration and gradient multiplier 1, so the
// per-cut costs equal plain partial sums of the layer table.
inline DnnProfile make_profile(const std::vector<LayerSpec>& layers) {
    DnnProfile p;
    p.batch_size = 1;
    p.local_iterations = 1;
    p.grad_multiplier = 1.0;
    p.features_per_round = FeatureUpload::PerIteration;
    int idx = 1;
    for (const auto& l : layers)
        p.layers.push_back({idx++, l.flops, l.act_bits, l.param_bits});
    p.validate();
    return p;
}

inline DeviceSpec make_device(int id, double flops, std::vector<double> dist) {
    DeviceSpec d;
    d.id = id;
    d.x_m = 0.0;
    d.y_m = 0.0;
    d.flops = flops;
    d.tx_power_dbm = 28.0;
    d.label_dist = std::move(dist);
    return d;
}

inline UavSpec make_uav(int id, double flops) {
    UavSpec u;
    u.id = id;
    u.x_m = 0.0;
    u.y_m = 0.0;
    u.z_m = 500.0;
    u.flops = flops;
    u.tx_power_dbm = 33.0;
    return u;
}

// Owns everything a SolverContext points at; rates are injected directly so
// the optimizer tests are independent of channel geometry.
struct Fixture {
    Scenario scenario;
    DnnProfile profile;
    LinkRates rates;
    double total_bandwidth_hz = 1e6;
    double theta = 0.5;
    double z_bound = 1.0;
    double sigma_bound = 1.0;

    SolverContext ctx() const {
        SolverContext c;
        c.scenario = &scenario;
        c.profile = &profile;
        c.rates = rates;
        c.total_bandwidth_hz = total_bandwidth_hz;
        c.theta = theta;
        c.z_bound = z_bound;
        c.sigma_bound = sigma_bound;
        return c;
    }
};

// One device (flops 2), one UAV, unit uplink rate, one cut with device cost 1
// and feature volume 1e6 bits: the closed-form upload deadline is 1.5 s.
inline Fixture one_device_fixture() {
    Fixture f;
    f.scenario.seed = 1;
    f.scenario.area_width_m = 100.0;
    f.scenario.area_height_m = 100.0;
    f.scenario.global_dist = {0.5, 0.5};
    f.scenario.uavs = {make_uav(0, 1.0)};
    f.scenario.devices = {make_device(0, 2.0, {0.5, 0.5})};
    f.scenario.candidates = {{0}};
    f.profile = make_profile({{1.0, 1e6, 0.0}, {0.0, 0.0, 0.0}});
    f.rates.device_uav = {{1.0}};
    f.rates.sat_se = {1.0};
    return f;
}

inline Fixture two_device_fixture() {
    Fixture f = one_device_fixture();
    f.scenario.devices.push_back(make_device(1, 2.0, {0.5, 0.5}));
    f.scenario.candidates.push_back({0});
    f.rates.device_uav = {{1.0}, {1.0}};
    return f;
}

inline bool nearly(double a, double b, double rel) {
    return std::fabs(a - b) <= rel * std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace sflsim::testing
