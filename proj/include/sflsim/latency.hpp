#pragma once

#include <string>
#include <vector>

#include "sflsim/allocation.hpp"
#include "sflsim/association.hpp"
#include "sflsim/dnn_profile.hpp"
#include "sflsim/scenario.hpp"

namespace sflsim {

struct LatencyBreakdown {
    double t_d = 0.0;      // max device compute + feature upload
    double t_u = 0.0;      // max UAV-side compute
    double t_s = 0.0;      // bottleneck UAV -> satellite sub-model upload
    double handover = 0.0; // N_sw * tau_s
    double total = 0.0;    // T

    // Diagnostics.
    std::vector<double> device_time;   // per device: C/f_n + M/r
    std::vector<double> server_time;   // per device: C_server/f_share
    std::vector<double> sat_time;      // per UAV: M_model/r_ks (0 for empty UAVs)
};

// Link-level inputs to the latency model: per-pair spectral efficiencies
// R_{n,k} (bit/s/Hz, NaN off the candidate sets) and the per-UAV satellite
// spectral efficiency so that r_ks = B_k * sat_se[k].
struct LinkRates {
    std::vector<std::vector<double>> device_uav; // R_{n,k}
    std::vector<double> sat_se;                  // bit/s/Hz per UAV
};

LatencyBreakdown stage_latencies(const Scenario& scenario, const Association& assoc,
                                 const Allocation& alloc, const CutCosts& cut,
                                 const LinkRates& rates, int n_switches,
                                 double switching_time_s);

std::string latency_csv_header();
std::string latency_csv_row(const LatencyBreakdown& b);

} // namespace sflsim
