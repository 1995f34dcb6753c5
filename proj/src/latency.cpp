#include "sflsim/latency.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sflsim/errors.hpp"

namespace sflsim {

LatencyBreakdown stage_latencies(const Scenario& scenario, const Association& assoc,
                                 const Allocation& alloc, const CutCosts& cut,
                                 const LinkRates& rates, int n_switches,
                                 double switching_time_s) {
    const int num_devices = scenario.num_devices();
    const int num_uavs = scenario.num_uavs();
    LatencyBreakdown out;
    out.device_time.assign(num_devices, 0.0);
    out.server_time.assign(num_devices, 0.0);
    out.sat_time.assign(num_uavs, 0.0);

    const std::vector<int> n_k = assoc.load_counts(num_uavs);

    for (int n = 0; n < num_devices; ++n) {
        const int k = assoc.uav_of[n];
        double t = cut.c_device / scenario.devices[n].flops;
        if (cut.m_feat > 0) {
            const double rate = alloc.l[n] * alloc.bandwidth_hz[k] * rates.device_uav[n][k];
            if (!(rate > 0))
                throw InfeasibleError("device " + std::to_string(n) + " on UAV " +
                                      std::to_string(k) +
                                      " has feature traffic but a zero uplink rate");
            t += cut.m_feat / rate;
        }
        out.device_time[n] = t;
        if (cut.c_server > 0) {
            if (!(alloc.f_share[n] > 0))
                throw InfeasibleError("device " + std::to_string(n) + " on UAV " +
                                      std::to_string(k) +
                                      " has server-side load but no compute share");
            out.server_time[n] = cut.c_server / alloc.f_share[n];
        }
    }

    if (cut.m_model > 0) {
        for (int k = 0; k < num_uavs; ++k) {
            if (n_k[k] == 0) continue; // idle UAVs hold no sub-model
            const double r_ks = alloc.bandwidth_hz[k] * rates.sat_se[k];
            if (!(r_ks > 0))
                throw InfeasibleError("UAV " + std::to_string(k) +
                                      " must upload its sub-model but its satellite rate is zero");
            out.sat_time[k] = cut.m_model / r_ks;
        }
    }

    auto vmax = [](const std::vector<double>& v) {
        return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
    };
    out.t_d = vmax(out.device_time);
    out.t_u = vmax(out.server_time);
    out.t_s = vmax(out.sat_time);
    out.handover = n_switches * switching_time_s;
    out.total = out.t_d + out.t_u + out.t_s + out.handover;
    return out;
}

std::string latency_csv_header() { return "t_d,t_u,t_s,handover,T"; }

std::string latency_csv_row(const LatencyBreakdown& b) {
    std::ostringstream out;
    out.precision(17);
    out << b.t_d << "," << b.t_u << "," << b.t_s << "," << b.handover << "," << b.total;
    return out.str();
}

} // namespace sflsim
