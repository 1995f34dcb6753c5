#include "sflsim/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sflsim {

namespace {

void flag(FeasibilityReport& rep, const std::string& msg) {
    rep.ok = false;
    rep.violations.push_back(msg);
}

} // namespace

FeasibilityReport check_solution(const Scenario& scenario, const DnnProfile& profile,
                                 const Solution& sol, double total_bandwidth_hz, double theta,
                                 double z_bound, double sigma_bound, double tol_rel) {
    FeasibilityReport rep;
    const int num_devices = scenario.num_devices();
    const int num_uavs = scenario.num_uavs();
    const int num_classes = scenario.num_classes();

    if (sol.split_layer < 1 || sol.split_layer > profile.num_layers())
        flag(rep, "split layer " + std::to_string(sol.split_layer) + " outside [1, " +
                      std::to_string(profile.num_layers()) + "]");

    if (static_cast<int>(sol.assoc.uav_of.size()) != num_devices ||
        static_cast<int>(sol.alloc.l.size()) != num_devices ||
        static_cast<int>(sol.alloc.f_share.size()) != num_devices ||
        static_cast<int>(sol.alloc.bandwidth_hz.size()) != num_uavs) {
        flag(rep, "solution dimensions do not match the scenario");
        return rep;
    }

    // (3c)/(3d)/(3g): one covering UAV per device, integral by
    // construction of the representation.
    bool indices_ok = true;
    for (int n = 0; n < num_devices; ++n) {
        const int k = sol.assoc.uav_of[n];
        if (k < 0 || k >= num_uavs) {
            flag(rep, "device " + std::to_string(n) + " assigned out-of-range UAV " +
                          std::to_string(k));
            indices_ok = false;
            continue;
        }
        if (std::find(scenario.candidates[n].begin(), scenario.candidates[n].end(), k) ==
            scenario.candidates[n].end())
            flag(rep, "device " + std::to_string(n) + " assigned UAV " + std::to_string(k) +
                          " outside its candidate set");
    }
    if (!indices_ok) return rep;

    // (3f): nonnegativity.
    for (int n = 0; n < num_devices; ++n) {
        if (sol.alloc.l[n] < 0)
            flag(rep, "negative bandwidth fraction on device " + std::to_string(n));
        if (sol.alloc.f_share[n] < 0)
            flag(rep, "negative compute share on device " + std::to_string(n));
    }
    for (int k = 0; k < num_uavs; ++k)
        if (sol.alloc.bandwidth_hz[k] < 0)
            flag(rep, "negative bandwidth on UAV " + std::to_string(k));

    // (3a): per-UAV fraction budget.
    std::vector<double> frac(num_uavs, 0.0), fsum(num_uavs, 0.0);
    for (int n = 0; n < num_devices; ++n) {
        frac[sol.assoc.uav_of[n]] += sol.alloc.l[n];
        fsum[sol.assoc.uav_of[n]] += sol.alloc.f_share[n];
    }
    for (int k = 0; k < num_uavs; ++k) {
        if (frac[k] > 1.0 + tol_rel) {
            std::ostringstream msg;
            msg << "UAV " << k << " bandwidth fractions sum to " << frac[k];
            flag(rep, msg.str());
        }
        // (3e): per-UAV compute budget.
        if (fsum[k] > scenario.uavs[k].flops * (1.0 + tol_rel)) {
            std::ostringstream msg;
            msg << "UAV " << k << " compute shares sum to " << fsum[k] << " > "
                << scenario.uavs[k].flops;
            flag(rep, msg.str());
        }
    }

    // (3b): system bandwidth budget.
    double bw = 0.0;
    for (int k = 0; k < num_uavs; ++k) bw += sol.alloc.bandwidth_hz[k];
    if (bw > total_bandwidth_hz * (1.0 + tol_rel)) {
        std::ostringstream msg;
        msg << "total bandwidth " << bw << " exceeds the budget " << total_bandwidth_hz;
        flag(rep, msg.str());
    }

    // Objective consistency: recompute P and T from raw parts.
    const double sum_parts =
        sol.breakdown.t_d + sol.breakdown.t_u + sol.breakdown.t_s + sol.breakdown.handover;
    if (std::fabs(sum_parts - sol.breakdown.total) >
        tol_rel * std::max(1.0, std::fabs(sol.breakdown.total)))
        flag(rep, "latency components do not add up to T");

    std::vector<int> n_k(num_uavs, 0);
    for (int n = 0; n < num_devices; ++n) ++n_k[sol.assoc.uav_of[n]];
    const double z2 = z_bound * z_bound, s2 = sigma_bound * sigma_bound;
    const int total_layers = profile.num_layers();
    double proxy = 0.0;
    for (int k = 0; k < num_uavs; ++k) {
        if (n_k[k] == 0) continue;
        proxy += sol.split_layer * (z2 + s2) +
                 (total_layers - sol.split_layer) * (z2 + s2) / n_k[k];
        double dev_sum = 0.0;
        for (int c = 0; c < num_classes; ++c) {
            double d = 0.0;
            for (int n = 0; n < num_devices; ++n)
                if (sol.assoc.uav_of[n] == k)
                    d += scenario.devices[n].label_dist[c] - scenario.global_dist[c];
            dev_sum += std::fabs(d);
        }
        proxy += dev_sum / n_k[k];
    }
    if (std::fabs(proxy - sol.proxy) > tol_rel * std::max(1.0, std::fabs(proxy)))
        flag(rep, "stored P does not match the recomputed value");
    const double objective = (1.0 - theta) * sol.breakdown.total + theta * proxy;
    if (std::fabs(objective - sol.objective) > tol_rel * std::max(1.0, std::fabs(objective)))
        flag(rep, "stored I does not match (1-theta)T + theta*P");

    return rep;
}

} // namespace sflsim
