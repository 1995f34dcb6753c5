#include "sflsim/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sflsim/errors.hpp"
#include "sflsim/rng.hpp"

namespace sflsim {

BaselineKind baseline_from_string(const std::string& name) {
    if (name == "ra") return BaselineKind::RA;
    if (name == "era") return BaselineKind::ERA;
    if (name == "hfl") return BaselineKind::HFL;
    if (name == "dda") return BaselineKind::DDA;
    throw ConfigError("unknown baseline '" + name + "' (expected ra, era, hfl or dda)");
}

std::string baseline_name(BaselineKind kind) {
    switch (kind) {
    case BaselineKind::RA: return "ra";
    case BaselineKind::ERA: return "era";
    case BaselineKind::HFL: return "hfl";
    case BaselineKind::DDA: return "dda";
    }
    return "?";
}

Association ra_association(const SolverContext& ctx, std::uint64_t seed) {
    const Scenario& sc = *ctx.scenario;
    Rng rng(seed);
    std::vector<int> uav_of(sc.num_devices());
    for (int n = 0; n < sc.num_devices(); ++n) {
        const auto& cands = sc.candidates[n];
        uav_of[n] = cands[static_cast<std::size_t>(rng.uniform_index(cands.size()))];
    }
    return Association(std::move(uav_of));
}

Association era_association(const SolverContext& ctx) {
    const Scenario& sc = *ctx.scenario;
    std::vector<int> uav_of(sc.num_devices());
    for (int n = 0; n < sc.num_devices(); ++n) {
        double best = -std::numeric_limits<double>::infinity();
        int pick = sc.candidates[n].front();
        for (const int k : sc.candidates[n]) {
            const double r = ctx.rates.device_uav[n][k];
            if (r > best) {
                best = r;
                pick = k;
            }
        }
        uav_of[n] = pick;
    }
    return Association(std::move(uav_of));
}

Association dda_association(const SolverContext& ctx, std::uint64_t seed) {
    const Scenario& sc = *ctx.scenario;
    const int num_classes = sc.num_classes();
    std::vector<int> order(sc.num_devices());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);

    std::vector<std::vector<double>> dev(sc.num_uavs(),
                                         std::vector<double>(num_classes, 0.0));
    std::vector<int> uav_of(sc.num_devices(), -1);
    for (const int n : order) {
        double best_delta = std::numeric_limits<double>::infinity();
        int pick = -1;
        for (const int k : sc.candidates[n]) {
            double delta = 0.0;
            for (int c = 0; c < num_classes; ++c) {
                const double d = sc.devices[n].label_dist[c] - sc.global_dist[c];
                delta += std::fabs(dev[k][c] + d) - std::fabs(dev[k][c]);
            }
            if (delta < best_delta) {
                best_delta = delta;
                pick = k;
            }
        }
        uav_of[n] = pick;
        for (int c = 0; c < num_classes; ++c)
            dev[pick][c] += sc.devices[n].label_dist[c] - sc.global_dist[c];
    }
    return Association(std::move(uav_of));
}

Allocation era_allocation(const Association& assoc, const SolverContext& ctx,
                          const CutCosts& cut) {
    const Scenario& sc = *ctx.scenario;
    const std::vector<int> n_k = assoc.load_counts(sc.num_uavs());
    Allocation alloc;
    alloc.l.assign(sc.num_devices(), 0.0);
    alloc.f_share.assign(sc.num_devices(), 0.0);
    // Equal everything: the budget over all K UAVs, the UAV band over its
    // n_k devices, the UAV compute over its n_k devices.
    alloc.bandwidth_hz.assign(sc.num_uavs(), ctx.total_bandwidth_hz / sc.num_uavs());
    for (int n = 0; n < sc.num_devices(); ++n) {
        const int k = assoc.uav_of[n];
        alloc.l[n] = 1.0 / n_k[k];
        if (cut.c_server > 0) alloc.f_share[n] = sc.uavs[k].flops / n_k[k];
    }
    return alloc;
}

namespace {

// Fixed association, exhaustive split layer, a caller-chosen allocation
// rule per layer.
template <typename AllocFn>
Solution best_layer_for(const Association& assoc, const SolverContext& ctx, AllocFn&& alloc_fn) {
    const int total_layers = ctx.profile->num_layers();
    Solution sol;
    bool have = false;
    for (int ell = 1; ell <= total_layers; ++ell) {
        const CutCosts cc = cut(*ctx.profile, ell);
        Allocation alloc = alloc_fn(assoc, cc);
        Evaluation ev = evaluate_objective(assoc, alloc, ell, ctx, cc);
        if (!have || ev.objective < sol.objective) {
            have = true;
            sol.split_layer = ell;
            sol.assoc = assoc;
            sol.alloc = std::move(alloc);
            sol.breakdown = ev.breakdown;
            sol.proxy = ev.proxy;
            sol.objective = ev.objective;
        }
        sol.objective_history.push_back(
            sol.objective_history.empty() ? ev.objective
                                          : std::min(sol.objective_history.back(), ev.objective));
    }
    return sol;
}

} // namespace

Solution solve_baseline(BaselineKind kind, const SolverContext& ctx,
                        const OptimizerSettings& settings, std::uint64_t seed) {
    switch (kind) {
    case BaselineKind::RA: {
        const Association assoc = ra_association(ctx, seed);
        return best_layer_for(assoc, ctx, [&](const Association& a, const CutCosts& cc) {
            return derive_allocation(a, ctx, cc);
        });
    }
    case BaselineKind::ERA: {
        const Association assoc = era_association(ctx);
        return best_layer_for(assoc, ctx, [&](const Association& a, const CutCosts& cc) {
            return era_allocation(a, ctx, cc);
        });
    }
    case BaselineKind::HFL: {
        OptimizerSettings pinned = settings;
        pinned.fixed_layer = ctx.profile->num_layers();
        return solve_joint(ctx, pinned);
    }
    case BaselineKind::DDA: {
        const Association assoc = dda_association(ctx, seed);
        return best_layer_for(assoc, ctx, [&](const Association& a, const CutCosts& cc) {
            return derive_allocation(a, ctx, cc);
        });
    }
    }
    throw ConfigError("unreachable baseline kind");
}

} // namespace sflsim
