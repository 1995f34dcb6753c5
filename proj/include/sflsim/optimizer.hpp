#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sflsim/allocation.hpp"
#include "sflsim/association.hpp"
#include "sflsim/config.hpp"
#include "sflsim/dnn_profile.hpp"
#include "sflsim/latency.hpp"
#include "sflsim/scenario.hpp"

namespace sflsim {

// Immutable problem data shared by every solver and worker thread.
struct SolverContext {
    const Scenario* scenario = nullptr;
    const DnnProfile* profile = nullptr;
    LinkRates rates;
    double total_bandwidth_hz = 50e6; // B^U
    double theta = 0.5;               // latency/heterogeneity weight
    double z_bound = 1.0;             // Z
    double sigma_bound = 1.0;         // sigma
    int n_switches = 0;
    double switching_time_s = 0.5;
    double bisect_tol_s = 1e-12;
};

struct OptimizerSettings {
    int sweep_steps = 50;     // grid points of the paired (t_d, t_u) descent
    int dual_max_iters = 200;
    int dual_stall_iters = 20;
    double dual_step0 = 1.0;  // eta_0 of eta_t = eta_0 / sqrt(t)
    int num_threads = 0;      // 0 = hardware concurrency, 1 = serial
    int fixed_layer = 0;      // 0 = optimize the split layer, else pin it

    static OptimizerSettings from_config(const Config& cfg);
};

struct Multipliers {
    double psi = 0.0;                        // bandwidth constraint
    std::vector<double> nu;                  // per-UAV compute constraint
    std::vector<std::vector<double>> lambda; // K x C, deviation upper side
    std::vector<std::vector<double>> mu;     // K x C, deviation lower side
};

struct BandwidthSolution {
    double t_d = 0.0;
    std::vector<double> l;            // per device
    std::vector<double> bandwidth_hz; // per UAV
};

struct Evaluation {
    double objective = 0.0; // I
    double proxy = 0.0;     // P
    LatencyBreakdown breakdown;
};

struct Solution {
    int split_layer = 0;
    Association assoc;
    Allocation alloc;
    LatencyBreakdown breakdown;
    double proxy = 0.0;
    double objective = 0.0;
    std::vector<double> objective_history; // best-so-far per split layer, in layer order

    std::string report() const;
};

// Closed-form bandwidth split for a fixed association: bisection on the
// total demand curve g(t), then per-device shares that equalize every
// finish time at the root t_d*.
BandwidthSolution solve_bandwidth(const Association& assoc, const SolverContext& ctx,
                                  const CutCosts& cut, double tol_s);

// Capacity split proportional to loads; equalizes load/share across all
// positive loads (the min-max optimum).
std::vector<double> allocate_proportional(const std::vector<double>& loads, double capacity);

// Per-device UAV compute shares for a fixed association.
std::vector<double> solve_compute(const Association& assoc, const SolverContext& ctx,
                                  const CutCosts& cut);

Allocation derive_allocation(const Association& assoc, const SolverContext& ctx,
                             const CutCosts& cut);

// Per-candidate Lagrangian price of serving device n from UAV k at the
// probe latencies. Infinity marks an infeasible candidate.
double association_cost(int device, int uav, const Multipliers& m, double t_d_probe,
                        double t_u_probe, const SolverContext& ctx, const CutCosts& cut);

Evaluation evaluate_objective(const Association& assoc, const Allocation& alloc, int ell,
                              const SolverContext& ctx, const CutCosts& cut);

struct AssociationResult {
    Association assoc;
    Multipliers multipliers;
    Allocation alloc;
    Evaluation eval;
};

// Projected-subgradient dual ascent at one (t_d, t_u) grid point. Returns
// the best assignment seen, scored by the exact objective, or nothing
// when some device has no feasible candidate at the probes.
std::optional<AssociationResult> solve_association(double t_d_probe, double t_u_probe, int ell,
                                                   const SolverContext& ctx, const CutCosts& cut,
                                                   const OptimizerSettings& settings);

Solution solve_joint(const SolverContext& ctx, const OptimizerSettings& settings);

// Exhaustive enumeration of associations and split layers with exact
// inner allocations. Guarded to small instances.
Solution brute_force_oracle(const SolverContext& ctx);

} // namespace sflsim
