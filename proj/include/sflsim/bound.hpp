#pragma once

#include <vector>

#include "sflsim/association.hpp"
#include "sflsim/config.hpp"

namespace sflsim {

// Constants of the convergence analysis. None of them are measurable
// from the simulator; they parameterize a formula evaluator used for
// sensitivity studies.
struct BoundParams {
    double mu = 1.0;   // strong convexity
    double beta = 4.0; // smoothness
    double z_bound = 1.0;
    double sigma = 1.0;
    int total_layers = 8; // L
    int split_layer = 1;  // ell
    int local_iters = 5;  // E
    int agg_rounds = 1;   // m
    std::vector<double> a_series;      // A_{mE-i-1}, i = 0..len-1
    std::vector<double> phi_per_class; // per-class Lipschitz constants
    double het_gamma = 0.1; // Gamma
    double delta1 = 1.0;    // E||w_1 - w*||^2
    bool weight_phi_by_global = false; // weight the phi sum by p(c) instead of p^n(c)

    static BoundParams from_config(const Config& cfg);
    void validate() const;
};

struct PnResult {
    std::vector<double> per_device;
    double uav_average = 0.0; // mean over nonempty UAVs of their device means
    bool series_warning = false; // alpha * sum(p*phi) >= 1 somewhere
};

PnResult compute_Pn(const BoundParams& params, const Association& assoc,
                    const std::vector<std::vector<double>>& per_device_dist,
                    const std::vector<double>& global_dist, int num_uavs, double alpha);

// Diminishing learning rate 4 / (mu (gamma + t)) under which the bound holds.
double bound_learning_rate(const BoundParams& params, int t);

double loss_bound(const BoundParams& params, double pn, int t);

} // namespace sflsim
