#include "sflsim/bound.hpp"

#include <algorithm>
#include <cmath>

#include "sflsim/errors.hpp"

namespace sflsim {

BoundParams BoundParams::from_config(const Config& cfg) {
    BoundParams p;
    p.mu = cfg.get_double_or("bound", "mu", p.mu);
    p.beta = cfg.get_double_or("bound", "beta", p.beta);
    p.z_bound = cfg.get_double_or("bound", "z", p.z_bound);
    p.sigma = cfg.get_double_or("bound", "sigma", p.sigma);
    p.total_layers = static_cast<int>(cfg.get_int_or("bound", "total_layers", p.total_layers));
    p.split_layer = static_cast<int>(cfg.get_int_or("bound", "split_layer", p.split_layer));
    p.local_iters = static_cast<int>(cfg.get_int_or("bound", "local_iters", p.local_iters));
    p.agg_rounds = static_cast<int>(cfg.get_int_or("bound", "agg_rounds", p.agg_rounds));
    if (cfg.has("bound", "a_series")) p.a_series = cfg.get_double_list("bound", "a_series");
    if (cfg.has("bound", "phi_per_class"))
        p.phi_per_class = cfg.get_double_list("bound", "phi_per_class");
    p.het_gamma = cfg.get_double_or("bound", "gamma_het", p.het_gamma);
    p.delta1 = cfg.get_double_or("bound", "delta1", p.delta1);
    p.weight_phi_by_global =
        cfg.get_bool_or("bound", "weight_phi_by_global", p.weight_phi_by_global);
    p.validate();
    return p;
}

void BoundParams::validate() const {
    if (!(mu > 0)) throw ConfigError("bound.mu must be positive");
    if (beta < mu) throw ConfigError("bound.beta must be >= mu");
    if (z_bound < 0 || sigma < 0 || het_gamma < 0 || delta1 < 0)
        throw ConfigError("bound constants must be nonnegative");
    if (split_layer < 1 || split_layer > total_layers)
        throw ConfigError("bound.split_layer must lie in [1, total_layers]");
    if (local_iters < 1 || agg_rounds < 1)
        throw ConfigError("bound.local_iters and bound.agg_rounds must be >= 1");
}

PnResult compute_Pn(const BoundParams& params, const Association& assoc,
                    const std::vector<std::vector<double>>& per_device_dist,
                    const std::vector<double>& global_dist, int num_uavs, double alpha) {
    if (!(alpha > 0)) throw ConfigError("compute_Pn needs a positive learning rate");
    const int num_devices = assoc.num_devices();
    const int num_classes = static_cast<int>(global_dist.size());
    const std::vector<int> n_k = assoc.load_counts(num_uavs);

    const double z2 = params.z_bound * params.z_bound;
    const double s2 = params.sigma * params.sigma;
    const double me = static_cast<double>(params.agg_rounds) * params.local_iters;
    const double common = 2.0 * (me - 1.0) * (me - 1.0) * params.total_layers * z2 +
                          4.0 * params.beta * params.het_gamma;

    // A default series of ones, one entry per local iteration, when the
    // user supplies none.
    std::vector<double> series = params.a_series;
    if (series.empty()) series.assign(params.local_iters, 1.0);

    PnResult out;
    out.per_device.assign(num_devices, 0.0);
    for (int n = 0; n < num_devices; ++n) {
        const int k = assoc.uav_of[n];
        const double inv = 1.0 / n_k[k];
        double pn = common;
        pn += params.split_layer * z2 +
              (params.total_layers - params.split_layer) * z2 * inv;
        pn += params.split_layer * s2 +
              (params.total_layers - params.split_layer) * s2 * inv;

        double phi_sum = 0.0;
        for (int c = 0; c < num_classes; ++c) {
            const double phi =
                c < static_cast<int>(params.phi_per_class.size()) ? params.phi_per_class[c] : 1.0;
            const double weight =
                params.weight_phi_by_global ? global_dist[c] : per_device_dist[n][c];
            phi_sum += weight * phi;
        }
        const double factor = 1.0 - alpha * phi_sum;
        if (factor <= 0) out.series_warning = true;

        double series_sum = 0.0;
        double power = 1.0;
        for (const double a : series) {
            series_sum += a * power;
            power *= factor;
        }
        double dev2 = 0.0;
        for (int c = 0; c < num_classes; ++c) {
            const double d = std::fabs(per_device_dist[n][c] - global_dist[c]);
            dev2 += d * d;
        }
        pn += series_sum * series_sum * dev2;
        out.per_device[n] = pn;
    }

    double avg = 0.0;
    int nonempty = 0;
    for (int k = 0; k < num_uavs; ++k) {
        if (n_k[k] == 0) continue;
        double uav_mean = 0.0;
        for (int n = 0; n < num_devices; ++n)
            if (assoc.uav_of[n] == k) uav_mean += out.per_device[n];
        avg += uav_mean / n_k[k];
        ++nonempty;
    }
    out.uav_average = nonempty > 0 ? avg / nonempty : 0.0;
    return out;
}

double bound_learning_rate(const BoundParams& params, int t) {
    const double rho = params.beta / params.mu;
    const double me = static_cast<double>(params.agg_rounds) * params.local_iters;
    const double gamma = std::max(8.0 * rho, me) - 1.0;
    return 4.0 / (params.mu * (gamma + t));
}

double loss_bound(const BoundParams& params, double pn, int t) {
    if (t < 1) throw ConfigError("loss_bound needs t >= 1");
    const double rho = params.beta / params.mu;
    const double me = static_cast<double>(params.agg_rounds) * params.local_iters;
    const double gamma = std::max(8.0 * rho, me) - 1.0;
    return rho / (gamma + t) *
           (8.0 * pn / params.mu + 0.5 * params.mu * (gamma + 1.0) * params.delta1);
}

} // namespace sflsim
