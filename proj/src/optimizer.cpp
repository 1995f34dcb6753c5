#include "sflsim/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include "sflsim/errors.hpp"

namespace sflsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double device_compute_s(const SolverContext& ctx, const CutCosts& cut, int n) {
    return cut.c_device / ctx.scenario->devices[n].flops;
}

// True if (objective, layer, association) of lhs improves on rhs; the
// deterministic total order used for every best-so-far merge.
bool improves(double obj_l, int ell_l, const Association& a_l, double obj_r, int ell_r,
              const Association& a_r) {
    if (obj_l != obj_r) return obj_l < obj_r;
    if (ell_l != ell_r) return ell_l < ell_r;
    return a_l < a_r;
}

} // namespace

OptimizerSettings OptimizerSettings::from_config(const Config& cfg) {
    OptimizerSettings s;
    s.sweep_steps = static_cast<int>(cfg.get_int_or("optimizer", "sweep_steps", s.sweep_steps));
    s.dual_max_iters =
        static_cast<int>(cfg.get_int_or("optimizer", "dual_max_iters", s.dual_max_iters));
    s.dual_stall_iters =
        static_cast<int>(cfg.get_int_or("optimizer", "dual_stall_iters", s.dual_stall_iters));
    s.dual_step0 = cfg.get_double_or("optimizer", "dual_step0", s.dual_step0);
    s.num_threads = static_cast<int>(cfg.get_int_or("optimizer", "threads", s.num_threads));
    s.fixed_layer = static_cast<int>(cfg.get_int_or("optimizer", "fixed_layer", s.fixed_layer));
    if (s.sweep_steps < 1) throw ConfigError("optimizer.sweep_steps must be >= 1");
    if (s.dual_max_iters < 1) throw ConfigError("optimizer.dual_max_iters must be >= 1");
    if (s.dual_stall_iters < 1) throw ConfigError("optimizer.dual_stall_iters must be >= 1");
    if (s.dual_step0 <= 0) throw ConfigError("optimizer.dual_step0 must be positive");
    return s;
}

BandwidthSolution solve_bandwidth(const Association& assoc, const SolverContext& ctx,
                                  const CutCosts& cut, double tol_s) {
    if (tol_s <= 0) throw ConfigError("bandwidth bisection tolerance must be positive");
    const Scenario& sc = *ctx.scenario;
    const int num_devices = assoc.num_devices();
    const int num_uavs = sc.num_uavs();
    const double total_bw = ctx.total_bandwidth_hz;
    if (total_bw <= 0) throw ConfigError("total bandwidth must be positive");

    BandwidthSolution out;
    out.l.assign(num_devices, 0.0);
    out.bandwidth_hz.assign(num_uavs, 0.0);
    if (num_devices == 0) return out;

    // Per-device compute floor c_n and demand coefficient M / R_{n,k}.
    std::vector<double> floor_s(num_devices), coeff(num_devices, 0.0);
    double t_lo = 0.0, coeff_sum = 0.0;
    for (int n = 0; n < num_devices; ++n) {
        floor_s[n] = device_compute_s(ctx, cut, n);
        t_lo = std::max(t_lo, floor_s[n]);
        if (cut.m_feat > 0) {
            const double r = ctx.rates.device_uav[n][assoc.uav_of[n]];
            if (!(r > 0))
                throw InfeasibleError("device " + std::to_string(n) +
                                      " has no usable uplink to UAV " +
                                      std::to_string(assoc.uav_of[n]));
            coeff[n] = cut.m_feat / r;
            coeff_sum += coeff[n];
        }
    }

    const std::vector<int> n_k = assoc.load_counts(num_uavs);
    if (coeff_sum == 0.0) {
        // No traffic crosses the cut; any full split of the budget works.
        out.t_d = t_lo;
        const int nonempty =
            static_cast<int>(std::count_if(n_k.begin(), n_k.end(), [](int c) { return c > 0; }));
        for (int k = 0; k < num_uavs; ++k)
            if (n_k[k] > 0) out.bandwidth_hz[k] = total_bw / nonempty;
        for (int n = 0; n < num_devices; ++n) out.l[n] = 1.0 / n_k[assoc.uav_of[n]];
        return out;
    }

    // g(t) = total bandwidth demanded to finish every upload by t, minus
    // the budget. Strictly decreasing from +inf at t_lo; the root is
    // bounded above by t_lo + sum(M/R)/B^U.
    auto g = [&](double t) {
        double demand = 0.0;
        for (int n = 0; n < num_devices; ++n)
            if (coeff[n] > 0) demand += coeff[n] / (t - floor_s[n]);
        return demand - total_bw;
    };

    double lo = t_lo;
    double hi = t_lo + coeff_sum / total_bw;
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 300; ++it) {
        const double gm = g(mid);
        if (std::fabs(gm) <= 1e-9 * total_bw && hi - lo <= tol_s) break;
        (gm > 0 ? lo : hi) = mid;
        const double next = 0.5 * (lo + hi);
        if (next == mid) break;
        mid = next;
    }
    out.t_d = mid;

    std::vector<double> demand_hz(num_devices);
    for (int n = 0; n < num_devices; ++n) {
        demand_hz[n] = coeff[n] / (mid - floor_s[n]);
        out.bandwidth_hz[assoc.uav_of[n]] += demand_hz[n];
    }
    for (int n = 0; n < num_devices; ++n)
        out.l[n] = demand_hz[n] / out.bandwidth_hz[assoc.uav_of[n]];
    return out;
}

std::vector<double> allocate_proportional(const std::vector<double>& loads, double capacity) {
    std::vector<double> shares(loads.size(), 0.0);
    double total = 0.0;
    for (const double v : loads) {
        if (v < 0) throw ConfigError("compute loads must be nonnegative");
        total += v;
    }
    if (total == 0.0) return shares;
    for (std::size_t i = 0; i < loads.size(); ++i) shares[i] = loads[i] * capacity / total;
    return shares;
}

std::vector<double> solve_compute(const Association& assoc, const SolverContext& ctx,
                                  const CutCosts& cut) {
    const Scenario& sc = *ctx.scenario;
    const int num_devices = assoc.num_devices();
    std::vector<double> shares(num_devices, 0.0);
    if (cut.c_server <= 0) return shares;
    const std::vector<int> n_k = assoc.load_counts(sc.num_uavs());
    for (int n = 0; n < num_devices; ++n) {
        const int k = assoc.uav_of[n];
        // Equal per-device server loads: the proportional rule reduces to
        // an even split of f_k.
        shares[n] = sc.uavs[k].flops / n_k[k];
    }
    return shares;
}

Allocation derive_allocation(const Association& assoc, const SolverContext& ctx,
                             const CutCosts& cut) {
    BandwidthSolution bw = solve_bandwidth(assoc, ctx, cut, ctx.bisect_tol_s);
    Allocation alloc;
    alloc.l = std::move(bw.l);
    alloc.bandwidth_hz = std::move(bw.bandwidth_hz);
    alloc.f_share = solve_compute(assoc, ctx, cut);
    return alloc;
}

Evaluation evaluate_objective(const Association& assoc, const Allocation& alloc, int ell,
                              const SolverContext& ctx, const CutCosts& cut) {
    const Scenario& sc = *ctx.scenario;
    Evaluation ev;
    ev.breakdown = stage_latencies(sc, assoc, alloc, cut, ctx.rates, ctx.n_switches,
                                   ctx.switching_time_s);
    const int total_layers = ctx.profile->num_layers();
    const double z2 = ctx.z_bound * ctx.z_bound;
    const double s2 = ctx.sigma_bound * ctx.sigma_bound;
    const std::vector<int> n_k = assoc.load_counts(sc.num_uavs());
    const auto q = heterogeneity_of(assoc, sc);
    double proxy = 0.0;
    for (int k = 0; k < sc.num_uavs(); ++k) {
        if (n_k[k] == 0) continue;
        const double inv = 1.0 / n_k[k];
        proxy += ell * z2 + (total_layers - ell) * z2 * inv;
        proxy += ell * s2 + (total_layers - ell) * s2 * inv;
        double dev = 0.0;
        for (const double v : q[k]) dev += v;
        proxy += inv * dev;
    }
    ev.proxy = proxy;
    ev.objective = (1.0 - ctx.theta) * ev.breakdown.total + ctx.theta * proxy;
    return ev;
}

double association_cost(int device, int uav, const Multipliers& m, double t_d_probe,
                        double t_u_probe, const SolverContext& ctx, const CutCosts& cut) {
    const Scenario& sc = *ctx.scenario;
    const double floor_s = device_compute_s(ctx, cut, device);
    double cost = 0.0;
    if (cut.m_feat > 0) {
        if (!(t_d_probe > floor_s)) return kInf;
        const double r = ctx.rates.device_uav[device][uav];
        if (!(r > 0)) return kInf;
        cost += m.psi * cut.m_feat / ((t_d_probe - floor_s) * r);
    } else if (!(t_d_probe >= floor_s)) {
        return kInf;
    }
    if (cut.c_server > 0) {
        if (!(t_u_probe > 0)) return kInf;
        cost += m.nu[uav] * cut.c_server / t_u_probe;
    }
    const std::vector<double>& pn = sc.devices[device].label_dist;
    for (int c = 0; c < sc.num_classes(); ++c)
        cost += (m.lambda[uav][c] - m.mu[uav][c]) * (pn[c] - sc.global_dist[c]);
    return cost;
}

std::optional<AssociationResult> solve_association(double t_d_probe, double t_u_probe, int ell,
                                                   const SolverContext& ctx, const CutCosts& cut,
                                                   const OptimizerSettings& settings) {
    const Scenario& sc = *ctx.scenario;
    const int num_devices = sc.num_devices();
    const int num_uavs = sc.num_uavs();
    const int num_classes = sc.num_classes();

    Multipliers m;
    m.nu.assign(num_uavs, 0.0);
    m.lambda.assign(num_uavs, std::vector<double>(num_classes, 0.0));
    m.mu.assign(num_uavs, std::vector<double>(num_classes, 0.0));

    std::optional<AssociationResult> best;
    std::set<std::vector<int>> seen;
    std::vector<int> prev;
    int stall = 0;

    for (int it = 1; it <= settings.dual_max_iters; ++it) {
        std::vector<int> uav_of(num_devices, -1);
        for (int n = 0; n < num_devices; ++n) {
            double best_cost = kInf;
            for (const int k : sc.candidates[n]) {
                const double c = association_cost(n, k, m, t_d_probe, t_u_probe, ctx, cut);
                if (c < best_cost) {
                    best_cost = c;
                    uav_of[n] = k;
                }
            }
            if (uav_of[n] < 0) return std::nullopt; // probes rule out every candidate
        }
        Association assoc(std::move(uav_of));

        if (seen.insert(assoc.uav_of).second) {
            Allocation alloc = derive_allocation(assoc, ctx, cut);
            Evaluation ev = evaluate_objective(assoc, alloc, ell, ctx, cut);
            if (!best || improves(ev.objective, ell, assoc, best->eval.objective, ell,
                                  best->assoc))
                best = AssociationResult{assoc, m, std::move(alloc), std::move(ev)};
        }

        if (assoc.uav_of == prev) {
            if (++stall >= settings.dual_stall_iters) break;
        } else {
            stall = 0;
            prev = assoc.uav_of;
        }

        // Projected subgradient step on the dual variables, subgradients
        // normalized by the respective budgets so one step size fits all.
        const double eta = settings.dual_step0 / std::sqrt(static_cast<double>(it));
        const std::vector<int> n_k = assoc.load_counts(num_uavs);

        if (cut.m_feat > 0) {
            double demand = 0.0;
            for (int n = 0; n < num_devices; ++n) {
                const double r = ctx.rates.device_uav[n][assoc.uav_of[n]];
                demand += cut.m_feat / ((t_d_probe - device_compute_s(ctx, cut, n)) * r);
            }
            m.psi = std::max(0.0, m.psi + eta * (demand - ctx.total_bandwidth_hz) /
                                              ctx.total_bandwidth_hz);
        }
        if (cut.c_server > 0 && t_u_probe > 0) {
            for (int k = 0; k < num_uavs; ++k) {
                const double need = n_k[k] * cut.c_server / t_u_probe;
                const double f_k = sc.uavs[k].flops;
                m.nu[k] = std::max(0.0, m.nu[k] + eta * (need - f_k) / f_k);
            }
        }
        std::vector<std::vector<double>> dev(num_uavs, std::vector<double>(num_classes, 0.0));
        for (int n = 0; n < num_devices; ++n) {
            const int k = assoc.uav_of[n];
            for (int c = 0; c < num_classes; ++c)
                dev[k][c] += sc.devices[n].label_dist[c] - sc.global_dist[c];
        }
        for (int k = 0; k < num_uavs; ++k) {
            // The auxiliary bound q_{k,c} enters the objective with weight
            // theta/n_k, which caps lambda + mu; past the cap the inner
            // minimizer jumps from q = 0 to q = |deviation|.
            const double box = ctx.theta / std::max(n_k[k], 1);
            for (int c = 0; c < num_classes; ++c) {
                const double d = dev[k][c];
                const double q = box - m.lambda[k][c] - m.mu[k][c] >= 0 ? 0.0 : std::fabs(d);
                m.lambda[k][c] = std::clamp(m.lambda[k][c] + eta * (d - q), 0.0, box);
                m.mu[k][c] = std::clamp(m.mu[k][c] + eta * (-d - q), 0.0, box);
            }
        }
    }
    return best;
}

namespace {

struct LayerOutcome {
    int ell = 0;
    std::optional<AssociationResult> best;
    std::string note;
};

LayerOutcome sweep_layer(int ell, const SolverContext& ctx, const OptimizerSettings& settings) {
    const Scenario& sc = *ctx.scenario;
    LayerOutcome out;
    out.ell = ell;
    const CutCosts cc = cut(*ctx.profile, ell);

    double t_lo = 0.0;
    for (int n = 0; n < sc.num_devices(); ++n)
        t_lo = std::max(t_lo, cc.c_device / sc.devices[n].flops);

    // Upper end of the t_d probe range: with t_d = t_lo + sum_n M/(B^U R_n^min),
    // total demand cannot exceed B^U for any association, so the bisection
    // root of every association lies inside the range.
    double span_d = 0.0;
    if (cc.m_feat > 0) {
        for (int n = 0; n < sc.num_devices(); ++n) {
            double r_min = kInf;
            for (const int k : sc.candidates[n]) {
                const double r = ctx.rates.device_uav[n][k];
                if (r > 0) r_min = std::min(r_min, r);
            }
            if (!(r_min < kInf)) {
                out.note = "layer " + std::to_string(ell) + ": device " + std::to_string(n) +
                           " has no usable uplink";
                return out;
            }
            span_d += cc.m_feat / (ctx.total_bandwidth_hz * r_min);
        }
    }

    double t_u_max = 0.0;
    if (cc.c_server > 0) {
        double f_min = kInf;
        for (const auto& u : sc.uavs) f_min = std::min(f_min, u.flops);
        if (!(f_min > 0)) {
            out.note = "layer " + std::to_string(ell) + ": no UAV compute available";
            return out;
        }
        t_u_max = cc.c_server * sc.num_devices() / f_min;
    }

    const int steps = settings.sweep_steps;
    const double delta = span_d / steps;
    const double eps = t_u_max / steps;
    for (int i = 0; i < steps; ++i) {
        const double t_d_probe = (t_lo + span_d) - i * delta;
        const double t_u_probe = t_u_max - i * eps;
        auto res = solve_association(t_d_probe, t_u_probe, ell, ctx, cc, settings);
        if (res && (!out.best || improves(res->eval.objective, ell, res->assoc,
                                          out.best->eval.objective, ell, out.best->assoc)))
            out.best = std::move(res);
        if (delta == 0.0 && eps == 0.0) break; // degenerate single probe
    }
    if (!out.best) out.note = "layer " + std::to_string(ell) + ": every probe infeasible";
    return out;
}

Solution assemble(const std::vector<LayerOutcome>& outcomes) {
    Solution sol;
    const LayerOutcome* winner = nullptr;
    double best_so_far = kInf;
    std::vector<std::string> notes;
    for (const auto& lo : outcomes) {
        if (lo.best) {
            best_so_far = std::min(best_so_far, lo.best->eval.objective);
            if (!winner ||
                improves(lo.best->eval.objective, lo.ell, lo.best->assoc,
                         winner->best->eval.objective, winner->ell, winner->best->assoc))
                winner = &lo;
        } else {
            notes.push_back(lo.note);
        }
        sol.objective_history.push_back(best_so_far);
    }
    if (!winner) {
        std::string msg = "no feasible solution at any split layer";
        for (const auto& n : notes) msg += "; " + n;
        throw InfeasibleError(msg);
    }
    sol.split_layer = winner->ell;
    sol.assoc = winner->best->assoc;
    sol.alloc = winner->best->alloc;
    sol.breakdown = winner->best->eval.breakdown;
    sol.proxy = winner->best->eval.proxy;
    sol.objective = winner->best->eval.objective;
    return sol;
}

} // namespace

Solution solve_joint(const SolverContext& ctx, const OptimizerSettings& settings) {
    const int total_layers = ctx.profile->num_layers();
    int ell_lo = 1, ell_hi = total_layers;
    if (settings.fixed_layer != 0) {
        if (settings.fixed_layer < 1 || settings.fixed_layer > total_layers)
            throw ConfigError("fixed split layer out of range [1, " +
                              std::to_string(total_layers) + "]");
        ell_lo = ell_hi = settings.fixed_layer;
    }
    const int count = ell_hi - ell_lo + 1;
    std::vector<LayerOutcome> outcomes(count);

    int workers = settings.num_threads;
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, count);

    if (workers == 1) {
        for (int i = 0; i < count; ++i) outcomes[i] = sweep_layer(ell_lo + i, ctx, settings);
    } else {
        std::atomic<int> next{0};
        auto work = [&]() {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1))
                outcomes[i] = sweep_layer(ell_lo + i, ctx, settings);
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    return assemble(outcomes);
}

Solution brute_force_oracle(const SolverContext& ctx) {
    const Scenario& sc = *ctx.scenario;
    const int num_devices = sc.num_devices();
    const int total_layers = ctx.profile->num_layers();

    double combos = total_layers;
    for (const auto& cands : sc.candidates) combos *= static_cast<double>(cands.size());
    if (combos > 1e6) {
        std::ostringstream msg;
        msg << "brute-force oracle limited to 1e6 combinations, instance has " << combos;
        throw ConfigError(msg.str());
    }

    Solution sol;
    bool have = false;
    for (int ell = 1; ell <= total_layers; ++ell) {
        const CutCosts cc = cut(*ctx.profile, ell);
        double layer_best = kInf;
        std::vector<std::size_t> idx(num_devices, 0);
        for (;;) {
            std::vector<int> uav_of(num_devices);
            for (int n = 0; n < num_devices; ++n) uav_of[n] = sc.candidates[n][idx[n]];
            Association assoc(std::move(uav_of));
            Allocation alloc = derive_allocation(assoc, ctx, cc);
            Evaluation ev = evaluate_objective(assoc, alloc, ell, ctx, cc);
            layer_best = std::min(layer_best, ev.objective);
            if (!have || improves(ev.objective, ell, assoc, sol.objective, sol.split_layer,
                                  sol.assoc)) {
                have = true;
                sol.split_layer = ell;
                sol.assoc = assoc;
                sol.alloc = std::move(alloc);
                sol.breakdown = ev.breakdown;
                sol.proxy = ev.proxy;
                sol.objective = ev.objective;
            }
            int pos = num_devices - 1;
            while (pos >= 0 && ++idx[pos] == sc.candidates[pos].size()) idx[pos--] = 0;
            if (pos < 0) break;
        }
        sol.objective_history.push_back(
            sol.objective_history.empty() ? layer_best
                                          : std::min(sol.objective_history.back(), layer_best));
    }
    return sol;
}

std::string Solution::report() const {
    std::ostringstream out;
    out.precision(17);
    out << "split_layer " << split_layer << "\n";
    out << "objective " << objective << "\n";
    out << "proxy " << proxy << "\n";
    out << "t_d " << breakdown.t_d << "\n";
    out << "t_u " << breakdown.t_u << "\n";
    out << "t_s " << breakdown.t_s << "\n";
    out << "handover " << breakdown.handover << "\n";
    out << "T " << breakdown.total << "\n";
    out << "association";
    for (const int k : assoc.uav_of) out << " " << k;
    out << "\n";
    return out.str();
}

} // namespace sflsim
