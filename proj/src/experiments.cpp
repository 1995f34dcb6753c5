#include "sflsim/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "sflsim/errors.hpp"
#include "sflsim/text.hpp"

namespace sflsim {

namespace {

bool is_sweep_parameter(const std::string& name) {
    return name == "total_bandwidth" || name == "uav_compute" || name == "theta" ||
           name == "split_layer_fixed" || name == "device_count";
}

bool is_method(const std::string& name) {
    return name == "proposed" || name == "ra" || name == "era" || name == "hfl" || name == "dda";
}

// Sweeps over these parameters keep the device population and geometry
// fixed, so an association found at one value can be re-scored at any
// other.
bool sweep_keeps_scenario(const std::string& name) {
    return name == "total_bandwidth" || name == "uav_compute" || name == "theta" ||
           name == "split_layer_fixed";
}

} // namespace

ExperimentConfig ExperimentConfig::from_config(Config cfg) {
    ExperimentConfig e;
    e.scenario = ScenarioConfig::from_config(cfg);
    e.a2g = A2GChannelParams::from_config(cfg);
    e.sat = SatLinkParams::from_config(cfg);
    e.constellation = ConstellationConfig::from_config(cfg);
    e.target = GroundTarget::from_config(cfg);
    e.optimizer = OptimizerSettings::from_config(cfg);
    e.bound = BoundParams::from_config(cfg);
    e.profile = DnnProfile::from_config(cfg);

    e.total_bandwidth_hz =
        cfg.get_double_or("scenario", "total_bandwidth_hz", e.total_bandwidth_hz);
    if (e.total_bandwidth_hz <= 0)
        throw ConfigError("scenario.total_bandwidth_hz must be positive");
    e.theta = cfg.get_double_or("optimizer", "theta", e.theta);
    if (e.theta < 0 || e.theta > 1) throw ConfigError("optimizer.theta must lie in [0, 1]");
    e.z_bound = cfg.get_double_or("optimizer", "z", e.z_bound);
    e.sigma_bound = cfg.get_double_or("optimizer", "sigma", e.sigma_bound);
    e.bisect_tol_s = cfg.get_double_or("optimizer", "bisect_tol_s", e.bisect_tol_s);

    const std::string sweep_param = cfg.get_string_or("experiment", "sweep_parameter", "");
    if (!sweep_param.empty()) {
        if (!is_sweep_parameter(sweep_param))
            throw ConfigError("unknown sweep parameter '" + sweep_param +
                              "' (expected total_bandwidth, uav_compute, theta, "
                              "split_layer_fixed or device_count)");
        e.sweep.parameter = sweep_param;
        e.sweep.values = cfg.get_double_list("experiment", "sweep_values");
        if (e.sweep.values.empty()) throw ConfigError("experiment.sweep_values is empty");
        bool inc = true, dec = true;
        for (std::size_t i = 1; i < e.sweep.values.size(); ++i) {
            inc = inc && e.sweep.values[i] > e.sweep.values[i - 1];
            dec = dec && e.sweep.values[i] < e.sweep.values[i - 1];
        }
        if (!inc && !dec)
            throw ConfigError("experiment.sweep_values must be strictly monotone");
    }

    const std::string methods =
        cfg.get_string_or("experiment", "methods", "proposed,ra,era,hfl,dda");
    e.methods.clear();
    for (const std::string& m : split_list(methods)) {
        if (m.empty()) continue;
        if (!is_method(m))
            throw ConfigError("unknown method '" + m +
                              "' (expected proposed, ra, era, hfl or dda)");
        e.methods.push_back(m);
    }
    if (e.methods.empty()) throw ConfigError("experiment.methods is empty");

    e.output_dir = cfg.get_string_or("experiment", "output_dir", e.output_dir);
    e.seed = static_cast<std::uint64_t>(
        cfg.get_int_or("experiment", "seed", static_cast<long long>(e.seed)));
    e.handover_rounds =
        static_cast<int>(cfg.get_int_or("experiment", "handover_rounds", e.handover_rounds));
    e.horizon_s = cfg.get_double_or("experiment", "horizon_s", e.horizon_s);
    e.access_step_s = cfg.get_double_or("experiment", "access_step_s", e.access_step_s);
    e.workers = static_cast<int>(cfg.get_int_or("experiment", "workers", e.workers));

    if (const char* out = std::getenv("SFLSIM_OUT"))
        if (*out) e.output_dir = out;
    if (const char* w = std::getenv("SFLSIM_WORKERS"))
        if (*w) e.workers = std::atoi(w);

    cfg.reject_unconsumed();
    e.resolved = cfg.serialize();
    return e;
}

ExperimentConfig ExperimentConfig::load_file(const std::string& path) {
    return from_config(Config::parse_file(path));
}

namespace {

struct Point {
    double value = 0.0;
    double theta = 0.0;
    double bandwidth = 0.0;
    Scenario scenario;
    LinkRates rates;
    OptimizerSettings settings;
};

std::vector<double> satellite_se(const ExperimentConfig& cfg, const Scenario& scenario) {
    const auto pos = propagate(cfg.constellation, 0.0);
    std::size_t best = 0;
    double best_el = -1e9;
    for (std::size_t i = 0; i < pos.size(); ++i) {
        const double el = elevation_deg(pos[i], cfg.target, cfg.constellation.earth_radius_m);
        if (el > best_el) {
            best_el = el;
            best = i;
        }
    }
    const double dist =
        sat_target_distance_m(pos[best], cfg.target, cfg.constellation.earth_radius_m);
    Rng rng(cfg.seed ^ 0x7a1e5eedULL);
    const double noise = cfg.a2g.noise_watts();
    std::vector<double> se(scenario.num_uavs());
    for (int k = 0; k < scenario.num_uavs(); ++k) {
        const double fade = sample_rain_fade_db(cfg.sat, rng);
        const double gain = sat_channel_gain(scenario.uavs[k], dist, cfg.sat, fade);
        se[k] = sat_rate_bps(scenario.uavs[k], 1.0, gain, noise); // per-Hz efficiency
    }
    return se;
}

std::vector<Point> build_points(const ExperimentConfig& cfg, const Scenario& base,
                                const std::vector<double>& sat_se) {
    const std::vector<double> values =
        cfg.sweep.parameter.empty() ? std::vector<double>{0.0} : cfg.sweep.values;
    std::vector<Point> pts;
    pts.reserve(values.size());
    for (const double v : values) {
        Point p;
        p.value = v;
        p.theta = cfg.theta;
        p.bandwidth = cfg.total_bandwidth_hz;
        p.settings = cfg.optimizer;
        p.scenario = base;
        if (cfg.sweep.parameter == "total_bandwidth") {
            p.bandwidth = v;
        } else if (cfg.sweep.parameter == "uav_compute") {
            for (auto& u : p.scenario.uavs) u.flops = v;
        } else if (cfg.sweep.parameter == "theta") {
            if (v < 0 || v > 1) throw ConfigError("theta sweep values must lie in [0, 1]");
            p.theta = v;
        } else if (cfg.sweep.parameter == "split_layer_fixed") {
            p.settings.fixed_layer = static_cast<int>(std::llround(v));
        } else if (cfg.sweep.parameter == "device_count") {
            ScenarioConfig sc = cfg.scenario;
            sc.num_devices = static_cast<int>(std::llround(v));
            p.scenario = generate_scenario(sc, cfg.seed);
        }
        p.rates.device_uav = rate_table(p.scenario, cfg.a2g);
        p.rates.sat_se = sat_se;
        pts.push_back(std::move(p));
    }
    return pts;
}

SolverContext make_context(const ExperimentConfig& cfg, const Point& point) {
    SolverContext ctx;
    ctx.scenario = &point.scenario;
    ctx.profile = &cfg.profile;
    ctx.rates = point.rates;
    ctx.total_bandwidth_hz = point.bandwidth;
    ctx.theta = point.theta;
    ctx.z_bound = cfg.z_bound;
    ctx.sigma_bound = cfg.sigma_bound;
    ctx.n_switches = 0;
    ctx.switching_time_s = cfg.constellation.switching_time_s;
    ctx.bisect_tol_s = cfg.bisect_tol_s;
    return ctx;
}

Solution solve_method(const std::string& method, const SolverContext& ctx,
                      const OptimizerSettings& settings, std::uint64_t seed) {
    if (method == "proposed") return solve_joint(ctx, settings);
    return solve_baseline(baseline_from_string(method), ctx, settings, seed);
}

// Re-scores each method's sweep row as the best of every configuration
// that method produced anywhere in the sweep, under the row's own
// parameter value and the method's own allocation rule. Keeps rows
// order-independent while stripping heuristic noise from trend curves.
void cross_evaluate(const ExperimentConfig& cfg, const std::vector<Point>& points,
                    std::vector<std::vector<Solution>>& by_method) {
    if (points.size() < 2 || !sweep_keeps_scenario(cfg.sweep.parameter)) return;
    const bool forced_layer = cfg.sweep.parameter == "split_layer_fixed";
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
        const std::string& method = cfg.methods[mi];
        std::set<std::pair<int, std::vector<int>>> candidates;
        for (const Solution& s : by_method[mi])
            candidates.insert({s.split_layer, s.assoc.uav_of});
        for (std::size_t pi = 0; pi < points.size(); ++pi) {
            const SolverContext ctx = make_context(cfg, points[pi]);
            Solution best;
            bool have = false;
            for (const auto& [cand_ell, uav_of] : candidates) {
                int ell = cand_ell;
                if (forced_layer && method != "hfl")
                    ell = points[pi].settings.fixed_layer;
                const Association assoc(uav_of);
                const CutCosts cc = cut(cfg.profile, ell);
                Allocation alloc = method == "era" ? era_allocation(assoc, ctx, cc)
                                                   : derive_allocation(assoc, ctx, cc);
                const Evaluation ev = evaluate_objective(assoc, alloc, ell, ctx, cc);
                const bool wins =
                    !have || ev.objective < best.objective ||
                    (ev.objective == best.objective &&
                     (ell < best.split_layer ||
                      (ell == best.split_layer && assoc < best.assoc)));
                if (wins) {
                    have = true;
                    best.split_layer = ell;
                    best.assoc = assoc;
                    best.alloc = std::move(alloc);
                    best.breakdown = ev.breakdown;
                    best.proxy = ev.proxy;
                    best.objective = ev.objective;
                }
            }
            best.objective_history = by_method[mi][pi].objective_history;
            by_method[mi][pi] = std::move(best);
        }
    }
}

std::string results_csv(const ExperimentConfig& cfg, const std::vector<ExperimentRow>& rows) {
    std::ostringstream out;
    out << "method,sweep_parameter,sweep_value,split_layer,I,P,t_d,t_u,t_s,handover,T\n";
    const std::string param = cfg.sweep.parameter.empty() ? "none" : cfg.sweep.parameter;
    for (const auto& row : rows) {
        const Solution& s = row.solution;
        out << row.method << "," << param << "," << format_double(row.sweep_value) << ","
            << s.split_layer << "," << format_double(s.objective) << ","
            << format_double(s.proxy) << "," << format_double(s.breakdown.t_d) << ","
            << format_double(s.breakdown.t_u) << "," << format_double(s.breakdown.t_s) << ","
            << format_double(s.breakdown.handover) << "," << format_double(s.breakdown.total)
            << "\n";
    }
    return out.str();
}

} // namespace

PreparedInstance prepare_instance(const ExperimentConfig& cfg) {
    PreparedInstance inst;
    inst.scenario = generate_scenario(cfg.scenario, cfg.seed);
    inst.rates.device_uav = rate_table(inst.scenario, cfg.a2g);
    inst.rates.sat_se = satellite_se(cfg, inst.scenario);
    return inst;
}

SolverContext base_context(const ExperimentConfig& cfg, const PreparedInstance& inst) {
    SolverContext ctx;
    ctx.scenario = &inst.scenario;
    ctx.profile = &cfg.profile;
    ctx.rates = inst.rates;
    ctx.total_bandwidth_hz = cfg.total_bandwidth_hz;
    ctx.theta = cfg.theta;
    ctx.z_bound = cfg.z_bound;
    ctx.sigma_bound = cfg.sigma_bound;
    ctx.n_switches = 0;
    ctx.switching_time_s = cfg.constellation.switching_time_s;
    ctx.bisect_tol_s = cfg.bisect_tol_s;
    return ctx;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    const PreparedInstance inst = prepare_instance(cfg);
    const std::vector<Point> points = build_points(cfg, inst.scenario, inst.rates.sat_se);

    const std::size_t task_count = cfg.methods.size() * points.size();
    std::vector<Solution> solutions(task_count);
    std::vector<long long> wall_ms(task_count);

    int workers = cfg.workers;
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp<int>(workers, 1, static_cast<int>(task_count));

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mu;
    auto work = [&]() {
        for (std::size_t i = next.fetch_add(1); i < task_count && !failed;
             i = next.fetch_add(1)) {
            try {
                const std::string& method = cfg.methods[i / points.size()];
                const Point& point = points[i % points.size()];
                OptimizerSettings settings = point.settings;
                if (workers > 1) settings.num_threads = 1; // no nested pools
                const SolverContext ctx = make_context(cfg, point);
                const auto t0 = std::chrono::steady_clock::now();
                solutions[i] = solve_method(method, ctx, settings, cfg.seed);
                wall_ms[i] = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - t0)
                                 .count();
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!error) error = std::current_exception();
                failed = true;
                return;
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);

    std::vector<std::vector<Solution>> by_method(cfg.methods.size());
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi)
        for (std::size_t pi = 0; pi < points.size(); ++pi)
            by_method[mi].push_back(std::move(solutions[mi * points.size() + pi]));

    cross_evaluate(cfg, points, by_method);

    // Handover accounting: the optimization above prices a round without
    // switches; the realized round latency then fixes how many handovers
    // the configured training span incurs.
    AccessSchedule sched;
    if (cfg.handover_rounds > 0)
        sched = access_intervals(cfg.constellation, cfg.target, cfg.horizon_s,
                                 cfg.access_step_s);

    ExperimentResult result;
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
        for (std::size_t pi = 0; pi < points.size(); ++pi) {
            Solution sol = std::move(by_method[mi][pi]);
            if (cfg.handover_rounds > 0) {
                const double round_latency =
                    sol.breakdown.t_d + sol.breakdown.t_u + sol.breakdown.t_s;
                const RoundPlan plan = schedule_rounds(cfg.constellation, cfg.target, sched,
                                                       round_latency, cfg.handover_rounds);
                sol.breakdown.handover =
                    plan.num_switches * cfg.constellation.switching_time_s;
                sol.breakdown.total = round_latency + sol.breakdown.handover;
                sol.objective = (1.0 - points[pi].theta) * sol.breakdown.total +
                                points[pi].theta * sol.proxy;
            }
            ExperimentRow row;
            row.method = cfg.methods[mi];
            row.sweep_value = points[pi].value;
            row.theta = points[pi].theta;
            row.solution = std::move(sol);
            result.rows.push_back(std::move(row));
        }
    }

    result.results_csv = results_csv(cfg, result.rows);
    std::ostringstream timings;
    timings << "method,sweep_value,wall_ms\n";
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi)
        for (std::size_t pi = 0; pi < points.size(); ++pi)
            timings << cfg.methods[mi] << "," << format_double(points[pi].value) << ","
                    << wall_ms[mi * points.size() + pi] << "\n";
    result.timings_csv = timings.str();
    result.manifest = "sflsim-manifest v1\n" + cfg.resolved;
    return result;
}

ExperimentResult replay_manifest(const std::string& manifest_text) {
    const std::size_t eol = manifest_text.find('\n');
    const std::string header = manifest_text.substr(0, eol);
    if (header != "sflsim-manifest v1") {
        if (header.rfind("sflsim-manifest ", 0) == 0)
            throw ConfigError("manifest version '" + header.substr(16) +
                              "' is not supported by this build (expected v1)");
        throw ConfigError("not a sflsim manifest (bad header)");
    }
    const std::string body = eol == std::string::npos ? "" : manifest_text.substr(eol + 1);
    return run_experiment(
        ExperimentConfig::from_config(Config::parse_string(body, "<manifest>")));
}

void write_outputs(const ExperimentResult& result, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    auto dump = [&](const std::string& name, const std::string& content) {
        std::ofstream out(fs::path(out_dir) / name, std::ios::binary);
        if (!out) throw ConfigError("cannot write " + (fs::path(out_dir) / name).string());
        out << content;
    };
    dump("results.csv", result.results_csv);
    dump("timings.csv", result.timings_csv);
    dump("manifest.ini", result.manifest);
}

BoundCurves bound_curves(const ExperimentConfig& cfg) {
    const Scenario sc = generate_scenario(cfg.scenario, cfg.seed);
    SolverContext ctx;
    ctx.scenario = &sc;
    ctx.rates.device_uav = rate_table(sc, cfg.a2g);
    ctx.rates.sat_se.assign(sc.num_uavs(), 1.0);
    const Association assoc = era_association(ctx);

    std::vector<std::vector<double>> dists;
    for (const auto& d : sc.devices) dists.push_back(d.label_dist);
    const int t_eval = std::max(1, cfg.bound.agg_rounds * cfg.bound.local_iters);

    BoundCurves curves;
    std::ostringstream layer_csv;
    layer_csv << "split_layer,pn_avg,bound\n";
    for (int ell = 1; ell <= cfg.bound.total_layers; ++ell) {
        BoundParams p = cfg.bound;
        p.split_layer = ell;
        const double alpha = bound_learning_rate(p, t_eval);
        const PnResult pn = compute_Pn(p, assoc, dists, sc.global_dist, sc.num_uavs(), alpha);
        layer_csv << ell << "," << format_double(pn.uav_average) << ","
                  << format_double(loss_bound(p, pn.uav_average, t_eval)) << "\n";
    }
    curves.vs_layer_csv = layer_csv.str();

    std::ostringstream het_csv;
    het_csv << "deviation_scale,pn_avg,bound\n";
    const double alpha = bound_learning_rate(cfg.bound, t_eval);
    for (const double scale : {0.0, 0.5, 1.0, 1.5, 2.0}) {
        std::vector<std::vector<double>> scaled = dists;
        for (std::size_t n = 0; n < scaled.size(); ++n)
            for (std::size_t c = 0; c < scaled[n].size(); ++c)
                scaled[n][c] =
                    sc.global_dist[c] + scale * (dists[n][c] - sc.global_dist[c]);
        const PnResult pn =
            compute_Pn(cfg.bound, assoc, scaled, sc.global_dist, sc.num_uavs(), alpha);
        het_csv << format_double(scale) << "," << format_double(pn.uav_average) << ","
                << format_double(loss_bound(cfg.bound, pn.uav_average, t_eval)) << "\n";
    }
    curves.vs_heterogeneity_csv = het_csv.str();
    return curves;
}

} // namespace sflsim
