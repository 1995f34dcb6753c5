#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "sflsim/errors.hpp"
#include "sflsim/feasibility.hpp"
#include "sflsim/optimizer.hpp"
#include "sflsim/rng.hpp"
#include "test_helpers.hpp"

using namespace sflsim;
using namespace sflsim::testing;

namespace {

OptimizerSettings serial_settings() {
    OptimizerSettings s;
    s.num_threads = 1;
    return s;
}

// Four heterogeneous devices, two UAVs, two cut choices; small enough for
// the exhaustive oracle, rich enough that the layers and UAVs differ.
Fixture mixed_fixture() {
    Fixture f;
    f.scenario.seed = 5;
    f.scenario.area_width_m = 100.0;
    f.scenario.area_height_m = 100.0;
    f.scenario.global_dist = {0.5, 0.5};
    f.scenario.uavs = {make_uav(0, 1e10), make_uav(1, 1e10)};
    f.scenario.devices = {
        make_device(0, 2e9, {1.0, 0.0}),
        make_device(1, 4e9, {1.0, 0.0}),
        make_device(2, 8e9, {0.0, 1.0}),
        make_device(3, 1e10, {0.0, 1.0}),
    };
    f.scenario.candidates = {{0, 1}, {0, 1}, {0, 1}, {0, 1}};
    f.profile = make_profile({{1e9, 1e6, 1e6}, {2e9, 1e5, 2e6}});
    f.rates.device_uav = {{2.0, 1.0}, {1.0, 2.0}, {3.0, 1.0}, {1.0, 3.0}};
    f.rates.sat_se = {1.0, 1.0};
    f.total_bandwidth_hz = 1e7;
    return f;
}

double bandwidth_residual(const Association& assoc, const SolverContext& ctx, const CutCosts& cc,
                          const BandwidthSolution& bw) {
    double demand = 0.0;
    for (int n = 0; n < assoc.num_devices(); ++n) {
        const double floor_s = cc.c_device / ctx.scenario->devices[n].flops;
        const double r = ctx.rates.device_uav[n][assoc.uav_of[n]];
        demand += cc.m_feat / ((bw.t_d - floor_s) * r);
    }
    return demand - ctx.total_bandwidth_hz;
}

} // namespace

TEST_CASE("single upload fills the whole budget") {
    auto f = one_device_fixture();
    auto ctx = f.ctx();
    const auto cc = cut(f.profile, 1); // compute floor 0.5 s, 1e6 bits at 1 bit/s/Hz
    auto bw = solve_bandwidth(Association({0}), ctx, cc, 1e-12);
    CHECK(bw.t_d == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(bw.l[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(bw.bandwidth_hz[0] == doctest::Approx(1e6).epsilon(1e-9));
}

TEST_CASE("two identical uploads halve the shares") {
    auto f = two_device_fixture();
    auto ctx = f.ctx();
    const auto cc = cut(f.profile, 1);
    auto bw = solve_bandwidth(Association({0, 0}), ctx, cc, 1e-12);
    CHECK(bw.t_d == doctest::Approx(2.5).epsilon(1e-9));
    CHECK(bw.l[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(bw.l[1] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(bw.bandwidth_hz[0] == doctest::Approx(1e6).epsilon(1e-9));
}

TEST_CASE("a cut without feature traffic splits the budget evenly") {
    auto f = two_device_fixture();
    f.profile = make_profile({{1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}});
    auto ctx = f.ctx();
    const auto cc = cut(f.profile, 1);
    REQUIRE(cc.m_feat == 0.0);
    auto bw = solve_bandwidth(Association({0, 0}), ctx, cc, 1e-12);
    CHECK(bw.t_d == doctest::Approx(0.5)); // pure compute floor
    CHECK(bw.bandwidth_hz[0] == doctest::Approx(1e6));
    CHECK(bw.l[0] == doctest::Approx(0.5));
}

TEST_CASE("bisection invariants hold on random instances") {
    Rng rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        const int num_devices = 1 + int(rng.uniform_index(8));
        const int num_uavs = 1 + int(rng.uniform_index(3));
        Fixture f;
        f.scenario.global_dist = {1.0};
        for (int k = 0; k < num_uavs; ++k) f.scenario.uavs.push_back(make_uav(k, 1e11));
        f.total_bandwidth_hz = rng.uniform(1e6, 5e7);
        f.profile = make_profile(
            {{rng.uniform(1e8, 2e9), rng.uniform(1e5, 1e7), 0.0}, {1e8, 1e5, 0.0}});
        std::vector<int> uav_of;
        for (int n = 0; n < num_devices; ++n) {
            f.scenario.devices.push_back(make_device(n, rng.uniform(1e9, 1e10), {1.0}));
            std::vector<double> row;
            for (int k = 0; k < num_uavs; ++k) row.push_back(rng.uniform(0.5, 20.0));
            f.rates.device_uav.push_back(row);
            std::vector<int> cands;
            for (int k = 0; k < num_uavs; ++k) cands.push_back(k);
            f.scenario.candidates.push_back(cands);
            uav_of.push_back(int(rng.uniform_index(num_uavs)));
        }
        f.rates.sat_se.assign(num_uavs, 1.0);

        auto ctx = f.ctx();
        const auto cc = cut(f.profile, 1);
        Association assoc(uav_of);
        auto bw = solve_bandwidth(assoc, ctx, cc, 1e-12);

        CHECK(std::fabs(bandwidth_residual(assoc, ctx, cc, bw)) <=
              1e-9 * ctx.total_bandwidth_hz);

        double bw_sum = 0.0;
        for (double b : bw.bandwidth_hz) bw_sum += b;
        CHECK(nearly(bw_sum, ctx.total_bandwidth_hz, 1e-9));

        std::vector<double> l_sum(num_uavs, 0.0);
        for (int n = 0; n < num_devices; ++n) {
            const int k = assoc.uav_of[n];
            l_sum[k] += bw.l[n];
            const double floor_s = cc.c_device / f.scenario.devices[n].flops;
            const double rate = bw.l[n] * bw.bandwidth_hz[k] * f.rates.device_uav[n][k];
            const double finish = floor_s + cc.m_feat / rate;
            CHECK(nearly(finish, bw.t_d, 1e-9));
            CHECK(bw.t_d > floor_s);
        }
        const auto n_k = assoc.load_counts(num_uavs);
        for (int k = 0; k < num_uavs; ++k)
            if (n_k[k] > 0) CHECK(l_sum[k] == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("demand curve is strictly decreasing") {
    auto f = two_device_fixture();
    f.scenario.devices[1].flops = 4.0;
    auto ctx = f.ctx();
    const auto cc = cut(f.profile, 1);
    Association assoc({0, 0});
    auto bw = solve_bandwidth(assoc, ctx, cc, 1e-12);
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 100; ++i) {
        BandwidthSolution probe = bw;
        probe.t_d = 0.5 + i * 0.05;
        const double g = bandwidth_residual(assoc, ctx, cc, probe);
        CHECK(g < prev);
        prev = g;
    }
}

TEST_CASE("bandwidth solver rejects bad inputs") {
    auto f = one_device_fixture();
    auto ctx = f.ctx();
    const auto cc = cut(f.profile, 1);
    CHECK_THROWS_AS(solve_bandwidth(Association({0}), ctx, cc, 0.0), ConfigError);

    auto broken = f;
    broken.rates.device_uav = {{0.0}};
    auto bctx = broken.ctx();
    CHECK_THROWS_WITH_AS(solve_bandwidth(Association({0}), bctx, cc, 1e-12),
                         doctest::Contains("device 0"), InfeasibleError);

    auto nobw = f;
    nobw.total_bandwidth_hz = 0.0;
    auto nctx = nobw.ctx();
    CHECK_THROWS_AS(solve_bandwidth(Association({0}), nctx, cc, 1e-12), ConfigError);

    auto empty = solve_bandwidth(Association(std::vector<int>{}), ctx, cc, 1e-12);
    CHECK(empty.t_d == 0.0);
    CHECK(empty.l.empty());
}

TEST_CASE("proportional shares equalize latencies and win the min-max game") {
    auto shares = allocate_proportional({2.0, 6.0}, 8.0);
    CHECK(shares[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(shares[1] == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(2.0 / shares[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(6.0 / shares[1] == doctest::Approx(1.0).epsilon(1e-12));

    // Any reshuffle of the same capacity slows the worst device down.
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> loads = {rng.uniform(0.1, 10.0), rng.uniform(0.1, 10.0),
                                     rng.uniform(0.1, 10.0)};
        const double cap = rng.uniform(1.0, 100.0);
        auto opt = allocate_proportional(loads, cap);
        double opt_worst = 0.0;
        for (size_t i = 0; i < loads.size(); ++i)
            opt_worst = std::max(opt_worst, loads[i] / opt[i]);

        std::vector<double> pert(3);
        double psum = 0.0;
        for (double& p : pert) {
            p = rng.uniform(0.01, 1.0);
            psum += p;
        }
        double pert_worst = 0.0;
        for (size_t i = 0; i < loads.size(); ++i)
            pert_worst = std::max(pert_worst, loads[i] / (pert[i] / psum * cap));
        CHECK(opt_worst <= pert_worst * (1.0 + 1e-12));
    }

    CHECK(allocate_proportional({0.0, 0.0}, 5.0) == std::vector<double>{0.0, 0.0});
    CHECK_THROWS_AS(allocate_proportional({-1.0, 2.0}, 5.0), ConfigError);
}

TEST_CASE("server shares split the uav evenly") {
    auto f = mixed_fixture();
    auto ctx = f.ctx();
    const auto cc = cut(f.profile, 1);
    auto shares = solve_compute(Association({0, 0, 0, 1}), ctx, cc);
    CHECK(shares[0] == doctest::Approx(1e10 / 3.0));
    CHECK(shares[1] == doctest::Approx(1e10 / 3.0));
    CHECK(shares[2] == doctest::Approx(1e10 / 3.0));
    CHECK(shares[3] == doctest::Approx(1e10));

    const auto full = cut(f.profile, 2); // no server-side layers remain
    auto idle = solve_compute(Association({0, 0, 0, 1}), ctx, full);
    CHECK(idle == std::vector<double>(4, 0.0));
}

TEST_CASE("association cost prices the candidates") {
    auto f = mixed_fixture();
    auto ctx = f.ctx();
    const auto cc = cut(f.profile, 1);
    Multipliers m;
    m.nu.assign(2, 0.0);
    m.lambda.assign(2, std::vector<double>(2, 0.0));
    m.mu.assign(2, std::vector<double>(2, 0.0));

    // All multipliers zero: every feasible candidate is free.
    CHECK(association_cost(0, 0, m, 1.0, 1.0, ctx, cc) == doctest::Approx(0.0));
    CHECK(association_cost(0, 1, m, 1.0, 1.0, ctx, cc) == doctest::Approx(0.0));

    // A probe below the compute floor rules the device out entirely.
    CHECK(std::isinf(association_cost(0, 0, m, 0.4, 1.0, ctx, cc)));

    // With bandwidth priced, the faster link is cheaper.
    m.psi = 1.0;
    CHECK(association_cost(0, 0, m, 1.0, 1.0, ctx, cc) <
          association_cost(0, 1, m, 1.0, 1.0, ctx, cc));

    // Heterogeneity prices cancel for a device matching the global mix.
    auto iid = f;
    iid.scenario.devices[0].label_dist = {0.5, 0.5};
    auto ictx = iid.ctx();
    Multipliers m2 = m;
    m2.psi = 0.0;
    m2.lambda[0] = {0.3, 0.1};
    m2.mu[0] = {0.05, 0.2};
    CHECK(association_cost(0, 0, m2, 1.0, 1.0, ictx, cc) == doctest::Approx(0.0));
}

TEST_CASE("first dual iteration breaks ties toward the lowest uav") {
    auto f = mixed_fixture();
    f.rates.device_uav = {{1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}};
    auto ctx = f.ctx();
    const auto cc = cut(f.profile, 1);
    OptimizerSettings s = serial_settings();
    s.dual_max_iters = 1;
    auto res = solve_association(5.0, 5.0, 1, ctx, cc, s);
    REQUIRE(res.has_value());
    CHECK(res->assoc.uav_of == std::vector<int>{0, 0, 0, 0});
}

TEST_CASE("probes that exclude every candidate yield nothing") {
    auto f = mixed_fixture();
    auto ctx = f.ctx();
    const auto cc = cut(f.profile, 1);
    auto res = solve_association(0.01, 1.0, 1, ctx, cc, serial_settings());
    CHECK_FALSE(res.has_value());
}

TEST_CASE("proxy formula at the hand-checked points") {
    auto f = mixed_fixture();
    // Two IID devices, one per UAV: the proxy collapses to K * L * (Z^2 + sigma^2)
    // independent of the split layer.
    f.scenario.devices.resize(2);
    f.scenario.candidates.resize(2);
    f.rates.device_uav.resize(2);
    f.scenario.devices[0].label_dist = {0.5, 0.5};
    f.scenario.devices[1].label_dist = {0.5, 0.5};
    auto ctx = f.ctx();
    for (int ell = 1; ell <= 2; ++ell) {
        const auto cc = cut(f.profile, ell);
        Association assoc({0, 1});
        auto ev = evaluate_objective(assoc, derive_allocation(assoc, ctx, cc), ell, ctx, cc);
        CHECK(ev.proxy == doctest::Approx(8.0).epsilon(1e-12));
    }
}

TEST_CASE("proxy grows by two when the cut moves two layers deeper") {
    Fixture f;
    f.scenario.global_dist = {0.5, 0.5};
    f.scenario.uavs = {make_uav(0, 1e10)};
    f.scenario.devices = {make_device(0, 2e9, {1.0, 0.0}), make_device(1, 2e9, {0.0, 1.0})};
    f.scenario.candidates = {{0}, {0}};
    f.profile = make_profile(
        {{1e8, 1e5, 1e5}, {1e8, 1e5, 1e5}, {1e8, 1e5, 1e5}, {1e8, 1e5, 0.0}});
    f.rates.device_uav = {{1.0}, {1.0}};
    f.rates.sat_se = {1.0};
    auto ctx = f.ctx();
    Association assoc({0, 0});
    auto ev1 = evaluate_objective(assoc, derive_allocation(assoc, ctx, cut(f.profile, 1)), 1,
                                  ctx, cut(f.profile, 1));
    auto ev3 = evaluate_objective(assoc, derive_allocation(assoc, ctx, cut(f.profile, 3)), 3,
                                  ctx, cut(f.profile, 3));
    CHECK(ev3.proxy - ev1.proxy == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("deviation magnitudes enter the proxy per uav") {
    auto f = mixed_fixture();
    auto ctx = f.ctx();
    const auto cc = cut(f.profile, 1);
    // Both label camps split across the UAVs: deviations cancel per UAV.
    Association balanced({0, 1, 0, 1});
    auto evb = evaluate_objective(balanced, derive_allocation(balanced, ctx, cc), 1, ctx, cc);
    CHECK(evb.proxy == doctest::Approx(6.0).epsilon(1e-12));
    // Camps segregated: each UAV carries total deviation 2, halved by n_k.
    Association skewed({0, 0, 1, 1});
    auto evs = evaluate_objective(skewed, derive_allocation(skewed, ctx, cc), 1, ctx, cc);
    CHECK(evs.proxy == doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("theta zero reduces the objective to latency") {
    auto f = mixed_fixture();
    f.theta = 0.0;
    auto ctx = f.ctx();
    const auto cc = cut(f.profile, 1);
    Association assoc({0, 1, 0, 1});
    auto ev = evaluate_objective(assoc, derive_allocation(assoc, ctx, cc), 1, ctx, cc);
    CHECK(ev.objective == doctest::Approx(ev.breakdown.total).epsilon(1e-15));
}

TEST_CASE("joint solve lands within two percent of the oracle") {
    auto f = mixed_fixture();
    auto ctx = f.ctx();
    auto oracle = brute_force_oracle(ctx);
    auto sol = solve_joint(ctx, serial_settings());
    CHECK(sol.objective >= oracle.objective - 1e-9);
    CHECK(sol.objective <= oracle.objective * 1.02);

    auto report = check_solution(f.scenario, f.profile, sol, f.total_bandwidth_hz, f.theta,
                                 f.z_bound, f.sigma_bound);
    for (const auto& v : report.violations) CAPTURE(v);
    CHECK(report.ok);
}

TEST_CASE("latency-only solve beats the greedy max-rate association") {
    auto f = mixed_fixture();
    f.theta = 0.0;
    auto ctx = f.ctx();
    auto sol = solve_joint(ctx, serial_settings());

    Association max_rate({0, 1, 0, 1}); // per-device argmax of the rate table
    double best = std::numeric_limits<double>::infinity();
    for (int ell = 1; ell <= 2; ++ell) {
        const auto cc = cut(f.profile, ell);
        auto ev = evaluate_objective(max_rate, derive_allocation(max_rate, ctx, cc), ell, ctx,
                                     cc);
        best = std::min(best, ev.objective);
    }
    CHECK(sol.objective <= best + 1e-9);
}

TEST_CASE("trivial instance matches the oracle exactly") {
    Fixture f;
    f.scenario.global_dist = {1.0};
    f.scenario.uavs = {make_uav(0, 1e10)};
    f.scenario.devices = {make_device(0, 2e9, {1.0})};
    f.scenario.candidates = {{0}};
    f.profile = make_profile({{1e9, 1e6, 1e6}, {2e9, 5e5, 1e6}, {1e9, 1e5, 0.0}});
    f.rates.device_uav = {{1.0}};
    f.rates.sat_se = {1.0};
    auto ctx = f.ctx();
    auto oracle = brute_force_oracle(ctx);
    auto sol = solve_joint(ctx, serial_settings());
    CHECK(sol.objective == oracle.objective);
    CHECK(sol.split_layer == oracle.split_layer);
    CHECK(sol.assoc == oracle.assoc);
}

TEST_CASE("doubling the bandwidth never hurts") {
    auto f = mixed_fixture();
    auto ctx = f.ctx();
    auto base = solve_joint(ctx, serial_settings());
    auto wide = f;
    wide.total_bandwidth_hz *= 2.0;
    auto wctx = wide.ctx();
    auto better = solve_joint(wctx, serial_settings());
    CHECK(better.objective <= base.objective + 1e-9);
}

TEST_CASE("objective history tracks the running best per layer") {
    auto f = mixed_fixture();
    auto ctx = f.ctx();
    auto sol = solve_joint(ctx, serial_settings());
    REQUIRE(sol.objective_history.size() == 2);
    CHECK(sol.objective_history[1] <= sol.objective_history[0]);
    CHECK(sol.objective_history.back() == doctest::Approx(sol.objective));

    auto oracle = brute_force_oracle(ctx);
    REQUIRE(oracle.objective_history.size() == 2);
    CHECK(oracle.objective_history.back() == doctest::Approx(oracle.objective));
}

TEST_CASE("serial and parallel sweeps agree bitwise") {
    auto f = mixed_fixture();
    auto ctx = f.ctx();
    auto serial = solve_joint(ctx, serial_settings());
    OptimizerSettings par = serial_settings();
    par.num_threads = 4;
    auto parallel = solve_joint(ctx, par);
    CHECK(serial.objective == parallel.objective);
    CHECK(serial.split_layer == parallel.split_layer);
    CHECK(serial.assoc == parallel.assoc);
    CHECK(serial.alloc.l == parallel.alloc.l);
    CHECK(serial.alloc.bandwidth_hz == parallel.alloc.bandwidth_hz);
    CHECK(serial.objective_history == parallel.objective_history);
}

TEST_CASE("a pinned layer is respected") {
    auto f = mixed_fixture();
    auto ctx = f.ctx();
    OptimizerSettings s = serial_settings();
    s.fixed_layer = 2;
    auto sol = solve_joint(ctx, s);
    CHECK(sol.split_layer == 2);
    CHECK(sol.objective_history.size() == 1);

    s.fixed_layer = 9;
    CHECK_THROWS_AS(solve_joint(ctx, s), ConfigError);
}

TEST_CASE("oracle refuses oversized instances") {
    Fixture f;
    f.scenario.global_dist = {1.0};
    for (int k = 0; k < 3; ++k) f.scenario.uavs.push_back(make_uav(k, 1e10));
    for (int n = 0; n < 20; ++n) {
        f.scenario.devices.push_back(make_device(n, 1e9, {1.0}));
        f.scenario.candidates.push_back({0, 1, 2});
        f.rates.device_uav.push_back({1.0, 1.0, 1.0});
    }
    f.rates.sat_se = {1.0, 1.0, 1.0};
    f.profile = make_profile({{1e8, 1e5, 0.0}, {1e8, 1e5, 0.0}});
    auto ctx = f.ctx();
    CHECK_THROWS_WITH_AS(brute_force_oracle(ctx), doctest::Contains("1e6"), ConfigError);
}

TEST_CASE("settings parse and validate") {
    auto cfg = Config::parse_string("[optimizer]\nsweep_steps = 10\nthreads = 2\n");
    auto s = OptimizerSettings::from_config(cfg);
    CHECK(s.sweep_steps == 10);
    CHECK(s.num_threads == 2);
    auto bad = Config::parse_string("[optimizer]\nsweep_steps = 0\n");
    CHECK_THROWS_AS(OptimizerSettings::from_config(bad), ConfigError);
}

TEST_CASE("report prints the decision") {
    auto f = mixed_fixture();
    auto ctx = f.ctx();
    auto sol = solve_joint(ctx, serial_settings());
    const std::string r = sol.report();
    CHECK(r.find("split_layer") != std::string::npos);
    CHECK(r.find("objective") != std::string::npos);
    CHECK(r.find("association") != std::string::npos);
}
