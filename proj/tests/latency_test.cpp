#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "sflsim/errors.hpp"
#include "sflsim/latency.hpp"
#include "test_helpers.hpp"

using namespace sflsim;
using namespace sflsim::testing;

TEST_CASE("stages add up in the single-device walkthrough") {
    auto f = one_device_fixture(); // device flops 2
    Association assoc({0});
    Allocation alloc{{1.0}, {1.0}, {1.0}};
    CutCosts c{1.0, 0.3, 1.0, 0.2};
    auto b = stage_latencies(f.scenario, assoc, alloc, c, f.rates, 0, 0.5);
    CHECK(b.t_d == doctest::Approx(1.5).epsilon(1e-12));  // 1/2 compute + 1/1 upload
    CHECK(b.t_u == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(b.t_s == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(b.handover == 0.0);
    CHECK(b.total == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("device stage is the slowest straggler") {
    auto f = two_device_fixture();
    f.scenario.devices[0].flops = 1.0 / 1.2;
    f.scenario.devices[1].flops = 1.0 / 0.8;
    Association assoc({0, 0});
    Allocation alloc{{0.5, 0.5}, {0.0, 0.0}, {1.0}};
    CutCosts c{1.0, 0.0, 0.0, 0.0};
    auto b = stage_latencies(f.scenario, assoc, alloc, c, f.rates, 0, 0.5);
    CHECK(b.device_time[0] == doctest::Approx(1.2).epsilon(1e-12));
    CHECK(b.device_time[1] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(b.t_d == doctest::Approx(1.2).epsilon(1e-12));
    CHECK(b.total == doctest::Approx(1.2).epsilon(1e-12));
}

TEST_CASE("full split silences the server and satellite stages") {
    auto f = one_device_fixture();
    Association assoc({0});
    CutCosts c{1.0, 0.0, 1.0, 0.0};
    Allocation small{{1.0}, {0.0}, {1.0}};
    auto b1 = stage_latencies(f.scenario, assoc, small, c, f.rates, 0, 0.5);
    Allocation big{{1.0}, {123.0}, {1.0}};
    auto b2 = stage_latencies(f.scenario, assoc, big, c, f.rates, 0, 0.5);
    CHECK(b1.t_u == 0.0);
    CHECK(b1.t_s == 0.0);
    CHECK(b1.total == doctest::Approx(b2.total).epsilon(1e-15));
}

TEST_CASE("missing uplink or share is an error naming the device") {
    auto f = one_device_fixture();
    Association assoc({0});
    CutCosts c{1.0, 0.3, 1.0, 0.0};

    Allocation no_bw{{0.0}, {1.0}, {1.0}};
    CHECK_THROWS_WITH_AS(stage_latencies(f.scenario, assoc, no_bw, c, f.rates, 0, 0.5),
                         doctest::Contains("device 0"), InfeasibleError);

    Allocation no_share{{1.0}, {0.0}, {1.0}};
    CHECK_THROWS_WITH_AS(stage_latencies(f.scenario, assoc, no_share, c, f.rates, 0, 0.5),
                         doctest::Contains("compute share"), InfeasibleError);
}

TEST_CASE("idle uavs skip the sub-model upload") {
    auto f = two_device_fixture();
    f.scenario.uavs.push_back(make_uav(1, 1.0));
    f.scenario.candidates = {{0, 1}, {0, 1}};
    f.rates.device_uav = {{1.0, 1.0}, {1.0, 1.0}};
    f.rates.sat_se = {1.0, 0.0}; // UAV 1 has no satellite link but is empty
    Association assoc({0, 0});
    Allocation alloc{{0.5, 0.5}, {0.5, 0.5}, {1.0, 1.0}};
    CutCosts c{1.0, 0.5, 1.0, 3.0};
    auto b = stage_latencies(f.scenario, assoc, alloc, c, f.rates, 0, 0.5);
    CHECK(b.sat_time[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(b.sat_time[1] == 0.0);
    CHECK(b.t_s == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("satellite upload without a rate is an error naming the uav") {
    auto f = one_device_fixture();
    f.rates.sat_se = {0.0};
    Association assoc({0});
    Allocation alloc{{1.0}, {1.0}, {1.0}};
    CutCosts c{1.0, 0.0, 0.0, 2.0};
    CHECK_THROWS_WITH_AS(stage_latencies(f.scenario, assoc, alloc, c, f.rates, 0, 0.5),
                         doctest::Contains("UAV 0"), InfeasibleError);
}

TEST_CASE("handover time accumulates per switch") {
    auto f = one_device_fixture();
    Association assoc({0});
    Allocation alloc{{1.0}, {1.0}, {1.0}};
    CutCosts c{1.0, 0.0, 0.0, 0.0};
    auto b = stage_latencies(f.scenario, assoc, alloc, c, f.rates, 3, 0.5);
    CHECK(b.handover == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(b.total == doctest::Approx(0.5 + 1.5).epsilon(1e-12));
}

TEST_CASE("more bandwidth never slows a device down") {
    auto f = one_device_fixture();
    Association assoc({0});
    CutCosts c{1.0, 0.0, 1.0, 0.0};
    Allocation base{{1.0}, {0.0}, {1.0}};
    Allocation wider{{1.0}, {0.0}, {2.0}};
    auto b1 = stage_latencies(f.scenario, assoc, base, c, f.rates, 0, 0.5);
    auto b2 = stage_latencies(f.scenario, assoc, wider, c, f.rates, 0, 0.5);
    CHECK(b2.total <= b1.total);
}

TEST_CASE("csv row carries the five stages") {
    auto f = one_device_fixture();
    Association assoc({0});
    Allocation alloc{{1.0}, {1.0}, {1.0}};
    CutCosts c{1.0, 0.3, 1.0, 0.2};
    auto b = stage_latencies(f.scenario, assoc, alloc, c, f.rates, 0, 0.5);
    CHECK(latency_csv_header() == "t_d,t_u,t_s,handover,T");
    const std::string row = latency_csv_row(b);
    CHECK(row.find("1.5") != std::string::npos);
    CHECK(std::count(row.begin(), row.end(), ',') == 4);
}
