#include <doctest.h>

#include <cmath>
#include <set>

#include "sflsim/errors.hpp"
#include "sflsim/scenario.hpp"

using namespace sflsim;

namespace {

ScenarioConfig small_config() {
    ScenarioConfig c;
    c.num_devices = 12;
    c.num_uavs = 4;
    return c;
}

} // namespace

TEST_CASE("uavs sit on a uniform grid") {
    auto s = generate_scenario(small_config(), 1);
    REQUIRE(s.num_uavs() == 4);
    CHECK(s.uavs[0].x_m == doctest::Approx(500.0));
    CHECK(s.uavs[0].y_m == doctest::Approx(500.0));
    CHECK(s.uavs[1].x_m == doctest::Approx(1500.0));
    CHECK(s.uavs[1].y_m == doctest::Approx(500.0));
    CHECK(s.uavs[2].x_m == doctest::Approx(500.0));
    CHECK(s.uavs[2].y_m == doctest::Approx(1500.0));
    CHECK(s.uavs[3].x_m == doctest::Approx(1500.0));
    CHECK(s.uavs[3].y_m == doctest::Approx(1500.0));
    for (const auto& u : s.uavs) CHECK(u.z_m == doctest::Approx(500.0));

    auto cfg2 = small_config();
    cfg2.num_uavs = 2;
    auto s2 = generate_scenario(cfg2, 1);
    CHECK(s2.uavs[0].x_m == doctest::Approx(500.0));
    CHECK(s2.uavs[0].y_m == doctest::Approx(1000.0));
    CHECK(s2.uavs[1].x_m == doctest::Approx(1500.0));
    CHECK(s2.uavs[1].y_m == doctest::Approx(1000.0));
}

TEST_CASE("devices stay in the area and candidates match the radius") {
    auto s = generate_scenario(small_config(), 3);
    REQUIRE(s.num_devices() == 12);
    for (int n = 0; n < s.num_devices(); ++n) {
        const auto& d = s.devices[n];
        CHECK(d.x_m >= 0.0);
        CHECK(d.x_m <= s.area_width_m);
        CHECK(d.y_m >= 0.0);
        CHECK(d.y_m <= s.area_height_m);
        CHECK(d.flops >= 5e9);
        CHECK(d.flops <= 2e10);

        std::vector<int> expected;
        for (int k = 0; k < s.num_uavs(); ++k) {
            const double dist = std::hypot(d.x_m - s.uavs[k].x_m, d.y_m - s.uavs[k].y_m);
            if (dist <= s.uavs[k].coverage_radius_m) expected.push_back(k);
        }
        CHECK(s.candidates[n] == expected);
        CHECK_FALSE(s.candidates[n].empty());
    }
}

TEST_CASE("shard scheme gives each device its class quota") {
    auto la = assign_label_distributions(20, 10, 4, LabelScheme::Shard, 0.5, 5);
    REQUIRE(la.per_device.size() == 20);
    for (const auto& dist : la.per_device) {
        REQUIRE(dist.size() == 10);
        int nonzero = 0;
        double sum = 0.0;
        for (double p : dist) {
            sum += p;
            if (p != 0.0) {
                ++nonzero;
                CHECK(p == doctest::Approx(0.25));
            }
        }
        CHECK(nonzero == 4);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
    double gsum = 0.0;
    for (double p : la.global) gsum += p;
    CHECK(gsum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("shard deviation from uniform equals 1.2 exactly") {
    // 4 classes of 10 at share 1/4 each: 4*(1/4 - 1/10) + 6*(1/10) = 1.2.
    auto la = assign_label_distributions(50, 10, 4, LabelScheme::Shard, 0.5, 1);
    for (const auto& dist : la.per_device) {
        double dev = 0.0;
        for (double p : dist) dev += std::fabs(p - 0.1);
        CHECK(std::fabs(dev - 1.2) <= 1e-12);
    }
}

TEST_CASE("dirichlet scheme yields simplex rows") {
    auto la = assign_label_distributions(15, 6, 3, LabelScheme::Dirichlet, 0.5, 9);
    for (const auto& dist : la.per_device) {
        REQUIRE(dist.size() == 6);
        double sum = 0.0;
        for (double p : dist) {
            CHECK(p >= 0.0);
            sum += p;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("global distribution is the device mean") {
    auto s = generate_scenario(small_config(), 7);
    for (int c = 0; c < s.num_classes(); ++c) {
        double mean = 0.0;
        for (const auto& d : s.devices) mean += d.label_dist[c];
        mean /= s.num_devices();
        CHECK(s.global_dist[c] == doctest::Approx(mean).epsilon(1e-12));
    }
}

TEST_CASE("heterogeneity magnitudes add and cancel") {
    Scenario s;
    s.global_dist = {0.5, 0.5};
    s.uavs = {UavSpec{0}, UavSpec{1}};
    DeviceSpec d0;
    d0.id = 0;
    d0.label_dist = {1.0, 0.0};
    DeviceSpec d1;
    d1.id = 1;
    d1.label_dist = {0.0, 1.0};
    s.devices = {d0, d1};
    s.candidates = {{0, 1}, {0, 1}};

    Association split;
    split.uav_of = {0, 1};
    auto q = heterogeneity_of(split, s);
    CHECK(q[0][0] == doctest::Approx(0.5));
    CHECK(q[0][1] == doctest::Approx(0.5));
    CHECK(q[1][0] == doctest::Approx(0.5));
    CHECK(q[1][1] == doctest::Approx(0.5));

    Association together;
    together.uav_of = {0, 0};
    q = heterogeneity_of(together, s);
    CHECK(q[0][0] == doctest::Approx(0.0));
    CHECK(q[0][1] == doctest::Approx(0.0));
    CHECK(q[1][0] == doctest::Approx(0.0));
    CHECK(q[1][1] == doctest::Approx(0.0));
}

TEST_CASE("snapshot round-trips bit for bit") {
    auto s = generate_scenario(small_config(), 11);
    const std::string text = save_scenario(s);
    auto back = load_scenario(text);
    CHECK(save_scenario(back) == text);
    CHECK(back.num_devices() == s.num_devices());
    CHECK(back.devices[3].x_m == s.devices[3].x_m);
    CHECK(back.devices[3].label_dist == s.devices[3].label_dist);
    CHECK(back.candidates == s.candidates);
    CHECK(back.uavs[2].flops == s.uavs[2].flops);
}

TEST_CASE("snapshot parser rejects junk") {
    CHECK_THROWS_AS(load_scenario("not a scenario\n"), ConfigError);
    auto s = generate_scenario(small_config(), 2);
    auto text = save_scenario(s);
    CHECK_THROWS_AS(load_scenario(text + "mystery 1 2 3\n"), ConfigError);
}

TEST_CASE("generation is seed deterministic") {
    auto a = generate_scenario(small_config(), 21);
    auto b = generate_scenario(small_config(), 21);
    auto c = generate_scenario(small_config(), 22);
    CHECK(save_scenario(a) == save_scenario(b));
    CHECK(save_scenario(a) != save_scenario(c));
}

TEST_CASE("a device outside all coverage is an error naming it") {
    auto cfg = small_config();
    cfg.coverage_radius_m = 0.001;
    CHECK_THROWS_WITH_AS(generate_scenario(cfg, 1), doctest::Contains("device"), InfeasibleError);
}

TEST_CASE("scenario config parses and validates") {
    auto ini = Config::parse_string(
        "[scenario]\n"
        "devices = 8\nuavs = 2\nclasses = 6\nclasses_per_device = 2\n"
        "label_scheme = dirichlet\ndirichlet_alpha = 0.3\n");
    auto sc = ScenarioConfig::from_config(ini);
    CHECK(sc.num_devices == 8);
    CHECK(sc.num_uavs == 2);
    CHECK(sc.label_scheme == LabelScheme::Dirichlet);
    CHECK(sc.dirichlet_alpha == doctest::Approx(0.3));

    auto bad_scheme = Config::parse_string("[scenario]\nlabel_scheme = sorted\n");
    CHECK_THROWS_WITH_AS(ScenarioConfig::from_config(bad_scheme),
                         doctest::Contains("label_scheme"), ConfigError);
    auto bad_devices = Config::parse_string("[scenario]\ndevices = 0\n");
    CHECK_THROWS_AS(ScenarioConfig::from_config(bad_devices), ConfigError);
    auto bad_quota = Config::parse_string("[scenario]\nclasses = 4\nclasses_per_device = 5\n");
    CHECK_THROWS_AS(ScenarioConfig::from_config(bad_quota), ConfigError);
}
