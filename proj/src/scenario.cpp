#include "sflsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "sflsim/rng.hpp"
#include "sflsim/text.hpp"

namespace sflsim {

namespace {

double hypot2(double dx, double dy) { return std::sqrt(dx * dx + dy * dy); }

std::string fmt(double v) { return format_double(v); }

} // namespace

ScenarioConfig ScenarioConfig::from_config(const Config& cfg) {
    ScenarioConfig sc;
    sc.num_devices = static_cast<int>(cfg.get_int_or("scenario", "devices", sc.num_devices));
    sc.num_uavs = static_cast<int>(cfg.get_int_or("scenario", "uavs", sc.num_uavs));
    sc.area_width_m = cfg.get_double_or("scenario", "area_width_m", sc.area_width_m);
    sc.area_height_m = cfg.get_double_or("scenario", "area_height_m", sc.area_height_m);
    sc.coverage_radius_m = cfg.get_double_or("scenario", "coverage_radius_m", sc.coverage_radius_m);
    sc.uav_altitude_m = cfg.get_double_or("scenario", "uav_altitude_m", sc.uav_altitude_m);
    sc.device_flops_min = cfg.get_double_or("scenario", "device_flops_min", sc.device_flops_min);
    sc.device_flops_max = cfg.get_double_or("scenario", "device_flops_max", sc.device_flops_max);
    sc.uav_flops = cfg.get_double_or("scenario", "uav_flops", sc.uav_flops);
    sc.device_tx_power_dbm =
        cfg.get_double_or("scenario", "device_tx_power_dbm", sc.device_tx_power_dbm);
    sc.uav_tx_power_dbm = cfg.get_double_or("scenario", "uav_tx_power_dbm", sc.uav_tx_power_dbm);
    sc.num_classes = static_cast<int>(cfg.get_int_or("scenario", "classes", sc.num_classes));
    sc.classes_per_device =
        static_cast<int>(cfg.get_int_or("scenario", "classes_per_device", sc.classes_per_device));
    const std::string scheme = cfg.get_string_or("scenario", "label_scheme", "shard");
    if (scheme == "shard") {
        sc.label_scheme = LabelScheme::Shard;
    } else if (scheme == "dirichlet") {
        sc.label_scheme = LabelScheme::Dirichlet;
    } else {
        throw ConfigError("scenario.label_scheme must be 'shard' or 'dirichlet', got '" + scheme +
                          "'");
    }
    sc.dirichlet_alpha = cfg.get_double_or("scenario", "dirichlet_alpha", sc.dirichlet_alpha);
    if (sc.num_devices < 1) throw ConfigError("scenario.devices must be at least 1");
    if (sc.num_uavs < 1) throw ConfigError("scenario.uavs must be at least 1");
    if (sc.num_classes < 1) throw ConfigError("scenario.classes must be at least 1");
    if (sc.classes_per_device < 1 || sc.classes_per_device > sc.num_classes)
        throw ConfigError("scenario.classes_per_device must lie in [1, classes]");
    return sc;
}

LabelAssignment assign_label_distributions(int num_devices, int n_classes, int classes_per_device,
                                           LabelScheme scheme, double dirichlet_alpha,
                                           std::uint64_t seed) {
    if (n_classes < 1) throw ConfigError("label distributions need at least one class");
    if (classes_per_device < 1 || classes_per_device > n_classes)
        throw ConfigError("classes_per_device must be in [1, " + std::to_string(n_classes) +
                          "], got " + std::to_string(classes_per_device));

    Rng rng(seed);
    LabelAssignment out;
    out.per_device.resize(num_devices);
    for (int n = 0; n < num_devices; ++n) {
        std::vector<double>& p = out.per_device[n];
        p.assign(n_classes, 0.0);
        if (scheme == LabelScheme::Shard) {
            // A random subset of classes, each with equal mass.
            std::vector<int> classes(n_classes);
            std::iota(classes.begin(), classes.end(), 0);
            rng.shuffle(classes);
            for (int i = 0; i < classes_per_device; ++i)
                p[classes[i]] = 1.0 / classes_per_device;
        } else {
            p = rng.dirichlet(static_cast<std::size_t>(n_classes), dirichlet_alpha);
        }
    }
    // Equal per-device data sizes, so the global mix is the plain mean.
    out.global.assign(n_classes, 0.0);
    for (const auto& p : out.per_device)
        for (int c = 0; c < n_classes; ++c) out.global[c] += p[c];
    if (num_devices > 0)
        for (auto& v : out.global) v /= num_devices;
    return out;
}

Scenario generate_scenario(const ScenarioConfig& config, std::uint64_t seed) {
    if (config.num_devices < 1 || config.num_uavs < 1)
        throw ConfigError("scenario needs at least one device and one UAV");
    if (config.coverage_radius_m <= 0 || config.uav_altitude_m <= 0)
        throw ConfigError("coverage radius and UAV altitude must be positive");

    Scenario s;
    s.seed = seed;
    s.area_width_m = config.area_width_m;
    s.area_height_m = config.area_height_m;

    // UAVs on a near-square grid over the target area; only the devices are
    // placed at random. A grid keeps coverage even.
    const int k = config.num_uavs;
    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(k))));
    const int rows = (k + cols - 1) / cols;
    for (int i = 0; i < k; ++i) {
        UavSpec u;
        u.id = i;
        const int r = i / cols;
        const int c = i % cols;
        u.x_m = (c + 0.5) * config.area_width_m / cols;
        u.y_m = (r + 0.5) * config.area_height_m / rows;
        u.z_m = config.uav_altitude_m;
        u.flops = config.uav_flops;
        u.tx_power_dbm = config.uav_tx_power_dbm;
        u.coverage_radius_m = config.coverage_radius_m;
        s.uavs.push_back(u);
    }

    Rng rng(seed);
    for (int n = 0; n < config.num_devices; ++n) {
        DeviceSpec d;
        d.id = n;
        d.x_m = rng.uniform(0.0, config.area_width_m);
        d.y_m = rng.uniform(0.0, config.area_height_m);
        d.flops = rng.uniform(config.device_flops_min, config.device_flops_max);
        d.tx_power_dbm = config.device_tx_power_dbm;
        s.devices.push_back(d);
    }

    // Label distributions come from a decoupled stream so that changing
    // the geometry draw count cannot shift them.
    LabelAssignment labels =
        assign_label_distributions(config.num_devices, config.num_classes,
                                   config.classes_per_device, config.label_scheme,
                                   config.dirichlet_alpha, seed ^ 0x9e3779b97f4a7c15ULL);
    for (int n = 0; n < config.num_devices; ++n)
        s.devices[n].label_dist = std::move(labels.per_device[n]);
    s.global_dist = std::move(labels.global);

    s.candidates.resize(config.num_devices);
    for (int n = 0; n < config.num_devices; ++n) {
        for (int j = 0; j < k; ++j) {
            const double dist =
                hypot2(s.devices[n].x_m - s.uavs[j].x_m, s.devices[n].y_m - s.uavs[j].y_m);
            if (dist <= config.coverage_radius_m) s.candidates[n].push_back(j);
        }
        if (s.candidates[n].empty())
            throw InfeasibleError("device " + std::to_string(n) +
                                  " is outside every UAV's coverage radius; enlarge the radius "
                                  "or re-seed");
    }
    return s;
}

std::vector<std::vector<double>> heterogeneity_of(const Association& assoc,
                                                  const Scenario& scenario) {
    const int num_uavs = scenario.num_uavs();
    const int n_classes = scenario.num_classes();
    std::vector<std::vector<double>> q(num_uavs, std::vector<double>(n_classes, 0.0));
    for (int n = 0; n < scenario.num_devices(); ++n) {
        const int k = assoc.uav_of[n];
        for (int c = 0; c < n_classes; ++c)
            q[k][c] += scenario.devices[n].label_dist[c] - scenario.global_dist[c];
    }
    for (auto& row : q)
        for (auto& v : row) v = std::fabs(v);
    return q;
}

std::string save_scenario(const Scenario& s) {
    std::ostringstream out;
    out << "sflsim-scenario v1\n";
    out << "seed " << s.seed << "\n";
    out << "area " << fmt(s.area_width_m) << " " << fmt(s.area_height_m) << "\n";
    out << "classes " << s.num_classes() << "\n";
    out << "global";
    for (const double v : s.global_dist) out << " " << fmt(v);
    out << "\n";
    out << "uavs " << s.num_uavs() << "\n";
    for (const auto& u : s.uavs) {
        out << "uav " << u.id << " " << fmt(u.x_m) << " " << fmt(u.y_m) << " " << fmt(u.z_m) << " "
            << fmt(u.flops) << " " << fmt(u.tx_power_dbm) << " " << fmt(u.coverage_radius_m)
            << "\n";
    }
    out << "devices " << s.num_devices() << "\n";
    for (const auto& d : s.devices) {
        out << "device " << d.id << " " << fmt(d.x_m) << " " << fmt(d.y_m) << " " << fmt(d.flops)
            << " " << fmt(d.tx_power_dbm);
        for (const double v : d.label_dist) out << " " << fmt(v);
        out << "\n";
    }
    for (std::size_t n = 0; n < s.candidates.size(); ++n) {
        out << "cand " << n;
        for (const int k : s.candidates[n]) out << " " << k;
        out << "\n";
    }
    return out.str();
}

Scenario load_scenario(const std::string& text) {
    std::istringstream in(text);
    std::string magic, version;
    in >> magic >> version;
    if (magic != "sflsim-scenario" || version != "v1")
        throw ConfigError("not a sflsim scenario snapshot (header '" + magic + " " + version +
                          "')");
    Scenario s;
    std::string tag;
    int n_classes = 0;
    while (in >> tag) {
        if (tag == "seed") {
            in >> s.seed;
        } else if (tag == "area") {
            in >> s.area_width_m >> s.area_height_m;
        } else if (tag == "classes") {
            in >> n_classes;
        } else if (tag == "global") {
            s.global_dist.resize(n_classes);
            for (auto& v : s.global_dist) in >> v;
        } else if (tag == "uavs") {
            int count = 0;
            in >> count;
            s.uavs.reserve(count);
        } else if (tag == "uav") {
            UavSpec u;
            in >> u.id >> u.x_m >> u.y_m >> u.z_m >> u.flops >> u.tx_power_dbm >>
                u.coverage_radius_m;
            s.uavs.push_back(u);
        } else if (tag == "devices") {
            int count = 0;
            in >> count;
            s.devices.reserve(count);
            s.candidates.resize(count);
        } else if (tag == "device") {
            DeviceSpec d;
            in >> d.id >> d.x_m >> d.y_m >> d.flops >> d.tx_power_dbm;
            d.label_dist.resize(n_classes);
            for (auto& v : d.label_dist) in >> v;
            s.devices.push_back(d);
        } else if (tag == "cand") {
            std::size_t n = 0;
            in >> n;
            if (n >= s.candidates.size()) throw ConfigError("snapshot: candidate row out of range");
            std::string rest;
            std::getline(in, rest);
            std::istringstream row(rest);
            int k;
            while (row >> k) s.candidates[n].push_back(k);
        } else {
            throw ConfigError("snapshot: unknown record '" + tag + "'");
        }
        if (!in && !in.eof()) throw ConfigError("snapshot: malformed record near '" + tag + "'");
    }
    return s;
}

} // namespace sflsim
