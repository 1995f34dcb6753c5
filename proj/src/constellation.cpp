#include "sflsim/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sflsim/errors.hpp"
#include "sflsim/units.hpp"

namespace sflsim {

namespace {

constexpr double kMuEarth = 3.986004418e14;     // m^3/s^2
constexpr double kSiderealRate = 7.2921150e-5;  // rad/s

Vec3 sub(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

Vec3 rot_z(const Vec3& v, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
}

Vec3 rot_x(const Vec3& v, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {v.x, c * v.y - s * v.z, s * v.y + c * v.z};
}

} // namespace

ConstellationConfig ConstellationConfig::from_config(const Config& cfg) {
    ConstellationConfig c;
    c.planes = static_cast<int>(cfg.get_int_or("constellation", "planes", c.planes));
    c.sats_per_plane =
        static_cast<int>(cfg.get_int_or("constellation", "sats_per_plane", c.sats_per_plane));
    c.altitude_m = cfg.get_double_or("constellation", "altitude_m", c.altitude_m);
    c.inclination_deg = cfg.get_double_or("constellation", "inclination_deg", c.inclination_deg);
    c.min_elevation_deg =
        cfg.get_double_or("constellation", "min_elevation_deg", c.min_elevation_deg);
    c.earth_radius_m = cfg.get_double_or("constellation", "earth_radius_m", c.earth_radius_m);
    c.switching_time_s = cfg.get_double_or("constellation", "switching_time_s", c.switching_time_s);
    c.phasing_factor =
        static_cast<int>(cfg.get_int_or("constellation", "phasing_factor", c.phasing_factor));
    if (c.planes < 1 || c.sats_per_plane < 1)
        throw ConfigError("constellation needs at least one satellite");
    if (c.altitude_m <= 0) throw ConfigError("constellation.altitude_m must be positive");
    if (c.min_elevation_deg <= -90 || c.min_elevation_deg >= 90)
        throw ConfigError("constellation.min_elevation_deg must lie in (-90, 90)");
    return c;
}

GroundTarget GroundTarget::from_config(const Config& cfg) {
    GroundTarget t;
    t.latitude_deg = cfg.get_double_or("constellation", "target_latitude_deg", t.latitude_deg);
    t.longitude_deg = cfg.get_double_or("constellation", "target_longitude_deg", t.longitude_deg);
    if (std::fabs(t.latitude_deg) > 90 || std::fabs(t.longitude_deg) > 180)
        throw ConfigError("constellation target latitude/longitude out of range");
    return t;
}

double ConstellationConfig::orbital_period_s() const {
    const double a = orbit_radius_m();
    return 2.0 * std::numbers::pi * std::sqrt(a * a * a / kMuEarth);
}

std::vector<Vec3> propagate(const ConstellationConfig& config, double t_s) {
    const double a = config.orbit_radius_m();
    const double mean_motion = std::sqrt(kMuEarth / (a * a * a));
    const double incl = deg_to_rad(config.inclination_deg);
    const int total = config.num_sats();
    std::vector<Vec3> out;
    out.reserve(total);
    for (int p = 0; p < config.planes; ++p) {
        // Star pattern: ascending nodes spread over a half circle.
        const double raan = deg_to_rad(180.0 * p / config.planes);
        for (int j = 0; j < config.sats_per_plane; ++j) {
            const double anomaly0 =
                2.0 * std::numbers::pi *
                (static_cast<double>(j) / config.sats_per_plane +
                 static_cast<double>(config.phasing_factor) * p / total);
            const double th = anomaly0 + mean_motion * t_s;
            Vec3 orb{a * std::cos(th), a * std::sin(th), 0.0};
            Vec3 eci = rot_z(rot_x(orb, incl), raan);
            out.push_back(rot_z(eci, -kSiderealRate * t_s));
        }
    }
    return out;
}

Vec3 target_ecef(const GroundTarget& target, double earth_radius_m) {
    const double lat = deg_to_rad(target.latitude_deg);
    const double lon = deg_to_rad(target.longitude_deg);
    return {earth_radius_m * std::cos(lat) * std::cos(lon),
            earth_radius_m * std::cos(lat) * std::sin(lon), earth_radius_m * std::sin(lat)};
}

double elevation_deg(const Vec3& sat_pos_ecef, const GroundTarget& target,
                     double earth_radius_m) {
    const Vec3 tgt = target_ecef(target, earth_radius_m);
    const Vec3 d = sub(sat_pos_ecef, tgt);
    const double dn = norm(d);
    const double sine = dot(tgt, d) / (earth_radius_m * dn);
    return rad_to_deg(std::asin(std::clamp(sine, -1.0, 1.0)));
}

double sat_target_distance_m(const Vec3& sat_pos_ecef, const GroundTarget& target,
                             double earth_radius_m) {
    return norm(sub(sat_pos_ecef, target_ecef(target, earth_radius_m)));
}

namespace {

double elevation_at(const ConstellationConfig& config, const GroundTarget& target, int sat,
                    double t) {
    return elevation_deg(propagate(config, t)[sat], target, config.earth_radius_m);
}

// Locates the crossing of (elevation - mask) inside (lo, hi) to +-0.1 s.
double refine_crossing(const ConstellationConfig& config, const GroundTarget& target, int sat,
                       double lo, double hi, bool rising) {
    const double mask = config.min_elevation_deg;
    while (hi - lo > 0.2) {
        const double mid = 0.5 * (lo + hi);
        const bool above = elevation_at(config, target, sat, mid) >= mask;
        if (above == rising)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

AccessSchedule access_intervals(const ConstellationConfig& config, const GroundTarget& target,
                                double horizon_s, double step_s) {
    if (step_s <= 0) throw ConfigError("access_intervals step must be positive");
    AccessSchedule sched;
    sched.horizon_s = horizon_s;
    const double mask = config.min_elevation_deg;
    const int total = config.num_sats();

    std::vector<double> grid;
    for (double t = 0.0; t < horizon_s; t += step_s) grid.push_back(t);
    grid.push_back(horizon_s);

    std::vector<std::vector<char>> above(total, std::vector<char>(grid.size()));
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        const auto pos = propagate(config, grid[gi]);
        for (int s = 0; s < total; ++s)
            above[s][gi] = elevation_deg(pos[s], target, config.earth_radius_m) >= mask;
    }

    for (int s = 0; s < total; ++s) {
        double start = -1.0;
        for (std::size_t gi = 0; gi < grid.size(); ++gi) {
            const bool now = above[s][gi];
            const bool prev = gi > 0 && above[s][gi - 1];
            if (now && !prev)
                start = gi == 0 ? 0.0
                                : refine_crossing(config, target, s, grid[gi - 1], grid[gi], true);
            if (!now && prev) {
                const double end = refine_crossing(config, target, s, grid[gi - 1], grid[gi],
                                                   false);
                sched.intervals.push_back({s, start, end});
                start = -1.0;
            }
        }
        if (start >= 0.0) sched.intervals.push_back({s, start, horizon_s});
    }
    std::sort(sched.intervals.begin(), sched.intervals.end(),
              [](const AccessInterval& a, const AccessInterval& b) {
                  return a.sat_id != b.sat_id ? a.sat_id < b.sat_id : a.start_s < b.start_s;
              });
    return sched;
}

namespace {

// Remaining service time of sat at time t, or -1 if not inside an interval.
double remaining_service(const AccessSchedule& sched, int sat, double t) {
    for (const auto& iv : sched.intervals)
        if (iv.sat_id == sat && iv.start_s <= t && t < iv.end_s) return iv.end_s - t;
    return -1.0;
}

// Preference classes for migration targets relative to the current
// satellite: in-plane neighbours first, then neighbouring planes, then
// anyone. Within a class the highest satellite wins, ties to lowest id.
int adjacency_class(const ConstellationConfig& config, int current, int candidate) {
    if (current < 0) return 2;
    const int s = config.sats_per_plane;
    const int cp = current / s, ci = current % s;
    const int qp = candidate / s, qi = candidate % s;
    if (qp == cp && (qi == (ci + 1) % s || (qi + 1) % s == ci)) return 0;
    if (qp == cp + 1 || qp == cp - 1) return 1;
    return 2;
}

} // namespace

RoundPlan schedule_rounds(const ConstellationConfig& config, const GroundTarget& target,
                          const AccessSchedule& schedule, double round_latency_s, int rounds) {
    if (round_latency_s <= 0) throw ConfigError("schedule_rounds needs a positive round latency");
    RoundPlan plan;
    plan.sat_of_round.reserve(rounds);
    int current = -1;
    double t = 0.0;
    for (int r = 0; r < rounds; ++r) {
        if (current >= 0 && remaining_service(schedule, current, t) >= round_latency_s) {
            plan.sat_of_round.push_back(current);
            t += round_latency_s;
            continue;
        }
        // A migration spends the switching time first, so candidates are
        // judged by what they can still serve after it.
        const double t_eff = current >= 0 ? t + config.switching_time_s : t;
        const auto pos = propagate(config, t_eff);
        int best = -1, best_class = 3;
        double best_elev = -1e9;
        for (int s = 0; s < config.num_sats(); ++s) {
            if (remaining_service(schedule, s, t_eff) < round_latency_s) continue;
            const int cls = adjacency_class(config, current, s);
            const double elev = elevation_deg(pos[s], target, config.earth_radius_m);
            if (cls < best_class || (cls == best_class && elev > best_elev)) {
                best = s;
                best_class = cls;
                best_elev = elev;
            }
        }
        if (best < 0)
            throw InfeasibleError("no satellite can cover round " + std::to_string(r) +
                                  " at t=" + std::to_string(t) + " s for a round of " +
                                  std::to_string(round_latency_s) + " s");
        if (current >= 0) {
            ++plan.num_switches;
            t += config.switching_time_s;
        }
        current = best;
        plan.sat_of_round.push_back(current);
        t += round_latency_s;
    }
    return plan;
}

std::string schedule_to_csv(const AccessSchedule& schedule) {
    std::ostringstream out;
    out << "sat_id,start_s,end_s\n";
    out.setf(std::ios::fixed);
    out.precision(1);
    for (const auto& iv : schedule.intervals)
        out << iv.sat_id << "," << iv.start_s << "," << iv.end_s << "\n";
    return out.str();
}

} // namespace sflsim
