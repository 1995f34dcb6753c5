#pragma once

#include <string>
#include <vector>

#include "sflsim/config.hpp"

namespace sflsim {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

// Walker-star constellation on circular two-body orbits around a
// spherical, sidereally rotating Earth. Good enough for coverage and
// handover accounting; no perturbations.
struct ConstellationConfig {
    int planes = 10;
    int sats_per_plane = 8;
    double altitude_m = 800e3;
    double inclination_deg = 85.0;
    double min_elevation_deg = 15.0;
    double earth_radius_m = 6371e3;
    double switching_time_s = 0.5; // tau_s
    int phasing_factor = 1;        // Walker F

    static ConstellationConfig from_config(const Config& cfg);
    int num_sats() const { return planes * sats_per_plane; }
    double orbit_radius_m() const { return earth_radius_m + altitude_m; }
    double orbital_period_s() const;
};

struct GroundTarget {
    double latitude_deg = 40.0;
    double longitude_deg = -86.0;

    static GroundTarget from_config(const Config& cfg);
};

struct AccessInterval {
    int sat_id = -1;
    double start_s = 0.0;
    double end_s = 0.0;
};

struct AccessSchedule {
    std::vector<AccessInterval> intervals; // sorted by (sat_id, start)
    double horizon_s = 0.0;
};

struct RoundPlan {
    std::vector<int> sat_of_round;
    int num_switches = 0;
};

std::vector<Vec3> propagate(const ConstellationConfig& config, double t_s);

Vec3 target_ecef(const GroundTarget& target, double earth_radius_m);

double elevation_deg(const Vec3& sat_pos_ecef, const GroundTarget& target, double earth_radius_m);

double sat_target_distance_m(const Vec3& sat_pos_ecef, const GroundTarget& target,
                             double earth_radius_m);

AccessSchedule access_intervals(const ConstellationConfig& config, const GroundTarget& target,
                                double horizon_s, double step_s);

// Per-round satellite selection over the schedule. A kept satellite costs
// nothing; a migration adds switching_time_s to the timeline and bumps
// num_switches. The first selection is not a migration.
RoundPlan schedule_rounds(const ConstellationConfig& config, const GroundTarget& target,
                          const AccessSchedule& schedule, double round_latency_s, int rounds);

std::string schedule_to_csv(const AccessSchedule& schedule);

} // namespace sflsim
