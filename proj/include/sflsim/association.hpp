#pragma once

#include <cstdint>
#include <vector>

namespace sflsim {

// Binary device-to-UAV assignment: every device is served by exactly one
// UAV, stored as that UAV's index. Per-UAV load counts are derived.
struct Association {
    std::vector<int> uav_of; // device index -> uav index

    Association() = default;
    explicit Association(std::vector<int> assignment) : uav_of(std::move(assignment)) {}

    int num_devices() const { return static_cast<int>(uav_of.size()); }

    bool a(int device, int uav) const { return uav_of[device] == uav; }

    std::vector<int> load_counts(int num_uavs) const {
        std::vector<int> n_k(num_uavs, 0);
        for (const int k : uav_of) ++n_k[k];
        return n_k;
    }

    bool operator==(const Association& other) const = default;

    // Deterministic total order used for tie-breaking between equally
    // good solutions.
    bool operator<(const Association& other) const { return uav_of < other.uav_of; }
};

} // namespace sflsim
