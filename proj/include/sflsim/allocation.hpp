#pragma once

#include <vector>

namespace sflsim {

// Resource allocation for a fixed association. Because every device is
// served by exactly one UAV, the N x K matrices l_{n,k} and f_{n,k} have
// one nonzero entry per row; they are stored as per-device vectors
// against the serving UAV (implicitly zero elsewhere).
struct Allocation {
    std::vector<double> l;            // bandwidth fraction of the serving UAV's B_k
    std::vector<double> f_share;      // server compute share f_{n,k}, FLOP/s
    std::vector<double> bandwidth_hz; // B_k^U per UAV

    int num_devices() const { return static_cast<int>(l.size()); }
};

} // namespace sflsim
