#pragma once

#include <string>
#include <vector>

#include "sflsim/dnn_profile.hpp"
#include "sflsim/optimizer.hpp"
#include "sflsim/scenario.hpp"

namespace sflsim {

struct FeasibilityReport {
    bool ok = true;
    std::vector<std::string> violations;
};

// Independent audit of a finished Solution against the problem
// constraints. Deliberately re-derives every quantity from first
// principles instead of calling solver code, so a solver bug cannot
// vouch for itself.
FeasibilityReport check_solution(const Scenario& scenario, const DnnProfile& profile,
                                 const Solution& sol, double total_bandwidth_hz, double theta,
                                 double z_bound, double sigma_bound, double tol_rel = 1e-9);

} // namespace sflsim
