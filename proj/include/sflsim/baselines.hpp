#pragma once

#include <cstdint>
#include <string>

#include "sflsim/optimizer.hpp"

namespace sflsim {

enum class BaselineKind { RA, ERA, HFL, DDA };

BaselineKind baseline_from_string(const std::string& name);
std::string baseline_name(BaselineKind kind);

// The four comparison strategies, evaluated with the same objective as
// the proposed solver.
Solution solve_baseline(BaselineKind kind, const SolverContext& ctx,
                        const OptimizerSettings& settings, std::uint64_t seed);

// The baselines' association rules, exposed for reuse in sweeps.
Association era_association(const SolverContext& ctx);
Association dda_association(const SolverContext& ctx, std::uint64_t seed);
Association ra_association(const SolverContext& ctx, std::uint64_t seed);

// ERA's equal-split allocation rule for a given association.
Allocation era_allocation(const Association& assoc, const SolverContext& ctx,
                          const CutCosts& cut);

} // namespace sflsim
