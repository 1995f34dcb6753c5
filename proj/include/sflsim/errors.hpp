#pragma once

#include <stdexcept>
#include <string>

namespace sflsim {

// Bad user input: malformed config files, out-of-range parameters.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A well-formed problem instance that admits no feasible solution
// (empty candidate sets, coverage gaps, unsatisfiable resource demands).
class InfeasibleError : public std::runtime_error {
public:
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace sflsim
