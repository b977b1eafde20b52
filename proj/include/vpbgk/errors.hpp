#pragma once

#include <stdexcept>
#include <string>

namespace vpbgk {

// Invalid user-facing parameters (mesh sizes, config values, presets).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical failure inside a solver, e.g. a Poisson compatibility defect.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DiagnosticError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller broke an internal precondition (array shapes and the like).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace vpbgk
