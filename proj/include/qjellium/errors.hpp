#pragma once

#include <stdexcept>
#include <string>

namespace qjellium {

// Argument outside the mathematical domain of an operation (bad z, non-Hermitian
// matrix, non-projection, ...).
class domain_error : public std::invalid_argument {
public:
    explicit domain_error(const std::string& what) : std::invalid_argument(what) {}
};

// A quadrature / iteration failed to reach its requested tolerance.  Carries the
// tolerance that was actually achieved so callers can report it.
class numeric_error : public std::runtime_error {
public:
    numeric_error(const std::string& what, double achieved_tol)
        : std::runtime_error(what + " (achieved tolerance " + std::to_string(achieved_tol) + ")"),
          achieved(achieved_tol) {}
    double achieved;
};

// Two independent evaluation routes disagreed beyond their contract -- indicates a
// misconfigured integration scheme rather than a caller error.
class consistency_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A finite truncation (mode cutoff, occupation cap) was too small for the requested
// accuracy.
class truncation_error : public std::runtime_error {
public:
    explicit truncation_error(const std::string& what, double discarded = 0.0)
        : std::runtime_error(what), discarded_weight(discarded) {}
    double discarded_weight;
};

// Bose density at or above the condensation threshold: the normal-phase fugacity
// equation has no solution.  Carries the critical density for the error message.
class condensation_error : public std::domain_error {
public:
    condensation_error(const std::string& what, double rho_critical)
        : std::domain_error(what), rho_c(rho_critical) {}
    double rho_c;
};

} // namespace qjellium
