#pragma once

#include <stdexcept>
#include <string>

namespace oamqnd {

// Numerical procedure failed to converge (quadrature, eigensolve).
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// A structural property the algebra guarantees was violated numerically
// (non-tetradic spectrum, mixed parity, symplectic defect, ...).
struct ConsistencyError : std::runtime_error {
    explicit ConsistencyError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid user-facing configuration or argument.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace oamqnd
