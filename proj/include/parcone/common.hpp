#pragma once
///
/// @file common.hpp
/// @brief Error types and small checking helpers shared across the library.
///

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace parcone {

/// Raised when input data violates a precondition (bad sizes, out-of-range
/// indices, malformed configs).  Maps to CLI exit code 2.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Raised when a solver fails (singular system, Newton stall, positivity
/// violation).  Maps to CLI exit code 3.
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void ensure(bool cond, const std::string& msg) {
    if (!cond) throw ValidationError(msg);
}

inline void ensure_solver(bool cond, const std::string& msg) {
    if (!cond) throw SolverError(msg);
}

/// Every Field returned by a public operation must be finite entry-wise.
inline void check_finite(const double* v, std::size_t n, const char* what) {
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(v[i]))
            throw SolverError(std::string(what) + ": non-finite entry at index " +
                              std::to_string(i));
}

}  // namespace parcone
