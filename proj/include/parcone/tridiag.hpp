#pragma once
///
/// @file tridiag.hpp
/// @brief Tridiagonal systems and the Thomas solve.
///

#include <cstddef>
#include <vector>

namespace parcone {

/// lower[0] and upper[n-1] are unused slots.
struct Tridiag {
    std::vector<double> lower, diag, upper;

    explicit Tridiag(std::size_t n = 0) : lower(n), diag(n), upper(n) {}
    std::size_t size() const { return diag.size(); }
};

/// Thomas elimination.  Throws SolverError naming the row when a pivot
/// degenerates (singular or numerically singular system).
std::vector<double> tridiag_solve(const Tridiag& m, const std::vector<double>& rhs);

/// out = M x.
void tridiag_apply(const Tridiag& m, const double* x, double* out);

/// Exact structural transpose: swaps the two off-diagonal bands.
Tridiag tridiag_transposed(const Tridiag& m);

}  // namespace parcone
