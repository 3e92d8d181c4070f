#pragma once
///
/// @file kernels.hpp
/// @brief Low-level array kernels: serial reference and OpenMP variants.
///
/// Contract: for every kernel the serial and parallel variants produce
/// bitwise-identical results for any thread count.  Elementwise loops are
/// trivially so.  Reductions are summed in fixed-size blocks whose partial
/// sums are combined in index order, so the rounding sequence does not
/// depend on the schedule.  The serial reference uses the same block order
/// and is the semantic definition; tests compare the two bit for bit.
///
/// The dispatched entry points switch to the parallel variant above a size
/// threshold.  Solver-scale arrays (a few hundred entries) stay serial.

#include <cstddef>

namespace parcone::kern {

inline constexpr std::size_t kReduceBlock = 1024;

/// Arrays at least this long go through the OpenMP variants.
std::size_t parallel_grain();

// ---- serial reference ------------------------------------------------------

namespace serial {

double dot(const double* a, const double* b, std::size_t n);
double sum_abs_pow(const double* a, double p, std::size_t n);
double max_abs(const double* a, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
void hadamard(const double* a, const double* b, double* out, std::size_t n);

/// Second difference with Dirichlet values bl, br: out_i = (u_{i-1} - 2 u_i
/// + u_{i+1}) / h^2 over interior nodes.
void laplacian(const double* u, double* out, std::size_t n, double inv_h2,
               double bl, double br);

/// Flux-form operator (a grad u)' with arithmetic-mean coefficients at the
/// half nodes; a_ext has n+2 entries including boundary values, u is
/// interior with homogeneous Dirichlet ends.
void div_a_grad(const double* a_ext, const double* u, double* out,
                std::size_t n, double inv_h2);

/// Centered first difference with homogeneous Dirichlet ends.
void centered_grad(const double* u, double* out, std::size_t n, double inv_2h);

}  // namespace serial

// ---- OpenMP variants -------------------------------------------------------

namespace par {

double dot(const double* a, const double* b, std::size_t n);
double sum_abs_pow(const double* a, double p, std::size_t n);
double max_abs(const double* a, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
void hadamard(const double* a, const double* b, double* out, std::size_t n);
void laplacian(const double* u, double* out, std::size_t n, double inv_h2,
               double bl, double br);
void div_a_grad(const double* a_ext, const double* u, double* out,
                std::size_t n, double inv_h2);
void centered_grad(const double* u, double* out, std::size_t n, double inv_2h);

}  // namespace par

// ---- dispatched entry points ----------------------------------------------

double dot(const double* a, const double* b, std::size_t n);
double sum_abs_pow(const double* a, double p, std::size_t n);
double max_abs(const double* a, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
void hadamard(const double* a, const double* b, double* out, std::size_t n);
void laplacian(const double* u, double* out, std::size_t n, double inv_h2,
               double bl, double br);
void div_a_grad(const double* a_ext, const double* u, double* out,
                std::size_t n, double inv_h2);
void centered_grad(const double* u, double* out, std::size_t n, double inv_2h);

}  // namespace parcone::kern
