#include "parcone/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace parcone::kern {

std::size_t parallel_grain() { return 4096; }

// Blocked sum shared by both variants: partials are always combined in block
// index order, which pins the rounding sequence.
namespace {

template <class BlockFn>
double blocked_reduce_add(std::size_t n, BlockFn block) {
    const std::size_t nb = (n + kReduceBlock - 1) / kReduceBlock;
    if (nb <= 1) return block(0, n);
    std::vector<double> partial(nb);
    for (std::size_t b = 0; b < nb; ++b)
        partial[b] = block(b * kReduceBlock, std::min(n, (b + 1) * kReduceBlock));
    double s = 0.0;
    for (std::size_t b = 0; b < nb; ++b) s += partial[b];
    return s;
}

#ifdef _OPENMP
template <class BlockFn>
double blocked_reduce_add_par(std::size_t n, BlockFn block) {
    const std::size_t nb = (n + kReduceBlock - 1) / kReduceBlock;
    if (nb <= 1) return block(0, n);
    std::vector<double> partial(nb);
#pragma omp parallel for schedule(static)
    for (long b = 0; b < (long)nb; ++b)
        partial[b] = block((std::size_t)b * kReduceBlock,
                           std::min(n, ((std::size_t)b + 1) * kReduceBlock));
    double s = 0.0;
    for (std::size_t b = 0; b < nb; ++b) s += partial[b];
    return s;
}
#endif

inline double dot_block(const double* a, const double* b, std::size_t lo,
                        std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
    return s;
}

inline double abs_pow_block(const double* a, double p, std::size_t lo,
                            std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += std::pow(std::fabs(a[i]), p);
    return s;
}

inline void laplacian_loop(const double* u, double* out, std::size_t n,
                           double inv_h2, double bl, double br, std::size_t lo,
                           std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
        const double um = (i == 0) ? bl : u[i - 1];
        const double up = (i + 1 == n) ? br : u[i + 1];
        out[i] = (um - 2.0 * u[i] + up) * inv_h2;
    }
}

inline void div_a_grad_loop(const double* a_ext, const double* u, double* out,
                            std::size_t n, double inv_h2, std::size_t lo,
                            std::size_t hi) {
    // a_ext[i] sits at node i-1 of the extended grid; u has Dirichlet zeros.
    for (std::size_t i = lo; i < hi; ++i) {
        const double um = (i == 0) ? 0.0 : u[i - 1];
        const double up = (i + 1 == n) ? 0.0 : u[i + 1];
        const double a_lo = 0.5 * (a_ext[i] + a_ext[i + 1]);
        const double a_hi = 0.5 * (a_ext[i + 1] + a_ext[i + 2]);
        out[i] = (a_hi * (up - u[i]) - a_lo * (u[i] - um)) * inv_h2;
    }
}

inline void centered_grad_loop(const double* u, double* out, std::size_t n,
                               double inv_2h, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
        const double um = (i == 0) ? 0.0 : u[i - 1];
        const double up = (i + 1 == n) ? 0.0 : u[i + 1];
        out[i] = (up - um) * inv_2h;
    }
}

}  // namespace

// ---- serial ----------------------------------------------------------------

namespace serial {

double dot(const double* a, const double* b, std::size_t n) {
    return blocked_reduce_add(n, [&](std::size_t lo, std::size_t hi) {
        return dot_block(a, b, lo, hi);
    });
}

double sum_abs_pow(const double* a, double p, std::size_t n) {
    return blocked_reduce_add(n, [&](std::size_t lo, std::size_t hi) {
        return abs_pow_block(a, p, lo, hi);
    });
}

double max_abs(const double* a, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(a[i]));
    return m;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void hadamard(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void laplacian(const double* u, double* out, std::size_t n, double inv_h2,
               double bl, double br) {
    laplacian_loop(u, out, n, inv_h2, bl, br, 0, n);
}

void div_a_grad(const double* a_ext, const double* u, double* out,
                std::size_t n, double inv_h2) {
    div_a_grad_loop(a_ext, u, out, n, inv_h2, 0, n);
}

void centered_grad(const double* u, double* out, std::size_t n,
                   double inv_2h) {
    centered_grad_loop(u, out, n, inv_2h, 0, n);
}

}  // namespace serial

// ---- OpenMP ----------------------------------------------------------------

namespace par {

#ifdef _OPENMP

double dot(const double* a, const double* b, std::size_t n) {
    return blocked_reduce_add_par(n, [&](std::size_t lo, std::size_t hi) {
        return dot_block(a, b, lo, hi);
    });
}

double sum_abs_pow(const double* a, double p, std::size_t n) {
    return blocked_reduce_add_par(n, [&](std::size_t lo, std::size_t hi) {
        return abs_pow_block(a, p, lo, hi);
    });
}

double max_abs(const double* a, std::size_t n) {
    double m = 0.0;
#pragma omp parallel for reduction(max : m) schedule(static)
    for (long i = 0; i < (long)n; ++i) m = std::max(m, std::fabs(a[i]));
    return m;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < (long)n; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, double* x, std::size_t n) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < (long)n; ++i) x[i] *= alpha;
}

void hadamard(const double* a, const double* b, double* out, std::size_t n) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < (long)n; ++i) out[i] = a[i] * b[i];
}

void laplacian(const double* u, double* out, std::size_t n, double inv_h2,
               double bl, double br) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < (long)n; ++i)
        laplacian_loop(u, out, n, inv_h2, bl, br, i, i + 1);
}

void div_a_grad(const double* a_ext, const double* u, double* out,
                std::size_t n, double inv_h2) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < (long)n; ++i)
        div_a_grad_loop(a_ext, u, out, n, inv_h2, i, i + 1);
}

void centered_grad(const double* u, double* out, std::size_t n,
                   double inv_2h) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < (long)n; ++i)
        centered_grad_loop(u, out, n, inv_2h, i, i + 1);
}

#else

double dot(const double* a, const double* b, std::size_t n) {
    return serial::dot(a, b, n);
}
double sum_abs_pow(const double* a, double p, std::size_t n) {
    return serial::sum_abs_pow(a, p, n);
}
double max_abs(const double* a, std::size_t n) { return serial::max_abs(a, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) {
    serial::axpy(alpha, x, y, n);
}
void scale(double alpha, double* x, std::size_t n) { serial::scale(alpha, x, n); }
void hadamard(const double* a, const double* b, double* out, std::size_t n) {
    serial::hadamard(a, b, out, n);
}
void laplacian(const double* u, double* out, std::size_t n, double inv_h2,
               double bl, double br) {
    serial::laplacian(u, out, n, inv_h2, bl, br);
}
void div_a_grad(const double* a_ext, const double* u, double* out,
                std::size_t n, double inv_h2) {
    serial::div_a_grad(a_ext, u, out, n, inv_h2);
}
void centered_grad(const double* u, double* out, std::size_t n,
                   double inv_2h) {
    serial::centered_grad(u, out, n, inv_2h);
}

#endif

}  // namespace par

// ---- dispatch --------------------------------------------------------------

namespace {
inline bool go_par(std::size_t n) {
#ifdef _OPENMP
    return n >= parallel_grain();
#else
    (void)n;
    return false;
#endif
}
}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
    return go_par(n) ? par::dot(a, b, n) : serial::dot(a, b, n);
}
double sum_abs_pow(const double* a, double p, std::size_t n) {
    return go_par(n) ? par::sum_abs_pow(a, p, n) : serial::sum_abs_pow(a, p, n);
}
double max_abs(const double* a, std::size_t n) {
    return go_par(n) ? par::max_abs(a, n) : serial::max_abs(a, n);
}
void axpy(double alpha, const double* x, double* y, std::size_t n) {
    go_par(n) ? par::axpy(alpha, x, y, n) : serial::axpy(alpha, x, y, n);
}
void scale(double alpha, double* x, std::size_t n) {
    go_par(n) ? par::scale(alpha, x, n) : serial::scale(alpha, x, n);
}
void hadamard(const double* a, const double* b, double* out, std::size_t n) {
    go_par(n) ? par::hadamard(a, b, out, n) : serial::hadamard(a, b, out, n);
}
void laplacian(const double* u, double* out, std::size_t n, double inv_h2,
               double bl, double br) {
    go_par(n) ? par::laplacian(u, out, n, inv_h2, bl, br)
              : serial::laplacian(u, out, n, inv_h2, bl, br);
}
void div_a_grad(const double* a_ext, const double* u, double* out,
                std::size_t n, double inv_h2) {
    go_par(n) ? par::div_a_grad(a_ext, u, out, n, inv_h2)
              : serial::div_a_grad(a_ext, u, out, n, inv_h2);
}
void centered_grad(const double* u, double* out, std::size_t n, double inv_2h) {
    go_par(n) ? par::centered_grad(u, out, n, inv_2h)
              : serial::centered_grad(u, out, n, inv_2h);
}

}  // namespace parcone::kern
