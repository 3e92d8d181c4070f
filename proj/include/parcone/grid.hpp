#pragma once
///
/// @file grid.hpp
/// @brief 1-D uniform grid, interior-node fields, and the discrete norms.
///
/// The domain is (0,1) with n interior nodes x_i = (i+1) h, h = 1/(n+1).
/// Fields store interior values only; Dirichlet boundary values enter as
/// explicit arguments where an operation needs them.
///
/// Norm conventions, fixed once for the whole library:
///   L2      <f,g>   = h sum f_i g_i
///   H1_0    <f,g>   = h sum of forward-difference gradients, including the
///                     differences against the zero boundary on both ends
///   H2cap   <f,g>   = <lap f, lap g>_L2 with zero Dirichlet data, the
///                     discrete version of the Laplacian-graph norm
///   Lp      ||f||   = (h sum |f_i|^p)^(1/p), p = inf is the max norm
///
/// The dual norm over W in {H1_0, H2cap} is || f ||_{W*} =
/// sqrt( f^T M K^{-1} M f ) with M = h I and K the Gram matrix of W.  Both
/// cases reduce to Thomas solves with the constant second-difference matrix.

#include <functional>
#include <limits>
#include <vector>

#include "parcone/common.hpp"

namespace parcone {

struct Grid {
    int n = 0;      ///< interior node count
    double h = 0.0; ///< mesh width, h (n+1) = 1

    double x(int i) const { return (i + 1) * h; }  ///< coordinate of node i
};

Grid make_grid(int n_interior);

struct Field {
    Grid g;
    std::vector<double> v;

    Field() = default;
    explicit Field(const Grid& grid) : g(grid), v(grid.n, 0.0) {}

    static Field from_fn(const Grid& grid, const std::function<double(double)>& f) {
        Field out(grid);
        for (int i = 0; i < grid.n; ++i) out.v[i] = f(grid.x(i));
        return out;
    }

    int n() const { return (int)v.size(); }
    double* data() { return v.data(); }
    const double* data() const { return v.data(); }
    bool empty() const { return v.empty(); }
};

/// A field together with its two boundary values, needed by the flux-form
/// diffusion operator.  Parameters defined on interior nodes are extended
/// constantly (a_0 = a_1, a_{n+1} = a_n); the extension is linear in the
/// interior values, which keeps derivative bookkeeping exact.
struct BoundaryField {
    Field inner;
    double left = 0.0, right = 0.0;

    static BoundaryField constant_extension(const Field& f) {
        ensure(!f.empty(), "BoundaryField: empty field");
        return {f, f.v.front(), f.v.back()};
    }
};

enum class SpaceKind { L2, H1_0, H2cap };

inline double infinity() { return std::numeric_limits<double>::infinity(); }

// ---- operations ------------------------------------------------------------

/// Second-difference Laplacian with Dirichlet data (bl, br).
Field laplacian_apply(const Grid& g, const Field& f, double bl = 0.0,
                      double br = 0.0);

/// Flux-form (a f')' with arithmetic-mean coefficients at half nodes and
/// homogeneous Dirichlet data on f.
Field divergence_a_grad(const Grid& g, const BoundaryField& a, const Field& f);

double inner_product(const Grid& g, const Field& f1, const Field& f2,
                     SpaceKind kind);
double norm(const Grid& g, const Field& f, SpaceKind kind);

/// p in [1, inf]; p = inf is the max norm (no h weight).
double lp_norm(const Grid& g, const Field& f, double p);

/// Discrete W^{1,p} norm of a parameter: Lp part plus the Lp norm of the
/// interior forward differences (no boundary assumption on parameters).
double w1p_norm(const Grid& g, const Field& f, double p);

/// || f ||_{W*} for W in {H1_0, H2cap}; one SPD Thomas solve (two for H2cap).
double dual_norm_W(const Grid& g, const Field& f, SpaceKind w_kind);

/// sigma = M K^{-1} M f, the Riesz image realizing the W* inner product:
/// <f1,f2>_{W*} = f1 . wstar_gram_apply(f2) (plain Euclidean dot).
Field wstar_gram_apply(const Grid& g, const Field& f, SpaceKind w_kind);

/// Inverse of wstar_gram_apply (applies (1/h^2) K).
Field wstar_gram_inverse_apply(const Grid& g, const Field& f, SpaceKind w_kind);

double wstar_inner(const Grid& g, const Field& f1, const Field& f2,
                   SpaceKind w_kind);

// ---- small field algebra ---------------------------------------------------

void check_same_grid(const Grid& g, const Field& f, const char* what);
Field field_add(const Field& a, const Field& b);
Field field_sub(const Field& a, const Field& b);
Field field_scaled(const Field& a, double s);
Field field_mul(const Field& a, const Field& b);
void field_axpy(double s, const Field& x, Field& y);

}  // namespace parcone
