#include "parcone/grid.hpp"

#include <cmath>
#include <string>

#include "parcone/kernels.hpp"
#include "parcone/tridiag.hpp"

namespace parcone {

Grid make_grid(int n_interior) {
    ensure(n_interior >= 2, "make_grid: need at least two interior nodes");
    Grid g;
    g.n = n_interior;
    g.h = 1.0 / (n_interior + 1);
    return g;
}

void check_same_grid(const Grid& g, const Field& f, const char* what) {
    ensure(f.n() == g.n, std::string(what) + ": field size " +
                             std::to_string(f.n()) + " does not match grid n=" +
                             std::to_string(g.n));
}

Field laplacian_apply(const Grid& g, const Field& f, double bl, double br) {
    check_same_grid(g, f, "laplacian_apply");
    Field out(g);
    kern::laplacian(f.data(), out.data(), (std::size_t)g.n, 1.0 / (g.h * g.h),
                    bl, br);
    check_finite(out.data(), out.v.size(), "laplacian_apply");
    return out;
}

Field divergence_a_grad(const Grid& g, const BoundaryField& a, const Field& f) {
    check_same_grid(g, f, "divergence_a_grad");
    check_same_grid(g, a.inner, "divergence_a_grad coefficient");
    std::vector<double> a_ext((std::size_t)g.n + 2);
    a_ext.front() = a.left;
    for (int i = 0; i < g.n; ++i) a_ext[(std::size_t)i + 1] = a.inner.v[i];
    a_ext.back() = a.right;
    Field out(g);
    kern::div_a_grad(a_ext.data(), f.data(), out.data(), (std::size_t)g.n,
                     1.0 / (g.h * g.h));
    check_finite(out.data(), out.v.size(), "divergence_a_grad");
    return out;
}

namespace {

// Forward differences against the zero boundary: n+1 values.
std::vector<double> h1_differences(const Grid& g, const Field& f) {
    std::vector<double> d((std::size_t)g.n + 1);
    const double inv_h = 1.0 / g.h;
    d[0] = f.v[0] * inv_h;
    for (int i = 1; i < g.n; ++i) d[(std::size_t)i] = (f.v[i] - f.v[i - 1]) * inv_h;
    d[(std::size_t)g.n] = -f.v[g.n - 1] * inv_h;
    return d;
}

// Solve T y = f with T = tridiag(-1, 2, -1).
std::vector<double> second_difference_solve(const Grid& g,
                                            const std::vector<double>& f) {
    Tridiag t((std::size_t)g.n);
    for (int i = 0; i < g.n; ++i) {
        t.lower[(std::size_t)i] = -1.0;
        t.diag[(std::size_t)i] = 2.0;
        t.upper[(std::size_t)i] = -1.0;
    }
    return tridiag_solve(t, f);
}

// out = T x.
std::vector<double> second_difference_apply(const Grid& g,
                                            const std::vector<double>& x) {
    std::vector<double> out((std::size_t)g.n);
    for (int i = 0; i < g.n; ++i) {
        const double xm = (i == 0) ? 0.0 : x[(std::size_t)i - 1];
        const double xp = (i + 1 == g.n) ? 0.0 : x[(std::size_t)i + 1];
        out[(std::size_t)i] = 2.0 * x[(std::size_t)i] - xm - xp;
    }
    return out;
}

}  // namespace

double inner_product(const Grid& g, const Field& f1, const Field& f2,
                     SpaceKind kind) {
    check_same_grid(g, f1, "inner_product");
    check_same_grid(g, f2, "inner_product");
    switch (kind) {
        case SpaceKind::L2:
            return g.h * kern::dot(f1.data(), f2.data(), (std::size_t)g.n);
        case SpaceKind::H1_0: {
            const auto d1 = h1_differences(g, f1);
            const auto d2 = h1_differences(g, f2);
            return g.h * kern::dot(d1.data(), d2.data(), d1.size());
        }
        case SpaceKind::H2cap: {
            const Field l1 = laplacian_apply(g, f1);
            const Field l2 = laplacian_apply(g, f2);
            return g.h * kern::dot(l1.data(), l2.data(), (std::size_t)g.n);
        }
    }
    throw ValidationError("inner_product: unknown kind");
}

double norm(const Grid& g, const Field& f, SpaceKind kind) {
    return std::sqrt(std::max(0.0, inner_product(g, f, f, kind)));
}

double lp_norm(const Grid& g, const Field& f, double p) {
    check_same_grid(g, f, "lp_norm");
    ensure(p >= 1.0, "lp_norm: p must be >= 1");
    if (std::isinf(p)) return kern::max_abs(f.data(), (std::size_t)g.n);
    return std::pow(g.h * kern::sum_abs_pow(f.data(), p, (std::size_t)g.n),
                    1.0 / p);
}

double w1p_norm(const Grid& g, const Field& f, double p) {
    check_same_grid(g, f, "w1p_norm");
    ensure(p >= 1.0, "w1p_norm: p must be >= 1");
    std::vector<double> d;
    d.reserve((std::size_t)g.n);
    for (int i = 0; i + 1 < g.n; ++i) d.push_back((f.v[i + 1] - f.v[i]) / g.h);
    if (std::isinf(p)) {
        const double m0 = kern::max_abs(f.data(), (std::size_t)g.n);
        const double m1 = d.empty() ? 0.0 : kern::max_abs(d.data(), d.size());
        return std::max(m0, m1);
    }
    const double s0 = g.h * kern::sum_abs_pow(f.data(), p, (std::size_t)g.n);
    const double s1 = d.empty() ? 0.0 : g.h * kern::sum_abs_pow(d.data(), p, d.size());
    return std::pow(s0 + s1, 1.0 / p);
}

double dual_norm_W(const Grid& g, const Field& f, SpaceKind w_kind) {
    check_same_grid(g, f, "dual_norm_W");
    const auto y = second_difference_solve(g, f.v);
    const double h = g.h;
    if (w_kind == SpaceKind::H1_0) {
        // || f ||^2 = h^3 f^T T^{-1} f
        const double q = kern::dot(f.data(), y.data(), y.size());
        return std::sqrt(std::max(0.0, h * h * h * q));
    }
    if (w_kind == SpaceKind::H2cap) {
        // || f ||^2 = h^5 | T^{-1} f |^2
        const double q = kern::dot(y.data(), y.data(), y.size());
        return std::sqrt(h * h * h * h * h * q);
    }
    throw ValidationError("dual_norm_W: w_kind must be H1_0 or H2cap");
}

Field wstar_gram_apply(const Grid& g, const Field& f, SpaceKind w_kind) {
    check_same_grid(g, f, "wstar_gram_apply");
    const double h = g.h;
    auto y = second_difference_solve(g, f.v);
    Field out(g);
    if (w_kind == SpaceKind::H1_0) {
        const double c = h * h * h;
        for (int i = 0; i < g.n; ++i) out.v[i] = c * y[(std::size_t)i];
        return out;
    }
    if (w_kind == SpaceKind::H2cap) {
        auto z = second_difference_solve(g, y);
        const double c = h * h * h * h * h;
        for (int i = 0; i < g.n; ++i) out.v[i] = c * z[(std::size_t)i];
        return out;
    }
    throw ValidationError("wstar_gram_apply: w_kind must be H1_0 or H2cap");
}

Field wstar_gram_inverse_apply(const Grid& g, const Field& f, SpaceKind w_kind) {
    check_same_grid(g, f, "wstar_gram_inverse_apply");
    const double h = g.h;
    Field out(g);
    if (w_kind == SpaceKind::H1_0) {
        auto t = second_difference_apply(g, f.v);
        const double c = 1.0 / (h * h * h);
        for (int i = 0; i < g.n; ++i) out.v[i] = c * t[(std::size_t)i];
        return out;
    }
    if (w_kind == SpaceKind::H2cap) {
        auto t = second_difference_apply(g, second_difference_apply(g, f.v));
        const double c = 1.0 / (h * h * h * h * h);
        for (int i = 0; i < g.n; ++i) out.v[i] = c * t[(std::size_t)i];
        return out;
    }
    throw ValidationError("wstar_gram_inverse_apply: w_kind must be H1_0 or H2cap");
}

double wstar_inner(const Grid& g, const Field& f1, const Field& f2,
                   SpaceKind w_kind) {
    const Field s = wstar_gram_apply(g, f2, w_kind);
    return kern::dot(f1.data(), s.data(), (std::size_t)g.n);
}

// ---- field algebra ---------------------------------------------------------

namespace {
void check_pair(const Field& a, const Field& b, const char* what) {
    ensure(a.n() == b.n(), std::string(what) + ": size mismatch");
}
}  // namespace

Field field_add(const Field& a, const Field& b) {
    check_pair(a, b, "field_add");
    Field out = a;
    kern::axpy(1.0, b.data(), out.data(), out.v.size());
    return out;
}

Field field_sub(const Field& a, const Field& b) {
    check_pair(a, b, "field_sub");
    Field out = a;
    kern::axpy(-1.0, b.data(), out.data(), out.v.size());
    return out;
}

Field field_scaled(const Field& a, double s) {
    Field out = a;
    kern::scale(s, out.data(), out.v.size());
    return out;
}

Field field_mul(const Field& a, const Field& b) {
    check_pair(a, b, "field_mul");
    Field out(a.g);
    out.v.resize(a.v.size());
    kern::hadamard(a.data(), b.data(), out.data(), out.v.size());
    return out;
}

void field_axpy(double s, const Field& x, Field& y) {
    check_pair(x, y, "field_axpy");
    kern::axpy(s, x.data(), y.data(), y.v.size());
}

}  // namespace parcone
