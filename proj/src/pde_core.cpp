#include "parcone/pde_core.hpp"

#include <cmath>
#include <string>

namespace parcone {

// ---- tridiag ---------------------------------------------------------------

std::vector<double> tridiag_solve(const Tridiag& m, const std::vector<double>& rhs) {
    const std::size_t n = m.size();
    ensure(n >= 1, "tridiag_solve: empty system");
    ensure(rhs.size() == n, "tridiag_solve: rhs size mismatch");

    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        scale = std::max(scale, std::fabs(m.lower[i]) + std::fabs(m.diag[i]) +
                                    std::fabs(m.upper[i]));
    const double pivot_floor = scale * 1e-14;

    std::vector<double> c(n), d(n), x(n);
    double piv = m.diag[0];
    double min_piv = std::fabs(piv);
    if (std::fabs(piv) <= pivot_floor)
        throw SolverError("tridiagonal solve: degenerate pivot " +
                          std::to_string(piv) + " at row 0");
    c[0] = m.upper[0] / piv;
    d[0] = rhs[0] / piv;
    for (std::size_t i = 1; i < n; ++i) {
        piv = m.diag[i] - m.lower[i] * c[i - 1];
        min_piv = std::min(min_piv, std::fabs(piv));
        if (std::fabs(piv) <= pivot_floor)
            throw SolverError("tridiagonal solve: degenerate pivot " +
                              std::to_string(piv) + " at row " + std::to_string(i) +
                              " (min |pivot| " + std::to_string(min_piv) + ")");
        c[i] = m.upper[i] / piv;
        d[i] = (rhs[i] - m.lower[i] * d[i - 1]) / piv;
    }
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

void tridiag_apply(const Tridiag& m, const double* x, double* out) {
    const std::size_t n = m.size();
    for (std::size_t i = 0; i < n; ++i) {
        double s = m.diag[i] * x[i];
        if (i > 0) s += m.lower[i] * x[i - 1];
        if (i + 1 < n) s += m.upper[i] * x[i + 1];
        out[i] = s;
    }
}

Tridiag tridiag_transposed(const Tridiag& m) {
    const std::size_t n = m.size();
    Tridiag t(n);
    t.diag = m.diag;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        t.upper[i] = m.lower[i + 1];
        t.lower[i + 1] = m.upper[i];
    }
    return t;
}

// ---- time axis -------------------------------------------------------------

TimeAxis make_time_axis(double T, int n_steps) {
    ensure(T > 0.0, "make_time_axis: T must be positive");
    ensure(n_steps >= 1, "make_time_axis: need at least one step");
    return {T, n_steps};
}

Trajectory make_trajectory(const Grid& g, const TimeAxis& axis) {
    Trajectory tr;
    tr.axis = axis;
    tr.frames.assign((std::size_t)axis.n_steps + 1, Field(g));
    return tr;
}

// ---- implicit Euler --------------------------------------------------------

Tridiag assemble_step_matrix(const Grid& g, double dt,
                             const StepCoefficients& co) {
    ensure(dt > 0.0, "assemble_step_matrix: dt must be positive");
    const std::size_t n = (std::size_t)g.n;
    const double inv_h2 = 1.0 / (g.h * g.h);
    const double inv_2h = 0.5 / g.h;
    Tridiag m(n);

    for (std::size_t i = 0; i < n; ++i) m.diag[i] = 1.0 / dt;

    switch (co.diffusion) {
        case DiffusionMode::None:
            break;
        case DiffusionMode::Laplacian:
            for (std::size_t i = 0; i < n; ++i) {
                m.diag[i] += 2.0 * inv_h2;
                if (i > 0) m.lower[i] -= inv_h2;
                if (i + 1 < n) m.upper[i] -= inv_h2;
            }
            break;
        case DiffusionMode::Variable: {
            check_same_grid(g, co.a.inner, "step diffusion coefficient");
            for (std::size_t i = 0; i < n; ++i) {
                const double am = (i == 0) ? co.a.left : co.a.inner.v[i - 1];
                const double ap = (i + 1 == n) ? co.a.right : co.a.inner.v[i + 1];
                const double a_lo = 0.5 * (am + co.a.inner.v[i]);
                const double a_hi = 0.5 * (co.a.inner.v[i] + ap);
                m.diag[i] += (a_lo + a_hi) * inv_h2;
                if (i > 0) m.lower[i] -= a_lo * inv_h2;
                if (i + 1 < n) m.upper[i] -= a_hi * inv_h2;
            }
            break;
        }
    }

    if (!co.reaction.empty()) {
        check_same_grid(g, co.reaction, "step reaction");
        for (std::size_t i = 0; i < n; ++i) m.diag[i] += co.reaction.v[i];
    }

    if (!co.drift.empty()) {
        check_same_grid(g, co.drift, "step drift");
        for (std::size_t i = 0; i < n; ++i) {
            if (i + 1 < n) m.upper[i] += co.drift.v[i] * inv_2h;
            if (i > 0) m.lower[i] -= co.drift.v[i] * inv_2h;
        }
    }

    return m;
}

std::vector<double> assemble_step_rhs(const Grid& g, double dt,
                                      const StepCoefficients& co,
                                      const Field& u_prev) {
    check_same_grid(g, u_prev, "implicit step u_prev");
    const std::size_t n = (std::size_t)g.n;
    const double inv_h2 = 1.0 / (g.h * g.h);
    const double inv_2h = 0.5 / g.h;
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = u_prev.v[i] / dt;
    if (!co.rhs.empty()) {
        check_same_grid(g, co.rhs, "step rhs");
        for (std::size_t i = 0; i < n; ++i) b[i] += co.rhs.v[i];
    }

    // Dirichlet data of the unknown contributes through the eliminated
    // boundary columns.
    if (co.bc_left != 0.0 || co.bc_right != 0.0) {
        double a_lo = 1.0, a_hi = 1.0;
        if (co.diffusion == DiffusionMode::Variable) {
            a_lo = 0.5 * (co.a.left + co.a.inner.v[0]);
            a_hi = 0.5 * (co.a.inner.v[n - 1] + co.a.right);
        } else if (co.diffusion == DiffusionMode::None) {
            a_lo = a_hi = 0.0;
        }
        b[0] += a_lo * inv_h2 * co.bc_left;
        b[n - 1] += a_hi * inv_h2 * co.bc_right;
        if (!co.drift.empty()) {
            b[0] += co.drift.v[0] * inv_2h * co.bc_left;
            b[n - 1] -= co.drift.v[n - 1] * inv_2h * co.bc_right;
        }
    }
    return b;
}

Field implicit_euler_step(const Grid& g, double dt, const StepCoefficients& co,
                          const Field& u_prev) {
    const Tridiag m = assemble_step_matrix(g, dt, co);
    const auto b = assemble_step_rhs(g, dt, co, u_prev);
    std::vector<double> x;
    try {
        x = tridiag_solve(m, b);
    } catch (const SolverError& e) {
        throw SolverError(std::string(e.what()) + " during implicit Euler step, dt=" +
                          std::to_string(dt));
    }
    Field out(g);
    out.v = std::move(x);
    check_finite(out.data(), out.v.size(), "implicit_euler_step");
    return out;
}

Trajectory solve_linear_parabolic(
    const Grid& g, const TimeAxis& axis, const Field& u0,
    const std::function<StepCoefficients(int)>& coeffs_of) {
    check_same_grid(g, u0, "solve_linear_parabolic u0");
    Trajectory tr = make_trajectory(g, axis);
    tr.frames[0] = u0;
    const double dt = axis.dt();
    for (int k = 1; k <= axis.n_steps; ++k) {
        try {
            tr.frames[(std::size_t)k] =
                implicit_euler_step(g, dt, coeffs_of(k), tr.frames[(std::size_t)k - 1]);
        } catch (const SolverError& e) {
            throw SolverError(std::string(e.what()) + " at step k=" + std::to_string(k));
        }
    }
    return tr;
}

Field newton_parabolic_step(const Grid& g, const ResidualFn& R,
                            const JacobianFn& jac, const Field& u_guess,
                            const NewtonOptions& opt) {
    check_same_grid(g, u_guess, "newton_parabolic_step guess");
    Field u = u_guess;
    double rnorm = 0.0;
    for (int it = 0; it < opt.max_iter; ++it) {
        const Field r = R(u);
        rnorm = norm(g, r, SpaceKind::L2);
        if (rnorm <= opt.tol) {
            check_finite(u.data(), u.v.size(), "newton_parabolic_step");
            return u;
        }
        const Tridiag J = jac(u);
        std::vector<double> neg_r(r.v);
        for (auto& t : neg_r) t = -t;
        const auto s = tridiag_solve(J, neg_r);
        for (int i = 0; i < g.n; ++i) u.v[(std::size_t)i] += s[(std::size_t)i];
    }
    // Accept a final iterate that meets the tolerance after the last update.
    const Field r = R(u);
    rnorm = norm(g, r, SpaceKind::L2);
    if (rnorm <= opt.tol) {
        check_finite(u.data(), u.v.size(), "newton_parabolic_step");
        return u;
    }
    throw SolverError("Newton step did not converge: residual " +
                      std::to_string(rnorm) + " after " +
                      std::to_string(opt.max_iter) + " iterations (tol " +
                      std::to_string(opt.tol) + ")");
}

}  // namespace parcone
