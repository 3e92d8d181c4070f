#include "parcone/models.hpp"

#include <cmath>
#include <string>

#include "parcone/kernels.hpp"

namespace parcone {

const char* kind_name(ProblemKind k) {
    switch (k) {
        case ProblemKind::Potential: return "potential";
        case ProblemKind::Diffusion: return "diffusion";
        case ProblemKind::QuadraticGradientSource: return "quadratic_gradient";
        case ProblemKind::CubicSource: return "cubic";
    }
    return "?";
}

SpaceKind wstar_kind(ProblemKind k) {
    return k == ProblemKind::CubicSource ? SpaceKind::H1_0 : SpaceKind::H2cap;
}

namespace {

Field phi_at(const ProblemSpec& spec, double t) {
    if (!spec.phi) return Field(spec.g);
    Field f = spec.phi(t);
    check_same_grid(spec.g, f, "phi(t)");
    return f;
}

void check_diffusion_admissible(const ProblemSpec& spec, const Parameter& theta) {
    double lo = theta.f.v[0];
    for (double a : theta.f.v) lo = std::min(lo, a);
    ensure(lo >= spec.a_lower,
           "Diffusion coefficient below the admissibility floor: min a = " +
               std::to_string(lo) + " < " + std::to_string(spec.a_lower));
}

Field centered_grad_field(const Grid& g, const Field& u) {
    Field out(g);
    kern::centered_grad(u.data(), out.data(), (std::size_t)g.n, 0.5 / g.h);
    return out;
}

}  // namespace

// ---- forward ---------------------------------------------------------------

Trajectory forward_solve(const ProblemSpec& spec, const Parameter& theta) {
    const Grid& g = spec.g;
    check_same_grid(g, spec.u0, "forward_solve u0");
    check_same_grid(g, theta.f, "forward_solve theta");
    const double dt = spec.axis.dt();

    switch (spec.kind) {
        case ProblemKind::Potential:
            return solve_linear_parabolic(g, spec.axis, spec.u0, [&](int k) {
                StepCoefficients co;
                co.diffusion = DiffusionMode::Laplacian;
                co.reaction = theta.f;
                co.rhs = phi_at(spec, spec.axis.t(k));
                return co;
            });

        case ProblemKind::Diffusion: {
            check_diffusion_admissible(spec, theta);
            const BoundaryField a = BoundaryField::constant_extension(theta.f);
            return solve_linear_parabolic(g, spec.axis, spec.u0, [&](int k) {
                StepCoefficients co;
                co.diffusion = DiffusionMode::Variable;
                co.a = a;
                co.rhs = phi_at(spec, spec.axis.t(k));
                return co;
            });
        }

        case ProblemKind::QuadraticGradientSource: {
            Trajectory tr = make_trajectory(g, spec.axis);
            tr.frames[0] = spec.u0;
            for (int k = 1; k <= spec.axis.n_steps; ++k) {
                const Field& prev = tr.frames[(std::size_t)k - 1];
                ResidualFn R = [&](const Field& v) {
                    const Field lap = laplacian_apply(g, v);
                    const Field gr = centered_grad_field(g, v);
                    Field r(g);
                    for (int i = 0; i < g.n; ++i)
                        r.v[i] = (v.v[i] - prev.v[i]) / dt - lap.v[i] -
                                 gr.v[i] * gr.v[i] - theta.f.v[i];
                    return r;
                };
                JacobianFn J = [&](const Field& v) {
                    StepCoefficients co;
                    co.diffusion = DiffusionMode::Laplacian;
                    co.drift = field_scaled(centered_grad_field(g, v), -2.0);
                    return assemble_step_matrix(g, dt, co);
                };
                try {
                    tr.frames[(std::size_t)k] =
                        newton_parabolic_step(g, R, J, prev, spec.newton);
                } catch (const SolverError& e) {
                    throw SolverError(std::string(e.what()) + " at step k=" +
                                      std::to_string(k));
                }
            }
            return tr;
        }

        case ProblemKind::CubicSource: {
            Trajectory tr = make_trajectory(g, spec.axis);
            tr.frames[0] = spec.u0;
            for (int k = 1; k <= spec.axis.n_steps; ++k) {
                const Field& prev = tr.frames[(std::size_t)k - 1];
                const Field src = phi_at(spec, spec.axis.t(k));
                ResidualFn R = [&](const Field& v) {
                    const Field lap = laplacian_apply(g, v);
                    Field r(g);
                    for (int i = 0; i < g.n; ++i)
                        r.v[i] = (v.v[i] - prev.v[i]) / dt - lap.v[i] +
                                 spec.cubic.eval(v.v[i]) -
                                 (src.v[i] - theta.f.v[i]);
                    return r;
                };
                JacobianFn J = [&](const Field& v) {
                    StepCoefficients co;
                    co.diffusion = DiffusionMode::Laplacian;
                    co.reaction = Field(g);
                    for (int i = 0; i < g.n; ++i)
                        co.reaction.v[i] = spec.cubic.deriv(v.v[i]);
                    return assemble_step_matrix(g, dt, co);
                };
                try {
                    tr.frames[(std::size_t)k] =
                        newton_parabolic_step(g, R, J, prev, spec.newton);
                } catch (const SolverError& e) {
                    throw SolverError(std::string(e.what()) + " at step k=" +
                                      std::to_string(k));
                }
            }
            return tr;
        }
    }
    throw ValidationError("forward_solve: unknown problem kind");
}

Trajectory forward_solve_exp_transform(const ProblemSpec& spec,
                                       const Parameter& theta) {
    ensure(spec.kind == ProblemKind::QuadraticGradientSource,
           "forward_solve_exp_transform: only the gradient model transforms");
    const Grid& g = spec.g;
    check_same_grid(g, spec.u0, "forward_solve_exp_transform u0");
    check_same_grid(g, theta.f, "forward_solve_exp_transform theta");

    Field U0(g);
    for (int i = 0; i < g.n; ++i) U0.v[i] = std::exp(spec.u0.v[i]);

    // U = exp(u) satisfies U_t - lap U = theta U, so theta enters with the
    // opposite sign of a reaction term.
    Trajectory cap = solve_linear_parabolic(g, spec.axis, U0, [&](int k) {
        (void)k;
        StepCoefficients co;
        co.diffusion = DiffusionMode::Laplacian;
        co.reaction = field_scaled(theta.f, -1.0);
        co.bc_left = 1.0;
        co.bc_right = 1.0;
        return co;
    });

    Trajectory out = make_trajectory(g, spec.axis);
    for (int k = 0; k <= spec.axis.n_steps; ++k) {
        const Field& U = cap.frames[(std::size_t)k];
        Field& u = out.frames[(std::size_t)k];
        for (int i = 0; i < g.n; ++i) {
            ensure_solver(U.v[i] > spec.positivity_floor,
                          "exp-transform positivity violated at frame " +
                              std::to_string(k) + ", node " + std::to_string(i) +
                              ": U = " + std::to_string(U.v[i]));
            u.v[i] = std::log(U.v[i]);
        }
    }
    return out;
}

// ---- derivative pieces -----------------------------------------------------

StepCoefficients linearized_coeffs(const ProblemSpec& spec, const Parameter& theta,
                                   const Field& base_frame) {
    const Grid& g = spec.g;
    StepCoefficients co;
    switch (spec.kind) {
        case ProblemKind::Potential:
            co.diffusion = DiffusionMode::Laplacian;
            co.reaction = theta.f;
            break;
        case ProblemKind::Diffusion:
            co.diffusion = DiffusionMode::Variable;
            co.a = BoundaryField::constant_extension(theta.f);
            break;
        case ProblemKind::QuadraticGradientSource:
            co.diffusion = DiffusionMode::Laplacian;
            co.drift = field_scaled(centered_grad_field(g, base_frame), -2.0);
            break;
        case ProblemKind::CubicSource: {
            co.diffusion = DiffusionMode::Laplacian;
            co.reaction = Field(g);
            for (int i = 0; i < g.n; ++i)
                co.reaction.v[i] = spec.cubic.deriv(base_frame.v[i]);
            break;
        }
    }
    return co;
}

Field param_injection(const ProblemSpec& spec, const Field& base_frame,
                      const Field& h) {
    const Grid& g = spec.g;
    switch (spec.kind) {
        case ProblemKind::Potential:
            return field_scaled(field_mul(h, base_frame), -1.0);
        case ProblemKind::Diffusion:
            return divergence_a_grad(g, BoundaryField::constant_extension(h),
                                     base_frame);
        case ProblemKind::QuadraticGradientSource:
            return h;
        case ProblemKind::CubicSource:
            return field_scaled(h, -1.0);
    }
    throw ValidationError("param_injection: unknown problem kind");
}

Field param_injection_transpose(const ProblemSpec& spec, const Field& base_frame,
                                const Field& p) {
    const Grid& g = spec.g;
    switch (spec.kind) {
        case ProblemKind::Potential:
            return field_scaled(field_mul(p, base_frame), -1.0);
        case ProblemKind::Diffusion: {
            // Edge gather transposing the flux form with constant extension:
            // edge j between nodes j and j+1 carries
            //   val_j = (u_{j+1} - u_j)(p_j - p_{j+1}) / (2 h^2),
            // split evenly onto its two coefficient slots; the extension
            // folds the two boundary slots onto nodes 1 and n.
            const int n = g.n;
            const double c = 0.5 / (g.h * g.h);
            auto uat = [&](int j) {
                return (j < 0 || j >= n) ? 0.0 : base_frame.v[(std::size_t)j];
            };
            auto pat = [&](int j) {
                return (j < 0 || j >= n) ? 0.0 : p.v[(std::size_t)j];
            };
            // val(j) for edge between extended nodes j, j+1 with j = 0..n
            auto val = [&](int j) {
                return (uat(j) - uat(j - 1)) * (pat(j - 1) - pat(j)) * c;
            };
            Field out(g);
            for (int m = 0; m < n; ++m) {
                double s = val(m) + val(m + 1);
                if (m == 0) s += val(0);
                if (m == n - 1) s += val(n);
                out.v[(std::size_t)m] = s;
            }
            return out;
        }
        case ProblemKind::QuadraticGradientSource:
            return p;
        case ProblemKind::CubicSource:
            return field_scaled(p, -1.0);
    }
    throw ValidationError("param_injection_transpose: unknown problem kind");
}

Field state_rhs(const ProblemSpec& spec, const Parameter& theta, const Field& u,
                double t) {
    const Grid& g = spec.g;
    switch (spec.kind) {
        case ProblemKind::Potential: {
            Field f = laplacian_apply(g, u);
            for (int i = 0; i < g.n; ++i) f.v[i] -= theta.f.v[i] * u.v[i];
            if (spec.phi) field_axpy(1.0, phi_at(spec, t), f);
            return f;
        }
        case ProblemKind::Diffusion: {
            Field f = divergence_a_grad(g, BoundaryField::constant_extension(theta.f), u);
            if (spec.phi) field_axpy(1.0, phi_at(spec, t), f);
            return f;
        }
        case ProblemKind::QuadraticGradientSource: {
            Field f = laplacian_apply(g, u);
            const Field gr = centered_grad_field(g, u);
            for (int i = 0; i < g.n; ++i)
                f.v[i] += gr.v[i] * gr.v[i] + theta.f.v[i];
            return f;
        }
        case ProblemKind::CubicSource: {
            Field f = laplacian_apply(g, u);
            for (int i = 0; i < g.n; ++i)
                f.v[i] += -spec.cubic.eval(u.v[i]) - theta.f.v[i];
            if (spec.phi) field_axpy(1.0, phi_at(spec, t), f);
            return f;
        }
    }
    throw ValidationError("state_rhs: unknown problem kind");
}

Field state_linearized_apply(const ProblemSpec& spec, const Parameter& theta,
                             const Field& u, const Field& v) {
    const Grid& g = spec.g;
    switch (spec.kind) {
        case ProblemKind::Potential: {
            Field f = laplacian_apply(g, v);
            for (int i = 0; i < g.n; ++i) f.v[i] -= theta.f.v[i] * v.v[i];
            return f;
        }
        case ProblemKind::Diffusion:
            return divergence_a_grad(g, BoundaryField::constant_extension(theta.f), v);
        case ProblemKind::QuadraticGradientSource: {
            Field f = laplacian_apply(g, v);
            const Field gu = centered_grad_field(g, u);
            const Field gv = centered_grad_field(g, v);
            for (int i = 0; i < g.n; ++i) f.v[i] += 2.0 * gu.v[i] * gv.v[i];
            return f;
        }
        case ProblemKind::CubicSource: {
            Field f = laplacian_apply(g, v);
            for (int i = 0; i < g.n; ++i)
                f.v[i] -= spec.cubic.deriv(u.v[i]) * v.v[i];
            return f;
        }
    }
    throw ValidationError("state_linearized_apply: unknown problem kind");
}

Field second_order_remainder(const ProblemSpec& spec, const Parameter& theta,
                             const Parameter& theta_tilde, const Field& u,
                             const Field& u_tilde) {
    const Grid& g = spec.g;
    const Field dth = field_sub(theta.f, theta_tilde.f);
    const Field du = field_sub(u, u_tilde);
    switch (spec.kind) {
        case ProblemKind::Potential:
            // (theta - th~)(u - u~)
            return field_mul(dth, du);
        case ProblemKind::Diffusion:
            // -((theta - th~) du')'
            return field_scaled(
                divergence_a_grad(g, BoundaryField::constant_extension(dth), du),
                -1.0);
        case ProblemKind::QuadraticGradientSource: {
            // -|du'|^2
            const Field gd = centered_grad_field(g, du);
            Field out(g);
            for (int i = 0; i < g.n; ++i) out.v[i] = -gd.v[i] * gd.v[i];
            return out;
        }
        case ProblemKind::CubicSource: {
            // -(Phi(u) - Phi(u~) - Phi'(u) du)
            Field out(g);
            for (int i = 0; i < g.n; ++i)
                out.v[i] = -(spec.cubic.eval(u.v[i]) - spec.cubic.eval(u_tilde.v[i]) -
                             spec.cubic.deriv(u.v[i]) * du.v[i]);
            return out;
        }
    }
    throw ValidationError("second_order_remainder: unknown problem kind");
}

// ---- linearized and adjoint ------------------------------------------------

Trajectory linearized_solve(const ProblemSpec& spec, const Parameter& theta,
                            const Trajectory& base, const Field& h) {
    const Grid& g = spec.g;
    ensure(base.n_frames() == spec.axis.n_steps + 1,
           "linearized_solve: base trajectory frame count mismatch");
    check_same_grid(g, h, "linearized_solve direction");
    if (spec.kind == ProblemKind::Diffusion) check_diffusion_admissible(spec, theta);

    return solve_linear_parabolic(g, spec.axis, Field(g), [&](int k) {
        const Field& uk = base.frames[(std::size_t)k];
        StepCoefficients co = linearized_coeffs(spec, theta, uk);
        co.rhs = param_injection(spec, uk, h);
        return co;
    });
}

Parameter adjoint_solve(const ProblemSpec& spec, const Parameter& theta,
                        const Trajectory& base, const Trajectory& w) {
    const Grid& g = spec.g;
    const int N = spec.axis.n_steps;
    ensure(base.n_frames() == N + 1, "adjoint_solve: base frame count mismatch");
    ensure(w.n_frames() == N + 1, "adjoint_solve: w frame count mismatch");
    const double dt = spec.axis.dt();

    Field grad(g);
    Field p_next(g);  // p_{N+1} = 0
    for (int k = N; k >= 1; --k) {
        const Field& uk = base.frames[(std::size_t)k];
        const Tridiag A =
            assemble_step_matrix(g, dt, linearized_coeffs(spec, theta, uk));
        const Tridiag At = tridiag_transposed(A);
        std::vector<double> rhs((std::size_t)g.n);
        for (int i = 0; i < g.n; ++i)
            rhs[(std::size_t)i] =
                p_next.v[(std::size_t)i] / dt + w.frames[(std::size_t)k].v[(std::size_t)i];
        Field p(g);
        p.v = tridiag_solve(At, rhs);
        check_finite(p.data(), p.v.size(), "adjoint_solve");
        field_axpy(dt, param_injection_transpose(spec, uk, p), grad);
        p_next = p;
    }
    return Parameter{grad, ParamSpace::L2, 2.0};
}

}  // namespace parcone
