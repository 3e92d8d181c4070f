#include "parcone/operators.hpp"

#include <cmath>

#include "parcone/rng.hpp"

namespace parcone {

double obs_norm(const Grid& g, const Observation& y) {
    const double dt = y.traj.axis.dt();
    double s = 0.0;
    for (int k = 1; k < y.traj.n_frames(); ++k) {
        const double nk = lp_norm(g, y.traj.frames[(std::size_t)k], y.q);
        s += dt * nk * nk;
    }
    return std::sqrt(s);
}

double obs_inner(const Grid& g, const Observation& a, const Observation& b) {
    ensure(a.traj.n_frames() == b.traj.n_frames(),
           "obs_inner: frame count mismatch");
    const double dt = a.traj.axis.dt();
    double s = 0.0;
    for (int k = 1; k < a.traj.n_frames(); ++k)
        s += dt * inner_product(g, a.traj.frames[(std::size_t)k],
                                b.traj.frames[(std::size_t)k], SpaceKind::L2);
    return s;
}

double wstar_time_norm(const Grid& g, const TimeAxis& axis,
                       const std::vector<Field>& r, SpaceKind w_kind) {
    ensure((int)r.size() == axis.n_steps,
           "wstar_time_norm: need one residual per step");
    const double dt = axis.dt();
    double s = 0.0;
    for (const Field& rk : r) {
        const double nk = dual_norm_W(g, rk, w_kind);
        s += dt * nk * nk;
    }
    return std::sqrt(s);
}

// ---- reduced map -----------------------------------------------------------

Observation apply_F(const ProblemSpec& spec, const Parameter& theta, double q) {
    return Observation{forward_solve(spec, theta), q};
}

Observation apply_Fprime(const ProblemSpec& spec, const Parameter& theta,
                         const Trajectory& base, const Field& h, double q) {
    return Observation{linearized_solve(spec, theta, base, h), q};
}

Parameter apply_Fprime_adjoint(const ProblemSpec& spec, const Parameter& theta,
                               const Trajectory& base, const Observation& w) {
    return adjoint_solve(spec, theta, base, w.traj);
}

// ---- all-at-once -----------------------------------------------------------

AaoResidual aao_apply(const ProblemSpec& spec, const Parameter& theta,
                      const Trajectory& u, const Observation& y) {
    const Grid& g = spec.g;
    const int N = spec.axis.n_steps;
    ensure(u.n_frames() == N + 1, "aao_apply: state frame count mismatch");
    ensure(y.traj.n_frames() == N + 1, "aao_apply: data frame count mismatch");
    const double dt = spec.axis.dt();

    AaoResidual r;
    r.model_part.reserve((std::size_t)N);
    for (int k = 1; k <= N; ++k) {
        const Field& uk = u.frames[(std::size_t)k];
        const Field& um = u.frames[(std::size_t)k - 1];
        Field f = state_rhs(spec, theta, uk, spec.axis.t(k));
        Field m(g);
        for (int i = 0; i < g.n; ++i)
            m.v[i] = (uk.v[i] - um.v[i]) / dt - f.v[i];
        r.model_part.push_back(std::move(m));
    }
    r.init_part = field_sub(u.frames[0], spec.u0);
    Observation obs;
    obs.q = y.q;
    obs.traj = u;
    for (int k = 0; k <= N; ++k)
        obs.traj.frames[(std::size_t)k] =
            field_sub(u.frames[(std::size_t)k], y.traj.frames[(std::size_t)k]);
    r.obs_part = std::move(obs);
    return r;
}

AaoResidual aao_linearized_apply(const ProblemSpec& spec, const Parameter& theta,
                                 const Trajectory& u, const Field& dtheta,
                                 const Trajectory& du) {
    const Grid& g = spec.g;
    const int N = spec.axis.n_steps;
    ensure(u.n_frames() == N + 1 && du.n_frames() == N + 1,
           "aao_linearized_apply: frame count mismatch");
    const double dt = spec.axis.dt();

    AaoResidual r;
    r.model_part.reserve((std::size_t)N);
    for (int k = 1; k <= N; ++k) {
        const Field& uk = u.frames[(std::size_t)k];
        const Field inj = param_injection(spec, uk, dtheta);
        const Field lin =
            state_linearized_apply(spec, theta, uk, du.frames[(std::size_t)k]);
        Field m(g);
        for (int i = 0; i < g.n; ++i)
            m.v[i] = (du.frames[(std::size_t)k].v[i] -
                      du.frames[(std::size_t)k - 1].v[i]) /
                         dt -
                     inj.v[i] - lin.v[i];
        r.model_part.push_back(std::move(m));
    }
    r.init_part = du.frames[0];
    r.obs_part = Observation{du, 2.0};
    return r;
}

AaoGradient aao_adjoint(const ProblemSpec& spec, const Parameter& theta,
                        const Trajectory& u, const AaoResidual& rho) {
    const Grid& g = spec.g;
    const int N = spec.axis.n_steps;
    ensure((int)rho.model_part.size() == N, "aao_adjoint: model part size");
    const double dt = spec.axis.dt();
    const double h = g.h;
    const SpaceKind wk = wstar_kind(spec.kind);

    // sigma_k = M K^{-1} M rho_model_k realizes the W* pairing.
    std::vector<Field> sigma;
    sigma.reserve((std::size_t)N);
    for (const Field& rk : rho.model_part)
        sigma.push_back(wstar_gram_apply(g, rk, wk));

    AaoGradient out;
    out.theta = Parameter{Field(g), ParamSpace::L2, 2.0};
    out.u = make_trajectory(g, spec.axis);

    for (int k = 1; k <= N; ++k) {
        const Field& uk = u.frames[(std::size_t)k];
        const Field& sk = sigma[(std::size_t)k - 1];

        // g_theta -= dt/h * B_k^T sigma_k
        field_axpy(-dt / h, param_injection_transpose(spec, uk, sk), out.theta.f);

        // g_u[k] = (sigma_k - sigma_{k+1})/(dt h) + (L_k^T sigma_k)/h + rho_obs_k
        const Tridiag A =
            assemble_step_matrix(g, dt, linearized_coeffs(spec, theta, uk));
        const Tridiag At = tridiag_transposed(A);
        Field Ats(g);
        tridiag_apply(At, sk.data(), Ats.data());

        Field& gu = out.u.frames[(std::size_t)k];
        for (int i = 0; i < g.n; ++i) {
            const double s_next =
                (k < N) ? sigma[(std::size_t)k].v[i] : 0.0;
            // L^T sigma = A^T sigma - sigma/dt
            const double lts = Ats.v[i] - sk.v[i] / dt;
            gu.v[i] = (sk.v[i] - s_next) / (dt * h) + lts / h +
                      rho.obs_part.traj.frames[(std::size_t)k].v[i];
        }
    }

    // g_u[0] = rho_init - sigma_1 / h
    Field& gu0 = out.u.frames[0];
    for (int i = 0; i < g.n; ++i)
        gu0.v[i] = rho.init_part.v[i] - sigma[0].v[i] / h;

    return out;
}

double aao_product_norm(const ProblemSpec& spec, const AaoResidual& r) {
    const Grid& g = spec.g;
    const double nm =
        wstar_time_norm(g, spec.axis, r.model_part, wstar_kind(spec.kind));
    const double ni = norm(g, r.init_part, SpaceKind::L2);
    const double no = obs_norm(g, r.obs_part);
    return std::sqrt(nm * nm + ni * ni + no * no);
}

double aao_domain_norm(const Grid& g, const TimeAxis& axis, const Field& dtheta,
                       const Trajectory& du) {
    const double dt = axis.dt();
    double s = inner_product(g, dtheta, dtheta, SpaceKind::L2);
    s += inner_product(g, du.frames[0], du.frames[0], SpaceKind::L2);
    for (int k = 1; k < du.n_frames(); ++k)
        s += dt * inner_product(g, du.frames[(std::size_t)k],
                                du.frames[(std::size_t)k], SpaceKind::L2);
    return std::sqrt(s);
}

// ---- probes ----------------------------------------------------------------

namespace {

Field random_field(const Grid& g, Rng& rng) {
    Field f(g);
    for (int i = 0; i < g.n; ++i) f.v[i] = rng.gaussian();
    return f;
}

}  // namespace

double estimate_fprime_norm(const ProblemSpec& spec, const Parameter& theta,
                            const Trajectory& base, int iters,
                            std::uint64_t seed) {
    const Grid& g = spec.g;
    Rng rng(seed);
    Field hdir = random_field(g, rng);
    double lambda = 0.0;
    for (int it = 0; it < iters; ++it) {
        const double nh = norm(g, hdir, SpaceKind::L2);
        ensure_solver(nh > 0.0, "estimate_fprime_norm: direction collapsed");
        hdir = field_scaled(hdir, 1.0 / nh);
        const Observation z = apply_Fprime(spec, theta, base, hdir, 2.0);
        const double nz = obs_norm(g, z);
        lambda = nz * nz;
        const Parameter back = apply_Fprime_adjoint(spec, theta, base, z);
        hdir = back.f;
    }
    return std::sqrt(lambda);
}

double estimate_lin_stability(const ProblemSpec& spec, const Parameter& theta,
                              const Trajectory& base, int iters,
                              std::uint64_t seed) {
    const Grid& g = spec.g;
    const int N = spec.axis.n_steps;
    const double dt = spec.axis.dt();
    const SpaceKind wk = wstar_kind(spec.kind);
    Rng rng(seed);

    // b: one W*-measured source per step
    std::vector<Field> b;
    b.reserve((std::size_t)N);
    for (int k = 0; k < N; ++k) b.push_back(random_field(g, rng));

    auto wstar_sq = [&](const std::vector<Field>& r) {
        const double nr = wstar_time_norm(g, spec.axis, r, wk);
        return nr * nr;
    };

    double lambda = 0.0;
    for (int it = 0; it < iters; ++it) {
        const double nb = std::sqrt(wstar_sq(b));
        ensure_solver(nb > 0.0, "estimate_lin_stability: source collapsed");
        for (auto& bk : b) bk = field_scaled(bk, 1.0 / nb);

        // forward: A_k z_k = z_{k-1}/dt + b_k
        Trajectory z = make_trajectory(g, spec.axis);
        for (int k = 1; k <= N; ++k) {
            StepCoefficients co =
                linearized_coeffs(spec, theta, base.frames[(std::size_t)k]);
            co.rhs = b[(std::size_t)k - 1];
            z.frames[(std::size_t)k] =
                implicit_euler_step(g, dt, co, z.frames[(std::size_t)k - 1]);
        }
        double nz = 0.0;
        for (int k = 1; k <= N; ++k) {
            const double nk = norm(g, z.frames[(std::size_t)k], SpaceKind::L2);
            nz += dt * nk * nk;
        }
        lambda = nz;

        // transpose: A_k^T q_k = q_{k+1}/dt + h z_k, then the Gram inverse
        Field q_next(g);
        std::vector<Field> back((std::size_t)N, Field(g));
        for (int k = N; k >= 1; --k) {
            const Tridiag A = assemble_step_matrix(
                g, dt, linearized_coeffs(spec, theta, base.frames[(std::size_t)k]));
            std::vector<double> rhs((std::size_t)g.n);
            for (int i = 0; i < g.n; ++i)
                rhs[(std::size_t)i] = q_next.v[(std::size_t)i] / dt +
                                      g.h * z.frames[(std::size_t)k].v[(std::size_t)i];
            Field q(g);
            q.v = tridiag_solve(tridiag_transposed(A), rhs);
            back[(std::size_t)k - 1] = wstar_gram_inverse_apply(g, q, wk);
            q_next = q;
        }
        b = std::move(back);
    }
    return std::sqrt(lambda);
}

double estimate_aao_norm(const ProblemSpec& spec, const Parameter& theta,
                         const Trajectory& u, int iters, std::uint64_t seed) {
    const Grid& g = spec.g;
    Rng rng(seed);
    Field dtheta = random_field(g, rng);
    Trajectory du = make_trajectory(g, spec.axis);
    for (auto& fr : du.frames) fr = random_field(g, rng);

    double lambda = 0.0;
    for (int it = 0; it < iters; ++it) {
        const double nd = aao_domain_norm(g, spec.axis, dtheta, du);
        ensure_solver(nd > 0.0, "estimate_aao_norm: direction collapsed");
        dtheta = field_scaled(dtheta, 1.0 / nd);
        for (auto& fr : du.frames) fr = field_scaled(fr, 1.0 / nd);

        const AaoResidual t = aao_linearized_apply(spec, theta, u, dtheta, du);
        const double nt = aao_product_norm(spec, t);
        lambda = nt * nt;

        const AaoGradient gr = aao_adjoint(spec, theta, u, t);
        dtheta = gr.theta.f;
        du = gr.u;
    }
    return std::sqrt(lambda);
}

}  // namespace parcone
