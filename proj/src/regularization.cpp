#include "parcone/regularization.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "parcone/rng.hpp"

namespace parcone {

namespace {

constexpr double kZeroDeltaFloor = 1e-12;
constexpr double kDivergenceFactor = 10.0;

double quiet_nan() { return std::numeric_limits<double>::quiet_NaN(); }

void check_config(const LandweberConfig& cfg) {
    ensure(cfg.tau > 1.0, "landweber: tau must exceed 1");
    ensure(cfg.max_iter >= 0, "landweber: max_iter must be nonnegative");
    ensure(cfg.delta >= 0.0, "landweber: delta must be nonnegative");
}

void project_admissible(const ProblemSpec& spec, Field& theta) {
    if (spec.kind != ProblemKind::Diffusion) return;
    for (double& v : theta.v)
        if (v < spec.a_lower) v = spec.a_lower;
}

double error_vs_truth(const Grid& g, const Field& theta, const Field* truth) {
    if (truth == nullptr) return quiet_nan();
    return norm(g, field_sub(theta, *truth), SpaceKind::L2);
}

class WallClock {
  public:
    WallClock() : start_(std::chrono::steady_clock::now()) {}
    double ms() const {
        const auto now = std::chrono::steady_clock::now();
        return std::chrono::duration<double, std::milli>(now - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

}  // namespace

const char* stop_reason_name(StopReason r) {
    switch (r) {
        case StopReason::Discrepancy: return "discrepancy";
        case StopReason::MaxIter: return "max_iter";
        case StopReason::Divergence: return "divergence";
    }
    return "?";
}

Observation add_noise(const Grid& g, const Observation& y, double delta,
                      std::uint64_t seed) {
    ensure(delta >= 0.0, "add_noise: delta must be nonnegative");
    if (delta == 0.0) return y;

    Rng rng(seed);
    Observation noise;
    noise.q = y.q;
    noise.traj = y.traj;
    noise.traj.frames[0] = Field(g);  // frame 0 carries no Y weight
    for (int k = 1; k < noise.traj.n_frames(); ++k) {
        Field& fr = noise.traj.frames[(std::size_t)k];
        fr = Field(g);
        for (int i = 0; i < g.n; ++i) fr.v[i] = rng.gaussian();
    }
    const double nn = obs_norm(g, noise);
    ensure_solver(nn > 0.0, "add_noise: degenerate perturbation");
    const double s = delta / nn;

    Observation out = y;
    for (int k = 1; k < out.traj.n_frames(); ++k)
        field_axpy(s, noise.traj.frames[(std::size_t)k],
                   out.traj.frames[(std::size_t)k]);
    return out;
}

bool discrepancy_stop(double residual, const LandweberConfig& cfg) {
    const double level =
        (cfg.delta > 0.0) ? cfg.tau * cfg.delta : kZeroDeltaFloor;
    return residual <= level;
}

ReducedResult landweber_reduced(const ProblemSpec& spec,
                                const Observation& y_delta,
                                const LandweberConfig& cfg,
                                const Parameter& theta0,
                                const Field* theta_true) {
    check_config(cfg);
    const Grid& g = spec.g;
    const WallClock clock;

    ReducedResult out;
    out.theta = theta0;
    Trajectory base = forward_solve(spec, out.theta);

    double mu = cfg.mu;
    if (mu <= 0.0) {
        const double cf = estimate_fprime_norm(spec, out.theta, base, 20, cfg.seed);
        ensure_solver(cf > 0.0, "landweber_reduced: derivative norm probe is zero");
        mu = 0.9 / (cf * cf);
    }
    out.log.mu_used = mu;

    double initial_residual = 0.0;
    for (int k = 0;; ++k) {
        Observation r;
        r.q = y_delta.q;
        r.traj = base;
        for (int j = 0; j < r.traj.n_frames(); ++j)
            r.traj.frames[(std::size_t)j] = field_sub(
                base.frames[(std::size_t)j], y_delta.traj.frames[(std::size_t)j]);
        const double res = obs_norm(g, r);
        if (k == 0) initial_residual = res;

        out.log.records.push_back({k, res, error_vs_truth(g, out.theta.f, theta_true),
                                   quiet_nan(), clock.ms()});

        if (discrepancy_stop(res, cfg)) {
            out.log.stop_reason = StopReason::Discrepancy;
            break;
        }
        if (k > 0 && res > kDivergenceFactor * initial_residual) {
            out.log.stop_reason = StopReason::Divergence;
            break;
        }
        if (k == cfg.max_iter) {
            out.log.stop_reason = StopReason::MaxIter;
            break;
        }

        const Parameter grad = apply_Fprime_adjoint(spec, out.theta, base, r);
        field_axpy(-mu, grad.f, out.theta.f);
        project_admissible(spec, out.theta.f);
        base = forward_solve(spec, out.theta);
    }
    return out;
}

AaoResult landweber_aao(const ProblemSpec& spec, const Observation& y_delta,
                        const LandweberConfig& cfg, const AaoIterate& start,
                        const Field* theta_true) {
    check_config(cfg);
    const Grid& g = spec.g;
    const WallClock clock;

    AaoResult out;
    out.iterate = start;
    ensure(out.iterate.u.n_frames() == spec.axis.n_steps + 1,
           "landweber_aao: starting state frame count mismatch");

    double mu = cfg.mu;
    if (mu <= 0.0) {
        const double ca = estimate_aao_norm(spec, out.iterate.theta,
                                            out.iterate.u, 20, cfg.seed);
        ensure_solver(ca > 0.0, "landweber_aao: derivative norm probe is zero");
        mu = 0.9 / (ca * ca);
    }
    out.log.mu_used = mu;

    double initial_residual = 0.0;
    for (int k = 0;; ++k) {
        const AaoResidual r =
            aao_apply(spec, out.iterate.theta, out.iterate.u, y_delta);
        const double res = aao_product_norm(spec, r);
        const double mn =
            wstar_time_norm(g, spec.axis, r.model_part, wstar_kind(spec.kind));
        if (k == 0) initial_residual = res;

        out.log.records.push_back({k, res,
                                   error_vs_truth(g, out.iterate.theta.f, theta_true),
                                   mn, clock.ms()});

        if (discrepancy_stop(res, cfg)) {
            out.log.stop_reason = StopReason::Discrepancy;
            break;
        }
        if (k > 0 && res > kDivergenceFactor * initial_residual) {
            out.log.stop_reason = StopReason::Divergence;
            break;
        }
        if (k == cfg.max_iter) {
            out.log.stop_reason = StopReason::MaxIter;
            break;
        }

        const AaoGradient grad =
            aao_adjoint(spec, out.iterate.theta, out.iterate.u, r);
        field_axpy(-mu, grad.theta.f, out.iterate.theta.f);
        project_admissible(spec, out.iterate.theta.f);
        for (int j = 0; j <= spec.axis.n_steps; ++j)
            field_axpy(-mu, grad.u.frames[(std::size_t)j],
                       out.iterate.u.frames[(std::size_t)j]);
    }
    return out;
}

}  // namespace parcone
