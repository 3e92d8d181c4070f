#pragma once
///
/// @file operators.hpp
/// @brief The reduced forward map, its derivative and adjoint, and the
///        all-at-once residual system, with the norms that pair them.
///
/// Reduced map: F(theta) = C(S(theta)) with full observation C = id.  The
/// observation space Y is L2(0,T; Lq), discretized with the right-endpoint
/// rule matching implicit Euler: frame 0 carries no weight.
///
/// All-at-once system on pairs (theta, u):
///   model part   (u_k - u_{k-1})/dt - f(theta, u_k)       in W* per frame
///   init part    u_0 - u0                                 in L2
///   obs part     C(u) - y                                 in Y
/// Component norms combine as root-sum-of-squares.  The adjoint is the
/// exact transpose against (L2 parameter) x (init L2 + right-endpoint L2
/// trajectory) inner products, with W* realized through the Gram solve.

#include <cstdint>
#include <vector>

#include "parcone/models.hpp"

namespace parcone {

struct Observation {
    Trajectory traj;
    double q = 2.0;  ///< spatial index of the Y norm
};

/// || y ||_Y = sqrt( sum_{k>=1} dt ||y_k||_{Lq}^2 ).
double obs_norm(const Grid& g, const Observation& y);

/// q = 2 inner product on Y (the Hilbert-space case used for adjoints).
double obs_inner(const Grid& g, const Observation& a, const Observation& b);

/// sqrt( sum_{k=1..N} dt || r_k ||_{W*}^2 ) over a time-indexed residual
/// (r has one entry per step, no frame 0).
double wstar_time_norm(const Grid& g, const TimeAxis& axis,
                       const std::vector<Field>& r, SpaceKind w_kind);

// ---- reduced map -----------------------------------------------------------

Observation apply_F(const ProblemSpec& spec, const Parameter& theta,
                    double q = 2.0);

/// F'(theta) h along a precomputed base (= forward_solve(theta)).
Observation apply_Fprime(const ProblemSpec& spec, const Parameter& theta,
                         const Trajectory& base, const Field& h, double q = 2.0);

/// F'(theta)* w in the L2 parameter pairing.
Parameter apply_Fprime_adjoint(const ProblemSpec& spec, const Parameter& theta,
                               const Trajectory& base, const Observation& w);

// ---- all-at-once system ----------------------------------------------------

struct AaoResidual {
    std::vector<Field> model_part;  ///< N entries, step k at index k-1
    Field init_part;
    Observation obs_part;
};

/// F_aao(theta, u) - (0, 0, y).
AaoResidual aao_apply(const ProblemSpec& spec, const Parameter& theta,
                      const Trajectory& u, const Observation& y);

/// Derivative of F_aao at (theta, u) in direction (dtheta, du); coefficients
/// freeze at the given state, not at S(theta).
AaoResidual aao_linearized_apply(const ProblemSpec& spec, const Parameter& theta,
                                 const Trajectory& u, const Field& dtheta,
                                 const Trajectory& du);

struct AaoGradient {
    Parameter theta;
    Trajectory u;
};

/// Exact transpose of aao_linearized_apply; see the header comment for the
/// inner products.
AaoGradient aao_adjoint(const ProblemSpec& spec, const Parameter& theta,
                        const Trajectory& u, const AaoResidual& rho);

double aao_product_norm(const ProblemSpec& spec, const AaoResidual& r);

/// Domain product norm sqrt(||dtheta||_L2^2 + ||du_0||_L2^2 +
/// sum_{k>=1} dt ||du_k||_L2^2), pairing aao_adjoint.
double aao_domain_norm(const Grid& g, const TimeAxis& axis, const Field& dtheta,
                       const Trajectory& du);

// ---- operator-norm probes --------------------------------------------------

/// Power-iteration estimate of || F'(theta) ||_{L2 -> Y} (q = 2).
double estimate_fprime_norm(const ProblemSpec& spec, const Parameter& theta,
                            const Trajectory& base, int iters, std::uint64_t seed);

/// Power-iteration estimate of the norm of the solution map b -> z,
///   (z_k - z_{k-1})/dt + L_k z_k = b_k,  z_0 = 0,
/// from W*-normed step residuals to Y (q = 2).  This is the constant that
/// carries all-at-once cone ratios to reduced ones.
double estimate_lin_stability(const ProblemSpec& spec, const Parameter& theta,
                              const Trajectory& base, int iters,
                              std::uint64_t seed);

/// Power-iteration estimate of || F_aao'(theta, u) || between the product
/// spaces used by aao_adjoint.
double estimate_aao_norm(const ProblemSpec& spec, const Parameter& theta,
                         const Trajectory& u, int iters, std::uint64_t seed);

}  // namespace parcone
