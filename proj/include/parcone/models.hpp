#pragma once
///
/// @file models.hpp
/// @brief The four parabolic identification models and their exact discrete
///        linearizations.
///
/// All four share the scheme from pde_core; writing u_k for the new frame
/// and theta for the unknown coefficient or source:
///
///   Potential                  du/dt - lap u + theta u        = phi
///   Diffusion                  du/dt - (theta u')'            = phi
///   QuadraticGradientSource    du/dt - lap u - |u'|^2         = theta
///   CubicSource                du/dt - lap u + Phi(u)         = phi - theta
///
/// Homogeneous Dirichlet data throughout; the exp-transform path for the
/// gradient model works on U = exp(u) with U = 1 on the boundary.
///
/// Linearized and adjoint solves differentiate / transpose the *discrete*
/// forward map, never the continuum equations, so the adjoint identity
/// holds to rounding.  Coefficients freeze at the new-level base frames,
/// matching the implicit scheme.

#include <functional>

#include "parcone/pde_core.hpp"

namespace parcone {

enum class ProblemKind { Potential, Diffusion, QuadraticGradientSource, CubicSource };

const char* kind_name(ProblemKind k);

/// Phi(u) = a3 u^3 + a2 u^2 + a1 u.
struct CubicCoeffs {
    double a3 = 1.0, a2 = 0.0, a1 = 0.0;

    static CubicCoeffs cube() { return {1.0, 0.0, 0.0}; }            // u^3
    static CubicCoeffs bistable() { return {-1.0, 0.0, 1.0}; }       // u (1 - u^2)
    static CubicCoeffs quadratic_shelf() { return {-1.0, 1.0, 0.0}; }// u^2 (1 - u)
    static CubicCoeffs threshold(double alpha = 0.25) {              // u (1-u)(u-alpha)
        return {-1.0, 1.0 + alpha, -alpha};
    }

    double eval(double u) const { return ((a3 * u + a2) * u + a1) * u; }
    double deriv(double u) const { return (3.0 * a3 * u + 2.0 * a2) * u + a1; }
};

enum class ParamSpace { L2, W1p };

/// The unknown; the iteration space is always discrete L2, the space tag
/// only selects measurement norms.
struct Parameter {
    Field f;
    ParamSpace space = ParamSpace::L2;
    double p = 2.0;
};

struct ProblemSpec {
    ProblemKind kind = ProblemKind::Potential;
    Grid g;
    TimeAxis axis;
    Field u0;
    /// Source term phi(t); null means zero.  Ignored by the gradient model.
    std::function<Field(double)> phi;
    CubicCoeffs cubic = CubicCoeffs::cube();
    double a_lower = 0.1;          ///< admissibility floor for Diffusion
    double positivity_floor = 1e-8;///< exp-transform positivity guard
    NewtonOptions newton;
};

/// Natural w-kind of the model-equation residual space: the Laplacian-graph
/// norm except for the cubic model, whose state space pairs with H1_0.
SpaceKind wstar_kind(ProblemKind k);

// ---- forward ---------------------------------------------------------------

/// S(theta): the implicit-Euler (Newton for the nonlinear models) trajectory.
Trajectory forward_solve(const ProblemSpec& spec, const Parameter& theta);

/// Gradient model only: solve the linear problem for U = exp(u), boundary
/// value 1, then take logs.  Errors if any U frame touches the positivity
/// floor, naming the frame.
Trajectory forward_solve_exp_transform(const ProblemSpec& spec,
                                       const Parameter& theta);

// ---- exact discrete derivative pieces --------------------------------------

/// Coefficients of the linearized operator at a base frame: I/dt + L_k.
/// No rhs, homogeneous boundary.
StepCoefficients linearized_coeffs(const ProblemSpec& spec, const Parameter& theta,
                                   const Field& base_frame);

/// B_k h: derivative of the step residual in the parameter direction h,
/// moved to the right-hand side.
Field param_injection(const ProblemSpec& spec, const Field& base_frame,
                      const Field& h);

/// Exact transpose of param_injection in the Euclidean pairing.
Field param_injection_transpose(const ProblemSpec& spec, const Field& base_frame,
                                const Field& p);

/// f(theta, u) at one frame: everything except du/dt, so that the discrete
/// step residual is (u_k - u_{k-1})/dt - f(theta, u_k).
Field state_rhs(const ProblemSpec& spec, const Parameter& theta, const Field& u,
                double t);

/// f'_u(theta, u)[v], frozen at the given frame.
Field state_linearized_apply(const ProblemSpec& spec, const Parameter& theta,
                             const Field& u, const Field& v);

/// Closed-form second-order remainder of f between (theta, u) and
/// (tilde_theta, tilde_u):
///   f(theta,u) - f(th~,u~) - f'_theta (theta - th~) - f'_u (u - u~).
/// Exactly -(theta - th~)(u - u~)-type products for the bilinear models.
Field second_order_remainder(const ProblemSpec& spec, const Parameter& theta,
                             const Parameter& theta_tilde, const Field& u,
                             const Field& u_tilde);

// ---- linearization and adjoint ---------------------------------------------

/// z = S'(theta) h along the base trajectory (must be forward_solve(theta)).
Trajectory linearized_solve(const ProblemSpec& spec, const Parameter& theta,
                            const Trajectory& base, const Field& h);

/// Exact transpose of linearized_solve against the L2(0,T;L2) pairing of
/// trajectories (frames 1..N) and the L2(Omega) pairing of parameters:
///   <S'(theta) h, w>_Y = <h, adjoint_solve(..., w)>_X  to rounding.
/// w frames at k = 1..N drive the backward march; frame 0 is ignored.
Parameter adjoint_solve(const ProblemSpec& spec, const Parameter& theta,
                        const Trajectory& base, const Trajectory& w);

}  // namespace parcone
