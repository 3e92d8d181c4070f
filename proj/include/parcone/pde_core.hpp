#pragma once
///
/// @file pde_core.hpp
/// @brief Implicit Euler marching for 1-D parabolic problems.
///
/// One scheme only: backward Euler, coefficients evaluated at the new time
/// level.  A step solves
///
///   ( I/dt  - D + drift d/dx + reaction ) u_new = u_prev/dt + rhs
///
/// where D is the diffusion operator (none, the Laplacian, or flux-form
/// variable coefficients).  The drift term uses the centered difference, no
/// upwinding; every system stays tridiagonal and goes through Thomas.
/// Nonlinear steps run a damped-free Newton on the full implicit residual
/// with the previous frame as initial guess.

#include <functional>
#include <vector>

#include "parcone/grid.hpp"
#include "parcone/tridiag.hpp"

namespace parcone {

struct TimeAxis {
    double T = 0.0;
    int n_steps = 0;

    double dt() const { return T / n_steps; }
    double t(int k) const { return T * k / n_steps; }
};

TimeAxis make_time_axis(double T, int n_steps);

/// frames[k] is the solution at t_k, k = 0 .. n_steps.
struct Trajectory {
    TimeAxis axis;
    std::vector<Field> frames;

    int n_frames() const { return (int)frames.size(); }
};

Trajectory make_trajectory(const Grid& g, const TimeAxis& axis);

enum class DiffusionMode { None, Laplacian, Variable };

/// Coefficients of one implicit step.  Empty fields mean zero.  bc_left and
/// bc_right are Dirichlet values of the unknown at the two boundary nodes.
struct StepCoefficients {
    DiffusionMode diffusion = DiffusionMode::Laplacian;
    BoundaryField a;   ///< used when diffusion == Variable
    Field reaction;
    Field drift;
    Field rhs;
    double bc_left = 0.0, bc_right = 0.0;
};

/// System matrix I/dt + spatial operator of the step.
Tridiag assemble_step_matrix(const Grid& g, double dt,
                             const StepCoefficients& co);

/// Boundary and source contributions on the right-hand side:
/// u_prev/dt + rhs + Dirichlet terms.
std::vector<double> assemble_step_rhs(const Grid& g, double dt,
                                      const StepCoefficients& co,
                                      const Field& u_prev);

Field implicit_euler_step(const Grid& g, double dt, const StepCoefficients& co,
                          const Field& u_prev);

/// March with time-indexed coefficients; coeffs_of(k) supplies the step
/// ending at t_k, k = 1 .. n_steps.
Trajectory solve_linear_parabolic(
    const Grid& g, const TimeAxis& axis, const Field& u0,
    const std::function<StepCoefficients(int)>& coeffs_of);

struct NewtonOptions {
    double tol = 1e-10;  ///< L2 norm of the step residual
    int max_iter = 25;
};

using ResidualFn = std::function<Field(const Field& u_new)>;
using JacobianFn = std::function<Tridiag(const Field& u_new)>;

/// Solves R(u_new) = 0 by Newton from u_guess.  R must be the full implicit
/// step residual (u_new - u_prev)/dt - f(u_new); jac its exact tridiagonal
/// derivative.  Throws SolverError with the last residual norm on stall.
Field newton_parabolic_step(const Grid& g, const ResidualFn& R,
                            const JacobianFn& jac, const Field& u_guess,
                            const NewtonOptions& opt = {});

}  // namespace parcone
