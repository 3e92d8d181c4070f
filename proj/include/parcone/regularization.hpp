#pragma once
///
/// @file regularization.hpp
/// @brief Landweber iteration, reduced and all-at-once, with discrepancy
///        stopping and noise synthesis.
///
/// Reduced update:       theta <- theta - mu F'(theta)* (F(theta) - y^d)
/// All-at-once update:   (theta, u) <- (theta, u) - mu T* (residual)
/// with T* the aao_adjoint transpose.  Diffusion iterates are projected to
/// the admissible set max(theta, a_lower) after every update.
///
/// Stopping: first k with residual <= tau * delta; for delta = 0 an
/// absolute floor of 1e-12 stands in.  A residual above 10x its initial
/// value aborts the run as divergent.

#include <cstdint>
#include <vector>

#include "parcone/operators.hpp"

namespace parcone {

struct LandweberConfig {
    /// Step size; any value <= 0 requests the auto rule 0.9 / C^2 with C
    /// the power-iteration norm estimate at the starting point (20 rounds).
    double mu = 0.0;
    double tau = 1.5;        ///< discrepancy parameter, > 1
    int max_iter = 500;      ///< maximum number of updates
    double delta = 0.0;      ///< noise level in the Y norm
    std::uint64_t seed = 1;  ///< seeds the step-size probe
};

enum class StopReason { Discrepancy, MaxIter, Divergence };
const char* stop_reason_name(StopReason r);

struct IterationRecord {
    int k = 0;
    double residual_norm = 0.0;
    double error_norm = 0.0;  ///< ||theta_k - theta_true||_L2; NaN if unknown
    double model_norm = 0.0;  ///< AAO model-part norm; NaN for reduced runs
    double wall_ms = 0.0;     ///< cumulative, excluded from determinism
};

struct IterationLog {
    std::vector<IterationRecord> records;
    StopReason stop_reason = StopReason::MaxIter;
    double mu_used = 0.0;
};

/// y + seeded Gaussian perturbation on frames 1..N, rescaled so that the
/// perturbation has Y norm exactly delta.  delta = 0 returns y unchanged.
Observation add_noise(const Grid& g, const Observation& y, double delta,
                      std::uint64_t seed);

/// residual <= tau * delta, with the absolute floor when delta = 0.
bool discrepancy_stop(double residual, const LandweberConfig& cfg);

struct ReducedResult {
    Parameter theta;
    IterationLog log;
};

/// theta_true, when given, fills error_norm in the log; it never steers the
/// iteration.
ReducedResult landweber_reduced(const ProblemSpec& spec,
                                const Observation& y_delta,
                                const LandweberConfig& cfg,
                                const Parameter& theta0,
                                const Field* theta_true = nullptr);

struct AaoIterate {
    Parameter theta;
    Trajectory u;
};

struct AaoResult {
    AaoIterate iterate;
    IterationLog log;
};

AaoResult landweber_aao(const ProblemSpec& spec, const Observation& y_delta,
                        const LandweberConfig& cfg, const AaoIterate& start,
                        const Field* theta_true = nullptr);

}  // namespace parcone
