#pragma once
///
/// @file tcc_lab.hpp
/// @brief Empirical measurement of the tangential cone constant, plus the
///        derivative-verification utilities (adjoint test, Taylor test).
///
/// A run samples parameter pairs independently in an X-norm ball around a
/// center theta0 and records, per pair,
///
///   reduced:    || F(t) - F(t~) - F'(t)(t - t~) ||_Y
///               ------------------------------------
///                      || F(t) - F(t~) ||_Y
///
///   all-at-once (model-equation residual measured in the W* time norm):
///               || f(t,u) - f(t~,u~) - f_t' dt - f_u' du ||_W*
/// over either   || C(u - u~) ||_Y                      (primary family)
/// or the root-sum-of-squares of (model, init, obs) differences
///                                                      (generalized family)
/// with u = S(t), u~ = S(t~).
///
/// The observed max over N pairs is a lower bound on the true supremum;
/// reports carry the sample metadata so the number is never quoted without
/// its N and seed.  Pairs with denominator under the floor are skipped and
/// counted separately from solver failures.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "parcone/operators.hpp"
#include "parcone/rng.hpp"

namespace parcone {

struct SampleConfig {
    Parameter theta0;
    double rho = 0.5;      ///< ball radius in the X norm of theta0
    int n_pairs = 200;
    std::uint64_t seed = 1;
    double y_norm_q = 2.0;
    /// Absolute denominator cutoff; any value <= 0 requests the relative
    /// default 1e-12 * ||F(theta0)||_Y.
    double denominator_floor = 0.0;
};

/// skipped_flag values.
inline constexpr int kPairKept = 0;
inline constexpr int kPairDegenerate = 1;    ///< denominator under the floor
inline constexpr int kPairSolverFailed = 2;  ///< a solve in the pair threw

struct PairRecord {
    int pair_index = 0;
    std::uint64_t seed_offset = 0;  ///< stream index of the pair's first draw
    double numerator = 0.0;
    double denominator = 0.0;
    double ratio = 0.0;
    double gen_denominator = 0.0;  ///< NaN outside the all-at-once family
    double gen_ratio = 0.0;        ///< NaN outside the all-at-once family
    int skipped_flag = kPairKept;
    std::string note;  ///< solver message for failed pairs
};

struct RatioSummary {
    std::vector<double> sorted;  ///< retained ratios, ascending
    double max = 0.0;
    double q50 = 0.0, q90 = 0.0, q99 = 0.0;
    int retained = 0;
};

struct TccProvenance {
    std::string problem;
    int n = 0;
    double T = 0.0;
    int n_steps = 0;
    double rho = 0.0;
    int n_pairs = 0;
    std::uint64_t seed = 0;
    double y_norm_q = 2.0;
    std::string numerator_norm;  ///< "Y" or the W* flavor
    double denominator_floor = 0.0;  ///< resolved absolute value
};

struct TccReport {
    std::string family;  ///< "reduced" or "aao"
    std::vector<PairRecord> pairs;  ///< all attempted, in pair_index order
    RatioSummary primary;
    RatioSummary generalized;  ///< populated for the aao family only
    int degenerate = 0;
    int solver_failures = 0;
    TccProvenance provenance;
};

/// theta0 + rho * s * g/||g||, s uniform in (0,1], g an 8-mode sine series
/// with seeded Gaussian coefficients; the X norm is the one tagged on
/// theta0.  Diffusion draws are clipped to >= a_lower and redrawn (at most
/// 100 times) if clipping pushed them out of the ball.
Parameter sample_ball(const ProblemSpec& spec, const Parameter& theta0,
                      double rho, Rng& rng);
Parameter sample_ball(const ProblemSpec& spec, const Parameter& theta0,
                      double rho, std::uint64_t seed);

TccReport tcc_estimate_reduced(const ProblemSpec& spec, const SampleConfig& cfg);
TccReport tcc_estimate_aao(const ProblemSpec& spec, const SampleConfig& cfg);

/// Worst relative gap between <F'(theta) h, w>_Y and <h, F'(theta)* w>_L2
/// over n_trials seeded random (h, w) pairs.
double adjoint_test(const ProblemSpec& spec, const Parameter& theta,
                    int n_trials, std::uint64_t seed);

struct TaylorPoint {
    double t = 0.0;
    double remainder = 0.0;       ///< || F(theta + t h) - F(theta) - t F' h ||
    double observed_order = 0.0;  ///< successive log-ratio; NaN on the first row
};

/// Taylor remainder sequence for a general map and its claimed derivative;
/// t_list must be decreasing with at least 3 entries.
using MapFn = std::function<Observation(const Parameter&)>;
using MapDerivFn = std::function<Observation(const Parameter&, const Field&)>;
std::vector<TaylorPoint> taylor_test_map(const Grid& g, const MapFn& F,
                                         const MapDerivFn& Fprime,
                                         const Parameter& theta, const Field& h,
                                         const std::vector<double>& t_list);

/// The forward-map instance of taylor_test_map.
std::vector<TaylorPoint> taylor_test(const ProblemSpec& spec,
                                     const Parameter& theta, const Field& h,
                                     const std::vector<double>& t_list);

/// Least-squares slope of log(remainder) against log(t), the headline
/// number of a Taylor test (2 = clean second order).
double taylor_ls_slope(const std::vector<TaylorPoint>& pts);

/// Largest rho in the list for which n_draws sampled forward solves all
/// succeed; 0 if none does.  Empirical proxy for the solvable-ball radius.
double largest_solvable_rho(const ProblemSpec& spec, const Parameter& theta0,
                            const std::vector<double>& rho_list, int n_draws,
                            std::uint64_t seed);

/// Per-pair CSV: pair_index, seed_offset, numerator, denominator, ratio,
/// skipped_flag; the aao family appends gen_denominator, gen_ratio.
void write_tcc_csv(std::ostream& os, const TccReport& report);

/// The report (summaries + provenance, not the per-pair list) as JSON.
std::string tcc_report_json(const TccReport& report);

}  // namespace parcone
