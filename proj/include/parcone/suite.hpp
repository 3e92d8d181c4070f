#pragma once
///
/// @file suite.hpp
/// @brief The acceptance battery: ten checks covering adjoint exactness,
///        discretization orders, cone-constant behavior, regularization,
///        the transform cross-check, and the exact index tables.
///
/// Each criterion is a standalone function returning a pass/fail result
/// with a one-line detail string, so the test harness can run them as
/// separate cases and the CLI can print the full table.  Tolerances are
/// fixed here, not configurable: they are the contract.

#include <iosfwd>
#include <string>
#include <vector>

namespace parcone {

struct CriterionResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

CriterionResult crit_adjoint_exactness();
CriterionResult crit_taylor_order();
CriterionResult crit_manufactured_convergence();
CriterionResult crit_bilinear_identity();
CriterionResult crit_ball_radius_scaling();
CriterionResult crit_reduced_vs_aao();
CriterionResult crit_landweber_potential();
CriterionResult crit_exp_transform();
CriterionResult crit_admissibility_table();
CriterionResult crit_aao_consistency();

/// All ten in fixed order; an exception inside a criterion marks it failed
/// with the message as detail instead of unwinding the whole battery.
std::vector<CriterionResult> run_acceptance_suite();

/// One PASS/FAIL line per criterion plus a summary; returns the number of
/// failures (the CLI exit code).
int print_suite_table(const std::vector<CriterionResult>& results,
                      std::ostream& os);

}  // namespace parcone
