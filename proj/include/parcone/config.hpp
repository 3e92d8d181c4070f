#pragma once
///
/// @file config.hpp
/// @brief Experiment configuration: a small sectioned key-value format and
///        the builders that turn a config into a ProblemSpec.
///
/// Files look like
///
///     [problem]
///     kind = potential
///     n = 63
///     T = 0.1
///     n_steps = 20
///     u0 = sin_pi
///     theta = const:1 + sin:0.5:1
///     phi = decay_sin:1
///
///     [task]
///     name = tcc
///     rho = 0.5
///     n_pairs = 200
///     seed = 1
///
///     [output]
///     dir = runs/tcc_potential
///
/// Lines starting with # are comments; values run to the end of the line
/// and keep interior spaces (the check-embedding query needs them).  A
/// config round-trips losslessly: parse(serialize(c)) == c.

#include <functional>
#include <map>
#include <string>

#include "parcone/models.hpp"

namespace parcone {

struct ExperimentConfig {
    /// Flat storage, keyed "section.key", values as written.
    std::map<std::string, std::string> values;

    static ExperimentConfig parse_text(const std::string& text);
    static ExperimentConfig parse_file(const std::string& path);

    /// Sections in fixed order (problem, task, output, then anything else
    /// alphabetically), keys sorted inside each section.
    std::string serialize() const;

    bool has(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback) const;
    std::string require(const std::string& key) const;
    long long get_int(const std::string& key, long long fallback) const;
    double get_real(const std::string& key, double fallback) const;
};

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

// ---- presets ---------------------------------------------------------------

/// Initial data by name: zero | sin_pi | parabola | gauss, each with an
/// optional ":scale" suffix (default 1).
Field preset_u0(const Grid& g, const std::string& name);

/// Spatial profiles for parameters: terms joined by '+', each
///   const:v | affine:a:b | sin:a:m | parabola:a
/// meaning v, a + b x, a sin(m pi x), a x (1 - x).
std::function<double(double)> parse_profile(const std::string& text);

/// Source presets: zero | const:v | decay_sin:a | decay_sin_poly:a with
///   decay_sin:a       a e^{-t} sin(pi x)
///   decay_sin_poly:a  a e^{-t} (sin(pi x) + x (1 - x))
/// An absent ":a" means a = 1.  Returns a null function for zero, which is
/// what ProblemSpec expects.
std::function<Field(double)> preset_phi(const Grid& g, const std::string& name);

// ---- builders --------------------------------------------------------------

/// Problem block -> ProblemSpec.  Every numeric field goes through the
/// owning module's constructor so range errors surface here, before any
/// solve starts.
ProblemSpec build_problem_spec(const ExperimentConfig& cfg);

/// Parameter stored under the given key ("problem.theta" by default), with
/// the space tag from problem.theta_space (l2 | w1p) and problem.theta_p.
Parameter build_parameter(const ExperimentConfig& cfg, const Grid& g,
                          const std::string& key = "problem.theta");

}  // namespace parcone
