#include "parcone/tcc_lab.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "json.hpp"

namespace parcone {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kBallModes = 8;
constexpr int kBallResampleLimit = 100;

double quiet_nan() { return std::numeric_limits<double>::quiet_NaN(); }

double param_norm(const Grid& g, const Field& f, const Parameter& like) {
    if (like.space == ParamSpace::W1p) return w1p_norm(g, f, like.p);
    return norm(g, f, SpaceKind::L2);
}

/// Smooth seeded direction: an 8-mode sine series.  White noise would sit
/// outside every parameter space of interest and stiffen the solves.
Field sine_series_draw(const Grid& g, Rng& rng) {
    double coef[kBallModes];
    for (double& c : coef) c = rng.gaussian();
    Field out(g);
    for (int i = 0; i < g.n; ++i) {
        const double x = g.x(i);
        double s = 0.0;
        for (int m = 0; m < kBallModes; ++m)
            s += coef[m] * std::sin((m + 1) * kPi * x);
        out.v[i] = s;
    }
    return out;
}

void check_sample_config(const SampleConfig& cfg) {
    ensure(cfg.rho > 0.0, "tcc sampling: rho must be positive");
    ensure(cfg.n_pairs >= 1, "tcc sampling: need at least one pair");
    ensure(cfg.y_norm_q >= 1.0, "tcc sampling: q must be at least 1");
}

double resolve_floor(const ProblemSpec& spec, const SampleConfig& cfg) {
    if (cfg.denominator_floor > 0.0) return cfg.denominator_floor;
    const Observation f0 = apply_F(spec, cfg.theta0, cfg.y_norm_q);
    return 1e-12 * obs_norm(spec.g, f0);
}

Observation traj_diff_obs(const Trajectory& a, const Trajectory& b, double q) {
    Observation o;
    o.q = q;
    o.traj = a;
    for (int k = 0; k < a.n_frames(); ++k)
        o.traj.frames[(std::size_t)k] =
            field_sub(a.frames[(std::size_t)k], b.frames[(std::size_t)k]);
    return o;
}

PairRecord failed_pair(int index, std::uint64_t offset, const char* what) {
    PairRecord rec;
    rec.pair_index = index;
    rec.seed_offset = offset;
    rec.numerator = rec.denominator = rec.ratio = quiet_nan();
    rec.gen_denominator = rec.gen_ratio = quiet_nan();
    rec.skipped_flag = kPairSolverFailed;
    rec.note = what;
    return rec;
}

void run_pairs(int n, const std::function<PairRecord(int)>& eval,
               std::vector<PairRecord>& out) {
    out.resize((std::size_t)n);
    // Per-pair seed streams make the records independent of the schedule.
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int i = 0; i < n; ++i) out[(std::size_t)i] = eval(i);
}

RatioSummary summarize(std::vector<double> kept) {
    RatioSummary s;
    std::sort(kept.begin(), kept.end());
    s.retained = (int)kept.size();
    if (kept.empty()) {
        s.max = s.q50 = s.q90 = s.q99 = quiet_nan();
        return s;
    }
    auto nearest_rank = [&](double pct) {
        const int idx = (int)std::ceil(pct / 100.0 * (double)kept.size()) - 1;
        return kept[(std::size_t)std::clamp(idx, 0, (int)kept.size() - 1)];
    };
    s.max = kept.back();
    s.q50 = nearest_rank(50.0);
    s.q90 = nearest_rank(90.0);
    s.q99 = nearest_rank(99.0);
    s.sorted = std::move(kept);
    return s;
}

TccProvenance make_provenance(const ProblemSpec& spec, const SampleConfig& cfg,
                              const char* numerator_norm, double floor_abs) {
    TccProvenance p;
    p.problem = kind_name(spec.kind);
    p.n = spec.g.n;
    p.T = spec.axis.T;
    p.n_steps = spec.axis.n_steps;
    p.rho = cfg.rho;
    p.n_pairs = cfg.n_pairs;
    p.seed = cfg.seed;
    p.y_norm_q = cfg.y_norm_q;
    p.numerator_norm = numerator_norm;
    p.denominator_floor = floor_abs;
    return p;
}

void finalize_report(TccReport& report) {
    std::vector<double> kept, kept_gen;
    for (const PairRecord& r : report.pairs) {
        switch (r.skipped_flag) {
            case kPairKept:
                kept.push_back(r.ratio);
                if (std::isfinite(r.gen_ratio)) kept_gen.push_back(r.gen_ratio);
                break;
            case kPairDegenerate: ++report.degenerate; break;
            default: ++report.solver_failures; break;
        }
    }
    report.primary = summarize(std::move(kept));
    report.generalized = summarize(std::move(kept_gen));
}

}  // namespace

Parameter sample_ball(const ProblemSpec& spec, const Parameter& theta0,
                      double rho, Rng& rng) {
    ensure(rho > 0.0, "sample_ball: rho must be positive");
    const Grid& g = spec.g;

    for (int attempt = 0; attempt < kBallResampleLimit; ++attempt) {
        Field dir = sine_series_draw(g, rng);
        const double nd = param_norm(g, dir, theta0);
        if (nd <= 0.0) continue;  // all-zero draw, vanishingly unlikely
        const double s = rng.uniform_open0();
        Field step = field_scaled(dir, rho * s / nd);

        // Rounding can land a hair outside the ball; pull strictly inside.
        const double ns = param_norm(g, step, theta0);
        if (ns > rho) step = field_scaled(step, (rho / ns) * (1.0 - 1e-14));

        Parameter out = theta0;
        field_axpy(1.0, step, out.f);

        if (spec.kind == ProblemKind::Diffusion) {
            bool clipped = false;
            for (double& v : out.f.v)
                if (v < spec.a_lower) v = spec.a_lower, clipped = true;
            if (clipped &&
                param_norm(g, field_sub(out.f, theta0.f), theta0) > rho)
                continue;  // clipping pushed it out; redraw
        }
        return out;
    }
    throw SolverError("sample_ball: resampling exhausted (clip vs ball "
                      "membership); center too close to the lower bound?");
}

Parameter sample_ball(const ProblemSpec& spec, const Parameter& theta0,
                      double rho, std::uint64_t seed) {
    Rng rng(seed);
    return sample_ball(spec, theta0, rho, rng);
}

TccReport tcc_estimate_reduced(const ProblemSpec& spec, const SampleConfig& cfg) {
    check_sample_config(cfg);
    const Grid& g = spec.g;
    const double floor_abs = resolve_floor(spec, cfg);

    auto eval = [&](int i) -> PairRecord {
        const std::uint64_t offset = 2ULL * (std::uint64_t)i;
        try {
            Rng ra(mix_seed(cfg.seed, offset));
            Rng rb(mix_seed(cfg.seed, offset + 1));
            const Parameter ta = sample_ball(spec, cfg.theta0, cfg.rho, ra);
            const Parameter tb = sample_ball(spec, cfg.theta0, cfg.rho, rb);

            const Trajectory ua = forward_solve(spec, ta);
            const Trajectory ub = forward_solve(spec, tb);
            const Field dir = field_sub(ta.f, tb.f);
            const Trajectory z = linearized_solve(spec, ta, ua, dir);

            Observation den_o = traj_diff_obs(ua, ub, cfg.y_norm_q);
            Observation num_o = den_o;
            for (int k = 0; k < num_o.traj.n_frames(); ++k)
                field_axpy(-1.0, z.frames[(std::size_t)k],
                           num_o.traj.frames[(std::size_t)k]);

            PairRecord rec;
            rec.pair_index = i;
            rec.seed_offset = offset;
            rec.numerator = obs_norm(g, num_o);
            rec.denominator = obs_norm(g, den_o);
            rec.gen_denominator = rec.gen_ratio = quiet_nan();
            if (rec.denominator < floor_abs) {
                rec.skipped_flag = kPairDegenerate;
                rec.ratio = quiet_nan();
            } else {
                rec.ratio = rec.numerator / rec.denominator;
            }
            return rec;
        } catch (const std::exception& e) {
            return failed_pair(i, offset, e.what());
        }
    };

    TccReport report;
    report.family = "reduced";
    report.provenance = make_provenance(spec, cfg, "Y", floor_abs);
    run_pairs(cfg.n_pairs, eval, report.pairs);
    finalize_report(report);
    return report;
}

TccReport tcc_estimate_aao(const ProblemSpec& spec, const SampleConfig& cfg) {
    check_sample_config(cfg);
    const Grid& g = spec.g;
    const double floor_abs = resolve_floor(spec, cfg);
    const SpaceKind wk = wstar_kind(spec.kind);
    const int N = spec.axis.n_steps;

    auto eval = [&](int i) -> PairRecord {
        const std::uint64_t offset = 2ULL * (std::uint64_t)i;
        try {
            Rng ra(mix_seed(cfg.seed, offset));
            Rng rb(mix_seed(cfg.seed, offset + 1));
            const Parameter ta = sample_ball(spec, cfg.theta0, cfg.rho, ra);
            const Parameter tb = sample_ball(spec, cfg.theta0, cfg.rho, rb);

            const Trajectory ua = forward_solve(spec, ta);
            const Trajectory ub = forward_solve(spec, tb);
            const Field dtheta = field_sub(ta.f, tb.f);

            // Definitional assembly at each step frame; the closed-form
            // remainder identity is cross-checked in the tests instead.
            std::vector<Field> num_frames, fdiff_frames;
            num_frames.reserve((std::size_t)N);
            fdiff_frames.reserve((std::size_t)N);
            for (int k = 1; k <= N; ++k) {
                const Field& uk = ua.frames[(std::size_t)k];
                const Field& vk = ub.frames[(std::size_t)k];
                const double t = spec.axis.t(k);
                const Field fa = state_rhs(spec, ta, uk, t);
                const Field fb = state_rhs(spec, tb, vk, t);
                const Field du = field_sub(uk, vk);
                Field rem = field_sub(fa, fb);
                field_axpy(-1.0, param_injection(spec, uk, dtheta), rem);
                field_axpy(-1.0, state_linearized_apply(spec, ta, uk, du), rem);
                num_frames.push_back(std::move(rem));
                fdiff_frames.push_back(field_sub(fa, fb));
            }

            const Observation cdiff = traj_diff_obs(ua, ub, cfg.y_norm_q);
            const double den_obs = obs_norm(g, cdiff);
            const double den_model =
                wstar_time_norm(g, spec.axis, fdiff_frames, wk);
            const double den_init =
                norm(g, field_sub(ua.frames[0], ub.frames[0]), SpaceKind::L2);

            PairRecord rec;
            rec.pair_index = i;
            rec.seed_offset = offset;
            rec.numerator = wstar_time_norm(g, spec.axis, num_frames, wk);
            rec.denominator = den_obs;
            rec.gen_denominator = std::sqrt(den_model * den_model +
                                            den_init * den_init +
                                            den_obs * den_obs);
            if (rec.denominator < floor_abs) {
                rec.skipped_flag = kPairDegenerate;
                rec.ratio = rec.gen_ratio = quiet_nan();
            } else {
                rec.ratio = rec.numerator / rec.denominator;
                rec.gen_ratio = rec.numerator / rec.gen_denominator;
            }
            return rec;
        } catch (const std::exception& e) {
            return failed_pair(i, offset, e.what());
        }
    };

    TccReport report;
    report.family = "aao";
    report.provenance = make_provenance(
        spec, cfg, wk == SpaceKind::H1_0 ? "W* of H1_0" : "W* of H2cap",
        floor_abs);
    run_pairs(cfg.n_pairs, eval, report.pairs);
    finalize_report(report);
    return report;
}

double adjoint_test(const ProblemSpec& spec, const Parameter& theta,
                    int n_trials, std::uint64_t seed) {
    ensure(n_trials >= 1, "adjoint_test: need at least one trial");
    const Grid& g = spec.g;
    const Trajectory base = forward_solve(spec, theta);

    double worst = 0.0;
    for (int trial = 0; trial < n_trials; ++trial) {
        Rng rng(mix_seed(seed, (std::uint64_t)trial));
        Field h(g);
        for (int i = 0; i < g.n; ++i) h.v[i] = rng.gaussian();
        Observation w;
        w.q = 2.0;
        w.traj = make_trajectory(g, spec.axis);
        for (int k = 1; k < w.traj.n_frames(); ++k)
            for (int i = 0; i < g.n; ++i)
                w.traj.frames[(std::size_t)k].v[i] = rng.gaussian();

        const Observation z = apply_Fprime(spec, theta, base, h, 2.0);
        const Parameter back = apply_Fprime_adjoint(spec, theta, base, w);
        const double lhs = obs_inner(g, z, w);
        const double rhs = inner_product(g, h, back.f, SpaceKind::L2);
        const double scale = std::max({std::fabs(lhs), std::fabs(rhs), 1e-300});
        worst = std::max(worst, std::fabs(lhs - rhs) / scale);
    }
    return worst;
}

std::vector<TaylorPoint> taylor_test_map(const Grid& g, const MapFn& F,
                                         const MapDerivFn& Fprime,
                                         const Parameter& theta, const Field& h,
                                         const std::vector<double>& t_list) {
    ensure(t_list.size() >= 3, "taylor_test: need at least 3 step sizes");
    for (std::size_t j = 0; j + 1 < t_list.size(); ++j)
        ensure(t_list[j] > t_list[j + 1] && t_list[j + 1] > 0.0,
               "taylor_test: t_list must be positive and decreasing");

    const Observation f0 = F(theta);
    const Observation z = Fprime(theta, h);

    std::vector<TaylorPoint> out;
    out.reserve(t_list.size());
    for (const double t : t_list) {
        Parameter shifted = theta;
        field_axpy(t, h, shifted.f);
        const Observation ft = F(shifted);

        Observation rem = ft;
        for (int k = 0; k < rem.traj.n_frames(); ++k) {
            field_axpy(-1.0, f0.traj.frames[(std::size_t)k],
                       rem.traj.frames[(std::size_t)k]);
            field_axpy(-t, z.traj.frames[(std::size_t)k],
                       rem.traj.frames[(std::size_t)k]);
        }
        TaylorPoint pt;
        pt.t = t;
        pt.remainder = obs_norm(g, rem);
        pt.observed_order = quiet_nan();
        if (!out.empty() && out.back().remainder > 0.0 && pt.remainder > 0.0)
            pt.observed_order = std::log(out.back().remainder / pt.remainder) /
                                std::log(out.back().t / t);
        out.push_back(pt);
    }
    return out;
}

std::vector<TaylorPoint> taylor_test(const ProblemSpec& spec,
                                     const Parameter& theta, const Field& h,
                                     const std::vector<double>& t_list) {
    auto F = [&](const Parameter& p) { return apply_F(spec, p, 2.0); };
    auto Fp = [&](const Parameter& p, const Field& dir) {
        const Trajectory base = forward_solve(spec, p);
        return apply_Fprime(spec, p, base, dir, 2.0);
    };
    return taylor_test_map(spec.g, F, Fp, theta, h, t_list);
}

double taylor_ls_slope(const std::vector<TaylorPoint>& pts) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int m = 0;
    for (const TaylorPoint& p : pts) {
        if (!(p.remainder > 0.0)) continue;  // exact-to-roundoff rows drop out
        const double x = std::log(p.t), y = std::log(p.remainder);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
        ++m;
    }
    ensure(m >= 2, "taylor_ls_slope: fewer than 2 usable remainders");
    const double denom = (double)m * sxx - sx * sx;
    ensure(std::fabs(denom) > 0.0, "taylor_ls_slope: degenerate abscissae");
    return ((double)m * sxy - sx * sy) / denom;
}

double largest_solvable_rho(const ProblemSpec& spec, const Parameter& theta0,
                            const std::vector<double>& rho_list, int n_draws,
                            std::uint64_t seed) {
    ensure(!rho_list.empty(), "largest_solvable_rho: empty rho list");
    ensure(n_draws >= 1, "largest_solvable_rho: need at least one draw");
    double best = 0.0;
    for (std::size_t ri = 0; ri < rho_list.size(); ++ri) {
        const double rho = rho_list[ri];
        ensure(rho > 0.0, "largest_solvable_rho: rho must be positive");
        bool all_ok = true;
        for (int j = 0; j < n_draws && all_ok; ++j) {
            try {
                Rng rng(mix_seed(seed, ri * 1000003ULL + (std::uint64_t)j));
                const Parameter t = sample_ball(spec, theta0, rho, rng);
                (void)forward_solve(spec, t);
            } catch (const std::exception&) {
                all_ok = false;
            }
        }
        if (all_ok) best = std::max(best, rho);
    }
    return best;
}

void write_tcc_csv(std::ostream& os, const TccReport& report) {
    const bool aao = report.family == "aao";
    os << "pair_index,seed_offset,numerator,denominator,ratio,skipped_flag";
    if (aao) os << ",gen_denominator,gen_ratio";
    os << "\n";
    os << std::setprecision(17);
    for (const PairRecord& r : report.pairs) {
        os << r.pair_index << ',' << r.seed_offset << ',' << r.numerator << ','
           << r.denominator << ',' << r.ratio << ',' << r.skipped_flag;
        if (aao) os << ',' << r.gen_denominator << ',' << r.gen_ratio;
        os << "\n";
    }
}

std::string tcc_report_json(const TccReport& report) {
    using nlohmann::json;
    auto summary = [](const RatioSummary& s) {
        return json{{"max_ratio", s.max},
                    {"q50", s.q50},
                    {"q90", s.q90},
                    {"q99", s.q99},
                    {"retained", s.retained}};
    };
    json j{{"family", report.family},
           {"observed_max_over_pairs", report.primary.max},
           {"primary", summary(report.primary)},
           {"degenerate", report.degenerate},
           {"solver_failures", report.solver_failures},
           {"provenance",
            {{"problem", report.provenance.problem},
             {"n", report.provenance.n},
             {"T", report.provenance.T},
             {"n_steps", report.provenance.n_steps},
             {"rho", report.provenance.rho},
             {"n_pairs", report.provenance.n_pairs},
             {"seed", report.provenance.seed},
             {"y_norm_q", report.provenance.y_norm_q},
             {"numerator_norm", report.provenance.numerator_norm},
             {"denominator_floor", report.provenance.denominator_floor}}}};
    if (report.family == "aao") j["generalized"] = summary(report.generalized);
    return j.dump(2);
}

}  // namespace parcone
