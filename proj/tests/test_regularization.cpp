#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "parcone/regularization.hpp"
#include "parcone/rng.hpp"

using namespace parcone;

namespace {

constexpr double kPi = 3.14159265358979323846;

ProblemSpec tiny_spec(ProblemKind kind = ProblemKind::Potential) {
  ProblemSpec s;
  s.kind = kind;
  s.g = make_grid(15);
  s.axis = make_time_axis(0.1, 6);
  s.u0 = Field::from_fn(s.g, [](double x) { return std::sin(kPi * x); });
  s.newton.tol = 1e-13;
  return s;
}

Parameter const_param(const Grid& g, double c) {
  return Parameter{Field::from_fn(g, [&](double) { return c; }),
                   ParamSpace::L2, 2.0};
}

}  // namespace

TEST_CASE("noise synthesis hits the requested level exactly") {
  ProblemSpec spec = tiny_spec();
  const Observation y = apply_F(spec, const_param(spec.g, 1.0));

  const Observation yd = add_noise(spec.g, y, 1e-2, 42);
  Trajectory diff = make_trajectory(spec.g, spec.axis);
  for (int k = 0; k <= spec.axis.n_steps; ++k)
    diff.frames[(std::size_t)k] = field_sub(yd.traj.frames[(std::size_t)k],
                                            y.traj.frames[(std::size_t)k]);
  CHECK(obs_norm(spec.g, Observation{diff, 2.0}) ==
        doctest::Approx(1e-2).epsilon(1e-12));
  // frame 0 untouched: it carries no Y weight
  for (int i = 0; i < spec.g.n; ++i)
    CHECK(yd.traj.frames[0].v[i] == y.traj.frames[0].v[i]);

  // deterministic in the seed, different across seeds
  const Observation yd2 = add_noise(spec.g, y, 1e-2, 42);
  const Observation yd3 = add_noise(spec.g, y, 1e-2, 43);
  bool same = true, differs = false;
  for (int k = 1; k <= spec.axis.n_steps; ++k)
    for (int i = 0; i < spec.g.n; ++i) {
      same = same && yd.traj.frames[(std::size_t)k].v[i] ==
                         yd2.traj.frames[(std::size_t)k].v[i];
      differs = differs || yd.traj.frames[(std::size_t)k].v[i] !=
                               yd3.traj.frames[(std::size_t)k].v[i];
    }
  CHECK(same);
  CHECK(differs);

  const Observation y0 = add_noise(spec.g, y, 0.0, 42);
  for (int k = 0; k <= spec.axis.n_steps; ++k)
    for (int i = 0; i < spec.g.n; ++i)
      CHECK(y0.traj.frames[(std::size_t)k].v[i] ==
            y.traj.frames[(std::size_t)k].v[i]);

  CHECK_THROWS_AS((void)add_noise(spec.g, y, -1.0, 1), ValidationError);
}

TEST_CASE("discrepancy rule uses tau delta with an exact-data floor") {
  LandweberConfig cfg;
  cfg.tau = 1.5;
  cfg.delta = 1e-3;
  CHECK(discrepancy_stop(1.4e-3, cfg));
  CHECK(discrepancy_stop(1.5e-3, cfg));
  CHECK(!discrepancy_stop(1.6e-3, cfg));
  cfg.delta = 0.0;
  CHECK(discrepancy_stop(0.5e-12, cfg));
  CHECK(!discrepancy_stop(1e-6, cfg));
}

TEST_CASE("reduced landweber drives the residual down on exact data") {
  ProblemSpec spec = tiny_spec();
  const Parameter theta_true = const_param(spec.g, 1.0);
  const Observation y = apply_F(spec, theta_true);

  LandweberConfig cfg;
  cfg.max_iter = 30;
  const Parameter theta0 = const_param(spec.g, 0.0);
  const ReducedResult res =
      landweber_reduced(spec, y, cfg, theta0, &theta_true.f);

  REQUIRE(!res.log.records.empty());
  CHECK(res.log.mu_used > 0.0);
  const auto& rec = res.log.records;
  CHECK(rec.front().residual_norm > rec.back().residual_norm);
  for (std::size_t i = 1; i < rec.size(); ++i)
    CHECK(rec[i].residual_norm <=
          rec[i - 1].residual_norm * (1.0 + 1e-10));
  // error norms are populated when theta_true is supplied
  for (const auto& r : rec) CHECK(std::isfinite(r.error_norm));
  CHECK(rec.back().error_norm < rec.front().error_norm);
  CHECK(res.log.stop_reason == StopReason::MaxIter);
}

TEST_CASE("reduced landweber stops at the discrepancy level") {
  ProblemSpec spec = tiny_spec();
  const Parameter theta_true = const_param(spec.g, 1.0);
  const Observation y = apply_F(spec, theta_true);
  const double delta = 1e-3;
  const Observation yd = add_noise(spec.g, y, delta, 7);

  LandweberConfig cfg;
  cfg.delta = delta;
  cfg.max_iter = 4000;
  const ReducedResult res =
      landweber_reduced(spec, yd, cfg, const_param(spec.g, 0.0));
  CHECK(res.log.stop_reason == StopReason::Discrepancy);
  CHECK(res.log.records.back().residual_norm <= cfg.tau * delta);
}

TEST_CASE("an oversized step is reported as divergence") {
  ProblemSpec spec = tiny_spec();
  const Observation y = apply_F(spec, const_param(spec.g, 1.0));
  LandweberConfig cfg;
  cfg.mu = 1e8;
  cfg.max_iter = 50;
  const ReducedResult res =
      landweber_reduced(spec, y, cfg, const_param(spec.g, 0.0));
  CHECK(res.log.stop_reason == StopReason::Divergence);
  CHECK(std::string(stop_reason_name(StopReason::Divergence)) == "divergence");
}

TEST_CASE("aao landweber reduces the product residual") {
  ProblemSpec spec = tiny_spec();
  const Parameter theta_true = const_param(spec.g, 1.0);
  const Observation y = apply_F(spec, theta_true);

  LandweberConfig cfg;
  cfg.max_iter = 40;
  AaoIterate start;
  start.theta = const_param(spec.g, 0.0);
  start.u = forward_solve(spec, start.theta);
  const AaoResult res = landweber_aao(spec, y, cfg, start, &theta_true.f);

  REQUIRE(res.log.records.size() >= 2);
  CHECK(res.log.records.back().residual_norm <
        res.log.records.front().residual_norm);
  for (const auto& r : res.log.records) CHECK(std::isfinite(r.model_norm));
}

TEST_CASE("diffusion iterates stay above the admissibility floor") {
  ProblemSpec spec = tiny_spec(ProblemKind::Diffusion);
  spec.a_lower = 0.1;
  const Parameter theta_true = const_param(spec.g, 1.0);
  const Observation y = apply_F(spec, theta_true);

  LandweberConfig cfg;
  cfg.mu = 50.0;  // deliberately coarse so raw steps undershoot the floor
  cfg.max_iter = 25;
  const ReducedResult res =
      landweber_reduced(spec, y, cfg, const_param(spec.g, 0.11));
  double lo = res.theta.f.v[0];
  for (double a : res.theta.f.v) lo = std::min(lo, a);
  CHECK(lo >= spec.a_lower - 1e-15);
}

TEST_CASE("iteration records count from zero and carry the residual history") {
  ProblemSpec spec = tiny_spec();
  const Observation y = apply_F(spec, const_param(spec.g, 1.0));
  LandweberConfig cfg;
  cfg.max_iter = 5;
  const ReducedResult res =
      landweber_reduced(spec, y, cfg, const_param(spec.g, 0.0));
  REQUIRE((int)res.log.records.size() >= 2);
  for (std::size_t i = 0; i < res.log.records.size(); ++i)
    CHECK(res.log.records[i].k == (int)i);
  // reduced runs have no model-part norm
  CHECK(std::isnan(res.log.records.front().model_norm));
}
