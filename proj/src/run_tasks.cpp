#include "parcone/run_tasks.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "parcone/embedding_rules.hpp"
#include "parcone/tcc_lab.hpp"

namespace parcone {

/* ------------------------------------------------------------------ */
/*  Record plumbing                                                   */
/* ------------------------------------------------------------------ */

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)h);
  return buf;
}

namespace {

std::string utc_now() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Writes content into dir/name and records the checksum; when a separate
/// canonical form is given (wall clock zeroed) the checksum covers that.
void emit(const std::string& dir, const std::string& name,
          const std::string& content, RunRecord& rec,
          const std::string* canonical = nullptr) {
  std::ofstream out(dir + "/" + name, std::ios::binary);
  ensure(out.good(), "cannot write '" + dir + "/" + name + "'");
  out << content;
  ensure(out.good(), "short write on '" + dir + "/" + name + "'");
  rec.outputs.push_back({name, fnv1a_hex(canonical ? *canonical : content)});
}

}  // namespace

std::string run_record_json(const RunRecord& r) {
  nlohmann::json j;
  j["task"] = r.task;
  j["config"] = r.config_text;
  j["config_checksum"] = r.config_checksum;
  j["started_utc"] = r.started_utc;
  j["finished_utc"] = r.finished_utc;
  nlohmann::json outs = nlohmann::json::array();
  for (const auto& e : r.outputs) {
    outs.push_back({{"name", e.name}, {"checksum", e.checksum}});
  }
  j["outputs"] = outs;
  return j.dump(2);
}

std::string iteration_log_csv(const IterationLog& log, bool zero_wall_clock) {
  std::ostringstream os;
  os << "k,residual,error,time_ms\n";
  for (const auto& r : log.records) {
    os << r.k << "," << fmt(r.residual_norm) << "," << fmt(r.error_norm) << ","
       << (zero_wall_clock ? std::string("0") : fmt(r.wall_ms)) << "\n";
  }
  return os.str();
}

std::string resolve_out_dir(const ExperimentConfig& cfg) {
  const char* env = std::getenv("PARCONE_OUT_ROOT");
  const std::string root = (env && *env) ? env : ".";
  std::string dir = cfg.get("output.dir", "");
  if (dir.empty()) {
    dir = "runs/" + cfg.get("task.name", "task") + "-" +
          fnv1a_hex(cfg.serialize()).substr(0, 8);
  }
  return root + "/" + dir;
}

/* ------------------------------------------------------------------ */
/*  Tasks                                                             */
/* ------------------------------------------------------------------ */

namespace {

void task_solve(const ExperimentConfig& cfg, const std::string& dir,
                RunRecord& rec, std::string& printed) {
  const ProblemSpec spec = build_problem_spec(cfg);
  const Parameter theta = build_parameter(cfg, spec.g);
  const bool exp_path = cfg.get_int("task.exp_transform", 0) != 0;
  const Trajectory traj = exp_path ? forward_solve_exp_transform(spec, theta)
                                   : forward_solve(spec, theta);
  std::ostringstream os;
  os << "k,t,i,x,u\n";
  for (int k = 0; k < traj.n_frames(); ++k) {
    for (int i = 0; i < spec.g.n; ++i) {
      os << k << "," << fmt(traj.axis.t(k)) << "," << i << ","
         << fmt(spec.g.x(i)) << "," << fmt(traj.frames[k].v[i]) << "\n";
    }
  }
  emit(dir, "solution.csv", os.str(), rec);

  nlohmann::json j;
  j["task"] = "solve";
  j["kind"] = kind_name(spec.kind);
  j["n"] = spec.g.n;
  j["n_steps"] = spec.axis.n_steps;
  j["final_l2"] = norm(spec.g, traj.frames.back(), SpaceKind::L2);
  printed = j.dump(2);
  emit(dir, "summary.json", printed, rec);
}

void task_invert(const ExperimentConfig& cfg, const std::string& dir,
                 RunRecord& rec, std::string& printed) {
  const ProblemSpec spec = build_problem_spec(cfg);
  const Parameter theta_true = build_parameter(cfg, spec.g);
  const double q = cfg.get_real("task.q", 2.0);
  const Observation y = apply_F(spec, theta_true, q);

  LandweberConfig lw;
  lw.mu = cfg.get_real("task.mu", 0.0);
  lw.tau = cfg.get_real("task.tau", 1.5);
  lw.max_iter = (int)cfg.get_int("task.max_iter", 500);
  lw.delta = cfg.get_real("task.delta", 0.0);
  lw.seed = (std::uint64_t)cfg.get_int("task.seed", 1);
  const Observation y_delta = add_noise(spec.g, y, lw.delta, lw.seed);

  Parameter theta0 = build_parameter(cfg, spec.g, "task.theta0");
  if (!cfg.has("task.theta0")) theta0.f = Field(spec.g);  // default start 0
  if (spec.kind == ProblemKind::Diffusion) {
    for (double& v : theta0.f.v) v = std::max(v, spec.a_lower);
  }

  const std::string family = cfg.get("task.family", "reduced");
  IterationLog log;
  Field theta_rec;
  if (family == "reduced") {
    ReducedResult res =
        landweber_reduced(spec, y_delta, lw, theta0, &theta_true.f);
    log = res.log;
    theta_rec = res.theta.f;
  } else if (family == "aao") {
    AaoIterate start{theta0, forward_solve(spec, theta0)};
    AaoResult res = landweber_aao(spec, y_delta, lw, start, &theta_true.f);
    log = res.log;
    theta_rec = res.iterate.theta.f;
  } else {
    ensure(false, "task.family must be reduced or aao");
  }

  const std::string full = iteration_log_csv(log, false);
  const std::string canon = iteration_log_csv(log, true);
  emit(dir, "iteration_log.csv", full, rec, &canon);

  std::ostringstream os;
  os << "i,x,theta_true,theta_recovered\n";
  for (int i = 0; i < spec.g.n; ++i) {
    os << i << "," << fmt(spec.g.x(i)) << "," << fmt(theta_true.f.v[i]) << ","
       << fmt(theta_rec.v[i]) << "\n";
  }
  emit(dir, "theta.csv", os.str(), rec);

  nlohmann::json j;
  j["task"] = "invert";
  j["family"] = family;
  j["stop_reason"] = stop_reason_name(log.stop_reason);
  j["iterations"] = log.records.empty() ? 0 : log.records.back().k;
  j["mu_used"] = log.mu_used;
  j["delta"] = lw.delta;
  j["tau"] = lw.tau;
  if (!log.records.empty()) {
    j["final_residual"] = log.records.back().residual_norm;
    j["final_error"] = log.records.back().error_norm;
  }
  printed = j.dump(2);
  emit(dir, "summary.json", printed, rec);
}

void task_tcc(const ExperimentConfig& cfg, const std::string& dir,
              RunRecord& rec, std::string& printed, bool aao) {
  const ProblemSpec spec = build_problem_spec(cfg);
  SampleConfig sc;
  sc.theta0 = build_parameter(cfg, spec.g);
  sc.rho = cfg.get_real("task.rho", 0.5);
  sc.n_pairs = (int)cfg.get_int("task.n_pairs", 200);
  sc.seed = (std::uint64_t)cfg.get_int("task.seed", 1);
  sc.y_norm_q = cfg.get_real("task.q", 2.0);
  sc.denominator_floor = cfg.get_real("task.denominator_floor", 0.0);
  const TccReport report =
      aao ? tcc_estimate_aao(spec, sc) : tcc_estimate_reduced(spec, sc);
  std::ostringstream os;
  write_tcc_csv(os, report);
  emit(dir, "pairs.csv", os.str(), rec);
  printed = tcc_report_json(report);
  emit(dir, "report.json", printed, rec);
}

void task_adjoint_test(const ExperimentConfig& cfg, const std::string& dir,
                       RunRecord& rec, std::string& printed) {
  const ProblemSpec spec = build_problem_spec(cfg);
  const Parameter theta = build_parameter(cfg, spec.g);
  const int n_trials = (int)cfg.get_int("task.n_trials", 32);
  const std::uint64_t seed = (std::uint64_t)cfg.get_int("task.seed", 1);
  const double gap = adjoint_test(spec, theta, n_trials, seed);
  nlohmann::json j;
  j["task"] = "adjoint-test";
  j["kind"] = kind_name(spec.kind);
  j["n_trials"] = n_trials;
  j["seed"] = seed;
  j["max_rel_gap"] = gap;
  printed = j.dump(2);
  emit(dir, "summary.json", printed, rec);
}

void task_taylor_test(const ExperimentConfig& cfg, const std::string& dir,
                      RunRecord& rec, std::string& printed) {
  const ProblemSpec spec = build_problem_spec(cfg);
  const Parameter theta = build_parameter(cfg, spec.g);
  const Field h =
      Field::from_fn(spec.g, parse_profile(cfg.get("task.direction", "sin:1:1")));
  std::vector<double> t_list;
  {
    std::istringstream ts(cfg.get("task.t_list", "1e-1,1e-2,1e-3,1e-4"));
    std::string item;
    while (std::getline(ts, item, ','))
      t_list.push_back(std::strtod(item.c_str(), nullptr));
  }
  const std::vector<TaylorPoint> pts = taylor_test(spec, theta, h, t_list);
  const double slope = taylor_ls_slope(pts);
  std::ostringstream os;
  os << "t,remainder,observed_order\n";
  for (const auto& p : pts)
    os << fmt(p.t) << "," << fmt(p.remainder) << "," << fmt(p.observed_order)
       << "\n";
  emit(dir, "taylor.csv", os.str(), rec);
  nlohmann::json j;
  j["task"] = "taylor-test";
  j["kind"] = kind_name(spec.kind);
  j["slope"] = slope;
  printed = j.dump(2);
  emit(dir, "summary.json", printed, rec);
}

std::vector<std::string> embedding_tokens_from_config(
    const ExperimentConfig& cfg) {
  if (cfg.has("task.query")) {
    std::vector<std::string> tokens;
    std::istringstream in(cfg.require("task.query"));
    std::string tok;
    while (in >> tok) tokens.push_back(tok);
    return tokens;
  }
  std::vector<std::string> tokens;
  for (const char* key :
       {"problem", "d", "p", "q", "s", "t", "m", "n", "gamma", "kappa",
        "gamma_hat", "kappa_hat"}) {
    const std::string full = std::string("task.") + key;
    if (cfg.has(full)) tokens.push_back(std::string(key) + "=" + cfg.require(full));
  }
  return tokens;
}

void task_check_embedding(const ExperimentConfig& cfg, const std::string& dir,
                          RunRecord& rec, std::string& printed) {
  printed = check_embedding_tokens(embedding_tokens_from_config(cfg));
  emit(dir, "verdict.json", printed, rec);
}

void task_q_range(const ExperimentConfig& cfg, const std::string& dir,
                          RunRecord& rec, std::string& printed) {
  const Problem prob = parse_problem(cfg.require("task.problem"));
  const XRat d = XRat::parse(cfg.require("task.d"));
  const XRat p = XRat::parse(cfg.require("task.p"));
  const QRange r = admissible_q_range(prob, d, p);
  printed = qrange_json(prob, d, p, r);
  emit(dir, "qrange.json", printed, rec);
}

}  // namespace

/* ------------------------------------------------------------------ */
/*  Dispatch                                                          */
/* ------------------------------------------------------------------ */

RunOutcome run_config(const ExperimentConfig& cfg) {
  const std::string task = cfg.require("task.name");
  RunOutcome out;
  out.out_dir = resolve_out_dir(cfg);
  std::filesystem::create_directories(out.out_dir);
  out.record.task = task;
  out.record.config_text = cfg.serialize();
  out.record.config_checksum = fnv1a_hex(out.record.config_text);
  out.record.started_utc = utc_now();

  if (task == "solve") {
    task_solve(cfg, out.out_dir, out.record, out.printed);
  } else if (task == "invert") {
    task_invert(cfg, out.out_dir, out.record, out.printed);
  } else if (task == "tcc") {
    task_tcc(cfg, out.out_dir, out.record, out.printed, false);
  } else if (task == "aao-tcc") {
    task_tcc(cfg, out.out_dir, out.record, out.printed, true);
  } else if (task == "adjoint-test") {
    task_adjoint_test(cfg, out.out_dir, out.record, out.printed);
  } else if (task == "taylor-test") {
    task_taylor_test(cfg, out.out_dir, out.record, out.printed);
  } else if (task == "check-embedding") {
    task_check_embedding(cfg, out.out_dir, out.record, out.printed);
  } else if (task == "q-range") {
    task_q_range(cfg, out.out_dir, out.record, out.printed);
  } else {
    ensure(false, "unknown task '" + task + "'");
  }

  out.record.finished_utc = utc_now();
  std::ofstream rj(out.out_dir + "/run.json", std::ios::binary);
  ensure(rj.good(), "cannot write run.json in '" + out.out_dir + "'");
  rj << run_record_json(out.record);
  return out;
}

RunOutcome run_config_file(const std::string& path) {
  return run_config(ExperimentConfig::parse_file(path));
}

std::string check_embedding_tokens(const std::vector<std::string>& tokens) {
  const IndexQuery iq = parse_index_query(tokens);
  const Verdict v = check_query(iq);
  return verdict_json(iq, v);
}

}  // namespace parcone
