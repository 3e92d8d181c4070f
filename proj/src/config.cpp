#include "parcone/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace parcone {

/* ------------------------------------------------------------------ */
/*  Parsing                                                           */
/* ------------------------------------------------------------------ */

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& text, const std::string& what) {
  ensure(!text.empty(), what + ": empty number");
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  ensure(end == text.c_str() + text.size(), what + ": bad number '" + text + "'");
  ensure(std::isfinite(v), what + ": non-finite number '" + text + "'");
  return v;
}

long long parse_int(const std::string& text, const std::string& what) {
  ensure(!text.empty(), what + ": empty integer");
  char* end = nullptr;
  const long long v = std::strtoll(text.c_str(), &end, 10);
  ensure(end == text.c_str() + text.size(),
         what + ": bad integer '" + text + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      ensure(t.back() == ']' && t.size() > 2,
             "config line " + std::to_string(lineno) + ": bad section header");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    auto eq = t.find('=');
    ensure(eq != std::string::npos,
           "config line " + std::to_string(lineno) + ": expected key = value");
    ensure(!section.empty(),
           "config line " + std::to_string(lineno) + ": key outside a section");
    const std::string key = trim(t.substr(0, eq));
    const std::string val = trim(t.substr(eq + 1));
    ensure(!key.empty(),
           "config line " + std::to_string(lineno) + ": empty key");
    cfg.values[section + "." + key] = val;
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  ensure(in.good(), "cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str());
}

std::string ExperimentConfig::serialize() const {
  // stable section order: the three standard ones first
  std::vector<std::string> order = {"problem", "task", "output"};
  for (const auto& [key, _] : values) {
    const std::string sec = key.substr(0, key.find('.'));
    if (std::find(order.begin(), order.end(), sec) == order.end())
      order.push_back(sec);
  }
  std::ostringstream out;
  bool first = true;
  for (const auto& sec : order) {
    bool any = false;
    for (const auto& [key, val] : values) {
      if (key.substr(0, key.find('.')) != sec) continue;
      if (!any) {
        if (!first) out << "\n";
        out << "[" << sec << "]\n";
        any = true;
        first = false;
      }
      out << key.substr(key.find('.') + 1) << " = " << val << "\n";
    }
  }
  return out.str();
}

bool ExperimentConfig::has(const std::string& key) const {
  return values.count(key) != 0;
}

std::string ExperimentConfig::get(const std::string& key,
                                  const std::string& fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

std::string ExperimentConfig::require(const std::string& key) const {
  auto it = values.find(key);
  ensure(it != values.end(), "config is missing required key '" + key + "'");
  return it->second;
}

long long ExperimentConfig::get_int(const std::string& key,
                                    long long fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : parse_int(it->second, key);
}

double ExperimentConfig::get_real(const std::string& key,
                                  double fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : parse_real(it->second, key);
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.values == b.values;
}

/* ------------------------------------------------------------------ */
/*  Presets                                                           */
/* ------------------------------------------------------------------ */

Field preset_u0(const Grid& g, const std::string& name) {
  std::string base = name;
  double scale = 1.0;
  auto colon = name.find(':');
  if (colon != std::string::npos) {
    base = name.substr(0, colon);
    scale = parse_real(name.substr(colon + 1), "u0 scale");
  }
  const double pi = 3.14159265358979323846;
  if (base == "zero") return Field(g);
  if (base == "sin_pi")
    return Field::from_fn(g, [=](double x) { return scale * std::sin(pi * x); });
  if (base == "parabola")
    return Field::from_fn(g, [=](double x) { return scale * x * (1.0 - x); });
  if (base == "gauss")
    return Field::from_fn(g, [=](double x) {
      return scale * std::exp(-50.0 * (x - 0.5) * (x - 0.5));
    });
  ensure(false, "unknown u0 preset '" + name + "'");
  return Field(g);
}

std::function<double(double)> parse_profile(const std::string& text) {
  struct Term {
    int kind;  // 0 const, 1 affine, 2 sin, 3 parabola
    double a = 0.0, b = 0.0;
  };
  std::vector<Term> terms;
  const double pi = 3.14159265358979323846;
  for (const auto& raw : split(text, '+')) {
    const std::string part = trim(raw);
    ensure(!part.empty(), "empty profile term in '" + text + "'");
    auto args = split(part, ':');
    const std::string& head = args[0];
    Term t{};
    if (head == "const") {
      ensure(args.size() == 2, "const takes one argument");
      t.kind = 0;
      t.a = parse_real(args[1], "profile");
    } else if (head == "affine") {
      ensure(args.size() == 3, "affine takes two arguments");
      t.kind = 1;
      t.a = parse_real(args[1], "profile");
      t.b = parse_real(args[2], "profile");
    } else if (head == "sin") {
      ensure(args.size() == 3, "sin takes two arguments");
      t.kind = 2;
      t.a = parse_real(args[1], "profile");
      t.b = parse_real(args[2], "profile");
    } else if (head == "parabola") {
      ensure(args.size() == 2, "parabola takes one argument");
      t.kind = 3;
      t.a = parse_real(args[1], "profile");
    } else {
      ensure(false, "unknown profile term '" + part + "'");
    }
    terms.push_back(t);
  }
  return [terms, pi](double x) {
    double v = 0.0;
    for (const auto& t : terms) {
      switch (t.kind) {
        case 0: v += t.a; break;
        case 1: v += t.a + t.b * x; break;
        case 2: v += t.a * std::sin(t.b * pi * x); break;
        case 3: v += t.a * x * (1.0 - x); break;
      }
    }
    return v;
  };
}

std::function<Field(double)> preset_phi(const Grid& g,
                                        const std::string& name) {
  std::string base = name;
  double a = 1.0;
  auto colon = name.find(':');
  if (colon != std::string::npos) {
    base = name.substr(0, colon);
    a = parse_real(name.substr(colon + 1), "phi amplitude");
  }
  const double pi = 3.14159265358979323846;
  if (base == "zero") return nullptr;
  if (base == "const") {
    Field f = Field::from_fn(g, [=](double) { return a; });
    return [f](double) { return f; };
  }
  if (base == "decay_sin") {
    Field f = Field::from_fn(g, [=](double x) { return a * std::sin(pi * x); });
    return [f](double t) {
      Field out = f;
      const double w = std::exp(-t);
      for (double& v : out.v) v *= w;
      return out;
    };
  }
  if (base == "decay_sin_poly") {
    Field f = Field::from_fn(
        g, [=](double x) { return a * (std::sin(pi * x) + x * (1.0 - x)); });
    return [f](double t) {
      Field out = f;
      const double w = std::exp(-t);
      for (double& v : out.v) v *= w;
      return out;
    };
  }
  ensure(false, "unknown phi preset '" + name + "'");
  return nullptr;
}

/* ------------------------------------------------------------------ */
/*  Builders                                                          */
/* ------------------------------------------------------------------ */

namespace {

ProblemKind parse_kind(const std::string& text) {
  if (text == "potential") return ProblemKind::Potential;
  if (text == "diffusion") return ProblemKind::Diffusion;
  if (text == "quadratic_gradient_source")
    return ProblemKind::QuadraticGradientSource;
  if (text == "cubic_source") return ProblemKind::CubicSource;
  ensure(false, "unknown problem kind '" + text + "'");
  return ProblemKind::Potential;
}

CubicCoeffs parse_cubic(const std::string& text) {
  if (text == "cube") return CubicCoeffs::cube();
  if (text == "bistable") return CubicCoeffs::bistable();
  if (text == "quadratic_shelf") return CubicCoeffs::quadratic_shelf();
  if (text.rfind("threshold", 0) == 0) {
    auto colon = text.find(':');
    if (colon == std::string::npos) return CubicCoeffs::threshold();
    return CubicCoeffs::threshold(
        parse_real(text.substr(colon + 1), "threshold"));
  }
  ensure(false, "unknown cubic preset '" + text + "'");
  return CubicCoeffs::cube();
}

}  // namespace

ProblemSpec build_problem_spec(const ExperimentConfig& cfg) {
  ProblemSpec spec;
  spec.kind = parse_kind(cfg.get("problem.kind", "potential"));
  spec.g = make_grid((int)cfg.get_int("problem.n", 63));
  spec.axis = make_time_axis(cfg.get_real("problem.T", 0.1),
                             (int)cfg.get_int("problem.n_steps", 20));
  spec.u0 = preset_u0(spec.g, cfg.get("problem.u0", "sin_pi"));
  spec.phi = preset_phi(spec.g, cfg.get("problem.phi", "zero"));
  spec.cubic = parse_cubic(cfg.get("problem.cubic", "cube"));
  spec.a_lower = cfg.get_real("problem.a_lower", 0.1);
  ensure(spec.a_lower > 0.0, "problem.a_lower must be positive");
  return spec;
}

Parameter build_parameter(const ExperimentConfig& cfg, const Grid& g,
                          const std::string& key) {
  Parameter theta;
  theta.f = Field::from_fn(g, parse_profile(cfg.get(key, "const:1")));
  const std::string space = cfg.get("problem.theta_space", "l2");
  if (space == "l2") {
    theta.space = ParamSpace::L2;
  } else if (space == "w1p") {
    theta.space = ParamSpace::W1p;
  } else {
    ensure(false, "problem.theta_space must be l2 or w1p");
  }
  theta.p = cfg.get_real("problem.theta_p", 2.0);
  ensure(theta.p >= 1.0, "problem.theta_p must be >= 1");
  return theta;
}

}  // namespace parcone
