#include "parcone/embedding_rules.hpp"

#include "json.hpp"
#include "parcone/common.hpp"

namespace parcone {

/* ------------------------------------------------------------------ */
/*  XRat arithmetic                                                   */
/* ------------------------------------------------------------------ */

namespace {

using Wide = __int128;

long long narrow(Wide v) {
  ensure(v <= Wide(0x3fffffffffffffffLL) && v >= -Wide(0x3fffffffffffffffLL),
         "rational overflow");
  return (long long)v;
}

XRat make_reduced(Wide n, Wide d) {
  ensure(d != 0, "zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  // gcd on the wide type by hand; magnitudes fit long long after reduction
  Wide a = n < 0 ? -n : n;
  Wide x = a, y = d;
  while (y != 0) {
    Wide r = x % y;
    x = y;
    y = r;
  }
  if (x == 0) x = 1;
  XRat out;
  out.num = narrow(n / x);
  out.den = narrow(d / x);
  out.inf = 0;
  return out;
}

}  // namespace

XRat::XRat(long long n, long long d) {
  *this = make_reduced(n, d);
}

XRat XRat::infinity(int sign) {
  XRat x;
  x.inf = sign >= 0 ? 1 : -1;
  x.num = 0;
  x.den = 1;
  return x;
}

XRat XRat::parse(const std::string& text) {
  ensure(!text.empty(), "empty rational literal");
  std::string body = text;
  int sign = 1;
  if (body[0] == '+' || body[0] == '-') {
    sign = body[0] == '-' ? -1 : 1;
    body = body.substr(1);
  }
  if (body == "inf") return XRat::infinity(sign);
  auto slash = body.find('/');
  auto to_int = [](const std::string& part) {
    ensure(!part.empty(), "malformed rational literal");
    for (char c : part) ensure(c >= '0' && c <= '9', "malformed rational literal");
    ensure(part.size() <= 18, "rational literal too long");
    long long v = 0;
    for (char c : part) v = v * 10 + (c - '0');
    return v;
  };
  if (slash == std::string::npos) return XRat(sign * to_int(body), 1);
  long long n = to_int(body.substr(0, slash));
  long long d = to_int(body.substr(slash + 1));
  ensure(d != 0, "zero denominator");
  return XRat(sign * n, d);
}

XRat operator+(const XRat& a, const XRat& b) {
  if (a.inf != 0 || b.inf != 0) {
    if (a.inf != 0 && b.inf != 0) {
      ensure(a.inf == b.inf, "indeterminate inf - inf");
      return a;
    }
    return a.inf != 0 ? a : b;
  }
  return make_reduced(Wide(a.num) * b.den + Wide(b.num) * a.den,
                      Wide(a.den) * b.den);
}

XRat operator-(const XRat& a) {
  if (a.inf != 0) return XRat::infinity(-a.inf);
  XRat out = a;
  out.num = -out.num;
  return out;
}

XRat operator-(const XRat& a, const XRat& b) { return a + (-b); }

XRat operator*(const XRat& a, const XRat& b) {
  if (a.inf != 0 || b.inf != 0) {
    ensure(!a.is_zero() && !b.is_zero(), "indeterminate 0 * inf");
    int sa = a.inf != 0 ? a.inf : (a.num > 0 ? 1 : -1);
    int sb = b.inf != 0 ? b.inf : (b.num > 0 ? 1 : -1);
    return XRat::infinity(sa * sb);
  }
  return make_reduced(Wide(a.num) * b.num, Wide(a.den) * b.den);
}

XRat operator/(const XRat& a, const XRat& b) {
  if (b.inf != 0) {
    ensure(a.inf == 0, "indeterminate inf / inf");
    return XRat(0);
  }
  ensure(!b.is_zero(), "division by zero");
  if (a.inf != 0) return XRat::infinity(a.inf * (b.num > 0 ? 1 : -1));
  return make_reduced(Wide(a.num) * b.den, Wide(a.den) * b.num);
}

bool operator==(const XRat& a, const XRat& b) {
  if (a.inf != 0 || b.inf != 0) return a.inf == b.inf;
  return a.num == b.num && a.den == b.den;
}

bool operator!=(const XRat& a, const XRat& b) { return !(a == b); }

bool operator<(const XRat& a, const XRat& b) {
  if (a.inf != 0 || b.inf != 0) {
    if (a.inf == b.inf) return false;
    if (a.inf == -1 || b.inf == 1) return true;
    return false;
  }
  return Wide(a.num) * b.den < Wide(b.num) * a.den;
}

bool operator<=(const XRat& a, const XRat& b) { return a < b || a == b; }
bool operator>(const XRat& a, const XRat& b) { return b < a; }
bool operator>=(const XRat& a, const XRat& b) { return b <= a; }

std::string to_string(const XRat& x) {
  if (x.inf == 1) return "inf";
  if (x.inf == -1) return "-inf";
  if (x.den == 1) return std::to_string(x.num);
  return std::to_string(x.num) + "/" + std::to_string(x.den);
}

XRat xr_min(const XRat& a, const XRat& b) { return a < b ? a : b; }
XRat xr_max(const XRat& a, const XRat& b) { return a < b ? b : a; }

bool succeq(const XRat& a, const XRat& b) {
  if (b.is_zero()) return a > b;
  return a >= b;
}

XRat dual_index(const XRat& p) {
  ensure(p >= XRat(1), "dual index needs p >= 1");
  if (p == XRat(1)) return XRat::infinity();
  if (p.is_inf()) return XRat(1);
  return p / (p - XRat(1));
}

ExponentCap qhat_cap(const XRat& s, const XRat& m, const XRat& d) {
  const XRat a = s - d / m;
  ExponentCap cap;
  if (a > XRat(0)) {
    cap.value = XRat::infinity();
    cap.attained = true;
  } else if (a.is_zero()) {
    cap.value = XRat::infinity();
    cap.attained = false;
  } else {
    cap.value = -d / a;
    cap.attained = true;
  }
  return cap;
}

XRat qhat_max(const XRat& s, const XRat& m, const XRat& d) {
  return qhat_cap(s, m, d).value;
}

/* ------------------------------------------------------------------ */
/*  Feasible index intervals                                          */
/* ------------------------------------------------------------------ */

namespace {

// Subset of the exponent domain [1, inf]; endpoints carry open/closed
// flags so borderline strictness survives exactly.
struct Interval {
  XRat lo{1};
  XRat hi = XRat::infinity();
  bool lo_closed = true;
  bool hi_closed = true;
  bool empty = false;
};

Interval iv_all() { return Interval{}; }

Interval iv_none() {
  Interval iv;
  iv.empty = true;
  return iv;
}

Interval iv_ge(const XRat& x, bool closed) {
  Interval iv;
  iv.lo = xr_max(x, XRat(1));
  iv.lo_closed = x <= XRat(1) ? true : closed;
  if (iv.lo.is_inf() && !iv.lo_closed) iv.empty = true;
  return iv;
}

Interval iv_le(const XRat& x, bool closed) {
  Interval iv;
  iv.hi = x;
  iv.hi_closed = closed;
  if (x < XRat(1) || (x == XRat(1) && !closed)) iv.empty = true;
  return iv;
}

Interval iv_intersect(const Interval& a, const Interval& b) {
  if (a.empty || b.empty) return iv_none();
  Interval iv;
  if (a.lo > b.lo) {
    iv.lo = a.lo;
    iv.lo_closed = a.lo_closed;
  } else if (b.lo > a.lo) {
    iv.lo = b.lo;
    iv.lo_closed = b.lo_closed;
  } else {
    iv.lo = a.lo;
    iv.lo_closed = a.lo_closed && b.lo_closed;
  }
  if (a.hi < b.hi) {
    iv.hi = a.hi;
    iv.hi_closed = a.hi_closed;
  } else if (b.hi < a.hi) {
    iv.hi = b.hi;
    iv.hi_closed = b.hi_closed;
  } else {
    iv.hi = a.hi;
    iv.hi_closed = a.hi_closed && b.hi_closed;
  }
  if (iv.lo > iv.hi) iv.empty = true;
  if (iv.lo == iv.hi && !(iv.lo_closed && iv.hi_closed)) iv.empty = true;
  return iv;
}

// Feasible set {x in [1, inf] : succeq(L, B + C/x)} for finite L, B, C.
// The right hand side is monotone in x, so the set is an interval; the
// strict-at-zero clause only shifts an endpoint between open and closed.
Interval solve_succeq_affine(const XRat& lhs, const XRat& base,
                             const XRat& coef) {
  ensure(!lhs.is_inf() && !base.is_inf() && !coef.is_inf(),
         "interval solve needs finite data");
  if (coef.is_zero()) return succeq(lhs, base) ? iv_all() : iv_none();
  if (coef > XRat(0)) {
    // decreasing toward base: feasible set is an upper interval
    if (lhs < base) return iv_none();
    if (lhs == base) {
      if (lhs.is_zero()) return iv_none();
      Interval iv = iv_ge(XRat::infinity(), true);
      return iv;
    }
    const XRat x0 = coef / (lhs - base);
    return iv_ge(x0, !lhs.is_zero());
  }
  // increasing toward base: feasible set is a lower interval
  if (lhs > base) return iv_all();
  if (lhs == base) {
    Interval iv = iv_all();
    iv.hi_closed = !lhs.is_zero();
    return iv;
  }
  const XRat x0 = coef / (lhs - base);
  return iv_le(x0, !lhs.is_zero());
}

XRat pick_witness(const Interval& iv) {
  ensure(!iv.empty, "witness from empty interval");
  if (iv.hi_closed) return iv.hi;
  if (iv.lo_closed) return iv.lo;
  if (iv.hi.is_inf()) return iv.lo + XRat(1);
  return (iv.lo + iv.hi) / XRat(2);
}

/* ------------------------------------------------------------------ */
/*  Condition bookkeeping                                             */
/* ------------------------------------------------------------------ */

bool eval_relation(const XRat& lhs, const std::string& rel, const XRat& rhs) {
  if (rel == "succeq") return succeq(lhs, rhs);
  if (rel == ">=") return lhs >= rhs;
  if (rel == ">") return lhs > rhs;
  if (rel == "<=") return lhs <= rhs;
  if (rel == "<") return lhs < rhs;
  ensure(false, "unknown relation");
  return false;
}

struct VerdictBuilder {
  Verdict v;

  explicit VerdictBuilder(Problem p) { v.problem = p; }

  void cond(const std::string& name, const XRat& lhs, const std::string& rel,
            const XRat& rhs) {
    ConditionRecord rec;
    rec.name = name;
    rec.lhs = lhs;
    rec.rhs = rhs;
    rec.relation = rel;
    rec.holds = eval_relation(lhs, rel, rhs);
    rec.marginal = (lhs == rhs);
    v.conditions.push_back(rec);
  }

  void witness(const std::string& name, const XRat& value) {
    v.witnesses.push_back({name, value});
  }

  Verdict finish() {
    v.admissible = true;
    v.marginal = false;
    for (const auto& c : v.conditions) {
      if (!c.holds) v.admissible = false;
      if (c.marginal) v.marginal = true;
    }
    return v;
  }
};

}  // namespace

/* ------------------------------------------------------------------ */
/*  Problems and queries                                              */
/* ------------------------------------------------------------------ */

const char* problem_name(Problem p) {
  switch (p) {
    case Problem::CProb: return "cprob";
    case Problem::AProb: return "aprob";
    case Problem::NonlinearA: return "nonlinear_a";
    case Problem::NonlinearB: return "nonlinear_b";
    case Problem::NonlinearC: return "nonlinear_c";
    case Problem::NonlinearD: return "nonlinear_d";
    case Problem::LogProb: return "logprob";
    case Problem::CubicProb: return "cubicprob";
  }
  return "?";
}

Problem parse_problem(const std::string& text) {
  for (Problem p : {Problem::CProb, Problem::AProb, Problem::NonlinearA,
                    Problem::NonlinearB, Problem::NonlinearC,
                    Problem::NonlinearD, Problem::LogProb, Problem::CubicProb}) {
    if (text == problem_name(p)) return p;
  }
  ensure(false, "unknown problem '" + text + "'");
  return Problem::CProb;
}

IndexQuery parse_index_query(const std::vector<std::string>& tokens) {
  IndexQuery iq;
  bool have_problem = false;
  for (const auto& tok : tokens) {
    auto eq = tok.find('=');
    ensure(eq != std::string::npos, "expected key=value, got '" + tok + "'");
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    if (key == "problem") {
      iq.problem = parse_problem(val);
      have_problem = true;
    } else if (key == "d") {
      iq.d = XRat::parse(val);
    } else if (key == "p") {
      iq.p = XRat::parse(val);
    } else if (key == "q") {
      iq.q = XRat::parse(val);
    } else if (key == "s") {
      iq.s = XRat::parse(val);
    } else if (key == "t") {
      iq.t = XRat::parse(val);
    } else if (key == "m") {
      iq.m = XRat::parse(val);
    } else if (key == "n") {
      iq.n = XRat::parse(val);
    } else if (key == "gamma") {
      iq.gamma = XRat::parse(val);
    } else if (key == "kappa") {
      iq.kappa = XRat::parse(val);
    } else if (key == "gamma_hat") {
      iq.gamma_hat = XRat::parse(val);
    } else if (key == "kappa_hat") {
      iq.kappa_hat = XRat::parse(val);
    } else {
      ensure(false, "unknown query key '" + key + "'");
    }
  }
  ensure(have_problem, "query needs problem=<name>");
  validate_index_query(iq);
  return iq;
}

void validate_index_query(const IndexQuery& iq) {
  ensure(iq.d.inf == 0 && iq.d.den == 1 && iq.d.num >= 1 && iq.d.num <= 4,
         "d must be an integer in 1..4");
  for (const XRat* e : {&iq.p, &iq.q, &iq.m, &iq.n}) {
    ensure(*e >= XRat(1), "Lebesgue exponents must lie in [1, inf]");
  }
  for (const XRat* e : {&iq.s, &iq.t}) {
    ensure(!e->is_inf() && *e >= XRat(0),
           "smoothness orders must be finite and nonnegative");
  }
  for (const XRat* e : {&iq.gamma, &iq.kappa, &iq.gamma_hat, &iq.kappa_hat}) {
    ensure(!e->is_inf() && *e >= XRat(0),
           "growth exponents must be finite and nonnegative");
  }
}

/* ------------------------------------------------------------------ */
/*  Linear problems                                                   */
/* ------------------------------------------------------------------ */

Verdict check_cprob(const IndexQuery& iq) {
  validate_index_query(iq);
  const XRat d = iq.d;
  const XRat pstar = dual_index(iq.p);
  VerdictBuilder b(Problem::CProb);
  b.cond("state_obs_embedding", iq.s - d / iq.m, "succeq", -(d / iq.q));
  b.cond("dual_exponent_order", iq.q, ">=", pstar);
  b.cond("dual_pairing", iq.t - d / iq.n, "succeq", -(d / pstar) + d / iq.q);
  b.witness("qhat", qhat_max(iq.s, iq.m, d));
  return b.finish();
}

Verdict check_aprob(const IndexQuery& iq) {
  validate_index_query(iq);
  const XRat d = iq.d;
  const XRat pstar = dual_index(iq.p);
  VerdictBuilder b(Problem::AProb);
  b.cond("state_obs_embedding", iq.s - d / iq.m, "succeq", -(d / iq.q));
  b.cond("dual_exponent_order", iq.q, ">=", pstar);
  b.cond("gradient_pairing", iq.t - XRat(1) - d / iq.n, "succeq",
         -(d / pstar) + d / iq.q);
  const XRat lhs2 = iq.t - XRat(2) - d / iq.n;
  if (iq.p > d) {
    b.cond("hessian_pairing", lhs2, "succeq", -d + d / iq.q);
  } else if (iq.p == d) {
    // critical case: both inequalities must be strict
    b.cond("hessian_pairing", lhs2, ">", -d + d / iq.q);
    b.cond("obs_above_one", iq.q, ">", XRat(1));
  } else {
    b.cond("hessian_pairing", lhs2, "succeq",
           -d + d / iq.p - XRat(1) + d / iq.q);
  }
  b.witness("qhat", qhat_max(iq.s, iq.m, d));
  return b.finish();
}

/* ------------------------------------------------------------------ */
/*  Nonlinear source bundles                                          */
/* ------------------------------------------------------------------ */

namespace {

// High-regularity route for zero-order growth.  The auxiliary interior
// index stilde has been eliminated; the surviving margins are strict.
void nonlinear_high_reg(VerdictBuilder& b, const IndexQuery& iq) {
  const XRat d = iq.d;
  const XRat gk = iq.gamma + iq.kappa;
  const XRat qstar = dual_index(iq.q);
  const bool big_growth = gk > XRat(2) || (gk == XRat(2) && iq.q == XRat(1));
  if (big_growth) {
    b.cond("time_pairing", iq.t, ">", d / iq.n - d / qstar);
    b.cond("space_margin", iq.s, ">",
           iq.t + d + xr_max(XRat(0), d / iq.m - d / iq.n));
    b.cond("state_obs_margin", iq.s, ">", d / iq.m - d / iq.q);
    b.witness("r", XRat::infinity());
    // interior index sits strictly above d/2 and below the space margin
    const XRat u = xr_min((iq.s - iq.t) / XRat(2),
                          (iq.s - iq.t - d / iq.m + d / iq.n) / XRat(2));
    if (u > d / XRat(2)) b.witness("stilde", (d / XRat(2) + u) / XRat(2));
  } else {
    const XRat rbar =
        gk.is_zero() ? XRat(1) : xr_max(XRat(1), qstar * gk);
    b.cond("time_pairing", iq.t, ">",
           d / iq.n + xr_min(XRat(0), -(d / qstar) + d * gk));
    b.cond("space_margin", iq.s, ">",
           iq.t + xr_max(XRat(0), d - (XRat(2) * d) / rbar));
    b.cond("state_obs_margin", iq.s, ">", d / iq.m - d / iq.q);
    b.witness("r", rbar);
    b.witness("stilde", xr_max(XRat(0), d / XRat(2) - d / rbar));
  }
  b.witness("qhat", iq.q);
}

// Low-regularity route for zero-order growth: the state is assumed
// essentially bounded in L^r, so r may not exceed the exponent the
// state space actually reaches.  Both remaining conditions relax as r
// grows, which makes that cap the optimal choice; when the cap is an
// unattained supremum the conditions are enforced strictly against the
// limiting values.
void nonlinear_low_reg(VerdictBuilder& b, const IndexQuery& iq) {
  const XRat d = iq.d;
  const XRat gk = iq.gamma + iq.kappa;
  const XRat qstar = dual_index(iq.q);
  const ExponentCap cap = qhat_cap(iq.s, iq.m, d);
  b.cond("state_obs_embedding", iq.s - d / iq.m, "succeq", -(d / iq.q));
  if (gk.is_zero()) {
    b.cond("growth_exponent_fit", XRat(1), cap.attained ? "<=" : "<",
           cap.value);
    b.cond("reaction_pairing", iq.t - d / iq.n, "succeq", -(d / qstar));
    b.witness("r", XRat(1));
    b.witness("qhat", qhat_max(iq.s, iq.m, d));
    return;
  }
  const XRat rneed = xr_max(XRat(1), qstar * gk);
  const XRat lhs = iq.t - d / iq.n;
  if (cap.attained) {
    Interval pairing = solve_succeq_affine(lhs, -(d / qstar), d * gk);
    Interval feas = iv_intersect(
        pairing, iv_intersect(iv_ge(rneed, true), iv_le(cap.value, true)));
    const XRat r_show = feas.empty ? cap.value : pick_witness(feas);
    b.cond("growth_exponent_fit", rneed, "<=", r_show);
    b.cond("reaction_pairing", lhs, "succeq",
           -(d / qstar) + (d * gk) / r_show);
    if (!feas.empty) b.witness("r", r_show);
  } else {
    // cap is the open supremum: only finite r below it are usable
    b.cond("growth_exponent_fit", rneed, "<", cap.value);
    b.cond("reaction_pairing", lhs, ">", -(d / qstar));
    bool ok = rneed < cap.value && lhs > -(d / qstar);
    if (ok) {
      Interval pairing = solve_succeq_affine(lhs, -(d / qstar), d * gk);
      Interval feas = iv_intersect(pairing, iv_ge(rneed, true));
      feas.hi = cap.value;
      feas.hi_closed = false;
      if (feas.lo == feas.hi) feas.empty = true;
      if (!feas.empty) b.witness("r", pick_witness(feas));
    }
  }
  b.witness("qhat", qhat_max(iq.s, iq.m, d));
}

// Gradient-growth additions for the high-regularity route, already
// reduced at the choices rho = 2, R = inf.
void nonlinear_gradient_high(VerdictBuilder& b, const IndexQuery& iq) {
  const XRat d = iq.d;
  const XRat qstar = dual_index(iq.q);
  b.cond("time_positive", iq.t, ">", d / iq.n);
  b.cond("gradient_test_pairing", iq.t - d / iq.n, "succeq",
         XRat(1) - d / qstar);
  b.cond("space_two_orders_pairing", iq.s, "succeq",
         iq.t + XRat(2) + xr_max(XRat(2), d) + d / iq.m - d / iq.n);
  b.cond("space_two_orders", iq.s, ">=", iq.t + XRat(2) + xr_max(XRat(2), d));
  b.witness("R", XRat::infinity());
  b.witness("rho", XRat(2));
  b.witness("shat", XRat(0));
  const XRat u = xr_min((iq.s - iq.t - XRat(4)) / XRat(2),
                        (iq.s - iq.t - XRat(4) - d / iq.m + d / iq.n) / XRat(2));
  if (u > d / XRat(2)) b.witness("scheck", (d / XRat(2) + u) / XRat(2));
}

// Gradient-growth additions for the low-regularity route.  R and rho
// are capped by the exponents reachable one and two derivatives below
// the state regularity; every condition relaxes as R or rho grows, so
// the caps are optimal, again with strict enforcement at unattained
// suprema.
void nonlinear_gradient_low(VerdictBuilder& b, const IndexQuery& iq) {
  const XRat d = iq.d;
  const XRat qstar = dual_index(iq.q);
  const XRat gh = iq.gamma_hat;
  const ExponentCap rcap = qhat_cap(iq.s - XRat(1), iq.m, d);
  const ExponentCap pcap = qhat_cap(iq.s - XRat(2), iq.m, d);
  const XRat lhs = iq.t - d / iq.n;

  b.cond("hessian_integrability", pcap.value, ">=", XRat(2));
  b.cond("gradient_growth_fit", qstar * (gh + XRat(1)),
         rcap.attained ? "<=" : "<", rcap.value);

  const XRat grad_rhs =
      XRat(1) - d / qstar + (d * (gh + XRat(1))) / rcap.value;
  b.cond("gradient_pairing", lhs, rcap.attained ? "succeq" : ">", grad_rhs);

  const XRat hess_rhs = -(d / XRat(2)) + d / pcap.value +
                        (gh.is_zero() ? XRat(0) : (d * gh) / rcap.value);
  const bool hess_strict = !pcap.attained || (gh > XRat(0) && !rcap.attained);
  b.cond("hessian_product_pairing", lhs, hess_strict ? ">" : "succeq",
         hess_rhs);

  if (gh.is_zero()) {
    b.cond("gradient_product_fit", XRat(0), "<=", XRat(0));
  } else {
    XRat sup;
    bool sup_inf = false;
    const XRat factor =
        pcap.value.is_inf() ? XRat(1) : XRat(1) - XRat(2) / pcap.value;
    if (factor.is_zero()) {
      sup = XRat(0);
    } else if (rcap.value.is_inf()) {
      sup_inf = factor > XRat(0);
      sup = sup_inf ? XRat(0) : XRat::infinity(-1);
    } else {
      sup = (rcap.value / XRat(2)) * factor;
    }
    if (sup_inf) {
      b.cond("gradient_product_fit", gh, "<", XRat::infinity());
    } else {
      const bool attained =
          rcap.attained && (pcap.attained || factor.is_zero());
      b.cond("gradient_product_fit", gh, attained ? "<=" : "<", sup);
    }
  }
  if (rcap.attained) b.witness("R", rcap.value);
  if (pcap.attained) b.witness("rho", pcap.value);
}

}  // namespace

Verdict check_nonlinear_source(const IndexQuery& iq) {
  validate_index_query(iq);
  VerdictBuilder b(iq.problem);
  switch (iq.problem) {
    case Problem::NonlinearA:
      nonlinear_high_reg(b, iq);
      break;
    case Problem::NonlinearB:
      ensure(iq.kappa_hat == XRat(1),
             "gradient remainder exponent must equal 1 for this bundle");
      nonlinear_high_reg(b, iq);
      nonlinear_gradient_high(b, iq);
      break;
    case Problem::NonlinearC:
      nonlinear_low_reg(b, iq);
      break;
    case Problem::NonlinearD:
      ensure(iq.kappa_hat == XRat(1),
             "gradient remainder exponent must equal 1 for this bundle");
      nonlinear_low_reg(b, iq);
      nonlinear_gradient_low(b, iq);
      break;
    default:
      ensure(false, "not a nonlinear source bundle");
  }
  return b.finish();
}

/* ------------------------------------------------------------------ */
/*  Quadratic gradient source                                         */
/* ------------------------------------------------------------------ */

// Fixed shape: state and test space two orders smooth in L^2, gradient
// remainder exponent 1, no gradient growth, hessian exponent pinned at
// 2.  The free index R (gradient integrability of the state) trades
// off between the pairing condition, which relaxes as R grows, and the
// state embedding, which tightens; the checker solves the exact
// R interval.  The data-space cap q <= 2 reflects the L^2 dual state
// bound; p >= 2 keeps the parameter space inside L^2.
Verdict check_logprob(const IndexQuery& iq) {
  validate_index_query(iq);
  const XRat d = iq.d;
  const XRat lhs = XRat(2) - d / XRat(2);
  const XRat qstar = dual_index(iq.q);
  VerdictBuilder b(Problem::LogProb);

  Interval r_embed = solve_succeq_affine(lhs, XRat(1), -d);
  Interval r_pair = solve_succeq_affine(lhs, XRat(1) - d + d / iq.q, d);
  Interval feas = iv_intersect(r_embed,
                               iv_intersect(r_pair, iv_ge(qstar, true)));
  XRat r_show;
  if (!feas.empty) {
    r_show = pick_witness(feas);
  } else if (!r_embed.empty) {
    r_show = pick_witness(r_embed);
  } else {
    r_show = XRat::infinity();
  }
  b.cond("gradient_pairing", lhs, "succeq", XRat(1) - d + d / iq.q + d / r_show);
  b.cond("gradient_growth_fit", qstar, "<=", r_show);
  b.cond("state_gradient_embedding", lhs, "succeq", XRat(1) - d / r_show);
  b.cond("hessian_product_pairing", lhs, "succeq", XRat(0));
  b.cond("state_obs_embedding", lhs, "succeq", -(d / iq.q));
  b.cond("dual_data_space", iq.q, "<=", XRat(2));
  b.cond("parameter_space", iq.p, ">=", XRat(2));
  if (!feas.empty) b.witness("R", r_show);
  b.witness("rho", XRat(2));
  b.witness("qhat", qhat_max(XRat(2), XRat(2), d));
  return b.finish();
}

/* ------------------------------------------------------------------ */
/*  Cubic source                                                      */
/* ------------------------------------------------------------------ */

namespace {

IndexQuery cubic_core_query(const IndexQuery& iq) {
  IndexQuery c = iq;
  c.problem = Problem::NonlinearC;
  c.s = XRat(1);
  c.t = XRat(1);
  c.m = XRat(2);
  c.n = XRat(2);
  c.gamma = XRat(1);
  c.kappa = XRat(1);
  return c;
}

Verdict check_cubicprob(const IndexQuery& iq) {
  validate_index_query(iq);
  VerdictBuilder b(Problem::CubicProb);
  b.cond("parameter_space", iq.p, ">=", XRat(2));
  b.cond("dimension_range", iq.d, "<=", XRat(4));
  nonlinear_low_reg(b, cubic_core_query(iq));
  return b.finish();
}

}  // namespace

Verdict check_query(const IndexQuery& iq) {
  switch (iq.problem) {
    case Problem::CProb: return check_cprob(iq);
    case Problem::AProb: return check_aprob(iq);
    case Problem::NonlinearA:
    case Problem::NonlinearB:
    case Problem::NonlinearC:
    case Problem::NonlinearD:
      return check_nonlinear_source(iq);
    case Problem::LogProb: return check_logprob(iq);
    case Problem::CubicProb: return check_cubicprob(iq);
  }
  ensure(false, "unknown problem");
  return Verdict{};
}

/* ------------------------------------------------------------------ */
/*  Admissible q ranges                                               */
/* ------------------------------------------------------------------ */

namespace {

QRange qrange_from(const Interval& iv) {
  QRange r;
  r.lo = iv.lo;
  r.hi = iv.hi;
  r.lo_closed = iv.lo_closed;
  r.hi_closed = iv.hi_closed;
  r.empty = iv.empty;
  return r;
}

Interval cprob_q_interval(const XRat& d, const XRat& p) {
  const XRat pstar = dual_index(p);
  Interval pairing =
      solve_succeq_affine(XRat(2) - d / XRat(2), -(d / pstar), d);
  Interval obs = solve_succeq_affine(-(d / XRat(2)), XRat(0), -d);
  return iv_intersect(pairing, iv_intersect(obs, iv_ge(pstar, true)));
}

Interval aprob_q_interval(const XRat& d, const XRat& p) {
  const XRat pstar = dual_index(p);
  Interval grad =
      solve_succeq_affine(XRat(1) - d / XRat(2), -(d / pstar), d);
  Interval hess = solve_succeq_affine(-(d / XRat(2)), -d, d);
  Interval obs = solve_succeq_affine(-(d / XRat(2)), XRat(0), -d);
  return iv_intersect(
      grad, iv_intersect(hess, iv_intersect(obs, iv_ge(pstar, true))));
}

Interval logprob_q_interval(const XRat& d) {
  const XRat lhs = XRat(2) - d / XRat(2);
  Interval r_embed = solve_succeq_affine(lhs, XRat(1), -d);
  if (r_embed.empty) return iv_none();
  ensure(r_embed.hi_closed, "open gradient exponent bound");
  const XRat rhi = r_embed.hi;
  Interval pairing =
      solve_succeq_affine(lhs, XRat(1) - d + d / rhi, d);
  Interval dual_fit = iv_ge(dual_index(rhi), true);
  Interval obs = solve_succeq_affine(lhs, XRat(0), -d);
  Interval cap = iv_le(XRat(2), true);
  return iv_intersect(pairing,
                      iv_intersect(dual_fit, iv_intersect(obs, cap)));
}

Interval cubic_q_interval(const XRat& d) {
  const ExponentCap pbar = qhat_cap(XRat(1), XRat(2), d);
  if (!pbar.attained) {
    // every finite exponent below the open supremum works
    Interval iv;
    iv.lo = XRat(1);
    iv.lo_closed = false;
    iv.hi = XRat::infinity();
    iv.hi_closed = false;
    return iv;
  }
  const XRat lhs = XRat(1) - d / XRat(2);
  Interval fit = iv_ge(dual_index(pbar.value / XRat(2)), true);
  Interval pairing = solve_succeq_affine(
      lhs, -d + (XRat(2) * d) / pbar.value, d);
  Interval obs = iv_le(pbar.value, true);
  return iv_intersect(fit, iv_intersect(pairing, obs));
}

}  // namespace

QRange admissible_q_range(Problem problem, const XRat& d, const XRat& p) {
  ensure(d.inf == 0 && d.den == 1 && d.num >= 1 && d.num <= 4,
         "d must be an integer in 1..4");
  ensure(p >= XRat(1), "p must lie in [1, inf]");
  switch (problem) {
    case Problem::CProb:
      ensure(d <= XRat(3) && p >= XRat(2),
             "range stated for d <= 3 and p >= 2");
      return qrange_from(cprob_q_interval(d, p));
    case Problem::AProb:
      ensure(p > d && p >= XRat(2), "range stated for p > d and p >= 2");
      return qrange_from(aprob_q_interval(d, p));
    case Problem::LogProb:
      ensure(d <= XRat(3) && p >= XRat(2),
             "range stated for d <= 3 and p >= 2");
      return qrange_from(logprob_q_interval(d));
    case Problem::CubicProb:
      ensure(d <= XRat(4) && p >= XRat(2),
             "range stated for d <= 4 and p >= 2");
      return qrange_from(cubic_q_interval(d));
    default:
      ensure(false, "no stated q range for this bundle");
  }
  return QRange{};
}

/* ------------------------------------------------------------------ */
/*  Serialization                                                      */
/* ------------------------------------------------------------------ */

std::string verdict_json(const IndexQuery& iq, const Verdict& v) {
  nlohmann::json j;
  j["problem"] = problem_name(v.problem);
  nlohmann::json q;
  q["d"] = to_string(iq.d);
  q["p"] = to_string(iq.p);
  q["q"] = to_string(iq.q);
  q["s"] = to_string(iq.s);
  q["t"] = to_string(iq.t);
  q["m"] = to_string(iq.m);
  q["n"] = to_string(iq.n);
  q["gamma"] = to_string(iq.gamma);
  q["kappa"] = to_string(iq.kappa);
  q["gamma_hat"] = to_string(iq.gamma_hat);
  q["kappa_hat"] = to_string(iq.kappa_hat);
  j["query"] = q;
  j["admissible"] = v.admissible;
  j["marginal"] = v.marginal;
  nlohmann::json conds = nlohmann::json::array();
  nlohmann::json failed = nlohmann::json::array();
  for (const auto& c : v.conditions) {
    nlohmann::json jc;
    jc["name"] = c.name;
    jc["lhs"] = to_string(c.lhs);
    jc["relation"] = c.relation;
    jc["rhs"] = to_string(c.rhs);
    jc["holds"] = c.holds;
    jc["marginal"] = c.marginal;
    conds.push_back(jc);
    if (!c.holds) failed.push_back(c.name);
  }
  j["conditions"] = conds;
  j["failed_conditions"] = failed;
  nlohmann::json w;
  for (const auto& wit : v.witnesses) w[wit.name] = to_string(wit.value);
  j["witnesses"] = w;
  return j.dump(2);
}

std::string qrange_json(Problem problem, const XRat& d, const XRat& p,
                        const QRange& r) {
  nlohmann::json j;
  j["problem"] = problem_name(problem);
  j["d"] = to_string(d);
  j["p"] = to_string(p);
  j["empty"] = r.empty;
  if (!r.empty) {
    j["q_lower"] = to_string(r.lo);
    j["q_lower_closed"] = r.lo_closed;
    j["q_upper"] = to_string(r.hi);
    j["q_upper_closed"] = r.hi_closed;
  }
  return j.dump(2);
}

}  // namespace parcone
