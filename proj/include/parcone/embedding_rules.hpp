#pragma once

/* ------------------------------------------------------------------ */
/*  embedding_rules: exact rational admissibility checks              */
/*                                                                    */
/*  Decides, in exact arithmetic, whether a tuple of Sobolev/Lebesgue */
/*  indices admits the embedding and duality chains that the          */
/*  tangential cone estimates for the four model problems rest on.    */
/*  Everything here is integer/rational; no floating point.           */
/* ------------------------------------------------------------------ */

#include <string>
#include <vector>

namespace parcone {

/* ------------------------------------------------------------------ */
/*  XRat: exact extended rational                                     */
/* ------------------------------------------------------------------ */

// Canonical form: gcd-reduced, den > 0.  inf = +1/-1 marks +/- infinity
// (num/den are ignored then).  Arithmetic rejects the indeterminate
// forms (inf - inf, 0 * inf, inf / inf, x / 0) with ValidationError;
// the conventions that ARE defined: a / inf = 0 for finite a,
// a - inf = -inf for finite a, and the natural order extension.
struct XRat {
  long long num = 0;
  long long den = 1;
  int inf = 0;

  XRat() = default;
  XRat(long long n) : num(n), den(1) {}
  XRat(long long n, long long d);

  static XRat infinity(int sign = +1);
  // Accepts "a", "a/b", "inf", "+inf", "-inf".
  static XRat parse(const std::string& text);

  bool is_inf() const { return inf != 0; }
  bool is_zero() const { return inf == 0 && num == 0; }
};

XRat operator+(const XRat& a, const XRat& b);
XRat operator-(const XRat& a, const XRat& b);
XRat operator-(const XRat& a);
XRat operator*(const XRat& a, const XRat& b);
XRat operator/(const XRat& a, const XRat& b);
bool operator==(const XRat& a, const XRat& b);
bool operator!=(const XRat& a, const XRat& b);
bool operator<(const XRat& a, const XRat& b);
bool operator<=(const XRat& a, const XRat& b);
bool operator>(const XRat& a, const XRat& b);
bool operator>=(const XRat& a, const XRat& b);

std::string to_string(const XRat& x);

XRat xr_min(const XRat& a, const XRat& b);
XRat xr_max(const XRat& a, const XRat& b);

// Order relation used throughout the index conditions: a >= b, with
// strict inequality required exactly when b = 0.
bool succeq(const XRat& a, const XRat& b);

// p -> p/(p-1) on [1, inf]; 1 -> inf, inf -> 1.  Errors for p < 1.
XRat dual_index(const XRat& p);

/* ------------------------------------------------------------------ */
/*  Largest Lebesgue exponent reachable from W^{s,m} in dimension d   */
/* ------------------------------------------------------------------ */

// qhat_max solves succeq(s - d/m, -d/qhat) for the largest qhat.
// When s - d/m = 0 every finite exponent works but infinity does not;
// the returned value is then the unattained supremum and `attained`
// is false.  Callers that must place an index AT the bound use
// qhat_cap and honor the flag; plain succeq against -d/q never
// inflates a verdict at the borderline.
struct ExponentCap {
  XRat value;
  bool attained = true;
};

ExponentCap qhat_cap(const XRat& s, const XRat& m, const XRat& d);
XRat qhat_max(const XRat& s, const XRat& m, const XRat& d);

/* ------------------------------------------------------------------ */
/*  Queries and verdicts                                              */
/* ------------------------------------------------------------------ */

enum class Problem {
  CProb,        // potential:      state L^2, dual pair against H^2 cap H^1_0
  AProb,        // diffusion:      same spaces, first/second order pairings
  NonlinearA,   // zero-order growth, high-regularity route
  NonlinearB,   // + gradient growth, high-regularity route
  NonlinearC,   // zero-order growth, L^inf(L^r) state assumption
  NonlinearD,   // + gradient growth, L^inf(W^{1,R} cap W^{2,rho}) assumption
  LogProb,      // quadratic gradient source
  CubicProb,    // cubic source
};

const char* problem_name(Problem p);
Problem parse_problem(const std::string& text);

struct IndexQuery {
  Problem problem = Problem::CProb;
  XRat d{1};
  XRat p{2};
  XRat q{2};
  XRat s{0};
  XRat t{0};
  XRat m{2};
  XRat n{2};
  XRat gamma{0};      // zero-order growth exponent
  XRat kappa{0};      // zero-order remainder exponent
  XRat gamma_hat{0};  // gradient growth exponent
  XRat kappa_hat{1};  // gradient remainder exponent
};

// Parses "key=value" tokens (problem=..., d=..., p=..., ...).
IndexQuery parse_index_query(const std::vector<std::string>& tokens);
void validate_index_query(const IndexQuery& iq);

struct ConditionRecord {
  std::string name;
  XRat lhs;
  XRat rhs;
  std::string relation;  // "succeq", ">=", ">", "<=", "<"
  bool holds = false;
  bool marginal = false;  // lhs == rhs exactly: operator choice decides
};

struct Witness {
  std::string name;
  XRat value;
};

struct Verdict {
  Problem problem = Problem::CProb;
  bool admissible = false;
  bool marginal = false;
  std::vector<ConditionRecord> conditions;
  std::vector<Witness> witnesses;
};

Verdict check_cprob(const IndexQuery& iq);
Verdict check_aprob(const IndexQuery& iq);
Verdict check_nonlinear_source(const IndexQuery& iq);
Verdict check_logprob(const IndexQuery& iq);
// Dispatch on iq.problem (CubicProb runs the NonlinearC bundle at its
// fixed indices plus the problem's own validity conditions).
Verdict check_query(const IndexQuery& iq);

/* ------------------------------------------------------------------ */
/*  Admissible q ranges stated by the per-problem summary results     */
/* ------------------------------------------------------------------ */

struct QRange {
  XRat lo;
  XRat hi;
  bool lo_closed = true;
  bool hi_closed = true;
  bool empty = false;
};

// Defined for CProb, AProb, LogProb, CubicProb.  Validity gates on
// (d, p) raise ValidationError (CProb/LogProb: d <= 3 and p >= 2;
// AProb: p > d and p >= 2; CubicProb: d <= 4 and p >= 2).
QRange admissible_q_range(Problem problem, const XRat& d, const XRat& p);

/* ------------------------------------------------------------------ */
/*  Serialization                                                      */
/* ------------------------------------------------------------------ */

std::string verdict_json(const IndexQuery& iq, const Verdict& v);
std::string qrange_json(Problem problem, const XRat& d, const XRat& p,
                        const QRange& r);

}  // namespace parcone
