#pragma once

// Problem-parameter validation and exact certification of the Strichartz
// exponent families.  All arithmetic here is exact rational; a relation
// either holds identically or it does not.

#include <string>
#include <utility>
#include <vector>

#include "inls/rational.hpp"

namespace inls {

// ---------------------------------------------------------------------------
// ProblemParams

/// Validated triple (N, b, alpha) with the derived critical Sobolev index
/// s_c = N/2 - (2-b)/alpha.  Intercritical means 0 < s_c < 1.
struct ProblemParams {
  int N = 0;
  Rational b;
  Rational alpha;
  Rational s_c;

  Rational alpha_lower() const { return Rational(4 - 2 * b) / N; }
  /// Upper bound on alpha; infinite when N = 2.
  Exponent alpha_upper() const {
    if (N == 2) return Exponent::infinity();
    return Exponent(Rational(4 - 2 * b) / (N - 2));
  }
};

struct ParamsResult {
  bool ok = false;
  ProblemParams params;  // populated with whatever could be computed
  std::string regime;    // "intercritical" when ok, otherwise the rejection class
  std::vector<std::string> violations;
};

/// Accepts any input for inspection; never throws.  On rejection the result
/// names each violated constraint and classifies the regime
/// (mass-critical/-subcritical, energy-critical/-supercritical, b-range).
inline ParamsResult validate_params(int N, const Rational& b, const Rational& alpha) {
  ParamsResult res;
  res.params.N = N;
  res.params.b = b;
  res.params.alpha = alpha;
  if (N < 2) {
    res.regime = "dimension-out-of-range";
    res.violations.push_back("N >= 2 required, got N=" + std::to_string(N));
    return res;
  }
  Rational bmax = N < 4 ? Rational(N, 2) : Rational(2);
  if (!(b > 0 && b < bmax)) {
    res.regime = "b-out-of-range";
    res.violations.push_back("0 < b < min(N/2, 2) violated: b=" + to_string(b));
    return res;
  }
  if (alpha <= 0) {
    res.regime = "alpha-out-of-range";
    res.violations.push_back("alpha > 0 violated: alpha=" + to_string(alpha));
    return res;
  }
  res.params.s_c = Rational(N, 2) - (2 - b) / alpha;
  Rational lower = Rational(4 - 2 * b) / N;
  if (alpha <= lower) {
    res.regime = alpha == lower ? "mass-critical" : "mass-subcritical";
    res.violations.push_back("alpha > (4-2b)/N violated: alpha=" + to_string(alpha) +
                             ", bound=" + to_string(lower));
    return res;
  }
  if (N >= 3) {
    Rational upper = Rational(4 - 2 * b) / (N - 2);
    if (alpha >= upper) {
      res.regime = alpha == upper ? "energy-critical" : "energy-supercritical";
      res.violations.push_back("alpha < (4-2b)/(N-2) violated: alpha=" + to_string(alpha) +
                               ", bound=" + to_string(upper));
      return res;
    }
  }
  // 0 < s_c < 1 is implied by the alpha window; keep it as a cross-check.
  if (!(res.params.s_c > 0 && res.params.s_c < 1)) {
    res.regime = "not-intercritical";
    res.violations.push_back("0 < s_c < 1 violated: s_c=" + to_string(res.params.s_c));
    return res;
  }
  res.ok = true;
  res.regime = "intercritical";
  return res;
}

// ---------------------------------------------------------------------------
// Admissibility

enum class PairKind { L2, Hs, HsDual };

inline const char* kind_name(PairKind k) {
  switch (k) {
    case PairKind::L2: return "L2-admissible";
    case PairKind::Hs: return "H^s-admissible";
    default: return "H^{-s}-admissible";
  }
}

struct Verdict {
  bool admissible = false;
  std::string failed;  // first violated constraint when not admissible
};

/// Exact admissibility check.  Pass s > 0 for an H^s pair, s < 0 for the
/// dual H^{-s} pair, s = 0 for L^2.  The scaling relation reads
/// 2/q + N/r = N/2 - s; the dimension-dependent range constraints on r use
/// |s| and exclude the energy endpoint strictly.
inline Verdict is_admissible(const Exponent& q, const Exponent& r, const Rational& s, int N) {
  Verdict v;
  if (!(q > Exponent(0L))) {
    v.failed = "q > 0 required";
    return v;
  }
  if (r.is_infinite() || !(r > Exponent(0L))) {
    v.failed = "0 < r < inf required";
    return v;
  }
  const Rational& rv = r.value();
  // scaling: 2/q + N/r = N/2 - s (with 1/inf = 0)
  Rational inv_q = q.is_infinite() ? Rational(0) : Rational(1) / q.value();
  Rational lhs = 2 * inv_q + Rational(N) / rv;
  Rational rhs = Rational(N, 2) - s;
  if (lhs != rhs) {
    v.failed = "scaling 2/q + N/r = N/2 - s violated: lhs=" + to_string(lhs) +
               " rhs=" + to_string(rhs);
    return v;
  }
  Rational as = s < 0 ? Rational(-s) : s;
  if (N >= 3) {
    if (!(as < Rational(N, 2))) {
      v.failed = "|s| < N/2 required for the range constraint";
      return v;
    }
    Rational lo = Rational(2 * N) / (N - 2 * as);
    Rational hi = Rational(2 * N) / (N - 2);
    if (rv < lo) {
      v.failed = "r >= 2N/(N-2s) violated: r=" + to_string(rv) + ", bound=" + to_string(lo);
      return v;
    }
    if (!(rv < hi)) {
      v.failed = "r < 2N/(N-2) violated (endpoint excluded): r=" + to_string(rv) +
                 ", bound=" + to_string(hi);
      return v;
    }
  } else if (N == 2) {
    if (!(as < 1)) {
      v.failed = "|s| < 1 required for the range constraint";
      return v;
    }
    Rational lo = Rational(2) / (1 - as);
    if (rv < lo) {
      v.failed = "r >= 2/(1-s) violated: r=" + to_string(rv) + ", bound=" + to_string(lo);
      return v;
    }
  } else {  // N == 1
    if (!(as < Rational(1, 2))) {
      v.failed = "|s| < 1/2 required for the range constraint";
      return v;
    }
    Rational lo = Rational(2) / (1 - 2 * as);
    if (rv < lo) {
      v.failed = "r >= 2/(1-2s) violated: r=" + to_string(rv) + ", bound=" + to_string(lo);
      return v;
    }
  }
  v.admissible = true;
  return v;
}

struct StrichartzPair {
  std::string name;
  Exponent q;
  Exponent r;
  Rational s;  // signed: negative for the dual kind
  PairKind kind = PairKind::L2;
  Verdict verdict;
};

struct CertifiedRelation {
  std::string name;
  Rational lhs;
  Rational rhs;
  bool holds = false;
};

// ---------------------------------------------------------------------------
// Closed forms of the exponent families (exact in N, b, alpha, theta, eps)

namespace closed_form {

inline Rational hat_q(const ProblemParams& p, const Rational& th) {
  const Rational &a = p.alpha, &b = p.b;
  int N = p.N;
  return 4 * a * (a + 2 - th) / (a * (N * a + 2 * b) - th * (N * a - 4 + 2 * b));
}
inline Rational hat_r(const ProblemParams& p, const Rational& th) {
  const Rational &a = p.alpha, &b = p.b;
  int N = p.N;
  return N * a * (a + 2 - th) / (a * (N - b) - th * (2 - b));
}
inline Rational tilde_a(const ProblemParams& p, const Rational& th) {
  const Rational &a = p.alpha, &b = p.b;
  int N = p.N;
  return 2 * a * (a + 2 - th) /
         (a * (N * (a + 1 - th) - 2 + 2 * b) - (4 - 2 * b) * (1 - th));
}
inline Rational hat_a(const ProblemParams& p, const Rational& th) {
  const Rational &a = p.alpha, &b = p.b;
  int N = p.N;
  return 2 * a * (a + 2 - th) / (4 - 2 * b - (N - 2) * a);
}
inline Rational hat_p(const ProblemParams& p, const Rational& th) {
  const Rational& a = p.alpha;
  int N = p.N;
  return 2 * N * (a + 2 - th) / (N * (a + 2 - th) - 4 * (1 - p.s_c));
}

// N=2 exponents used for the gradient estimate
inline Rational bar_a(const ProblemParams& p, const Rational& th) {
  return 2 * (p.alpha + 1 - th) / (1 - p.s_c + th);
}
inline Rational bar_r(const ProblemParams& p, const Rational& th) {
  const Rational &a = p.alpha, &b = p.b;
  return 2 * a * (a + 1 - th) / (a * (1 - b + p.s_c) + 2 - b - th * (2 - b + a));
}
inline Rational bar_q(const ProblemParams& p, const Rational& th) {
  const Rational& a = p.alpha;
  return 2 * (a + 1 - th) / (1 + a * p.s_c + th * (1 - p.s_c));
}
inline Rational a_star(const ProblemParams& p, const Rational& th) {
  return 2 * (p.alpha - th) / (1 + th);
}
inline Rational r_star(const ProblemParams& p, const Rational& th) {
  const Rational &a = p.alpha, &b = p.b;
  return 2 * a * (a - th) / (a * (1 - b) - th * (2 - b + a));
}
inline Rational q_exp(const Rational& th) { return Rational(2) / (1 - th); }
inline Rational r_exp(const Rational& th) { return Rational(2) / th; }

// N=2 embed family (with the auxiliary epsilon)
inline Rational embed_a(const ProblemParams& p, const Rational& th, const Rational& eps) {
  const Rational &a = p.alpha, &b = p.b;
  return 2 * a * (a + 1 - th) / (2 - b + eps);
}
inline Rational embed_r(const ProblemParams& p, const Rational& th, const Rational& eps) {
  const Rational &a = p.alpha, &b = p.b;
  return 2 * a * (a + 1 - th) / ((2 - b) * (a - th) - eps);
}
inline Rational embed_bar_a(const ProblemParams& p, const Rational& eps) {
  const Rational &a = p.alpha, &b = p.b;
  return 2 * a / (2 * a - (2 - b) - eps);
}
inline Rational embed_bar_r(const ProblemParams& p, const Rational& eps) {
  return 2 * p.alpha / eps;
}

}  // namespace closed_form

// ---------------------------------------------------------------------------
// ExponentFamily

struct ExponentFamily {
  ProblemParams params;
  Rational theta;
  Rational epsilon;  // used only by the N=2 embed family
  std::vector<StrichartzPair> pairs;
  std::vector<CertifiedRelation> relations;

  bool all_relations_hold() const {
    for (const auto& r : relations)
      if (!r.holds) return false;
    return true;
  }
  bool all_admissible() const {
    for (const auto& p : pairs)
      if (!p.verdict.admissible) return false;
    return true;
  }
  bool all_pass() const { return all_relations_hold() && all_admissible(); }

  const StrichartzPair* find(const std::string& name) const {
    for (const auto& p : pairs)
      if (p.name == name) return &p;
    return nullptr;
  }
};

/// Builds the full exponent record for one (params, theta, epsilon) choice:
/// every closed form evaluated exactly, every scaling relation checked as a
/// rational identity, and an admissibility verdict stored per pair.
/// Requires 0 < theta < alpha; epsilon > 0 matters only when N = 2.
inline ExponentFamily build_exponent_family(const ProblemParams& p, const Rational& theta,
                                            const Rational& epsilon) {
  if (!(theta > 0 && theta < p.alpha))
    throw std::invalid_argument("build_exponent_family: need 0 < theta < alpha");
  if (!(epsilon > 0))
    throw std::invalid_argument("build_exponent_family: need epsilon > 0");
  namespace cf = closed_form;
  ExponentFamily fam;
  fam.params = p;
  fam.theta = theta;
  fam.epsilon = epsilon;
  const Rational sc = p.s_c;

  auto add_pair = [&](const std::string& name, const Rational& q, const Rational& r,
                      const Rational& s, PairKind kind) {
    StrichartzPair sp{name, Exponent(q), Exponent(r), s, kind, {}};
    sp.verdict = is_admissible(sp.q, sp.r, s, p.N);
    fam.pairs.push_back(std::move(sp));
  };
  auto add_rel = [&](const std::string& name, const Rational& lhs, const Rational& rhs) {
    fam.relations.push_back({name, lhs, rhs, lhs == rhs});
  };
  auto dual_inv = [](const Rational& x) {  // 1/x' = 1 - 1/x
    return 1 - Rational(1) / x;
  };

  const Rational hq = cf::hat_q(p, theta), hr = cf::hat_r(p, theta);
  const Rational ta = cf::tilde_a(p, theta), ha = cf::hat_a(p, theta);
  const Rational hp = cf::hat_p(p, theta);

  add_pair("hat_q,hat_r", hq, hr, Rational(0), PairKind::L2);
  add_pair("hat_a,hat_r", ha, hr, sc, PairKind::Hs);
  add_pair("tilde_a,hat_r", ta, hr, -sc, PairKind::HsDual);
  add_pair("hat_a,hat_p", ha, hp, Rational(0), PairKind::L2);

  // scaling relations tying the family together
  add_rel("1/tilde_a' = (alpha-theta)/hat_a + 1/hat_a", dual_inv(ta),
          (p.alpha - theta) / ha + 1 / ha);
  add_rel("1/hat_q' = (alpha-theta)/hat_a + 1/hat_q", dual_inv(hq),
          (p.alpha - theta) / ha + 1 / hq);
  add_rel("s_c = N/hat_p - N/hat_r", sc, Rational(p.N) / hp - Rational(p.N) / hr);
  // hat_p sits strictly inside the Sobolev window
  add_rel("hat_p < N/s_c (as strict-inequality flag)", Rational(hp < Rational(p.N) / sc ? 1 : 0),
          Rational(1));

  if (p.N == 2) {
    const Rational ba = cf::bar_a(p, theta), br = cf::bar_r(p, theta);
    const Rational bq = cf::bar_q(p, theta);
    const Rational as = cf::a_star(p, theta), rs = cf::r_star(p, theta);
    const Rational q = cf::q_exp(theta), r = cf::r_exp(theta);
    add_pair("bar_q,bar_r", bq, br, Rational(0), PairKind::L2);
    add_pair("bar_a,bar_r", ba, br, sc, PairKind::Hs);
    add_pair("a_star,r_star", as, rs, sc, PairKind::Hs);
    add_pair("q,r", q, r, Rational(0), PairKind::L2);
    add_rel("1/q' = (alpha-theta)/bar_a + 1/bar_q", dual_inv(q),
            (p.alpha - theta) / ba + 1 / bq);
    const Rational qp = Rational(1) / dual_inv(q);
    add_rel("(alpha-theta) q' = a_star", (p.alpha - theta) * qp, as);

    const Rational ea = cf::embed_a(p, theta, epsilon);
    const Rational er = cf::embed_r(p, theta, epsilon);
    const Rational eba = cf::embed_bar_a(p, epsilon);
    const Rational ebr = cf::embed_bar_r(p, epsilon);
    add_pair("embed a,r", ea, er, sc, PairKind::Hs);
    add_pair("embed bar_a,bar_r", eba, ebr, -sc, PairKind::HsDual);
    add_rel("(alpha+1-theta) bar_a' = a (embed family)",
            (p.alpha + 1 - theta) / dual_inv(eba), ea);
    add_rel("embed a > 4 (as strict-inequality flag)", Rational(ea > 4 ? 1 : 0), Rational(1));
  }
  return fam;
}

// ---------------------------------------------------------------------------
// theta window

struct ThetaWindow {
  bool empty = true;
  Rational certified;  // every dyadic probe in (0, certified] passes
  Rational upper;      // first probed theta that fails (bracket width <= 1/1024)
};

/// Makes the paper's "theta sufficiently small" explicit: bisects for the
/// largest theta below which every admissibility verdict and relation of
/// build_exponent_family passes on a dyadic probe grid.  Conservative: the
/// reported window may undershoot the true one.  For N = 2 the auxiliary
/// epsilon is tied to theta (epsilon = theta).
inline ThetaWindow theta_window(const ProblemParams& p) {
  ThetaWindow w;
  auto passes = [&](const Rational& th) {
    if (!(th > 0 && th < p.alpha)) return false;
    try {
      return build_exponent_family(p, th, th).all_pass();
    } catch (const std::exception&) {
      // closed forms degenerate (zero denominator) at large theta
      return false;
    }
  };
  // find an initial passing probe on a dyadic ladder down from alpha
  Rational lo;
  bool found = false;
  Rational probe = p.alpha / 2;
  for (int i = 0; i < 40; ++i, probe /= 2) {
    if (passes(probe)) {
      lo = probe;
      found = true;
      break;
    }
  }
  if (!found) return w;  // degenerate regime: no probe passes
  // confirm the dyadic ladder below lo
  Rational d = lo / 2;
  for (int i = 0; i < 20 && d > 0; ++i, d /= 2) {
    if (!passes(d)) return w;  // non-monotone window; stay conservative
  }
  // bisect the failing boundary in [lo, alpha)
  Rational hi = p.alpha;
  while (hi - lo > Rational(1, 1024)) {
    Rational mid = (lo + hi) / 2;
    if (mid >= p.alpha || !passes(mid))
      hi = mid;
    else
      lo = mid;
  }
  w.empty = false;
  w.certified = lo;
  w.upper = hi;
  return w;
}

// ---------------------------------------------------------------------------
// weight exponent check (Lebesgue membership of |x|^{-b} per region)

enum class Region { Ball, Exterior };

struct WeightExponentReport {
  Rational excess;  // N/gamma - b, computed exactly from the Holder bookkeeping
  bool integrable = false;
  std::string detail;
};

/// Computes N/gamma - b = theta(2-b)/alpha - N/r1 exactly and reports whether
/// |x|^{-b} lies in L^gamma of the region: the ball needs the excess positive,
/// the exterior needs it negative.  Requires r1 > 1/theta.
inline WeightExponentReport weight_exponent_check(const ProblemParams& p, const Rational& theta,
                                                  const Rational& r1, Region region) {
  if (!(theta > 0) || !(r1 * theta > 1))
    throw std::invalid_argument("weight_exponent_check: need theta > 0 and r1 > 1/theta");
  WeightExponentReport rep;
  rep.excess = theta * (2 - p.b) / p.alpha - Rational(p.N) / r1;
  if (region == Region::Ball) {
    rep.integrable = rep.excess > 0;
    rep.detail = rep.integrable ? "N/gamma - b > 0: |x|^-b in L^gamma(B)"
                                : "N/gamma - b <= 0: |x|^-b not in L^gamma(B)";
  } else {
    rep.integrable = rep.excess < 0;
    rep.detail = rep.integrable ? "N/gamma - b < 0: |x|^-b in L^gamma(B^c)"
                                : "N/gamma - b >= 0: |x|^-b not in L^gamma(B^c)";
  }
  return rep;
}

}  // namespace inls
