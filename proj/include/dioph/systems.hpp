#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dioph/errors.hpp"
#include "dioph/families.hpp"
#include "dioph/interval.hpp"
#include "dioph/numeric.hpp"
#include "dioph/parallel.hpp"
#include "dioph/rng.hpp"
#include "dioph/scalar.hpp"

namespace dioph {

/// Endpoint pair. J is treated as open, I as half-open [lo, hi).
struct ScalarInterval {
  ExactScalar lo, hi;

  ExactScalar length() const { return hi - lo; }
  bool is_unit_interval() const {
    return lo.sign() == 0 && hi.compare(ExactScalar::from_int(1)) == 0;
  }
};

/// One instance of the perturbed twisted approximation system: find n with
/// ||theta n + phi_n(theta)|| <= psi_n and {rho_n(theta)} in I.
struct SystemInstance {
  ScalarInterval J;
  PsiFamily psi;
  PerturbationFamily phi;
  TwistFamily rho;
  ScalarInterval I{ExactScalar::from_int(0), ExactScalar::from_int(1)};

  void validate() const {
    if (!(J.lo < J.hi)) throw ValidationError("J must be a nonempty open interval");
    ExactScalar zero = ExactScalar::from_int(0);
    ExactScalar one = ExactScalar::from_int(1);
    if (I.lo < zero || !(I.lo < I.hi) || I.hi > one)
      throw ValidationError("I must satisfy 0 <= lo < hi <= 1");
  }
};

struct SolutionRecord {
  int64_t n = 0;
  BigReal residual;
  std::optional<BigReal> twist;
  bool passed = false;
};

namespace detail {

/// Membership of a fractional-part enclosure in the half-open interval
/// [l, r) of [0,1).
inline Cert frac_membership(const FracEnclosure& f, const ScalarInterval& I, mpfr_prec_t prec) {
  const bool full = I.is_unit_interval();
  if (full) return Cert::True;  // every fractional part lies in [0,1)
  BigReal l = I.lo.to_interval(prec);
  BigReal r = I.hi.to_interval(prec);
  const bool l_zero = I.lo.sign() == 0;
  const bool r_one = I.hi.compare(ExactScalar::from_int(1)) == 0;
  switch (f.kind) {
    case FracEnclosure::Kind::interval: {
      const BigReal& x = f.a;  // true value in [x.lo, min(x.hi, 1))
      bool above_l = mpfr_cmp(x.lo(), l.hi()) >= 0;
      bool below_r = r_one ? mpfr_cmp_ui(x.hi(), 1) <= 0 : mpfr_cmp(x.hi(), r.lo()) < 0;
      if (above_l && below_r) return Cert::True;
      bool out_left = mpfr_cmp(x.hi(), l.lo()) < 0;
      bool out_right = !r_one && mpfr_cmp(x.lo(), r.hi()) >= 0;
      if (out_left || out_right) return Cert::False;
      return Cert::Unknown;
    }
    case FracEnclosure::Kind::straddle: {
      // pieces: [tail.lo, 1) and [0, wrap.hi]
      const BigReal& tail = f.a;
      const BigReal& wrap = f.b;
      bool tail_in = r_one && mpfr_cmp(tail.lo(), l.hi()) >= 0;
      bool wrap_in = l_zero && (r_one || mpfr_cmp(wrap.hi(), r.lo()) < 0);
      if (tail_in && wrap_in) return Cert::True;
      bool tail_out = !r_one && mpfr_cmp(tail.lo(), r.hi()) >= 0;
      bool wrap_out = mpfr_cmp(wrap.hi(), l.lo()) < 0;
      if (tail_out && wrap_out) return Cert::False;
      return Cert::Unknown;
    }
    case FracEnclosure::Kind::full:
      return Cert::Unknown;
  }
  return Cert::Unknown;
}

struct PassOutcome {
  bool passed = false;
  BigReal residual;
  std::optional<BigReal> twist;
};

/// Core certified decision for one n. Exact where the data allows, interval
/// escalation otherwise.
inline PassOutcome decide(const SystemInstance& inst, const ExactScalar& theta, int64_t n,
                          const PrecisionPolicy& pol, bool want_values) {
  if (n < 1) throw DomainError("n must be positive");

  // Exact fast path: rational theta, no perturbation, residual is rational.
  if (inst.phi.is_zero() && theta.is_rational()) {
    mpq_class x = theta.rat() * n;
    mpq_class resid = dist_nearest_int_exact(x);
    Cert c = inst.psi.residual_le(resid, n);
    if (c != Cert::Unknown) {
      PassOutcome out;
      bool resid_ok = c == Cert::True;
      if (!resid_ok) {
        out.passed = false;
        if (want_values) out.residual = BigReal::from_mpq(resid, pol.start_bits);
        return out;
      }
      if (inst.rho.is_none()) {
        out.passed = true;
        if (want_values) out.residual = BigReal::from_mpq(resid, pol.start_bits);
        return out;
      }
      // certified twist check
      for (int prec = pol.start_bits;; prec = std::min(prec * 2, pol.max_bits)) {
        BigReal th = theta.to_interval(prec);
        BigReal rho = inst.rho.eval(n, th, prec);
        FracEnclosure fe = frac_enclosure(rho);
        Cert m = frac_membership(fe, inst.I, prec);
        if (m != Cert::Unknown) {
          out.passed = m == Cert::True;
          if (want_values) {
            out.residual = BigReal::from_mpq(resid, pol.start_bits);
            out.twist = fe.kind == FracEnclosure::Kind::interval ? fe.a : BigReal::hull(fe.a, fe.b);
          }
          return out;
        }
        if (prec >= pol.max_bits)
          throw AmbiguousAtMaxPrecision("twist membership at n=" + std::to_string(n));
      }
    }
    // fall through to the enclosure path with the exact residual in hand
    for (int prec = pol.start_bits;; prec = std::min(prec * 2, pol.max_bits)) {
      BigReal r = BigReal::from_mpq(resid, prec);
      BigReal psi = inst.psi.eval(n, prec);
      Cert cc = cert_le(r, psi);
      if (cc != Cert::Unknown) {
        PassOutcome out;
        if (cc == Cert::False) {
          out.passed = false;
          if (want_values) out.residual = std::move(r);
          return out;
        }
        if (inst.rho.is_none()) {
          out.passed = true;
          if (want_values) out.residual = std::move(r);
          return out;
        }
        BigReal th = theta.to_interval(prec);
        BigReal rho = inst.rho.eval(n, th, prec);
        FracEnclosure fe = frac_enclosure(rho);
        Cert m = frac_membership(fe, inst.I, prec);
        if (m != Cert::Unknown) {
          out.passed = m == Cert::True;
          if (want_values) {
            out.residual = std::move(r);
            out.twist = fe.kind == FracEnclosure::Kind::interval ? fe.a : BigReal::hull(fe.a, fe.b);
          }
          return out;
        }
      }
      if (prec >= pol.max_bits)
        throw AmbiguousAtMaxPrecision("residual comparison at n=" + std::to_string(n));
    }
  }

  // General enclosure path with escalation.
  for (int prec = pol.start_bits;; prec = std::min(prec * 2, pol.max_bits)) {
    BigReal th = theta.to_interval(prec);
    BigReal x = mul_si(th, static_cast<long>(n)) + inst.phi.eval(n, th, prec);
    BigReal resid = dist_nearest_int(x);
    BigReal psi = inst.psi.eval(n, prec);
    Cert c1 = cert_le(resid, psi);
    Cert c2 = Cert::True;
    std::optional<BigReal> twist;
    if (!inst.rho.is_none() && c1 != Cert::False) {
      BigReal rho = inst.rho.eval(n, th, prec);
      FracEnclosure fe = frac_enclosure(rho);
      c2 = frac_membership(fe, inst.I, prec);
      if (want_values && c2 != Cert::Unknown)
        twist = fe.kind == FracEnclosure::Kind::interval ? fe.a : BigReal::hull(fe.a, fe.b);
    }
    if (c1 != Cert::Unknown && c2 != Cert::Unknown) {
      PassOutcome out;
      out.passed = c1 == Cert::True && c2 == Cert::True;
      if (want_values) {
        out.residual = std::move(resid);
        out.twist = std::move(twist);
      }
      return out;
    }
    if (prec >= pol.max_bits)
      throw AmbiguousAtMaxPrecision("system evaluation at n=" + std::to_string(n));
  }
}

}  // namespace detail

/// Certified evaluation of the system at a single index n.
inline SolutionRecord eval_instance(const SystemInstance& inst, const ExactScalar& theta,
                                    int64_t n, const PrecisionPolicy& pol = {}) {
  inst.validate();
  if (!(theta > inst.J.lo && theta < inst.J.hi))
    throw DomainError("theta must lie in the open interval J");
  detail::PassOutcome out = detail::decide(inst, theta, n, pol, /*want_values=*/true);
  SolutionRecord rec;
  rec.n = n;
  rec.residual = std::move(out.residual);
  rec.twist = std::move(out.twist);
  rec.passed = out.passed;
  return rec;
}

/// All passing n in [n0, n1], in increasing order, truncated at
/// max_solutions. With primes_only, only prime indices are examined.
inline std::vector<SolutionRecord> solve_system(const SystemInstance& inst,
                                                const ExactScalar& theta, int64_t n0, int64_t n1,
                                                int64_t max_solutions = -1,
                                                const PrecisionPolicy& pol = {},
                                                bool primes_only = false) {
  inst.validate();
  if (n0 < 1) throw DomainError("n range must start at 1 or later");
  if (!(theta > inst.J.lo && theta < inst.J.hi))
    throw DomainError("theta must lie in the open interval J");
  std::vector<SolutionRecord> out;
  for (int64_t n = n0; n <= n1; ++n) {
    if (primes_only && !is_prime(n)) continue;
    detail::PassOutcome o;
    try {
      o = detail::decide(inst, theta, n, pol, /*want_values=*/true);
    } catch (const AmbiguousAtMaxPrecision& e) {
      throw AmbiguousAtMaxPrecision("n=" + std::to_string(n) + ": " + e.what());
    }
    if (o.passed) {
      SolutionRecord rec;
      rec.n = n;
      rec.residual = std::move(o.residual);
      rec.twist = std::move(o.twist);
      rec.passed = true;
      out.push_back(std::move(rec));
      if (max_solutions >= 0 && static_cast<int64_t>(out.size()) >= max_solutions) break;
    }
  }
  return out;
}

/// Count of passing n without materializing records.
inline int64_t count_solutions(const SystemInstance& inst, const ExactScalar& theta, int64_t n0,
                               int64_t n1, const PrecisionPolicy& pol = {}) {
  int64_t hits = 0;
  for (int64_t n = n0; n <= n1; ++n)
    if (detail::decide(inst, theta, n, pol, /*want_values=*/false).passed) ++hits;
  return hits;
}

/// The proof-side target intervals at level n: centers
/// e_{n,m} = (m - phi_n(m/n))/n for m/n in J, with half-width psi_n/(2n).
struct TargetInterval {
  int64_t m;
  BigReal center;
  BigReal half_width;
};

inline std::vector<TargetInterval> target_intervals(const SystemInstance& inst, int64_t n,
                                                    const PrecisionPolicy& pol = {}) {
  inst.validate();
  if (n < 1) throw DomainError("n must be positive");
  ExactScalar n_s = ExactScalar::from_int(static_cast<long>(n));
  ExactScalar lo = inst.J.lo * n_s;
  ExactScalar hi = inst.J.hi * n_s;
  mpz_class m_lo = lo.floor() + 1;               // first integer strictly above n*j1
  mpz_class m_hi = hi.floor();                   // last integer at or below n*j2
  if (ExactScalar::from_mpz(m_hi) == hi) m_hi -= 1;  // open endpoint
  if (m_lo > m_hi) throw EmptyRange("no integer m with m/n inside J");

  std::vector<TargetInterval> out;
  const int prec = pol.start_bits;
  BigReal psi = inst.psi.eval(n, prec);
  BigReal half_width = div_ui(div_ui(psi, 2), static_cast<unsigned long>(n));
  for (mpz_class m = m_lo; m <= m_hi; ++m) {
    ExactScalar m_over_n = ExactScalar::from_mpz(m) / n_s;
    BigReal shift = inst.phi.eval(n, m_over_n.to_interval(prec), prec);
    BigReal center = div_ui(BigReal::from_mpz(m, prec) - shift, static_cast<unsigned long>(n));
    out.push_back({m.get_si(), std::move(center), half_width});
  }
  std::sort(out.begin(), out.end(), [](const TargetInterval& a, const TargetInterval& b) {
    return a.center.mid_double() < b.center.mid_double();
  });
  return out;
}

enum class Verdict { holds_analytically, holds_on_truncation, fails, indeterminate };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::holds_analytically: return "holds-analytically";
    case Verdict::holds_on_truncation: return "holds-on-truncation";
    case Verdict::fails: return "fails";
    case Verdict::indeterminate: return "indeterminate";
  }
  return "?";
}

struct ConditionReport {
  Verdict verdict = Verdict::indeterminate;
  std::string note;
  double diagnostic = 0.0;
};

/// Per-condition verdicts for the solvability hypotheses. C1 is an
/// equidistribution statement handled by the weyl tooling, not judged here.
struct HypothesisReport {
  std::map<std::string, ConditionReport> conditions;

  const ConditionReport& at(const std::string& k) const { return conditions.at(k); }
};

namespace detail {

inline std::vector<int64_t> primes_up_to(int64_t n) {
  std::vector<bool> sieve(static_cast<size_t>(n) + 1, true);
  std::vector<int64_t> out;
  for (int64_t i = 2; i <= n; ++i) {
    if (!sieve[i]) continue;
    out.push_back(i);
    for (int64_t j = 2 * i; j <= n; j += i) sieve[j] = false;
  }
  return out;
}

inline ConditionReport verdict_from_cmp(std::optional<int> cmp, int holds_when,
                                        bool strict, const std::string& note_hold,
                                        const std::string& note_fail) {
  ConditionReport r;
  if (!cmp) {
    r.verdict = Verdict::indeterminate;
    r.note = "comparison undecided at precision cap";
    return r;
  }
  bool ok = strict ? (*cmp * holds_when > 0) : (*cmp * holds_when >= 0);
  r.verdict = ok ? Verdict::holds_analytically : Verdict::fails;
  r.note = ok ? note_hold : note_fail;
  return r;
}

}  // namespace detail

/// Classify the conditions on (psi, phi, rho) for this instance. Parametric
/// families are judged analytically; tables get truncation evidence.
inline HypothesisReport check_hypotheses(const SystemInstance& inst, int64_t n_trunc,
                                         const PrecisionPolicy& pol = {}) {
  inst.validate();
  if (n_trunc < 100) throw DomainError("truncation horizon must be at least 100");
  HypothesisReport rep;
  auto& C = rep.conditions;
  const ExactScalar one = ExactScalar::from_int(1);
  const ExactScalar zero = ExactScalar::from_int(0);

  const auto psi_kind = inst.psi.kind();
  const bool psi_power = psi_kind == PsiFamily::Kind::power_law;
  const bool psi_const = psi_kind == PsiFamily::Kind::constant;

  // ---- A conditions (accuracy decay) ----
  if (psi_power) {
    const Exponent& sigma = inst.psi.sigma();
    double s = sigma.eval(64).mid_double();
    C["A1"] = {Verdict::holds_analytically,
               "sum_l l^2 2^(-l*sigma) converges for sigma > 0", 0.0};
    {
      double partial = 0;
      for (int l = 1; l < 200; ++l) partial += l * l * std::pow(2.0, -l * s);
      C["A1"].diagnostic = partial;
    }
    C["A2"] = {Verdict::holds_analytically, "psi_n/n = C n^-(1+sigma) is decreasing", s + 1};
    C["A3"] = {Verdict::holds_analytically, "psi_n/psi_2n = 2^sigma, any c > 2^sigma works",
               std::pow(2.0, s)};
    auto cmp1 = sigma.compare(one, pol);
    C["A4"] = detail::verdict_from_cmp(cmp1, -1, /*strict=*/false,
                                       "sum of p^-sigma over primes diverges for sigma <= 1",
                                       "sum of p^-sigma over primes converges for sigma > 1");
    C["A4"].diagnostic = s;
  } else if (psi_const) {
    C["A1"] = {Verdict::fails, "constant psi: sum_l l^2 diverges", 0.0};
    C["A2"] = {Verdict::holds_analytically, "c/n is decreasing", 0.0};
    C["A3"] = {Verdict::holds_analytically, "ratio is 1; any c > 1 works", 1.0};
    C["A4"] = {Verdict::holds_analytically, "sum of constants over primes diverges", 0.0};
  } else {
    // table: truncation evidence only
    const int prec = 96;
    int64_t break_at = 0;
    double prev = 0;
    bool first = true;
    int64_t horizon = n_trunc;
    {  // non-extending tables cap the usable horizon at their length
      int64_t len = static_cast<int64_t>(inst.psi.table_values().size());
      try {
        inst.psi.eval(std::min<int64_t>(len + 1, n_trunc), prec);
      } catch (const DomainError&) {
        horizon = std::min(horizon, len);
      }
    }
    double c_inf = 0.0;
    for (int64_t n = 1; n <= horizon; ++n) {
      double v = inst.psi.eval(n, prec).mid_double() / static_cast<double>(n);
      if (!first && v > prev * (1 + 1e-15)) {
        break_at = n;
        break;
      }
      prev = v;
      first = false;
    }
    if (break_at)
      C["A2"] = {Verdict::fails, "psi_n/n increases at n=" + std::to_string(break_at),
                 static_cast<double>(break_at)};
    else
      C["A2"] = {Verdict::holds_on_truncation,
                 "psi_n/n non-increasing for n <= " + std::to_string(horizon), 0.0};
    for (int64_t n = 1; 2 * n <= horizon; ++n) {
      double r = inst.psi.eval(n, prec).mid_double() / inst.psi.eval(2 * n, prec).mid_double();
      c_inf = std::max(c_inf, r);
    }
    C["A3"] = {Verdict::holds_on_truncation, "largest observed psi_n/psi_2n ratio", c_inf};
    double a1_partial = 0;
    for (int64_t l = 1; (int64_t(1) << l) <= horizon; ++l)
      a1_partial += inst.psi.eval(int64_t(1) << l, prec).mid_double() * l * l /
                    inst.psi.eval(1, prec).mid_double();
    C["A1"] = {Verdict::indeterminate, "partial sum at n=1; limit behavior unknown from a table",
               a1_partial};
    double a4_partial = 0;
    for (int64_t p : detail::primes_up_to(horizon)) a4_partial += inst.psi.eval(p, prec).mid_double();
    C["A4"] = {Verdict::indeterminate, "partial prime sum; divergence unknown from a table",
               a4_partial};
  }

  // ---- B conditions (perturbation growth vs accuracy decay) ----
  const auto phi_kind = inst.phi.kind();
  auto set_b_zero = [&] {
    C["B1"] = {Verdict::holds_analytically, "phi vanishes", 0.0};
    C["B2"] = {Verdict::holds_analytically, "phi vanishes", 0.0};
    C["B4"] = {Verdict::holds_analytically, "phi vanishes", 0.0};
    if (psi_power) {
      auto cmp1 = inst.psi.sigma().compare(one, pol);
      C["B3"] = detail::verdict_from_cmp(
          cmp1, -1, /*strict=*/true,
          "sum psi_p (log p)^2 is dominated by (sum psi_p)^2 when sigma < 1",
          "prime sums no longer dominate for sigma >= 1");
    } else if (psi_const) {
      C["B3"] = {Verdict::holds_analytically,
                 "N log N numerator against (N/log N)^2 denominator", 0.0};
    } else {
      double num = 0, den = 0;
      for (int64_t p : detail::primes_up_to(n_trunc)) {
        double lp = std::log(static_cast<double>(p));
        double v;
        try {
          v = inst.psi.eval(p, 96).mid_double();
        } catch (const DomainError&) {
          break;
        }
        num += v * lp * lp;
        den += v;
      }
      C["B3"] = {Verdict::indeterminate, "truncated ratio shown; limit unknown from a table",
                 den > 0 ? num / (den * den) : 0.0};
    }
  };

  if (phi_kind == PerturbationFamily::Kind::zero) {
    set_b_zero();
  } else if (phi_kind == PerturbationFamily::Kind::sinusoid) {
    const ExactScalar& kappa = inst.phi.kappa();
    const ExactScalar& delta = inst.phi.delta();
    ExactScalar beta = kappa - delta;  // growth exponent of sup|phi'|
    {
      int c = delta.compare(zero);
      C["B1"] = {c >= 0 ? Verdict::holds_analytically : Verdict::fails,
                 c >= 0 ? "sup|phi_n| <= n^-delta is bounded"
                        : "sup|phi_n| = n^-delta grows for delta < 0",
                 delta.to_double()};
    }
    {
      int c = kappa.compare(delta);
      C["B2"] = {c <= 0 ? Verdict::holds_analytically : Verdict::fails,
                 c <= 0 ? "sup|phi_n'| ~ n^(kappa-delta) is eventually non-increasing"
                        : "sup|phi_n'| ~ n^(kappa-delta) grows for kappa > delta",
                 beta.to_double()};
    }
    if ((psi_power && inst.psi.sigma().is_t_form()) || psi_kind == PsiFamily::Kind::table) {
      C["B3"] = {Verdict::indeterminate, "no closed form for this psi", 0.0};
      C["B4"] = {Verdict::indeterminate, "no closed form for this psi", 0.0};
    } else {
      ExactScalar sigma_s =
          psi_power ? inst.psi.sigma().scalar() : ExactScalar::from_int(0);
      // B4: beta - 1 + sigma < 0
      int cmp = (beta + sigma_s).compare(one);
      C["B4"] = {cmp < 0 ? Verdict::holds_analytically : Verdict::fails,
                 cmp < 0 ? "n^(kappa-delta) / (n psi_n) tends to zero"
                         : "n^(kappa-delta) / (n psi_n) does not vanish",
                 (beta + sigma_s).to_double()};
      // B3: max(-sigma, beta) < 1 - 2 sigma, i.e. sigma < 1 and beta + 2 sigma < 1
      int cmp_s1 = sigma_s.compare(one);
      int cmp_b = (beta + sigma_s + sigma_s).compare(one);
      ConditionReport b3;
      if (cmp_s1 == 0 || cmp_b == 0) {
        b3.verdict = Verdict::indeterminate;
        b3.note = "boundary case decided by logarithmic factors";
      } else if (cmp_s1 < 0 && cmp_b < 0) {
        b3.verdict = Verdict::holds_analytically;
        b3.note = "kappa - delta + 2 sigma < 1";
      } else {
        b3.verdict = Verdict::fails;
        b3.note = "kappa - delta + 2 sigma > 1 or sigma > 1";
      }
      b3.diagnostic = (beta + sigma_s + sigma_s).to_double();
      C["B3"] = b3;
    }
  } else {  // ps_shift
    Exponent tau1 = Exponent::t_minus_one(inst.phi.base_a(), inst.J.lo);  // t(j1) - 1
    C["B1"] = {Verdict::holds_analytically, "sup|phi_n| ~ n^-(t(j1)-1) decays since j1 > a",
               tau1.eval(64).mid_double()};
    C["B2"] = {Verdict::holds_analytically,
               "sup|phi_n'| ~ log n * n^-(t(j1)-1) is eventually decreasing", 0.0};
    if (psi_power || psi_const) {
      Exponent sigma_eff =
          psi_power ? inst.psi.sigma() : Exponent::exact(ExactScalar::from_int(0));
      auto cmp_enc = [&](auto lhs_eval, auto rhs_eval) -> std::optional<int> {
        for (int prec = pol.start_bits;; prec = std::min(prec * 2, pol.max_bits)) {
          BigReal l = lhs_eval(prec), r = rhs_eval(prec);
          if (cert_lt(l, r) == Cert::True) return -1;
          if (cert_lt(r, l) == Cert::True) return 1;
          if (prec >= pol.max_bits) return std::nullopt;
        }
      };
      // B4: sigma < t(j1), i.e. sigma < tau1 + 1
      auto cmp_b4 = cmp_enc([&](int p) { return sigma_eff.eval(p); },
                            [&](int p) { return tau1.eval(p) + BigReal::from_long(1, p); });
      if (!cmp_b4) {
        C["B4"] = {Verdict::indeterminate, "sigma vs t(j1) undecided at cap", 0.0};
      } else if (*cmp_b4 < 0) {
        C["B4"] = {Verdict::holds_analytically,
                   "sigma < t(j1); log n * n^(sigma - t(j1)) vanishes", 0.0};
      } else {
        C["B4"] = {Verdict::fails, "perturbation derivative outruns n psi_n", 0.0};
      }
      // B3: sigma < 1 together with 2 sigma < t(j1), equivalent to the
      // interval-quality requirement when sigma = t(j2) - 1
      auto cmp_s1 = sigma_eff.compare(one, pol);
      auto cmp_b3 = cmp_enc(
          [&](int p) { return mul_si(sigma_eff.eval(p), 2); },
          [&](int p) { return tau1.eval(p) + BigReal::from_long(1, p); });
      if (!cmp_s1 || !cmp_b3) {
        C["B3"] = {Verdict::indeterminate, "growth comparison undecided at cap", 0.0};
      } else if (*cmp_s1 < 0 && *cmp_b3 < 0) {
        C["B3"] = {Verdict::holds_analytically, "2 t(j2) - t(j1) < 2 regime", 0.0};
      } else {
        C["B3"] = {Verdict::fails, "prime sums fail to dominate on this interval", 0.0};
      }
    } else {
      C["B3"] = {Verdict::indeterminate, "table psi; no closed form", 0.0};
      C["B4"] = {Verdict::indeterminate, "table psi; no closed form", 0.0};
    }
  }

  // ---- C2 (twist drift) ----
  switch (inst.rho.kind()) {
    case TwistFamily::Kind::none:
      C["C2"] = {Verdict::holds_analytically, "no twist", 0.0};
      break;
    case TwistFamily::Kind::power_phase_fixed:
      C["C2"] = {Verdict::holds_analytically, "rho does not depend on theta; rho' = 0", 0.0};
      break;
    case TwistFamily::Kind::power_phase_theta: {
      if (!(psi_power || psi_const)) {
        C["C2"] = {Verdict::indeterminate, "table psi; no closed form", 0.0};
        break;
      }
      Exponent sigma_eff =
          psi_power ? inst.psi.sigma() : Exponent::exact(ExactScalar::from_int(0));
      Exponent t_top = Exponent::t_minus_one(inst.rho.base_a(), inst.J.hi);  // t(j2) - 1
      auto cmp = t_top.compare(sigma_eff, pol);
      if (!cmp) {
        C["C2"] = {Verdict::indeterminate, "t(j2)-1 vs sigma undecided at cap", 0.0};
      } else if (*cmp <= 0) {
        C["C2"] = {Verdict::holds_analytically,
                   "for every proper subinterval, psi_n sup|rho_n'| / n -> 0", 0.0};
      } else {
        C["C2"] = {Verdict::fails, "twist derivative outruns psi decay near j2", 0.0};
      }
      break;
    }
  }

  return rep;
}

struct SurveySample {
  std::string theta;
  int64_t hits = 0;
  bool determinate = true;
};

struct SurveyReport {
  int64_t samples = 0;
  int64_t n_max = 0;
  int64_t min_hits = 0;
  std::uint64_t seed = 0;
  bool stratified = false;
  int64_t determinate_count = 0;
  double fraction = 0.0;
  std::vector<SurveySample> per_theta;
};

/// Estimates the measure of solvable theta by seeded uniform sampling of J.
/// Identical seeds give identical reports at any worker count.
inline SurveyReport survey_measure(const SystemInstance& inst, int64_t samples, int64_t n_max,
                                   int64_t min_hits, std::uint64_t seed,
                                   const PrecisionPolicy& pol = {}, int jobs = 1,
                                   bool stratified = false) {
  inst.validate();
  if (samples < 1) throw DomainError("survey: samples must be positive");
  if (n_max < 1) throw DomainError("survey: n_max must be positive");
  if (min_hits < 0) throw DomainError("survey: min_hits must be nonnegative");

  SurveyReport rep;
  rep.samples = samples;
  rep.n_max = n_max;
  rep.min_hits = min_hits;
  rep.seed = seed;
  rep.stratified = stratified;
  ExactScalar width = inst.J.length();

  rep.per_theta = parallel_map<SurveySample>(samples, jobs, [&](int64_t i) {
    SplitMix64 sub = SplitMix64::substream(seed, static_cast<std::uint64_t>(i));
    // (2k+1)/2^54 keeps samples strictly inside the open interval
    mpq_class u(2 * mpz_class(static_cast<unsigned long>(sub.next_unit_numerator())) + 1);
    u /= mpq_class(mpz_class(1) << 54);
    if (stratified) u = (mpq_class(static_cast<long>(i)) + u) / samples;
    ExactScalar theta = inst.J.lo + width * ExactScalar::rational(u);
    SurveySample s;
    s.theta = theta.to_string();
    try {
      s.hits = count_solutions(inst, theta, 1, n_max, pol);
    } catch (const AmbiguousAtMaxPrecision&) {
      s.determinate = false;
    }
    return s;
  });

  int64_t good = 0, winners = 0;
  for (const auto& s : rep.per_theta) {
    if (!s.determinate) continue;
    ++good;
    if (s.hits >= min_hits) ++winners;
  }
  rep.determinate_count = good;
  rep.fraction = good ? static_cast<double>(winners) / static_cast<double>(good) : 0.0;
  return rep;
}

}  // namespace dioph
