#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dioph/errors.hpp"
#include "dioph/families.hpp"
#include "dioph/numeric.hpp"
#include "dioph/systems.hpp"

namespace dioph {

/// The threshold L of a counting query, kept in the exact form
/// coef * base^(-sigma) so integer comparisons against it can be decided
/// without rounding (overlap thresholds are 8*Q*psi_p, which is irrational
/// for power-law psi).
class BoundValue {
 public:
  static BoundValue exact(ExactScalar coef) {
    BoundValue b;
    b.coef_ = std::move(coef);
    return b;
  }

  static BoundValue scaled_power(ExactScalar coef, int64_t base, Exponent sigma) {
    if (base < 1) throw InvalidQuery("bound power base must be positive");
    BoundValue b;
    b.coef_ = std::move(coef);
    b.base_ = base;
    b.sigma_ = std::move(sigma);
    return b;
  }

  bool has_power() const { return base_ > 1; }

  BigReal eval(mpfr_prec_t prec) const {
    BigReal c = coef_.to_interval(prec);
    if (base_ <= 1) return c;
    return c / pow_base_ui(static_cast<unsigned long>(base_), sigma_.eval(prec));
  }

  double value_double() const { return eval(128).mid_double(); }

  /// Certified sign of (k - L); exact whenever the data is rational.
  int compare_int(const mpz_class& k, const PrecisionPolicy& pol = {}) const {
    return compare_rational(mpq_class(k), pol);
  }

  int compare_rational(const mpq_class& k, const PrecisionPolicy& pol = {}) const {
    if (base_ <= 1) {
      if (coef_.is_rational()) return ::cmp(k, coef_.rat());
      return ExactScalar::rational(k).compare(coef_);
    }
    if (coef_.is_rational() && sigma_.is_rational()) {
      const mpq_class& s = sigma_.scalar().rat();
      if (s.get_num().fits_ulong_p() && s.get_den().fits_ulong_p() && sgn(s) >= 0) {
        if (sgn(k) <= 0) return sgn(coef_.rat()) > 0 ? -1 : 1;
        unsigned long u = s.get_num().get_ui();
        unsigned long v = s.get_den().get_ui();
        // k vs c * base^(-u/v)  <=>  k^v * base^u vs c^v  (k, c > 0)
        mpq_class kv, cv;
        mpz_pow_ui(kv.get_num_mpz_t(), k.get_num_mpz_t(), v);
        mpz_pow_ui(kv.get_den_mpz_t(), k.get_den_mpz_t(), v);
        mpz_pow_ui(cv.get_num_mpz_t(), coef_.rat().get_num_mpz_t(), v);
        mpz_pow_ui(cv.get_den_mpz_t(), coef_.rat().get_den_mpz_t(), v);
        mpz_class bu;
        mpz_ui_pow_ui(bu.get_mpz_t(), static_cast<unsigned long>(base_), u);
        kv *= mpq_class(bu);
        kv.canonicalize();
        cv.canonicalize();
        return ::cmp(kv, cv);
      }
    }
    for (int prec = pol.start_bits;; prec = std::min(prec * 2, pol.max_bits)) {
      BigReal L = eval(prec);
      BigReal kk = BigReal::from_mpq(k, prec);
      if (cert_lt(kk, L) == Cert::True) return -1;
      if (cert_lt(L, kk) == Cert::True) return 1;
      if (prec >= pol.max_bits) throw AmbiguousAtMaxPrecision("bound comparison");
    }
  }

  /// Largest integer <= L (used for the |l| <= L lattice slices).
  mpz_class floor_value(const PrecisionPolicy& pol = {}) const {
    mpz_class f(static_cast<long>(std::floor(value_double())));
    while (compare_int(f + 1, pol) <= 0) f += 1;
    while (compare_int(f, pol) > 0) f -= 1;
    return f;
  }

  mpz_class ceil_value(const PrecisionPolicy& pol = {}) const {
    mpz_class f = floor_value(pol);
    return compare_int(f, pol) == 0 ? f : f + 1;
  }

  std::string to_string() const {
    if (base_ <= 1) return coef_.to_string();
    return coef_.to_string() + "*" + std::to_string(base_) + "^-(" + sigma_.to_string() + ")";
  }

 private:
  ExactScalar coef_;
  int64_t base_ = 0;
  Exponent sigma_;
};

/// Parameters of the counting problems: band 'qset' inside [Q, 2Q-1]
/// avoiding multiples of the odd prime p, threshold L, window J for r/p
/// (and s/q in the perturbed variant), optional perturbation family.
struct LatticeQuery {
  int64_t p = 3;
  int64_t Q = 5;
  std::vector<int64_t> qset;
  BoundValue L = BoundValue::exact(ExactScalar::from_int(1));
  ScalarInterval J{ExactScalar::from_int(0), ExactScalar::from_int(1)};
  std::optional<PerturbationFamily> phi;

  void validate() const {
    if (!is_prime(p) || p % 2 == 0) throw InvalidQuery("p must be an odd prime");
    if (Q <= p) throw InvalidQuery("band start Q must exceed p");
    for (int64_t q : qset) {
      if (q < Q || q >= 2 * Q) throw InvalidQuery("qset member outside [Q, 2Q-1]");
      if (q % p == 0) throw InvalidQuery("qset must avoid multiples of p");
    }
    if (L.compare_int(1) > 0) throw InvalidQuery("L must be at least 1");
    if (!(J.lo < J.hi)) throw InvalidQuery("J must be a nonempty open interval");
  }
};

struct CountReport {
  int64_t count = 0;
  double bound_basic = 0.0;
  std::optional<double> omega;
  std::optional<bool> omega_hypothesis_ok;
  std::optional<double> bound_perturbed;
  double ratio = 0.0;
};

namespace detail {

/// Integer endpoints of (lo, hi) cap Z for exact scalar endpoints.
struct IntRange {
  mpz_class first, last;
  bool empty;
};

inline IntRange open_integer_range(const ExactScalar& lo, const ExactScalar& hi) {
  IntRange r{0, 0, true};
  mpz_class first = lo.floor() + 1;
  mpz_class last = hi.floor();
  if (ExactScalar::from_mpz(last) == hi) last -= 1;
  if (first > last) return r;
  r.first = first;
  r.last = last;
  r.empty = false;
  return r;
}

/// floor((A + L) / p): the largest f with p f - A <= L.
inline mpz_class floor_div_plus(const mpz_class& A, const BoundValue& L, int64_t p,
                                double L_approx) {
  mpz_class f(static_cast<long>(std::floor((A.get_d() + L_approx) / static_cast<double>(p))));
  while (L.compare_int(f * p + p - A) <= 0) f += 1;
  while (L.compare_int(f * p - A) > 0) f -= 1;
  return f;
}

/// ceil((A - L) / p): the smallest g with A - p g <= L.
inline mpz_class ceil_div_minus(const mpz_class& A, const BoundValue& L, int64_t p,
                                double L_approx) {
  mpz_class g(static_cast<long>(std::ceil((A.get_d() - L_approx) / static_cast<double>(p))));
  while (L.compare_int(A - (g - 1) * p) <= 0) g -= 1;
  while (L.compare_int(A - g * p) > 0) g += 1;
  return g;
}

inline double log_sq(int64_t Q) {
  double l = std::log(static_cast<double>(Q));
  return l * l;
}

/// |q (r - phi_p(r/p)) - p (s - phi_q(s/q))| <= L, decided with certified
/// arithmetic; exact for the zero perturbation.
inline bool perturbed_tuple_passes(const LatticeQuery& query, int64_t q, const mpz_class& r,
                                   const mpz_class& s, const PrecisionPolicy& pol) {
  const PerturbationFamily& phi = *query.phi;
  if (phi.is_zero()) {
    mpz_class v = abs(q * r - query.p * s);
    return query.L.compare_int(v, pol) <= 0;
  }
  ExactScalar th_r = ExactScalar::from_mpz(r) / ExactScalar::from_int(query.p);
  ExactScalar th_s = ExactScalar::from_mpz(s) / ExactScalar::from_int(q);
  for (int prec = pol.start_bits;; prec = std::min(prec * 2, pol.max_bits)) {
    BigReal rr = BigReal::from_mpz(r, prec) - phi.eval(query.p, th_r.to_interval(prec), prec);
    BigReal ss = BigReal::from_mpz(s, prec) - phi.eval(q, th_s.to_interval(prec), prec);
    BigReal val = abs(mul_si(rr, static_cast<long>(q)) - mul_si(ss, static_cast<long>(query.p)));
    Cert c = cert_le(val, query.L.eval(prec));
    if (c != Cert::Unknown) return c == Cert::True;
    if (prec >= pol.max_bits)
      throw AmbiguousAtMaxPrecision("perturbed inequality at q=" + std::to_string(q));
  }
}

}  // namespace detail

/// Exact solution count of: q in qset, r/p in J, |q r - p s| <= L, with s
/// unconstrained. Counted per (q, r) by the closed-form s-window.
inline CountReport count_basic(const LatticeQuery& query, const PrecisionPolicy& pol = {}) {
  query.validate();
  if (query.phi) throw InvalidQuery("count_basic takes no perturbation");
  detail::IntRange rr = detail::open_integer_range(
      query.J.lo * ExactScalar::from_int(query.p), query.J.hi * ExactScalar::from_int(query.p));
  int64_t count = 0;
  const double L_approx = query.L.value_double();
  if (!rr.empty) {
    for (int64_t q : query.qset) {
      for (mpz_class r = rr.first; r <= rr.last; ++r) {
        mpz_class A = q * r;
        mpz_class f = detail::floor_div_plus(A, query.L, query.p, L_approx);
        mpz_class g = detail::ceil_div_minus(A, query.L, query.p, L_approx);
        if (f >= g) count += mpz_class(f - g + 1).get_si();
      }
    }
  }
  CountReport rep;
  rep.count = count;
  double lam = query.J.length().to_double();
  double Lceil = query.L.ceil_value(pol).get_d();
  rep.bound_basic = lam * Lceil * static_cast<double>(query.qset.size()) +
                    static_cast<double>(query.Q) * detail::log_sq(query.Q);
  rep.ratio = rep.bound_basic > 0 ? count / rep.bound_basic : 0.0;
  return rep;
}

/// Same count through the inverse-residue classes r = qbar l (mod p); an
/// optimized route that mirrors the counting argument. Used as a
/// cross-check of count_basic.
inline int64_t count_basic_congruence(const LatticeQuery& query, const PrecisionPolicy& pol = {}) {
  query.validate();
  detail::IntRange rr = detail::open_integer_range(
      query.J.lo * ExactScalar::from_int(query.p), query.J.hi * ExactScalar::from_int(query.p));
  if (rr.empty) return 0;
  mpz_class Lf = query.L.floor_value(pol);
  int64_t count = 0;
  for (int64_t q : query.qset) {
    int64_t qbar = mod_inverse(q % query.p, query.p);
    for (mpz_class l = -Lf; l <= Lf; ++l) {
      mpz_class r0 = (qbar * l) % query.p;
      if (r0 < 0) r0 += query.p;
      // first r >= rr.first congruent to r0 mod p
      mpz_class delta = (r0 - rr.first) % query.p;
      if (delta < 0) delta += query.p;
      mpz_class r_first = rr.first + delta;
      if (r_first > rr.last) continue;
      count += mpz_class((rr.last - r_first) / query.p + 1).get_si();
    }
  }
  return count;
}

/// Brute-force reference: enumerates s per (q, r) and tests each tuple.
inline int64_t count_basic_oracle(const LatticeQuery& query, int64_t work_cap = 100000000,
                                  const PrecisionPolicy& pol = {}) {
  query.validate();
  if (query.phi) throw InvalidQuery("count_basic_oracle takes no perturbation");
  detail::IntRange rr = detail::open_integer_range(
      query.J.lo * ExactScalar::from_int(query.p), query.J.hi * ExactScalar::from_int(query.p));
  if (rr.empty) return 0;
  double Lceil = query.L.ceil_value(pol).get_d();
  double r_count = mpz_class(rr.last - rr.first + 1).get_d();
  double work = static_cast<double>(query.qset.size()) * r_count *
                (2 * Lceil / static_cast<double>(query.p) + 3);
  if (work > static_cast<double>(work_cap)) throw WorkCapExceeded("oracle work above cap");
  int64_t count = 0;
  for (int64_t q : query.qset) {
    for (mpz_class r = rr.first; r <= rr.last; ++r) {
      mpz_class A = q * r;
      double guess = A.get_d() / query.p;
      double pad = Lceil / query.p + 2;
      mpz_class s_lo(static_cast<long>(std::floor(guess - pad)));
      mpz_class s_hi(static_cast<long>(std::ceil(guess + pad)));
      for (mpz_class s = s_lo; s <= s_hi; ++s) {
        mpz_class v = abs(A - query.p * s);
        if (query.L.compare_int(v, pol) <= 0) ++count;
      }
    }
  }
  return count;
}

struct OmegaReport {
  double omega = 0.0;
  bool hypothesis_ok = false;
};

/// The resolution scale omega = min(lambda(J), L/(Q sup|phi'|))/10 and the
/// admissibility inequality omega >= 10 max(,...). Norm bounds are certified
/// interval images over the closure of J, so a positive verdict is sound.
inline OmegaReport omega(const LatticeQuery& query, const PrecisionPolicy& pol = {}) {
  query.validate();
  if (!query.phi) throw InvalidQuery("omega needs a perturbation family");
  ExactScalar lam = query.J.length();
  if (lam.sign() <= 0) throw InvalidQuery("J must have positive length");

  std::vector<int64_t> ns = query.qset;
  ns.push_back(query.p);

  for (int prec = pol.start_bits;; prec = std::min(prec * 2, pol.max_bits)) {
    BigReal jbar = BigReal::hull(query.J.lo.to_interval(prec), query.J.hi.to_interval(prec));
    BigReal Lv = query.L.eval(prec);
    BigReal lam_i = lam.to_interval(prec);
    BigReal q_scale = BigReal::from_long(static_cast<long>(query.Q), prec);

    // Enclosure of sup_J |f|: upper end from the interval image, lower end
    // strengthened by point evaluations (a point value is a sup lower bound).
    ExactScalar mid = (query.J.lo + query.J.hi) / ExactScalar::from_int(2);
    auto sup_enclosure = [&](int64_t n, bool deriv) {
      BigReal img = deriv ? query.phi->sup_abs_deriv(n, jbar, prec)
                          : query.phi->sup_abs(n, jbar, prec);
      for (const ExactScalar* th :
           std::initializer_list<const ExactScalar*>{&query.J.lo, &mid, &query.J.hi}) {
        BigReal v = abs(deriv ? query.phi->eval_deriv(n, th->to_interval(prec), prec)
                              : query.phi->eval(n, th->to_interval(prec), prec));
        if (mpfr_cmp(v.lo(), img.lo()) > 0) mpfr_set(img.lo(), v.lo(), MPFR_RNDD);
      }
      return img;
    };

    // max over n of the derivative sup bound, and of sup|phi_n|/n
    BigReal max_deriv = BigReal::from_long(0, prec);
    BigReal max_scaled = BigReal::from_long(0, prec);
    for (int64_t n : ns) {
      BigReal d = sup_enclosure(n, true);
      BigReal s = div_ui(sup_enclosure(n, false), static_cast<unsigned long>(n));
      mpfr_max(max_deriv.lo(), max_deriv.lo(), d.lo(), MPFR_RNDD);
      mpfr_max(max_deriv.hi(), max_deriv.hi(), d.hi(), MPFR_RNDU);
      mpfr_max(max_scaled.lo(), max_scaled.lo(), s.lo(), MPFR_RNDD);
      mpfr_max(max_scaled.hi(), max_scaled.hi(), s.hi(), MPFR_RNDU);
    }

    // omega = min(lambda, L / (Q max_deriv)) / 10, with the convention that
    // a vanishing derivative bound drops the second argument
    BigReal omega_i(prec);
    if (query.phi->is_zero() || mpfr_sgn(max_deriv.hi()) == 0) {
      omega_i = div_ui(lam_i, 10);
    } else if (mpfr_sgn(max_deriv.lo()) > 0) {
      BigReal second = Lv / (q_scale * max_deriv);
      mpfr_min(omega_i.lo(), lam_i.lo(), second.lo(), MPFR_RNDD);
      mpfr_min(omega_i.hi(), lam_i.hi(), second.hi(), MPFR_RNDU);
      omega_i = div_ui(omega_i, 10);
    } else {
      // derivative bound touches zero: L/(Q sup) is at least L/(Q hi),
      // possibly unbounded, so only that one-sided estimate survives
      mpfr_t tmp;
      mpfr_init2(tmp, prec);
      mpfr_mul_si(tmp, max_deriv.hi(), static_cast<long>(query.Q), MPFR_RNDU);
      mpfr_div(tmp, Lv.lo(), tmp, MPFR_RNDD);
      mpfr_min(omega_i.lo(), lam_i.lo(), tmp, MPFR_RNDD);
      mpfr_set(omega_i.hi(), lam_i.hi(), MPFR_RNDU);
      mpfr_clear(tmp);
      omega_i = div_ui(omega_i, 10);
    }

    // rhs = 10 max(1/p, L/(pQ), max_scaled)
    BigReal rhs(prec);
    BigReal inv_p = div_ui(BigReal::from_long(1, prec), static_cast<unsigned long>(query.p));
    BigReal l_pq = div_ui(div_ui(Lv, static_cast<unsigned long>(query.p)),
                          static_cast<unsigned long>(query.Q));
    mpfr_max(rhs.lo(), inv_p.lo(), l_pq.lo(), MPFR_RNDD);
    mpfr_max(rhs.hi(), inv_p.hi(), l_pq.hi(), MPFR_RNDU);
    mpfr_max(rhs.lo(), rhs.lo(), max_scaled.lo(), MPFR_RNDD);
    mpfr_max(rhs.hi(), rhs.hi(), max_scaled.hi(), MPFR_RNDU);
    rhs = mul_si(rhs, 10);

    Cert ok = cert_le(rhs, omega_i);
    if (ok != Cert::Unknown) {
      OmegaReport rep;
      rep.omega = omega_i.mid_double();
      rep.hypothesis_ok = ok == Cert::True;
      return rep;
    }
    if (prec >= pol.max_bits) throw AmbiguousAtMaxPrecision("omega admissibility");
  }
}

/// Exact count of: q in qset, r/p in J, s/q in J,
/// |q (r - phi_p(r/p)) - p (s - phi_q(s/q))| <= L.
inline CountReport count_perturbed(const LatticeQuery& query, const PrecisionPolicy& pol = {}) {
  query.validate();
  if (!query.phi) throw InvalidQuery("count_perturbed needs a perturbation family");
  detail::IntRange rr = detail::open_integer_range(
      query.J.lo * ExactScalar::from_int(query.p), query.J.hi * ExactScalar::from_int(query.p));
  int64_t count = 0;
  const int prec = pol.start_bits;
  const double L_approx = query.L.value_double();
  if (!rr.empty) {
    BigReal jbar = BigReal::hull(query.J.lo.to_interval(prec), query.J.hi.to_interval(prec));
    for (int64_t q : query.qset) {
      detail::IntRange ss = detail::open_integer_range(
          query.J.lo * ExactScalar::from_int(q), query.J.hi * ExactScalar::from_int(q));
      if (ss.empty) continue;
      double sup_q = query.phi->sup_abs(q, jbar, prec).hi_double();
      double sup_p = query.phi->sup_abs(query.p, jbar, prec).hi_double();
      for (mpz_class r = rr.first; r <= rr.last; ++r) {
        // conservative s-window around (q (r - phi_p) +- L)/p, widened by
        // sup|phi_q|
        double A_mid = q * (r.get_d());
        double slack = q * sup_p + L_approx;
        double lo_d = (A_mid - slack) / query.p - sup_q - 1;
        double hi_d = (A_mid + slack) / query.p + sup_q + 1;
        mpz_class s_lo(static_cast<long>(std::floor(lo_d)));
        mpz_class s_hi(static_cast<long>(std::ceil(hi_d)));
        if (s_lo < ss.first) s_lo = ss.first;
        if (s_hi > ss.last) s_hi = ss.last;
        for (mpz_class s = s_lo; s <= s_hi; ++s)
          if (detail::perturbed_tuple_passes(query, q, r, s, pol)) ++count;
      }
    }
  }
  CountReport rep;
  rep.count = count;
  double lam = query.J.length().to_double();
  double Lceil = query.L.ceil_value(pol).get_d();
  rep.bound_basic = lam * Lceil * static_cast<double>(query.qset.size()) +
                    static_cast<double>(query.Q) * detail::log_sq(query.Q);
  try {
    OmegaReport om = omega(query, pol);
    rep.omega = om.omega;
    rep.omega_hypothesis_ok = om.hypothesis_ok;
    if (om.omega > 0) {
      rep.bound_perturbed = lam * (Lceil * static_cast<double>(query.qset.size()) +
                                   static_cast<double>(query.Q) * detail::log_sq(query.Q) /
                                       om.omega);
      rep.ratio = *rep.bound_perturbed > 0 ? count / *rep.bound_perturbed : 0.0;
    }
  } catch (const AmbiguousAtMaxPrecision&) {
    rep.ratio = rep.bound_basic > 0 ? count / rep.bound_basic : 0.0;
  }
  if (!rep.bound_perturbed)
    rep.ratio = rep.bound_basic > 0 ? count / rep.bound_basic : 0.0;
  return rep;
}

/// Reference count scanning every s in q J, no bracketing shortcut.
inline int64_t count_perturbed_oracle(const LatticeQuery& query, int64_t work_cap = 100000000,
                                      const PrecisionPolicy& pol = {}) {
  query.validate();
  if (!query.phi) throw InvalidQuery("count_perturbed_oracle needs a perturbation family");
  detail::IntRange rr = detail::open_integer_range(
      query.J.lo * ExactScalar::from_int(query.p), query.J.hi * ExactScalar::from_int(query.p));
  if (rr.empty) return 0;
  double r_count = mpz_class(rr.last - rr.first + 1).get_d();
  int64_t count = 0;
  for (int64_t q : query.qset) {
    detail::IntRange ss = detail::open_integer_range(
        query.J.lo * ExactScalar::from_int(q), query.J.hi * ExactScalar::from_int(q));
    if (ss.empty) continue;
    double s_count = mpz_class(ss.last - ss.first + 1).get_d();
    if (r_count * s_count * static_cast<double>(query.qset.size()) >
        static_cast<double>(work_cap))
      throw WorkCapExceeded("perturbed oracle work above cap");
    for (mpz_class r = rr.first; r <= rr.last; ++r)
      for (mpz_class s = ss.first; s <= ss.last; ++s)
        if (detail::perturbed_tuple_passes(query, q, r, s, pol)) ++count;
  }
  return count;
}

/// Builds the overlap-counting query: threshold L = 4 * (2Q) * psi_p with
/// the whole band (minus multiples of p) as qset.
inline LatticeQuery overlap_query_from_systems(int64_t p, int64_t Q, const PsiFamily& psi,
                                               const PerturbationFamily& phi,
                                               const ScalarInterval& J) {
  if (!is_prime(p) || p % 2 == 0) throw InvalidQuery("p must be an odd prime");
  if (Q <= p) throw InvalidQuery("band must start above p");
  LatticeQuery query;
  query.p = p;
  query.Q = Q;
  for (int64_t q = Q; q < 2 * Q; ++q)
    if (q % p != 0) query.qset.push_back(q);
  query.J = J;
  query.phi = phi;
  ExactScalar scale = ExactScalar::from_int(8 * Q);
  switch (psi.kind()) {
    case PsiFamily::Kind::power_law:
      query.L = BoundValue::scaled_power(scale * psi.coefficient(), p, psi.sigma());
      break;
    case PsiFamily::Kind::constant:
      query.L = BoundValue::exact(scale * psi.coefficient());
      break;
    case PsiFamily::Kind::table: {
      auto v = psi.rational_value(p);
      if (!v) throw InvalidQuery("table psi has no value at p");
      query.L = BoundValue::exact(scale * ExactScalar::rational(*v));
      break;
    }
  }
  query.validate();
  return query;
}

}  // namespace dioph
