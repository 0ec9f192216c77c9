#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>

#include "dioph/errors.hpp"

namespace dioph {

using std::int64_t;

/// Three-valued outcome of a certified comparison.
enum class Cert { True, False, Unknown };

/// Certified real enclosure: a pair of directed-rounded mpfr endpoints
/// [lo, hi] guaranteed to contain the exact value. All operations round
/// outward, so enclosures are sound at every precision; doubling the
/// working precision of the same expression never widens the result.
class BigReal {
 public:
  explicit BigReal(mpfr_prec_t prec = 128) {
    mpfr_init2(lo_, prec);
    mpfr_init2(hi_, prec);
    mpfr_set_zero(lo_, 1);
    mpfr_set_zero(hi_, 1);
  }

  BigReal(const BigReal& o) {
    mpfr_init2(lo_, mpfr_get_prec(o.lo_));
    mpfr_init2(hi_, mpfr_get_prec(o.hi_));
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
  }

  BigReal(BigReal&& o) noexcept {
    mpfr_init2(lo_, 2);
    mpfr_init2(hi_, 2);
    mpfr_swap(lo_, o.lo_);
    mpfr_swap(hi_, o.hi_);
  }

  BigReal& operator=(BigReal o) noexcept {
    mpfr_swap(lo_, o.lo_);
    mpfr_swap(hi_, o.hi_);
    return *this;
  }

  ~BigReal() {
    mpfr_clear(lo_);
    mpfr_clear(hi_);
  }

  static BigReal from_long(long v, mpfr_prec_t prec) {
    BigReal r(prec);
    mpfr_set_si(r.lo_, v, MPFR_RNDD);
    mpfr_set_si(r.hi_, v, MPFR_RNDU);
    return r;
  }

  static BigReal from_mpz(const mpz_class& z, mpfr_prec_t prec) {
    BigReal r(prec);
    mpfr_set_z(r.lo_, z.get_mpz_t(), MPFR_RNDD);
    mpfr_set_z(r.hi_, z.get_mpz_t(), MPFR_RNDU);
    return r;
  }

  static BigReal from_mpq(const mpq_class& q, mpfr_prec_t prec) {
    BigReal r(prec);
    mpfr_set_q(r.lo_, q.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi_, q.get_mpq_t(), MPFR_RNDU);
    return r;
  }

  /// Exact double endpoint (doubles are binary rationals).
  static BigReal from_double(double v, mpfr_prec_t prec) {
    BigReal r(prec);
    mpfr_set_d(r.lo_, v, MPFR_RNDD);
    mpfr_set_d(r.hi_, v, MPFR_RNDU);
    return r;
  }

  static BigReal hull(const BigReal& a, const BigReal& b) {
    BigReal r(std::max(a.prec(), b.prec()));
    mpfr_min(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_max(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
  }

  mpfr_srcptr lo() const { return lo_; }
  mpfr_srcptr hi() const { return hi_; }
  mpfr_ptr lo() { return lo_; }
  mpfr_ptr hi() { return hi_; }
  mpfr_prec_t prec() const { return mpfr_get_prec(lo_); }

  double lo_double() const { return mpfr_get_d(lo_, MPFR_RNDD); }
  double hi_double() const { return mpfr_get_d(hi_, MPFR_RNDU); }
  double mid_double() const { return 0.5 * (lo_double() + hi_double()); }

  /// Upper bound for the half-width of the enclosure.
  double radius_double() const {
    mpfr_t w;
    mpfr_init2(w, 64);
    mpfr_sub(w, hi_, lo_, MPFR_RNDU);
    mpfr_div_2ui(w, w, 1, MPFR_RNDU);
    double r = mpfr_get_d(w, MPFR_RNDU);
    mpfr_clear(w);
    return r;
  }

  bool width_below(double eps) const { return radius_double() * 2 < eps; }

  bool contains_zero() const {
    return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0;
  }

  int sign() const {
    if (mpfr_sgn(lo_) > 0) return 1;
    if (mpfr_sgn(hi_) < 0) return -1;
    return 0;  // straddles or touches zero
  }

  /// Shortest decimal string for the midpoint with the given significand
  /// digit count.
  std::string mid_string(int digits = 20) const {
    mpfr_t m;
    mpfr_init2(m, std::max<mpfr_prec_t>(prec(), 64));
    mpfr_add(m, lo_, hi_, MPFR_RNDN);
    mpfr_div_2ui(m, m, 1, MPFR_RNDN);
    char buf[512];
    mpfr_snprintf(buf, sizeof(buf), "%.*Rg", digits, m);
    mpfr_clear(m);
    return buf;
  }

 private:
  mpfr_t lo_;
  mpfr_t hi_;
};

namespace detail {
inline mpfr_prec_t op_prec(const BigReal& a, const BigReal& b) {
  return std::max(a.prec(), b.prec());
}
}  // namespace detail

inline BigReal operator+(const BigReal& a, const BigReal& b) {
  BigReal r(detail::op_prec(a, b));
  mpfr_add(r.lo(), a.lo(), b.lo(), MPFR_RNDD);
  mpfr_add(r.hi(), a.hi(), b.hi(), MPFR_RNDU);
  return r;
}

inline BigReal operator-(const BigReal& a, const BigReal& b) {
  BigReal r(detail::op_prec(a, b));
  mpfr_sub(r.lo(), a.lo(), b.hi(), MPFR_RNDD);
  mpfr_sub(r.hi(), a.hi(), b.lo(), MPFR_RNDU);
  return r;
}

inline BigReal operator-(const BigReal& a) {
  BigReal r(a.prec());
  mpfr_neg(r.lo(), a.hi(), MPFR_RNDD);
  mpfr_neg(r.hi(), a.lo(), MPFR_RNDU);
  return r;
}

inline BigReal operator*(const BigReal& a, const BigReal& b) {
  const mpfr_prec_t p = detail::op_prec(a, b);
  BigReal r(p);
  mpfr_t t;
  mpfr_init2(t, p);
  // lo: minimum of the four products rounded down
  mpfr_mul(r.lo(), a.lo(), b.lo(), MPFR_RNDD);
  mpfr_mul(t, a.lo(), b.hi(), MPFR_RNDD);
  mpfr_min(r.lo(), r.lo(), t, MPFR_RNDD);
  mpfr_mul(t, a.hi(), b.lo(), MPFR_RNDD);
  mpfr_min(r.lo(), r.lo(), t, MPFR_RNDD);
  mpfr_mul(t, a.hi(), b.hi(), MPFR_RNDD);
  mpfr_min(r.lo(), r.lo(), t, MPFR_RNDD);
  // hi: maximum rounded up
  mpfr_mul(r.hi(), a.lo(), b.lo(), MPFR_RNDU);
  mpfr_mul(t, a.lo(), b.hi(), MPFR_RNDU);
  mpfr_max(r.hi(), r.hi(), t, MPFR_RNDU);
  mpfr_mul(t, a.hi(), b.lo(), MPFR_RNDU);
  mpfr_max(r.hi(), r.hi(), t, MPFR_RNDU);
  mpfr_mul(t, a.hi(), b.hi(), MPFR_RNDU);
  mpfr_max(r.hi(), r.hi(), t, MPFR_RNDU);
  mpfr_clear(t);
  return r;
}

inline BigReal operator/(const BigReal& a, const BigReal& b) {
  if (b.contains_zero()) throw DomainError("interval division by enclosure containing zero");
  const mpfr_prec_t p = detail::op_prec(a, b);
  BigReal r(p);
  mpfr_t t;
  mpfr_init2(t, p);
  mpfr_div(r.lo(), a.lo(), b.lo(), MPFR_RNDD);
  mpfr_div(t, a.lo(), b.hi(), MPFR_RNDD);
  mpfr_min(r.lo(), r.lo(), t, MPFR_RNDD);
  mpfr_div(t, a.hi(), b.lo(), MPFR_RNDD);
  mpfr_min(r.lo(), r.lo(), t, MPFR_RNDD);
  mpfr_div(t, a.hi(), b.hi(), MPFR_RNDD);
  mpfr_min(r.lo(), r.lo(), t, MPFR_RNDD);
  mpfr_div(r.hi(), a.lo(), b.lo(), MPFR_RNDU);
  mpfr_div(t, a.lo(), b.hi(), MPFR_RNDU);
  mpfr_max(r.hi(), r.hi(), t, MPFR_RNDU);
  mpfr_div(t, a.hi(), b.lo(), MPFR_RNDU);
  mpfr_max(r.hi(), r.hi(), t, MPFR_RNDU);
  mpfr_div(t, a.hi(), b.hi(), MPFR_RNDU);
  mpfr_max(r.hi(), r.hi(), t, MPFR_RNDU);
  mpfr_clear(t);
  return r;
}

inline BigReal mul_si(const BigReal& a, long k) {
  BigReal r(a.prec());
  if (k >= 0) {
    mpfr_mul_si(r.lo(), a.lo(), k, MPFR_RNDD);
    mpfr_mul_si(r.hi(), a.hi(), k, MPFR_RNDU);
  } else {
    mpfr_mul_si(r.lo(), a.hi(), k, MPFR_RNDD);
    mpfr_mul_si(r.hi(), a.lo(), k, MPFR_RNDU);
  }
  return r;
}

inline BigReal div_ui(const BigReal& a, unsigned long k) {
  BigReal r(a.prec());
  mpfr_div_ui(r.lo(), a.lo(), k, MPFR_RNDD);
  mpfr_div_ui(r.hi(), a.hi(), k, MPFR_RNDU);
  return r;
}

inline BigReal sub_z(const BigReal& a, const mpz_class& z) {
  BigReal r(a.prec());
  mpfr_sub_z(r.lo(), a.lo(), z.get_mpz_t(), MPFR_RNDD);
  mpfr_sub_z(r.hi(), a.hi(), z.get_mpz_t(), MPFR_RNDU);
  return r;
}

inline BigReal abs(const BigReal& a) {
  BigReal r(a.prec());
  if (mpfr_sgn(a.lo()) >= 0) return a;
  if (mpfr_sgn(a.hi()) <= 0) return -a;
  mpfr_set_zero(r.lo(), 1);
  mpfr_neg(r.hi(), a.lo(), MPFR_RNDU);
  mpfr_max(r.hi(), r.hi(), a.hi(), MPFR_RNDU);
  return r;
}

inline BigReal sqrt(const BigReal& a) {
  if (mpfr_sgn(a.lo()) < 0) throw DomainError("sqrt of enclosure with negative part");
  BigReal r(a.prec());
  mpfr_sqrt(r.lo(), a.lo(), MPFR_RNDD);
  mpfr_sqrt(r.hi(), a.hi(), MPFR_RNDU);
  return r;
}

inline BigReal exp(const BigReal& a) {
  BigReal r(a.prec());
  mpfr_exp(r.lo(), a.lo(), MPFR_RNDD);
  mpfr_exp(r.hi(), a.hi(), MPFR_RNDU);
  return r;
}

inline BigReal log(const BigReal& a) {
  if (mpfr_sgn(a.lo()) <= 0) throw DomainError("log of enclosure reaching zero");
  BigReal r(a.prec());
  mpfr_log(r.lo(), a.lo(), MPFR_RNDD);
  mpfr_log(r.hi(), a.hi(), MPFR_RNDU);
  return r;
}

inline BigReal log_ui(unsigned long n, mpfr_prec_t prec) {
  BigReal r(prec);
  mpfr_log_ui(r.lo(), n, MPFR_RNDD);
  mpfr_log_ui(r.hi(), n, MPFR_RNDU);
  return r;
}

inline BigReal pi_enclosure(mpfr_prec_t prec) {
  BigReal r(prec);
  mpfr_const_pi(r.lo(), MPFR_RNDD);
  mpfr_const_pi(r.hi(), MPFR_RNDU);
  return r;
}

/// n^e for integer n >= 1 via exp(e * log n).
inline BigReal pow_base_ui(unsigned long n, const BigReal& e) {
  if (n == 0) throw DomainError("pow_base_ui: base must be positive");
  if (n == 1) return BigReal::from_long(1, e.prec());
  return exp(e * log_ui(n, e.prec()));
}

/// b^e for an enclosure b > 0.
inline BigReal pow(const BigReal& b, const BigReal& e) { return exp(e * log(b)); }

namespace detail {

// True if an integer k with A <= k <= B may exist, judged conservatively
// from outward endpoint bounds.
inline bool int_in_range(mpfr_srcptr a_lo, mpfr_srcptr b_hi) {
  mpfr_t fa, fb;
  mpfr_init2(fa, mpfr_get_prec(a_lo));
  mpfr_init2(fb, mpfr_get_prec(b_hi));
  mpfr_ceil(fa, a_lo);
  mpfr_floor(fb, b_hi);
  bool ok = mpfr_cmp(fa, fb) <= 0;
  mpfr_clear(fa);
  mpfr_clear(fb);
  return ok;
}

}  // namespace detail

/// Enclosure of sin over the interval. Sound for any width; collapses to
/// [-1,1] when the interval spans a full period.
inline BigReal sin(const BigReal& a) {
  const mpfr_prec_t p = a.prec();
  BigReal r(p);
  mpfr_t w;
  mpfr_init2(w, 64);
  mpfr_sub(w, a.hi(), a.lo(), MPFR_RNDU);
  bool wide = mpfr_cmp_ui(w, 7) >= 0;  // > 2*pi
  mpfr_clear(w);
  if (wide) {
    mpfr_set_si(r.lo(), -1, MPFR_RNDD);
    mpfr_set_si(r.hi(), 1, MPFR_RNDU);
    return r;
  }
  mpfr_t slo_d, shi_d, slo_u, shi_u;
  mpfr_inits2(p, slo_d, shi_d, slo_u, shi_u, (mpfr_ptr) nullptr);
  mpfr_sin(slo_d, a.lo(), MPFR_RNDD);
  mpfr_sin(slo_u, a.lo(), MPFR_RNDU);
  mpfr_sin(shi_d, a.hi(), MPFR_RNDD);
  mpfr_sin(shi_u, a.hi(), MPFR_RNDU);
  mpfr_min(r.lo(), slo_d, shi_d, MPFR_RNDD);
  mpfr_max(r.hi(), slo_u, shi_u, MPFR_RNDU);
  mpfr_clears(slo_d, shi_d, slo_u, shi_u, (mpfr_ptr) nullptr);

  // Interior extrema: x = pi/2 + 2*pi*k (max), x = -pi/2 + 2*pi*k (min).
  BigReal pi = pi_enclosure(p);
  BigReal half_pi = div_ui(pi, 2);
  BigReal two_pi = mul_si(pi, 2);
  BigReal kmax = (a - half_pi) / two_pi;          // k range for maxima
  BigReal kmin = (a + half_pi) / two_pi;          // k range for minima
  if (detail::int_in_range(kmax.lo(), kmax.hi())) mpfr_set_si(r.hi(), 1, MPFR_RNDU);
  if (detail::int_in_range(kmin.lo(), kmin.hi())) mpfr_set_si(r.lo(), -1, MPFR_RNDD);

  // sin is bounded; clamp rounding spill
  if (mpfr_cmp_si(r.lo(), -1) < 0) mpfr_set_si(r.lo(), -1, MPFR_RNDD);
  if (mpfr_cmp_si(r.hi(), 1) > 0) mpfr_set_si(r.hi(), 1, MPFR_RNDU);
  return r;
}

inline BigReal cos(const BigReal& a) {
  BigReal half_pi = div_ui(pi_enclosure(a.prec()), 2);
  return sin(a + half_pi);
}

/// Certified comparisons. True/False only when the enclosures separate.
inline Cert cert_le(const BigReal& a, const BigReal& b) {
  if (mpfr_cmp(a.hi(), b.lo()) <= 0) return Cert::True;
  if (mpfr_cmp(a.lo(), b.hi()) > 0) return Cert::False;
  return Cert::Unknown;
}

inline Cert cert_lt(const BigReal& a, const BigReal& b) {
  if (mpfr_cmp(a.hi(), b.lo()) < 0) return Cert::True;
  if (mpfr_cmp(a.lo(), b.hi()) >= 0) return Cert::False;
  return Cert::Unknown;
}

inline mpz_class floor_lo(const BigReal& a) {
  mpz_class z;
  mpfr_get_z(z.get_mpz_t(), a.lo(), MPFR_RNDD);
  return z;
}

inline mpz_class floor_hi(const BigReal& a) {
  mpz_class z;
  mpfr_get_z(z.get_mpz_t(), a.hi(), MPFR_RNDD);
  return z;
}

/// ||x||: distance to the nearest integer, as an enclosure in [0, 1/2].
/// Total: wide inputs return the trivial enclosure instead of failing.
inline BigReal dist_nearest_int(const BigReal& x) {
  const mpfr_prec_t p = x.prec();
  BigReal half(p);
  mpfr_set_ui_2exp(half.lo(), 1, -1, MPFR_RNDD);
  mpfr_set_ui_2exp(half.hi(), 1, -1, MPFR_RNDU);

  mpfr_t w;
  mpfr_init2(w, 64);
  mpfr_sub(w, x.hi(), x.lo(), MPFR_RNDU);
  bool wide = mpfr_cmp_d(w, 0.5) >= 0;
  mpfr_clear(w);
  BigReal r(p);
  if (wide) {
    mpfr_set_zero(r.lo(), 1);
    mpfr_set(r.hi(), half.hi(), MPFR_RNDU);
    return r;
  }

  mpfr_t mid;
  mpfr_init2(mid, p);
  mpfr_add(mid, x.lo(), x.hi(), MPFR_RNDN);
  mpfr_div_2ui(mid, mid, 1, MPFR_RNDN);
  mpz_class m;
  mpfr_get_z(m.get_mpz_t(), mid, MPFR_RNDN);
  mpfr_clear(mid);

  BigReal d = abs(sub_z(x, m));
  if (mpfr_sgn(d.lo()) < 0) mpfr_set_zero(d.lo(), 1);
  if (mpfr_cmp(d.hi(), half.hi()) > 0) mpfr_set(d.hi(), half.hi(), MPFR_RNDU);
  return d;
}

/// Fractional-part enclosure. Either a single interval within [0,1] whose
/// true value lies in [lo, min(hi,1)), or, when the input straddles one
/// integer, the two residual pieces [0, wrap_hi] and [tail_lo, 1).
struct FracEnclosure {
  enum class Kind { interval, straddle, full } kind;
  BigReal a;  // interval: the enclosure; straddle: piece [a.lo, 1)
  BigReal b;  // straddle: piece [0, b.hi]
};

inline FracEnclosure frac_enclosure(const BigReal& x) {
  mpz_class fl = floor_lo(x);
  mpz_class fh = floor_hi(x);
  const mpfr_prec_t p = x.prec();
  if (fl == fh) {
    BigReal r = sub_z(x, fl);
    if (mpfr_sgn(r.lo()) < 0) mpfr_set_zero(r.lo(), 1);
    if (mpfr_cmp_ui(r.hi(), 1) > 0) mpfr_set_ui(r.hi(), 1, MPFR_RNDU);
    return {FracEnclosure::Kind::interval, std::move(r), BigReal(p)};
  }
  if (fh == fl + 1) {
    BigReal tail = sub_z(x, fl);   // true value piece in [tail.lo, 1)
    BigReal wrap = sub_z(x, fh);   // true value piece in [0, wrap.hi]
    if (mpfr_cmp_ui(tail.lo(), 1) > 0) mpfr_set_ui(tail.lo(), 1, MPFR_RNDD);
    if (mpfr_sgn(wrap.hi()) < 0) mpfr_set_zero(wrap.hi(), 1);
    return {FracEnclosure::Kind::straddle, std::move(tail), std::move(wrap)};
  }
  return {FracEnclosure::Kind::full, BigReal(p), BigReal(p)};
}

}  // namespace dioph
