#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "dioph/errors.hpp"
#include "dioph/interval.hpp"
#include "dioph/scalar.hpp"

namespace dioph {

/// Escalation policy: evaluation starts at start_bits and doubles until a
/// decision certifies or max_bits is reached, at which point the operation
/// reports ambiguity instead of guessing.
struct PrecisionPolicy {
  int start_bits = 128;
  int max_bits = 4096;

  static PrecisionPolicy with_cap(int cap) {
    PrecisionPolicy p;
    if (cap < 2) throw ValidationError("precision cap must be at least 2 bits");
    p.max_bits = cap;
    p.start_bits = std::min(p.start_bits, cap);
    return p;
  }
};

/// Runs attempt(prec) at doubling precision until it yields a value.
template <typename T, typename F>
T refine(const PrecisionPolicy& pol, const char* what, F&& attempt) {
  int prec = pol.start_bits;
  for (;;) {
    std::optional<T> r = attempt(prec);
    if (r) return *std::move(r);
    if (prec >= pol.max_bits) throw AmbiguousAtMaxPrecision(what);
    prec = std::min(prec * 2, pol.max_bits);
  }
}

/// Fractional part of a fixed enclosure. The input cannot be re-evaluated,
/// so an enclosure straddling an integer is an error here; use the scalar
/// overload when the input is exact.
inline BigReal frac(const BigReal& x) {
  FracEnclosure f = frac_enclosure(x);
  if (f.kind != FracEnclosure::Kind::interval)
    throw AmbiguousAtMaxPrecision("frac of enclosure straddling an integer");
  return f.a;
}

inline BigReal frac(const ExactScalar& x, const PrecisionPolicy& pol = {}) {
  if (x.is_rational()) {
    mpq_class f = x.frac_part().rat();
    return BigReal::from_mpq(f, pol.start_bits);
  }
  return refine<BigReal>(pol, "frac", [&](int prec) -> std::optional<BigReal> {
    FracEnclosure f = frac_enclosure(x.to_interval(prec));
    if (f.kind == FracEnclosure::Kind::interval) return f.a;
    return std::nullopt;
  });
}

/// ||x|| for an exact scalar; exact for rationals.
inline BigReal dist_nearest_int(const ExactScalar& x, const PrecisionPolicy& pol = {}) {
  if (x.is_rational()) {
    mpq_class f = x.frac_part().rat();
    mpq_class d = std::min(f, mpq_class(1 - f));
    return BigReal::from_mpq(d, pol.start_bits);
  }
  return refine<BigReal>(pol, "dist_nearest_int", [&](int prec) -> std::optional<BigReal> {
    BigReal d = dist_nearest_int(x.to_interval(prec));
    if (d.width_below(ldexp(1.0, -(prec / 2)))) return d;
    return std::nullopt;
  });
}

/// ||x|| for an exact rational, staying in exact arithmetic.
inline mpq_class dist_nearest_int_exact(const mpq_class& x) {
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  mpq_class f = x - mpq_class(fl);
  mpq_class g = 1 - f;
  return f <= g ? f : g;
}

namespace detail {

inline int64_t mpz_to_i64(const mpz_class& z, const char* what) {
  if (!z.fits_slong_p()) throw DomainError(std::string(what) + ": result exceeds 64-bit range");
  return static_cast<int64_t>(z.get_si());
}

}  // namespace detail

/// Exact floor(n^alpha). Integer and perfect-power cases are settled
/// symbolically; everything else escalates an enclosure of exp(alpha log n)
/// until no integer can sit inside it.
inline int64_t floor_pow(int64_t n, const ExactScalar& alpha, const PrecisionPolicy& pol = {}) {
  if (n < 1) throw DomainError("floor_pow: n must be positive");
  if (alpha.sign() <= 0) throw DomainError("floor_pow: alpha must be positive");
  if (n == 1) return 1;
  if (alpha.is_rational()) {
    const mpq_class& a = alpha.rat();
    const mpz_class& u = a.get_num();
    const mpz_class& v = a.get_den();
    if (!u.fits_ulong_p() || !v.fits_ulong_p())
      throw DomainError("floor_pow: oversized rational exponent");
    mpz_class base(n);
    if (v == 1) {
      if (u > 63) throw DomainError("floor_pow: result exceeds 64-bit range");
      mpz_class z;
      mpz_pow_ui(z.get_mpz_t(), base.get_mpz_t(), u.get_ui());
      return detail::mpz_to_i64(z, "floor_pow");
    }
    mpz_class root;
    if (mpz_root(root.get_mpz_t(), base.get_mpz_t(), v.get_ui())) {
      if (root > 1 && u > 63) throw DomainError("floor_pow: result exceeds 64-bit range");
      mpz_class z;
      mpz_pow_ui(z.get_mpz_t(), root.get_mpz_t(), u.get_ui());
      return detail::mpz_to_i64(z, "floor_pow");
    }
  }
  return refine<int64_t>(pol, "floor_pow", [&](int prec) -> std::optional<int64_t> {
    BigReal x = pow_base_ui(static_cast<unsigned long>(n), alpha.to_interval(prec));
    mpz_class fl = floor_lo(x), fh = floor_hi(x);
    if (fl == fh) return detail::mpz_to_i64(fl, "floor_pow");
    return std::nullopt;
  });
}

/// Exact ceil(y^(1/alpha)) for integer y >= 1.
inline int64_t ceil_root(int64_t y, const ExactScalar& alpha, const PrecisionPolicy& pol = {}) {
  if (y < 1) throw DomainError("ceil_root: y must be positive");
  if (alpha.sign() <= 0) throw DomainError("ceil_root: alpha must be positive");
  if (y == 1) return 1;
  if (alpha.is_rational()) {
    const mpq_class& a = alpha.rat();
    const mpz_class& u = a.get_num();
    const mpz_class& v = a.get_den();
    // the symbolic route is only worthwhile for small exponents; huge
    // denominators (seeded dyadic exponents) would blow up y^v
    if (u.fits_ulong_p() && v.fits_ulong_p() && v.get_ui() <= 64) {
      // y^(v/u) is an integer iff y^v is a perfect u-th power
      mpz_class yz(y), yv;
      mpz_pow_ui(yv.get_mpz_t(), yz.get_mpz_t(), v.get_ui());
      mpz_class root;
      if (mpz_root(root.get_mpz_t(), yv.get_mpz_t(), u.get_ui()))
        return detail::mpz_to_i64(root, "ceil_root");
    }
  }
  ExactScalar inv = ExactScalar::from_int(1) / alpha;
  return refine<int64_t>(pol, "ceil_root", [&](int prec) -> std::optional<int64_t> {
    BigReal x = dioph::pow(BigReal::from_long(static_cast<long>(y), prec), inv.to_interval(prec));
    mpz_class cl, ch;
    mpfr_get_z(cl.get_mpz_t(), x.lo(), MPFR_RNDU);
    mpfr_get_z(ch.get_mpz_t(), x.hi(), MPFR_RNDU);
    if (cl == ch) return detail::mpz_to_i64(cl, "ceil_root");
    return std::nullopt;
  });
}

/// t_a(theta) = log(a)/log(theta), the exponent change of variables.
/// Increasing on (a,1); maps a to 1 and sqrt(a) to 2. theta == a is
/// accepted and returns the exact value 1.
inline BigReal t_map(const ExactScalar& a, const ExactScalar& theta, mpfr_prec_t prec = 128) {
  ExactScalar zero = ExactScalar::from_int(0);
  ExactScalar one = ExactScalar::from_int(1);
  if (!(a > zero && a < one)) throw DomainError("t_map: a must lie in (0,1)");
  if (!(theta >= a && theta < one)) throw DomainError("t_map: theta must lie in [a,1)");
  if (theta.compare(a) == 0) return BigReal::from_long(1, prec);
  return log(a.to_interval(prec)) / log(theta.to_interval(prec));
}

/// t_map on an enclosure argument; used when theta is itself a computed
/// quantity (shifted lattice points, composed maps).
inline BigReal t_map_enc(const BigReal& a, const BigReal& theta) {
  if (mpfr_sgn(theta.lo()) <= 0 || mpfr_cmp_ui(theta.hi(), 1) >= 0)
    throw DomainError("t_map: theta enclosure must lie inside (0,1)");
  return log(a) / log(theta);
}

/// a^(1/alpha); inverse of t_map in the exponent variable. alpha == 1 is
/// accepted and returns a exactly.
inline BigReal inv_t_map(const ExactScalar& a, const ExactScalar& alpha, mpfr_prec_t prec = 128) {
  ExactScalar zero = ExactScalar::from_int(0);
  ExactScalar one = ExactScalar::from_int(1);
  if (!(a > zero && a < one)) throw DomainError("inv_t_map: a must lie in (0,1)");
  if (alpha < one) throw DomainError("inv_t_map: alpha must be at least 1");
  if (alpha.compare(one) == 0) return a.to_interval(prec);
  ExactScalar inv = one / alpha;
  return dioph::exp(inv.to_interval(prec) * log(a.to_interval(prec)));
}

/// Extended Euclid; returns x with a*x == gcd(a,m) (mod m).
inline std::optional<int64_t> mod_inverse_general(int64_t a, int64_t m) {
  if (m <= 1) return std::nullopt;
  a %= m;
  if (a < 0) a += m;
  int64_t r0 = m, r1 = a, s0 = 0, s1 = 1;
  while (r1 != 0) {
    int64_t q = r0 / r1;
    int64_t r2 = r0 - q * r1;
    int64_t s2 = s0 - q * s1;
    r0 = r1;
    r1 = r2;
    s0 = s1;
    s1 = s2;
  }
  if (r0 != 1) return std::nullopt;
  int64_t x = s0 % m;
  if (x < 0) x += m;
  return x;
}

/// The unique inverse of q modulo an odd prime p, in {1,...,p-1}.
inline int64_t mod_inverse(int64_t q, int64_t p) {
  if (p < 2) throw DomainError("mod_inverse: modulus must exceed 1");
  auto r = mod_inverse_general(q, p);
  if (!r) throw NotInvertible("mod_inverse: " + std::to_string(q) + " has no inverse mod " +
                              std::to_string(p));
  return *r;
}

inline bool is_prime(int64_t n) {
  if (n < 2) return false;
  mpz_class z(static_cast<long>(n));
  return mpz_probab_prime_p(z.get_mpz_t(), 32) != 0;
}

}  // namespace dioph
