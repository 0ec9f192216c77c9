#pragma once

#include <cstdint>
#include <vector>

#include "dioph/errors.hpp"
#include "dioph/numeric.hpp"
#include "dioph/scalar.hpp"
#include "dioph/systems.hpp"

namespace dioph {

/// J reduced modulo 1: at most two half-open pieces of [0,1). Intervals of
/// length >= 1 cover everything.
inline std::vector<ScalarInterval> reduce_mod_1(const ScalarInterval& J) {
  if (!(J.lo < J.hi)) throw DomainError("interval must be nonempty");
  ExactScalar zero = ExactScalar::from_int(0);
  ExactScalar one = ExactScalar::from_int(1);
  ExactScalar len = J.hi - J.lo;
  if (len >= one) return {{zero, one}};
  ExactScalar u = J.lo.frac_part();
  ExactScalar v = u + len;
  if (v <= one) return {{u, v}};
  return {{u, one}, {zero, v - one}};
}

namespace detail {

inline bool in_half_open(const ExactScalar& x, const ScalarInterval& piece) {
  return x >= piece.lo && x < piece.hi;
}

}  // namespace detail

/// Exact count of l in {1..L} with {alpha l} inside J reduced mod 1. The
/// fractional parts are maintained incrementally in exact arithmetic, so
/// surd alpha costs the same as rational alpha.
inline int64_t count_in_interval(const ExactScalar& alpha, int64_t L, const ScalarInterval& J) {
  if (L < 1) throw DomainError("L must be at least 1");
  std::vector<ScalarInterval> pieces = reduce_mod_1(J);
  ExactScalar one = ExactScalar::from_int(1);
  ExactScalar step = alpha.frac_part();
  ExactScalar x = ExactScalar::from_int(0);
  int64_t count = 0;
  for (int64_t l = 1; l <= L; ++l) {
    x = x + step;
    if (x >= one) x = x - one;
    for (const auto& piece : pieces)
      if (detail::in_half_open(x, piece)) {
        ++count;
        break;
      }
  }
  return count;
}

struct DiscrepancyReport {
  int64_t count = 0;
  int64_t H = 0;
  double term_main = 0.0;    // L * lambda(J)
  double term_middle = 0.0;  // 2L / (H+1)
  double term_tail = 0.0;    // 6 sum 1/(h ||h alpha||)
  double bound = 0.0;
  bool violated = false;
};

/// The counting bound at a given H. The bound is rounded outward (up), so a
/// reported violation is a certified violation.
inline DiscrepancyReport erdos_turan_bound(const ExactScalar& alpha, int64_t L,
                                           const ScalarInterval& J, int64_t H,
                                           mpfr_prec_t prec = 192) {
  if (L < 1) throw DomainError("L must be at least 1");
  if (H < 1) throw DomainError("H must be at least 1");
  // admissibility: h * alpha must avoid the integers for h = 1..H
  if (alpha.is_rational()) {
    const mpz_class& den = alpha.rat().get_den();
    if (den <= H) throw IntegerMultiple(den.get_si());
  }
  DiscrepancyReport rep;
  rep.H = H;
  rep.count = count_in_interval(alpha, L, J);

  ExactScalar len = J.hi - J.lo;
  BigReal main = mul_si(len.to_interval(prec), static_cast<long>(L));
  mpq_class middle_q(2 * L, H + 1);
  middle_q.canonicalize();
  BigReal middle = BigReal::from_mpq(middle_q, prec);
  BigReal tail = BigReal::from_long(0, prec);
  for (int64_t h = 1; h <= H; ++h) {
    ExactScalar ha = alpha * ExactScalar::from_int(h);
    ExactScalar f = ha.frac_part();
    ExactScalar dist = f <= (ExactScalar::from_int(1) - f) ? f : ExactScalar::from_int(1) - f;
    if (dist.sign() == 0) throw IntegerMultiple(h);
    BigReal term = div_ui(BigReal::from_long(6, prec),
                          static_cast<unsigned long>(h)) /
                   dist.to_interval(prec);
    tail = tail + term;
  }
  rep.term_main = main.hi_double();
  rep.term_middle = middle.hi_double();
  rep.term_tail = tail.hi_double();
  rep.bound = rep.term_main + rep.term_middle + rep.term_tail;
  rep.violated = static_cast<double>(rep.count) > rep.bound;
  return rep;
}

/// The H used in the covering argument: floor(1/lambda(J)).
inline int64_t paper_H(const ScalarInterval& J) {
  ExactScalar len = J.hi - J.lo;
  if (len.sign() <= 0) throw DomainError("interval must be nonempty");
  mpz_class f = (ExactScalar::from_int(1) / len).floor();
  if (f < 1) return 1;
  return f.get_si();
}

/// Runs the bound for every admissible H <= H_max; a violation would expose
/// an implementation bug and is raised as an error.
inline std::vector<DiscrepancyReport> verify_lemma(const ExactScalar& alpha, int64_t L,
                                                   const ScalarInterval& J, int64_t H_max,
                                                   mpfr_prec_t prec = 192) {
  if (L < 1) throw DomainError("L must be at least 1");
  std::vector<DiscrepancyReport> out;
  for (int64_t H = 1; H <= H_max; ++H) {
    DiscrepancyReport rep;
    try {
      rep = erdos_turan_bound(alpha, L, J, H, prec);
    } catch (const IntegerMultiple&) {
      break;  // admissibility is monotone: larger H only adds multiples
    }
    if (rep.violated) throw LemmaViolation(H);
    out.push_back(rep);
  }
  return out;
}

}  // namespace dioph
