#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dioph/errors.hpp"
#include "dioph/families.hpp"
#include "dioph/numeric.hpp"
#include "dioph/systems.hpp"

namespace dioph {

/// sqrt of a nonnegative rational scalar, kept exact as a surd.
inline ExactScalar sqrt_scalar(const ExactScalar& x) {
  if (!x.is_rational()) throw DomainError("sqrt_scalar needs a rational argument");
  if (x.sign() < 0) throw DomainError("sqrt_scalar of a negative value");
  const mpq_class& q = x.rat();
  mpz_class uv = q.get_num() * q.get_den();
  if (!uv.fits_ulong_p()) throw DomainError("sqrt_scalar: radicand too large");
  return ExactScalar::surd(0, mpq_class(1, q.get_den()), uv.get_ui());
}

/// A finite sequence reduced to [0,1), with its provenance. Values are
/// doubles distilled from certified enclosures whose width was driven
/// below 2^-40 before rounding.
struct SequenceSample {
  std::vector<double> values;
  std::string source;

  int64_t size() const { return static_cast<int64_t>(values.size()); }
};

namespace detail {

/// Certified fractional part of gamma * n^(t_a(arg)) as a double.
inline double c1_value(const ExactScalar& a, const ExactScalar& gamma,
                       const PerturbationFamily& phi, int64_t n, const mpz_class& m,
                       const PrecisionPolicy& pol) {
  ExactScalar m_over_n = ExactScalar::from_mpz(m) / ExactScalar::from_int(static_cast<long>(n));
  for (int prec = pol.start_bits;; prec = std::min(prec * 2, pol.max_bits)) {
    BigReal shift = phi.eval(n, m_over_n.to_interval(prec), prec);
    BigReal arg = div_ui(BigReal::from_mpz(m, prec) - shift, static_cast<unsigned long>(n));
    BigReal t = t_map_enc(a.to_interval(prec), arg);
    BigReal x = gamma.to_interval(prec) * pow_base_ui(static_cast<unsigned long>(n), t);
    FracEnclosure f = frac_enclosure(x);
    if (f.kind == FracEnclosure::Kind::interval && f.a.width_below(0x1.0p-40)) {
      double v = f.a.mid_double();
      if (v >= 1.0) v = std::nextafter(1.0, 0.0);
      if (v < 0.0) v = 0.0;
      return v;
    }
    if (prec >= pol.max_bits)
      throw AmbiguousAtMaxPrecision("sequence value at m=" + m.get_str());
  }
}

}  // namespace detail

/// The equidistribution test family: fractional parts of
/// gamma * n^(t_a((m - phi_n(m/n))/n)) over m with m/n in J'.
inline SequenceSample sequence_c1(const ExactScalar& a, const ExactScalar& gamma,
                                  const PerturbationFamily& phi, int64_t n,
                                  const ScalarInterval& Jp, const PrecisionPolicy& pol = {}) {
  if (n < 1) throw DomainError("n must be positive");
  if (gamma.sign() == 0) throw DomainError("gamma must be nonzero");
  ExactScalar root_a = sqrt_scalar(a);
  if (!(Jp.lo > a) || !(Jp.hi < root_a))
    throw DomainError("closure of J' must sit inside (a, sqrt(a))");
  ExactScalar n_s = ExactScalar::from_int(static_cast<long>(n));
  ExactScalar lo = Jp.lo * n_s, hi = Jp.hi * n_s;
  mpz_class first = lo.floor() + 1;
  mpz_class last = hi.floor();
  if (ExactScalar::from_mpz(last) == hi) last -= 1;
  if (first > last) throw EmptyRange("no integer m with m/n inside J'");

  SequenceSample s;
  s.source = "c1:a=" + a.to_string() + ",gamma=" + gamma.to_string() + ",phi=" + phi.to_string() +
             ",n=" + std::to_string(n) + ",J=(" + Jp.lo.to_string() + "," + Jp.hi.to_string() +
             ")";
  s.values.reserve(static_cast<size_t>(mpz_class(last - first + 1).get_ui()));
  for (mpz_class m = first; m <= last; ++m)
    s.values.push_back(detail::c1_value(a, gamma, phi, n, m, pol));
  return s;
}

/// Unreduced generator x -> g_n(x) for the difference diagnostics, indexed
/// 1..N like the finite sequence it shadows.
struct C1Generator {
  std::function<double(int64_t)> g;
  int64_t N = 0;
};

inline C1Generator c1_generator(const ExactScalar& a, const ExactScalar& gamma,
                                const PerturbationFamily& phi, int64_t n,
                                const ScalarInterval& Jp, const PrecisionPolicy& pol = {}) {
  ExactScalar n_s = ExactScalar::from_int(static_cast<long>(n));
  ExactScalar lo = Jp.lo * n_s, hi = Jp.hi * n_s;
  mpz_class first = lo.floor();  // g(x) uses offset floor(j1 n), so m = x + first
  mpz_class last = hi.floor();
  if (ExactScalar::from_mpz(last) == hi) last -= 1;
  int64_t N = mpz_class(last - first).get_si();
  if (N < 1) throw EmptyRange("no integer m with m/n inside J'");
  C1Generator gen;
  gen.N = N;
  gen.g = [=](int64_t x) {
    mpz_class m = first + x;
    ExactScalar m_over_n = ExactScalar::from_mpz(m) / n_s;
    const int prec = std::max(pol.start_bits, 192);
    BigReal shift = phi.eval(n, m_over_n.to_interval(prec), prec);
    BigReal arg = div_ui(BigReal::from_mpz(m, prec) - shift, static_cast<unsigned long>(n));
    BigReal t = t_map_enc(a.to_interval(prec), arg);
    BigReal v = gamma.to_interval(prec) * pow_base_ui(static_cast<unsigned long>(n), t);
    return v.mid_double();
  };
  return gen;
}

/// |N^-1 sum e(b x_i)| with e(x) = exp(2 pi i x).
inline double weyl_sum(const SequenceSample& sample, int64_t b) {
  if (sample.size() < 1) throw DomainError("weyl_sum needs a nonempty sample");
  if (b == 0) throw DomainError("weyl_sum needs a nonzero frequency");
  double re = 0, im = 0;
  for (double x : sample.values) {
    double ang = 2.0 * M_PI * static_cast<double>(b) * x;
    re += std::cos(ang);
    im += std::sin(ang);
  }
  double N = static_cast<double>(sample.size());
  return std::sqrt(re * re + im * im) / N;
}

/// Lag-h difference sample: fractional parts of g(x+h) - g(x), x = 1..N-h.
inline SequenceSample vdc_difference(const std::function<double(int64_t)>& g, int64_t N,
                                     int64_t h) {
  if (h < 1) throw DomainError("lag h must be at least 1");
  if (N <= h) throw DomainError("need N > h");
  SequenceSample s;
  s.source = "vdc:h=" + std::to_string(h);
  s.values.reserve(static_cast<size_t>(N - h));
  for (int64_t x = 1; x <= N - h; ++x) {
    double d = g(x + h) - g(x);
    double f = d - std::floor(d);
    if (f >= 1.0) f = 0.0;
    s.values.push_back(f);
  }
  return s;
}

/// Exact star discrepancy by the sorted-sample formula.
inline double star_discrepancy(const SequenceSample& sample) {
  if (sample.size() < 1) throw DomainError("star_discrepancy needs a nonempty sample");
  std::vector<double> xs = sample.values;
  std::sort(xs.begin(), xs.end());
  const double N = static_cast<double>(xs.size());
  double d = 0.0;
  for (size_t i = 1; i <= xs.size(); ++i) {
    double x = xs[i - 1];
    d = std::max(d, x - (static_cast<double>(i) - 1.0) / N);
    d = std::max(d, static_cast<double>(i) / N - x);
  }
  return d;
}

struct EquidRow {
  double lo = 0, hi = 0;
  double proportion = 0;
  double length = 0;
  double deviation = 0;
};

/// Empirical proportions against interval lengths.
inline std::vector<EquidRow> equid_report(const SequenceSample& sample,
                                          const std::vector<std::pair<double, double>>& intervals) {
  std::vector<EquidRow> rows;
  for (auto [lo, hi] : intervals) {
    if (!(0 <= lo && lo < hi && hi <= 1)) throw DomainError("intervals must sit inside [0,1)");
    EquidRow row;
    row.lo = lo;
    row.hi = hi;
    int64_t c = 0;
    for (double x : sample.values)
      if (x >= lo && x < hi) ++c;
    row.proportion = sample.size() ? static_cast<double>(c) / static_cast<double>(sample.size())
                                   : 0.0;
    row.length = hi - lo;
    row.deviation = std::abs(row.proportion - row.length);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace dioph
