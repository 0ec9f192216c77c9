#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <regex>
#include <string>
#include <utility>

#include "dioph/errors.hpp"
#include "dioph/interval.hpp"

namespace dioph {

/// Exact scalar input: a rational (possibly entered as a decimal literal,
/// which is remembered for round-tripping) or a quadratic surd
/// p + q*sqrt(d) with rational p, q and non-square d >= 2. Surds are what
/// let callers pass sqrt(2) or (1+sqrt(5))/2 without any rounding.
class ExactScalar {
 public:
  ExactScalar() : p_(0), q_(0), d_(0) {}

  static ExactScalar from_int(long v) {
    ExactScalar s;
    s.p_ = v;
    return s;
  }

  static ExactScalar from_mpz(const mpz_class& v) {
    ExactScalar s;
    s.p_ = v;
    return s;
  }

  static ExactScalar rational(mpq_class v) {
    ExactScalar s;
    v.canonicalize();
    s.p_ = std::move(v);
    return s;
  }

  static ExactScalar rational(long num, long den) {
    if (den == 0) throw DomainError("zero denominator");
    mpq_class q(num, den);
    q.canonicalize();
    return rational(q);
  }

  static ExactScalar surd(mpq_class p, mpq_class q, unsigned long d) {
    p.canonicalize();
    q.canonicalize();
    ExactScalar s;
    if (q == 0) {
      s.p_ = std::move(p);
      return s;
    }
    // pull square factors out of d
    mpz_class root, rem, dd(d);
    mpz_sqrtrem(root.get_mpz_t(), rem.get_mpz_t(), dd.get_mpz_t());
    if (rem == 0) {
      s.p_ = p + q * mpq_class(root);
      return s;
    }
    for (unsigned long f = 2; f * f <= d; ++f) {
      while (d % (f * f) == 0) {
        d /= f * f;
        q *= static_cast<long>(f);
      }
    }
    s.p_ = std::move(p);
    s.q_ = std::move(q);
    s.d_ = d;
    return s;
  }

  static ExactScalar sqrt_of(unsigned long d) { return surd(0, 1, d); }

  /// Decimal literal, e.g. "0.618034" = 618034/10^6. The literal is kept
  /// for round-tripping.
  static ExactScalar decimal(const std::string& text);

  static ExactScalar parse(const std::string& text);

  bool is_rational() const { return d_ == 0; }
  bool is_integer() const { return d_ == 0 && p_.get_den() == 1; }
  const mpq_class& rat() const {
    if (!is_rational()) throw DomainError("not a rational scalar: " + to_string());
    return p_;
  }
  const mpq_class& rational_part() const { return p_; }
  const mpq_class& surd_coeff() const { return q_; }
  unsigned long surd_radicand() const { return d_; }

  BigReal to_interval(mpfr_prec_t prec) const {
    BigReal r = BigReal::from_mpq(p_, prec);
    if (d_ != 0) {
      BigReal rt = dioph::sqrt(BigReal::from_long(static_cast<long>(d_), prec));
      r = r + BigReal::from_mpq(q_, prec) * rt;
    }
    return r;
  }

  /// Exact sign. Surds resolve by comparing p^2 against q^2 d.
  int sign() const {
    if (d_ == 0) return sgn(p_);
    int sq = sgn(q_);
    int sp = sgn(p_);
    if (sp == 0) return sq;
    if (sp == sq) return sp;
    // p and q*sqrt(d) pull in opposite directions
    mpq_class lhs = p_ * p_;
    mpq_class rhs = q_ * q_ * static_cast<long>(d_);
    int c = cmp(lhs, rhs);
    if (c == 0) return 0;
    // |p| dominates iff p^2 > q^2 d
    return c > 0 ? sp : sq;
  }

  ExactScalar operator-() const {
    ExactScalar s = *this;
    s.p_ = -s.p_;
    s.q_ = -s.q_;
    s.literal_.clear();
    return s;
  }

  friend ExactScalar operator+(const ExactScalar& a, const ExactScalar& b) {
    if (a.d_ != 0 && b.d_ != 0 && a.d_ != b.d_)
      throw DomainError("incompatible radicals in scalar arithmetic");
    ExactScalar s;
    s.p_ = a.p_ + b.p_;
    s.q_ = a.q_ + b.q_;
    s.d_ = a.d_ != 0 ? a.d_ : b.d_;
    if (s.q_ == 0) s.d_ = 0;
    return s;
  }

  friend ExactScalar operator-(const ExactScalar& a, const ExactScalar& b) { return a + (-b); }

  friend ExactScalar operator*(const ExactScalar& a, const ExactScalar& b) {
    ExactScalar s;
    if (a.d_ == 0 || b.d_ == 0 || a.d_ == b.d_) {
      unsigned long d = a.d_ != 0 ? a.d_ : b.d_;
      if (a.d_ != 0 && b.d_ != 0) {
        s.p_ = a.p_ * b.p_ + a.q_ * b.q_ * static_cast<long>(d);
        s.q_ = a.p_ * b.q_ + a.q_ * b.p_;
      } else {
        s.p_ = a.p_ * b.p_;
        s.q_ = a.d_ != 0 ? a.q_ * b.p_ : b.q_ * a.p_;
      }
      s.d_ = d;
      if (s.q_ == 0) s.d_ = 0;
      return s;
    }
    throw DomainError("incompatible radicals in scalar arithmetic");
  }

  friend ExactScalar operator/(const ExactScalar& a, const ExactScalar& b) {
    if (b.sign() == 0) throw DomainError("scalar division by zero");
    if (b.d_ == 0) {
      ExactScalar s = a;
      s.p_ /= b.p_;
      s.q_ /= b.p_;
      s.literal_.clear();
      return s;
    }
    // multiply by the conjugate
    ExactScalar conj;
    conj.p_ = b.p_;
    conj.q_ = -b.q_;
    conj.d_ = b.d_;
    mpq_class norm = b.p_ * b.p_ - b.q_ * b.q_ * static_cast<long>(b.d_);
    ExactScalar s = a * conj;
    s.p_ /= norm;
    s.q_ /= norm;
    if (s.q_ == 0) s.d_ = 0;
    return s;
  }

  /// Exact total order. Cross-radical comparisons refine enclosures; two
  /// distinct surd forms can never be equal, so this terminates.
  int compare(const ExactScalar& o) const {
    if (d_ == 0 || o.d_ == 0 || d_ == o.d_) return (*this - o).sign();
    if (p_ == o.p_ && q_ == o.q_ && d_ == o.d_) return 0;
    for (mpfr_prec_t prec = 128; prec <= 1 << 20; prec *= 2) {
      BigReal x = to_interval(prec);
      BigReal y = o.to_interval(prec);
      Cert c = cert_lt(x, y);
      if (c == Cert::True) return -1;
      if (c == Cert::False && cert_lt(y, x) == Cert::True) return 1;
    }
    throw AmbiguousAtMaxPrecision("scalar comparison");
  }

  bool operator<(const ExactScalar& o) const { return compare(o) < 0; }
  bool operator==(const ExactScalar& o) const { return compare(o) == 0; }
  bool operator<=(const ExactScalar& o) const { return compare(o) <= 0; }
  bool operator>(const ExactScalar& o) const { return compare(o) > 0; }
  bool operator>=(const ExactScalar& o) const { return compare(o) >= 0; }

  /// Exact floor. Terminates for surds because they are irrational.
  mpz_class floor() const {
    if (d_ == 0) {
      mpz_class z;
      mpz_fdiv_q(z.get_mpz_t(), p_.get_num_mpz_t(), p_.get_den_mpz_t());
      return z;
    }
    for (mpfr_prec_t prec = 128; prec <= 1 << 20; prec *= 2) {
      BigReal x = to_interval(prec);
      mpz_class fl = floor_lo(x), fh = floor_hi(x);
      if (fl == fh) return fl;
    }
    throw AmbiguousAtMaxPrecision("floor of surd");
  }

  /// Exact fractional part in [0,1).
  ExactScalar frac_part() const {
    ExactScalar s = *this - from_mpz(floor());
    s.literal_.clear();
    return s;
  }

  double to_double() const { return to_interval(64).mid_double(); }

  std::string to_string() const {
    if (!literal_.empty()) return literal_;
    auto rat_str = [](const mpq_class& v) { return v.get_str(); };
    if (d_ == 0) return rat_str(p_);
    std::string out;
    if (p_ != 0) out += rat_str(p_) + (sgn(q_) >= 0 ? "+" : "");
    if (q_ == 1) {
    } else if (q_ == -1) {
      out += "-";
    } else {
      out += rat_str(q_) + "*";
    }
    out += "sqrt(" + std::to_string(d_) + ")";
    return out;
  }

 private:
  mpq_class p_;  // rational part
  mpq_class q_;  // coefficient of sqrt(d_); zero when rational
  unsigned long d_ = 0;
  std::string literal_;  // original decimal text, when constructed from one

  friend class ScalarLiteral;
};

inline ExactScalar ExactScalar::decimal(const std::string& text) {
  static const std::regex re(R"(^([+-]?)(\d*)\.(\d+)$)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) throw ParseError("not a decimal literal: " + text);
  const std::string digits = m[2].str() + m[3].str();
  mpz_class num(digits.empty() ? "0" : digits, 10);
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, m[3].str().size());
  mpq_class q(num, den);
  q.canonicalize();
  if (m[1].str() == "-") q = -q;
  ExactScalar s = rational(q);
  s.literal_ = text;
  return s;
}

inline ExactScalar ExactScalar::parse(const std::string& text) {
  static const std::regex int_re(R"(^[+-]?\d+$)");
  static const std::regex frac_re(R"(^([+-]?\d+)/(\d+)$)");
  static const std::regex dec_re(R"(^[+-]?\d*\.\d+$)");
  static const std::regex sqrt_re(R"(^sqrt\((\d+)\)$)");
  // A+B*sqrt(D), with rational A and B
  static const std::regex surd_re(
      R"(^([+-]?\d+(?:/\d+)?)\s*([+-])\s*(?:(\d+(?:/\d+)?)\s*\*\s*)?sqrt\((\d+)\)$)");
  // (P+Q*sqrt(D))/R
  static const std::regex paren_re(
      R"(^\(\s*([+-]?\d+)\s*([+-])\s*(?:(\d+)\s*\*\s*)?sqrt\((\d+)\)\s*\)\s*/\s*(\d+)$)");

  std::smatch m;
  if (std::regex_match(text, m, int_re)) return rational(mpq_class(text, 10));
  if (std::regex_match(text, m, frac_re)) {
    mpq_class q(text, 10);
    if (q.get_den() == 0) throw ParseError("zero denominator: " + text);
    q.canonicalize();
    return rational(q);
  }
  if (std::regex_match(text, m, dec_re)) return decimal(text);
  if (std::regex_match(text, m, sqrt_re)) {
    unsigned long d = std::stoul(m[1].str());
    if (d == 0) return from_int(0);
    return sqrt_of(d);
  }
  if (std::regex_match(text, m, surd_re)) {
    mpq_class a(m[1].str(), 10);
    a.canonicalize();
    mpq_class b = m[3].str().empty() ? mpq_class(1) : mpq_class(m[3].str(), 10);
    b.canonicalize();
    if (m[2].str() == "-") b = -b;
    return surd(a, b, std::stoul(m[4].str()));
  }
  if (std::regex_match(text, m, paren_re)) {
    mpq_class p(m[1].str(), 10);
    mpq_class q = m[3].str().empty() ? mpq_class(1) : mpq_class(m[3].str(), 10);
    if (m[2].str() == "-") q = -q;
    mpq_class r(m[5].str(), 10);
    if (r == 0) throw ParseError("zero denominator: " + text);
    return surd(p / r, q / r, std::stoul(m[4].str()));
  }
  throw ParseError("cannot parse scalar: " + text);
}

}  // namespace dioph
