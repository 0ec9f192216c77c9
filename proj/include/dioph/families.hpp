#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dioph/errors.hpp"
#include "dioph/interval.hpp"
#include "dioph/numeric.hpp"
#include "dioph/scalar.hpp"

namespace dioph {

/// A decay exponent: either an exact scalar or the symbolic form
/// t_a(theta) - 1, which worst-case instances need because that value is
/// irrational for typical parameters.
class Exponent {
 public:
  static Exponent exact(ExactScalar v) {
    Exponent e;
    e.exact_ = std::move(v);
    return e;
  }

  static Exponent t_minus_one(ExactScalar a, ExactScalar theta) {
    ExactScalar zero = ExactScalar::from_int(0);
    ExactScalar one = ExactScalar::from_int(1);
    if (!(a > zero && a < one)) throw DomainError("exponent base a must lie in (0,1)");
    if (!(theta > a && theta < one)) throw DomainError("exponent theta must lie in (a,1)");
    Exponent e;
    e.a_ = std::move(a);
    e.theta_ = std::move(theta);
    e.t_form_ = true;
    return e;
  }

  bool is_t_form() const { return t_form_; }
  bool is_rational() const { return !t_form_ && exact_.is_rational(); }
  const ExactScalar& scalar() const {
    if (t_form_) throw DomainError("exponent has no exact scalar form");
    return exact_;
  }
  const ExactScalar& base_a() const { return a_; }
  const ExactScalar& theta() const { return theta_; }

  BigReal eval(mpfr_prec_t prec) const {
    if (!t_form_) return exact_.to_interval(prec);
    return t_map(a_, theta_, prec) - BigReal::from_long(1, prec);
  }

  /// Certified three-way comparison against an exact scalar; nullopt means
  /// the comparison could not be settled below the precision cap.
  std::optional<int> compare(const ExactScalar& v, const PrecisionPolicy& pol = {}) const {
    if (!t_form_) return exact_.compare(v);
    // exact-equality test: t_a(theta) == v+1 <=> theta^(u) == a^(w) for
    // v+1 = u/w, all quantities rational
    ExactScalar vp1 = v + ExactScalar::from_int(1);
    if (vp1.is_rational() && a_.is_rational() && theta_.is_rational() && vp1.sign() > 0) {
      const mpq_class& r = vp1.rat();
      if (r.get_num().fits_ulong_p() && r.get_den().fits_ulong_p()) {
        mpq_class lhs, rhs;
        mpz_pow_ui(lhs.get_num_mpz_t(), theta_.rat().get_num_mpz_t(), r.get_num().get_ui());
        mpz_pow_ui(lhs.get_den_mpz_t(), theta_.rat().get_den_mpz_t(), r.get_num().get_ui());
        mpz_pow_ui(rhs.get_num_mpz_t(), a_.rat().get_num_mpz_t(), r.get_den().get_ui());
        mpz_pow_ui(rhs.get_den_mpz_t(), a_.rat().get_den_mpz_t(), r.get_den().get_ui());
        lhs.canonicalize();
        rhs.canonicalize();
        if (lhs == rhs) return 0;
      }
    }
    for (int prec = pol.start_bits;; prec = std::min(prec * 2, pol.max_bits)) {
      BigReal mine = eval(prec);
      BigReal theirs = v.to_interval(prec);
      if (cert_lt(mine, theirs) == Cert::True) return -1;
      if (cert_lt(theirs, mine) == Cert::True) return 1;
      if (prec >= pol.max_bits) return std::nullopt;
    }
  }

  std::optional<int> compare(const Exponent& o, const PrecisionPolicy& pol = {}) const {
    if (!t_form_ && !o.t_form_) return exact_.compare(o.exact_);
    if (!o.t_form_) return compare(o.exact_, pol);
    if (!t_form_) {
      auto r = o.compare(exact_, pol);
      if (!r) return std::nullopt;
      return -*r;
    }
    if (a_ == o.a_ && theta_ == o.theta_) return 0;
    for (int prec = pol.start_bits;; prec = std::min(prec * 2, pol.max_bits)) {
      BigReal mine = eval(prec);
      BigReal theirs = o.eval(prec);
      if (cert_lt(mine, theirs) == Cert::True) return -1;
      if (cert_lt(theirs, mine) == Cert::True) return 1;
      if (prec >= pol.max_bits) return std::nullopt;
    }
  }

  std::string to_string() const {
    if (!t_form_) return exact_.to_string();
    return "t(" + a_.to_string() + "," + theta_.to_string() + ")-1";
  }

 private:
  ExactScalar exact_;
  ExactScalar a_, theta_;
  bool t_form_ = false;
};

/// Accuracy family psi_n.
class PsiFamily {
 public:
  enum class Kind { power_law, constant, table };

  /// psi_n = min(c, 1/10) / n^sigma. The clamp keeps values inside the
  /// admissible range regardless of c.
  static PsiFamily power_law(const ExactScalar& c, Exponent sigma,
                             const PrecisionPolicy& pol = {}) {
    if (c.sign() <= 0) throw DomainError("psi power law: c must be positive");
    auto sc = sigma.compare(ExactScalar::from_int(0), pol);
    if (!sc || *sc <= 0) throw DomainError("psi power law: sigma must be positive");
    PsiFamily f;
    f.kind_ = Kind::power_law;
    ExactScalar tenth = ExactScalar::rational(1, 10);
    f.c_ = c > tenth ? tenth : c;
    f.sigma_ = std::move(sigma);
    return f;
  }

  static PsiFamily power_law(const ExactScalar& c, const ExactScalar& sigma) {
    return power_law(c, Exponent::exact(sigma));
  }

  /// psi_n = c with c in (0, 1/10).
  static PsiFamily constant(const ExactScalar& c) {
    if (c.sign() <= 0 || !(c < ExactScalar::rational(1, 10)))
      throw DomainError("psi constant: c must lie in (0, 1/10)");
    PsiFamily f;
    f.kind_ = Kind::constant;
    f.c_ = c;
    return f;
  }

  /// Explicit table. With extend=true, indices past the end continue
  /// geometrically with the table's final ratio; otherwise they error.
  static PsiFamily table(std::vector<ExactScalar> values, bool extend = false) {
    if (values.empty()) throw DomainError("psi table: empty");
    ExactScalar tenth = ExactScalar::rational(1, 10);
    for (const auto& v : values)
      if (v.sign() <= 0 || !(v < tenth))
        throw DomainError("psi table: values must lie in (0, 1/10)");
    if (extend) {
      if (values.size() < 2) throw DomainError("psi table: extension needs two entries");
      const ExactScalar& last = values.back();
      const ExactScalar& prev = values[values.size() - 2];
      if (!(last < prev) && !(last == prev))
        throw DomainError("psi table: extension ratio must not exceed 1");
    }
    PsiFamily f;
    f.kind_ = Kind::table;
    f.table_ = std::move(values);
    f.extend_ = extend;
    return f;
  }

  Kind kind() const { return kind_; }
  const ExactScalar& coefficient() const { return c_; }
  const Exponent& sigma() const { return sigma_; }
  const std::vector<ExactScalar>& table_values() const { return table_; }

  BigReal eval(int64_t n, mpfr_prec_t prec) const {
    if (n < 1) throw DomainError("psi: n must be positive");
    switch (kind_) {
      case Kind::constant:
        return c_.to_interval(prec);
      case Kind::power_law:
        return c_.to_interval(prec) /
               pow_base_ui(static_cast<unsigned long>(n), sigma_.eval(prec));
      case Kind::table: {
        if (static_cast<size_t>(n) <= table_.size()) return table_[n - 1].to_interval(prec);
        if (!extend_) throw DomainError("psi table: index past table length");
        ExactScalar ratio = table_.back() / table_[table_.size() - 2];
        BigReal r = ratio.to_interval(prec);
        BigReal out = table_.back().to_interval(prec);
        int64_t k = n - static_cast<int64_t>(table_.size());
        // ratio^k via exp(k log ratio)
        return out * dioph::exp(mul_si(log(std::move(r)), static_cast<long>(k)));
      }
    }
    throw DomainError("psi: bad kind");
  }

  /// Certified decision r <= psi_n for an exact rational residual. Exact
  /// whenever the family is rational-powered; Unknown only for genuinely
  /// non-rational comparisons, which callers settle with enclosures.
  Cert residual_le(const mpq_class& r, int64_t n) const {
    if (sgn(r) < 0) return Cert::True;
    switch (kind_) {
      case Kind::constant:
        if (!c_.is_rational()) return Cert::Unknown;
        return r <= c_.rat() ? Cert::True : Cert::False;
      case Kind::table: {
        if (static_cast<size_t>(n) <= table_.size()) {
          const ExactScalar& v = table_[n - 1];
          if (!v.is_rational()) return Cert::Unknown;
          return r <= v.rat() ? Cert::True : Cert::False;
        }
        return Cert::Unknown;
      }
      case Kind::power_law: {
        if (!sigma_.is_rational() || !c_.is_rational()) return Cert::Unknown;
        const mpq_class& s = sigma_.scalar().rat();
        if (!s.get_num().fits_ulong_p() || !s.get_den().fits_ulong_p()) return Cert::Unknown;
        unsigned long u = s.get_num().get_ui();
        unsigned long v = s.get_den().get_ui();
        // r <= c / n^(u/v)  <=>  r^v * n^u <= c^v
        mpq_class rv, cv;
        mpz_pow_ui(rv.get_num_mpz_t(), r.get_num_mpz_t(), v);
        mpz_pow_ui(rv.get_den_mpz_t(), r.get_den_mpz_t(), v);
        mpz_pow_ui(cv.get_num_mpz_t(), c_.rat().get_num_mpz_t(), v);
        mpz_pow_ui(cv.get_den_mpz_t(), c_.rat().get_den_mpz_t(), v);
        mpz_class nu;
        mpz_ui_pow_ui(nu.get_mpz_t(), static_cast<unsigned long>(n), u);
        rv *= mpq_class(nu);
        rv.canonicalize();
        cv.canonicalize();
        return rv <= cv ? Cert::True : Cert::False;
      }
    }
    return Cert::Unknown;
  }

  /// Exact rational value when the family provides one at index n.
  std::optional<mpq_class> rational_value(int64_t n) const {
    if (kind_ == Kind::constant && c_.is_rational()) return c_.rat();
    if (kind_ == Kind::table && static_cast<size_t>(n) <= table_.size() &&
        table_[n - 1].is_rational())
      return table_[n - 1].rat();
    if (kind_ == Kind::power_law && c_.is_rational() && sigma_.is_rational() &&
        sigma_.scalar().is_integer()) {
      mpz_class nu;
      unsigned long u = sigma_.scalar().rat().get_num().get_ui();
      mpz_ui_pow_ui(nu.get_mpz_t(), static_cast<unsigned long>(n), u);
      mpq_class out = c_.rat() / mpq_class(nu);
      out.canonicalize();
      return out;
    }
    return std::nullopt;
  }

  std::string to_string() const {
    switch (kind_) {
      case Kind::power_law:
        return "power:" + c_.to_string() + "," + sigma_.to_string();
      case Kind::constant:
        return "const:" + c_.to_string();
      case Kind::table: {
        std::string s = "table:";
        for (size_t i = 0; i < table_.size(); ++i)
          s += (i ? "," : "") + table_[i].to_string();
        if (extend_) s += ",...";
        return s;
      }
    }
    return "?";
  }

 private:
  Kind kind_ = Kind::constant;
  ExactScalar c_;
  Exponent sigma_;
  std::vector<ExactScalar> table_;
  bool extend_ = false;
};

/// Perturbation family phi_n(theta) with closed-form derivatives.
class PerturbationFamily {
 public:
  enum class Kind { zero, sinusoid, ps_shift };

  static PerturbationFamily zero() { return PerturbationFamily(); }

  /// phi_n(theta) = sin(n^kappa theta) / n^delta
  static PerturbationFamily sinusoid(ExactScalar kappa, ExactScalar delta) {
    PerturbationFamily f;
    f.kind_ = Kind::sinusoid;
    f.kappa_ = std::move(kappa);
    f.delta_ = std::move(delta);
    return f;
  }

  /// phi_n(theta) = kappa * theta / (t_a(theta) * n^(t_a(theta)-1))
  static PerturbationFamily ps_shift(ExactScalar a, ExactScalar kappa) {
    ExactScalar zero_s = ExactScalar::from_int(0);
    ExactScalar one = ExactScalar::from_int(1);
    if (!(a > zero_s && a < one)) throw DomainError("ps_shift: a must lie in (0,1)");
    PerturbationFamily f;
    f.kind_ = Kind::ps_shift;
    f.a_ = std::move(a);
    f.kappa_ = std::move(kappa);
    if (f.kappa_.sign() == 0) f.kind_ = Kind::zero;  // degenerate
    return f;
  }

  Kind kind() const { return kind_; }
  bool is_zero() const { return kind_ == Kind::zero; }
  const ExactScalar& kappa() const { return kappa_; }
  const ExactScalar& delta() const { return delta_; }
  const ExactScalar& base_a() const { return a_; }

  /// phi_n over a theta enclosure; evaluated on a whole interval this gives
  /// a certified range bound.
  BigReal eval(int64_t n, const BigReal& theta, mpfr_prec_t prec) const {
    switch (kind_) {
      case Kind::zero:
        return BigReal::from_long(0, prec);
      case Kind::sinusoid: {
        BigReal nk = pow_base_ui(static_cast<unsigned long>(n), kappa_.to_interval(prec));
        BigReal s = dioph::sin(nk * theta);
        return s / pow_base_ui(static_cast<unsigned long>(n), delta_.to_interval(prec));
      }
      case Kind::ps_shift: {
        BigReal t = t_map_enc(a_.to_interval(prec), theta);
        BigReal nexp =
            pow_base_ui(static_cast<unsigned long>(n), t - BigReal::from_long(1, prec));
        return kappa_.to_interval(prec) * theta / (t * nexp);
      }
    }
    throw DomainError("phi: bad kind");
  }

  /// phi_n'(theta), closed form.
  BigReal eval_deriv(int64_t n, const BigReal& theta, mpfr_prec_t prec) const {
    switch (kind_) {
      case Kind::zero:
        return BigReal::from_long(0, prec);
      case Kind::sinusoid: {
        BigReal nk = pow_base_ui(static_cast<unsigned long>(n), kappa_.to_interval(prec));
        BigReal c = dioph::cos(nk * theta);
        BigReal nd = pow_base_ui(static_cast<unsigned long>(n), delta_.to_interval(prec));
        return nk * c / nd;
      }
      case Kind::ps_shift: {
        // kappa / n^(t-1) * ( log n / log theta + (1 + log theta) / log a )
        BigReal t = t_map_enc(a_.to_interval(prec), theta);
        BigReal ln_n = log_ui(static_cast<unsigned long>(n), prec);
        BigReal ln_th = log(theta);
        BigReal ln_a = log(a_.to_interval(prec));
        BigReal one = BigReal::from_long(1, prec);
        BigReal nexp = pow_base_ui(static_cast<unsigned long>(n), t - one);
        return kappa_.to_interval(prec) * (ln_n / ln_th + (one + ln_th) / ln_a) / nexp;
      }
    }
    throw DomainError("phi: bad kind");
  }

  /// Certified upper bound for sup |phi_n| over the closure of J.
  BigReal sup_abs(int64_t n, const BigReal& j_closure, mpfr_prec_t prec) const {
    if (kind_ == Kind::zero) return BigReal::from_long(0, prec);
    if (n == 0) throw DomainError("phi: n must be positive");
    return abs(eval(n, j_closure, prec));
  }

  BigReal sup_abs_deriv(int64_t n, const BigReal& j_closure, mpfr_prec_t prec) const {
    if (kind_ == Kind::zero) return BigReal::from_long(0, prec);
    return abs(eval_deriv(n, j_closure, prec));
  }

  std::string to_string() const {
    switch (kind_) {
      case Kind::zero:
        return "zero";
      case Kind::sinusoid:
        return "sin:" + kappa_.to_string() + "," + delta_.to_string();
      case Kind::ps_shift:
        return "psshift:" + a_.to_string() + "," + kappa_.to_string();
    }
    return "?";
  }

 private:
  Kind kind_ = Kind::zero;
  ExactScalar kappa_, delta_, a_;
};

/// Twist family rho_n(theta).
class TwistFamily {
 public:
  enum class Kind { none, power_phase_fixed, power_phase_theta };

  static TwistFamily none() { return TwistFamily(); }

  /// rho_n = gamma * n^alpha (does not depend on theta)
  static TwistFamily power_phase(ExactScalar gamma, ExactScalar alpha) {
    if (gamma.sign() == 0) throw DomainError("twist: gamma must be nonzero");
    TwistFamily f;
    f.kind_ = Kind::power_phase_fixed;
    f.gamma_ = std::move(gamma);
    f.alpha_ = std::move(alpha);
    return f;
  }

  /// rho_n(theta) = gamma * n^(t_a(theta))
  static TwistFamily power_phase_theta(ExactScalar gamma, ExactScalar a) {
    if (gamma.sign() == 0) throw DomainError("twist: gamma must be nonzero");
    ExactScalar zero_s = ExactScalar::from_int(0);
    ExactScalar one = ExactScalar::from_int(1);
    if (!(a > zero_s && a < one)) throw DomainError("twist: a must lie in (0,1)");
    TwistFamily f;
    f.kind_ = Kind::power_phase_theta;
    f.gamma_ = std::move(gamma);
    f.a_ = std::move(a);
    return f;
  }

  Kind kind() const { return kind_; }
  bool is_none() const { return kind_ == Kind::none; }
  const ExactScalar& gamma() const { return gamma_; }
  const ExactScalar& alpha() const { return alpha_; }
  const ExactScalar& base_a() const { return a_; }

  BigReal eval(int64_t n, const BigReal& theta, mpfr_prec_t prec) const {
    switch (kind_) {
      case Kind::none:
        throw DomainError("twist: none has no value");
      case Kind::power_phase_fixed:
        return gamma_.to_interval(prec) *
               pow_base_ui(static_cast<unsigned long>(n), alpha_.to_interval(prec));
      case Kind::power_phase_theta: {
        BigReal t = t_map_enc(a_.to_interval(prec), theta);
        return gamma_.to_interval(prec) * pow_base_ui(static_cast<unsigned long>(n), t);
      }
    }
    throw DomainError("twist: bad kind");
  }

  std::string to_string() const {
    switch (kind_) {
      case Kind::none:
        return "none";
      case Kind::power_phase_fixed:
        return "phase:" + gamma_.to_string() + "," + alpha_.to_string();
      case Kind::power_phase_theta:
        return "phase-t:" + gamma_.to_string() + "," + a_.to_string();
    }
    return "?";
  }

 private:
  Kind kind_ = Kind::none;
  ExactScalar gamma_, alpha_, a_;
};

}  // namespace dioph
