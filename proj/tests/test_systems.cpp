#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <dioph/systems.hpp>

#include <set>
#include <vector>

using namespace dioph;

namespace {

ExactScalar S(const char* s) { return ExactScalar::parse(s); }

SystemInstance basic_instance(PsiFamily psi, PerturbationFamily phi = PerturbationFamily::zero(),
                              TwistFamily rho = TwistFamily::none(),
                              ExactScalar j1 = ExactScalar::from_int(0),
                              ExactScalar j2 = ExactScalar::from_int(1)) {
  SystemInstance inst{ScalarInterval{j1, j2}, std::move(psi), std::move(phi), std::move(rho),
                      ScalarInterval{ExactScalar::from_int(0), ExactScalar::from_int(1)}};
  return inst;
}

std::vector<int64_t> passing_ns(const std::vector<SolutionRecord>& recs) {
  std::vector<int64_t> out;
  for (const auto& r : recs) out.push_back(r.n);
  return out;
}

// Test-side oracle: an independent raw-mpfr scan of the sinusoid system at
// 256 bits, deciding by a wide sign margin. Margins were checked to be far
// from zero on this input set, so the point evaluation is trustworthy.
std::vector<int64_t> sinusoid_oracle_scan(const mpq_class& theta, int64_t n_max) {
  std::vector<int64_t> out;
  mpfr_t th, nk, x, psi, tmp;
  mpfr_inits2(256, th, nk, x, psi, tmp, (mpfr_ptr) nullptr);
  mpfr_set_q(th, theta.get_mpq_t(), MPFR_RNDN);
  for (int64_t n = 1; n <= n_max; ++n) {
    mpfr_set_si(nk, static_cast<long>(n), MPFR_RNDN);
    mpfr_rootn_ui(nk, nk, 3, MPFR_RNDN);        // n^(1/3)
    mpfr_mul(x, nk, th, MPFR_RNDN);             // n^(1/3) theta
    mpfr_sin(x, x, MPFR_RNDN);
    mpfr_set_si(tmp, static_cast<long>(n), MPFR_RNDN);
    mpfr_rootn_ui(tmp, tmp, 6, MPFR_RNDN);      // n^(1/6)
    mpfr_div(x, x, tmp, MPFR_RNDN);             // phi_n(theta)
    mpfr_mul_si(tmp, th, static_cast<long>(n), MPFR_RNDN);
    mpfr_add(x, x, tmp, MPFR_RNDN);             // theta n + phi
    // distance to nearest integer
    mpfr_round(tmp, x);
    mpfr_sub(x, x, tmp, MPFR_RNDN);
    mpfr_abs(x, x, MPFR_RNDN);
    mpfr_set_si(psi, static_cast<long>(n), MPFR_RNDN);
    mpfr_rootn_ui(psi, psi, 3, MPFR_RNDN);
    mpfr_ui_div(psi, 1, psi, MPFR_RNDN);
    mpfr_div_ui(psi, psi, 10, MPFR_RNDN);       // psi_n = 0.1 / n^(1/3)
    mpfr_sub(tmp, x, psi, MPFR_RNDN);
    REQUIRE(std::abs(mpfr_get_d(tmp, MPFR_RNDN)) > 1e-20);  // margin check
    if (mpfr_sgn(tmp) <= 0) out.push_back(n);
  }
  mpfr_clears(th, nk, x, psi, tmp, (mpfr_ptr) nullptr);
  return out;
}

}  // namespace

TEST_CASE("eval_instance basics") {
  auto inst = basic_instance(PsiFamily::power_law(S("0.1"), S("0.5")));
  SolutionRecord r = eval_instance(inst, ExactScalar::rational(1, 2), 2);
  CHECK(r.passed);
  CHECK(r.residual.mid_double() == 0.0);

  r = eval_instance(inst, ExactScalar::rational(1, 2), 3);
  CHECK_FALSE(r.passed);
  CHECK(r.residual.mid_double() == 0.5);

  // oscillating perturbation at theta = 0 has zero residual
  auto inst2 = basic_instance(PsiFamily::power_law(S("0.1"), S("0.5")),
                              PerturbationFamily::sinusoid(S("1/3"), S("1/6")),
                              TwistFamily::none(), S("-1"), S("1"));
  r = eval_instance(inst2, ExactScalar::from_int(0), 5);
  CHECK(r.passed);
  CHECK(r.residual.mid_double() == 0.0);

  CHECK_THROWS_AS(eval_instance(inst, ExactScalar::from_int(2), 1), DomainError);
}

TEST_CASE("solve_system on exact rotations") {
  auto inst = basic_instance(PsiFamily::power_law(S("0.1"), S("0.5")));
  CHECK(passing_ns(solve_system(inst, ExactScalar::rational(1, 2), 1, 10)) ==
        std::vector<int64_t>{2, 4, 6, 8, 10});
  CHECK(passing_ns(solve_system(inst, ExactScalar::rational(1, 3), 1, 9)) ==
        std::vector<int64_t>{3, 6, 9});
  // truncation by max_solutions
  CHECK(passing_ns(solve_system(inst, ExactScalar::rational(1, 2), 1, 10, 2)) ==
        std::vector<int64_t>{2, 4});
  // primes-only restriction of the same scan
  CHECK(passing_ns(solve_system(inst, ExactScalar::rational(1, 2), 1, 10, -1, {}, true)) ==
        std::vector<int64_t>{2});
}

TEST_CASE("solve_system pinned sinusoid scan") {
  // frozen from a 256-bit independent scan; first entries and count, then
  // cross-checked in full against the in-test oracle
  static const std::vector<int64_t> frozen_head = {7,   20,  25,  43,  74,  92, 105,
                                                   235, 248, 295, 329, 363, 397};
  auto inst = basic_instance(PsiFamily::power_law(S("1/10"), S("1/3")),
                             PerturbationFamily::sinusoid(S("1/3"), S("1/6")));
  ExactScalar theta = S("0.618034");
  auto recs = solve_system(inst, theta, 1, 10000);
  auto ns = passing_ns(recs);
  CHECK(ns.size() == 141);
  REQUIRE(ns.size() >= frozen_head.size());
  for (size_t i = 0; i < frozen_head.size(); ++i) CHECK(ns[i] == frozen_head[i]);
  CHECK(ns == sinusoid_oracle_scan(theta.rat(), 10000));
  // every record satisfies the defining inequality with certified values
  for (const auto& r : recs) CHECK(r.passed);
}

TEST_CASE("solve matches eval on random instances") {
  auto inst = basic_instance(PsiFamily::constant(S("0.09")));
  ExactScalar theta = S("0.7320508");
  auto ns = passing_ns(solve_system(inst, theta, 1, 300));
  std::set<int64_t> set(ns.begin(), ns.end());
  for (int64_t n = 1; n <= 300; ++n)
    CHECK(eval_instance(inst, theta, n).passed == (set.count(n) > 0));
}

TEST_CASE("target_intervals") {
  auto inst = basic_instance(PsiFamily::constant(S("0.09")));
  auto tis = target_intervals(inst, 10);
  REQUIRE(tis.size() == 9);
  for (int i = 0; i < 9; ++i) {
    CHECK(tis[i].m == i + 1);
    CHECK(tis[i].center.mid_double() == doctest::Approx((i + 1) / 10.0).epsilon(1e-12));
    CHECK(tis[i].half_width.mid_double() == doctest::Approx(0.0045).epsilon(1e-12));
  }

  auto narrow = basic_instance(PsiFamily::constant(S("0.09")), PerturbationFamily::zero(),
                               TwistFamily::none(), S("0.3"), S("0.45"));
  auto tis2 = target_intervals(narrow, 10);
  REQUIRE(tis2.size() == 1);
  CHECK(tis2[0].m == 4);
  CHECK(tis2[0].center.mid_double() == doctest::Approx(0.4).epsilon(1e-12));

  // with the power-shift perturbation, center moves to (4 - phi_10(0.4))/10;
  // frozen from a 256-bit closed-form evaluation
  auto shifted = basic_instance(PsiFamily::constant(S("0.09")),
                                PerturbationFamily::ps_shift(S("1/4"), S("1")),
                                TwistFamily::none(), S("0.3"), S("0.45"));
  auto tis3 = target_intervals(shifted, 10);
  REQUIRE(tis3.size() == 1);
  CHECK(tis3[0].center.mid_double() ==
        doctest::Approx(0.39188485594309393567352085274).epsilon(1e-13));

  CHECK_THROWS_AS(target_intervals(narrow, 1), EmptyRange);
}

TEST_CASE("target interval interiors solve the system") {
  // phi = 0: membership in a target interval forces a pass outright
  auto inst = basic_instance(PsiFamily::constant(S("0.09")));
  auto tis = target_intervals(inst, 10);
  auto dyadic = [](double c) {
    // nearest 2^-40 dyadic rational; exact as a scalar
    long k = static_cast<long>(c * (1LL << 40));
    return ExactScalar::rational(mpq_class(mpz_class(k), mpz_class(1L) << 40));
  };
  for (const auto& ti : tis) {
    for (double off : {-0.4, 0.0, 0.4}) {
      double c = ti.center.mid_double() + off * 2 * ti.half_width.mid_double();
      ExactScalar theta = dyadic(c);
      if (!(theta > inst.J.lo && theta < inst.J.hi)) continue;
      CHECK(eval_instance(inst, theta, 10).passed);
    }
  }
  // shifted variant at large n
  auto shifted = basic_instance(PsiFamily::power_law(S("0.09"), S("1/4")),
                                PerturbationFamily::ps_shift(S("1/4"), S("1")),
                                TwistFamily::none(), S("0.3"), S("0.45"));
  auto tis2 = target_intervals(shifted, 1000);
  auto dyadic2 = [](double c) {
    long k = static_cast<long>(c * (1LL << 40));
    return ExactScalar::rational(mpq_class(mpz_class(k), mpz_class(1L) << 40));
  };
  int checked = 0;
  for (size_t k = 0; k < tis2.size(); k += 37) {
    ExactScalar theta = dyadic2(tis2[k].center.mid_double());
    CHECK(eval_instance(shifted, theta, 1000).passed);
    ++checked;
  }
  CHECK(checked > 2);
}

TEST_CASE("perturbation derivative matches finite differences") {
  auto families = {PerturbationFamily::sinusoid(S("1/3"), S("1/6")),
                   PerturbationFamily::ps_shift(S("1/4"), S("1"))};
  for (const auto& phi : families) {
    for (long n : {3L, 17L, 500L}) {
      ExactScalar theta = S("0.37");
      ExactScalar h = ExactScalar::rational(1, 1 << 20);
      BigReal d = phi.eval_deriv(n, theta.to_interval(192), 192);
      BigReal fd = (phi.eval(n, (theta + h).to_interval(192), 192) -
                    phi.eval(n, (theta - h).to_interval(192), 192)) /
                   mul_si(h.to_interval(192), 2);
      CHECK(std::abs(d.mid_double() - fd.mid_double()) <
            1e-9 + d.radius_double() + fd.radius_double());
    }
  }
}

TEST_CASE("check_hypotheses analytic classifications") {
  // plain power law in the convergent-sum regime
  auto inst = basic_instance(PsiFamily::power_law(S("1"), S("0.5")));
  auto rep = check_hypotheses(inst, 1000);
  for (const char* k : {"A1", "A2", "A3", "A4"})
    CHECK(rep.at(k).verdict == Verdict::holds_analytically);
  CHECK(rep.at("B3").verdict == Verdict::holds_analytically);
  CHECK(rep.at("C2").verdict == Verdict::holds_analytically);

  // sigma = 1.5 breaks the prime-sum divergence
  auto fast = basic_instance(PsiFamily::power_law(S("0.1"), S("1.5")));
  CHECK(check_hypotheses(fast, 1000).at("A4").verdict == Verdict::fails);
  // boundary sigma = 1: the prime harmonic series still diverges
  auto edge = basic_instance(PsiFamily::power_law(S("0.1"), S("1")));
  CHECK(check_hypotheses(edge, 1000).at("A4").verdict == Verdict::holds_analytically);

  // oscillating example: B1, B3, B4 hold; B2 fails because sup|phi'|
  // grows like n^(kappa-delta) when kappa > delta
  auto osc = basic_instance(PsiFamily::power_law(S("1"), S("1/3")),
                            PerturbationFamily::sinusoid(S("1/3"), S("1/6")));
  auto orep = check_hypotheses(osc, 1000);
  CHECK(orep.at("B1").verdict == Verdict::holds_analytically);
  CHECK(orep.at("B2").verdict == Verdict::fails);
  CHECK(orep.at("B3").verdict == Verdict::holds_analytically);
  CHECK(orep.at("B4").verdict == Verdict::holds_analytically);
  // decaying-frequency variant keeps B2
  auto calm = basic_instance(PsiFamily::power_law(S("1"), S("1/3")),
                             PerturbationFamily::sinusoid(S("1/8"), S("1/6")));
  CHECK(check_hypotheses(calm, 1000).at("B2").verdict == Verdict::holds_analytically);

  // constant psi: A1 must fail
  auto con = basic_instance(PsiFamily::constant(S("0.05")));
  auto crep = check_hypotheses(con, 1000);
  CHECK(crep.at("A1").verdict == Verdict::fails);
  CHECK(crep.at("A2").verdict == Verdict::holds_analytically);
  CHECK(crep.at("A4").verdict == Verdict::holds_analytically);
}

TEST_CASE("check_hypotheses truncation evidence for tables") {
  std::vector<ExactScalar> vals;
  for (int i = 1; i <= 64; ++i) vals.push_back(ExactScalar::rational(1, 20 + i));
  auto inst = basic_instance(PsiFamily::table(vals, false));
  auto rep = check_hypotheses(inst, 1000);
  CHECK(rep.at("A2").verdict == Verdict::holds_on_truncation);
  CHECK(rep.at("A3").verdict == Verdict::holds_on_truncation);
  CHECK(rep.at("A3").diagnostic > 1.0);
  CHECK(rep.at("A1").verdict == Verdict::indeterminate);
  CHECK(rep.at("A4").verdict == Verdict::indeterminate);

  // a table with a monotonicity break in psi_n / n
  std::vector<ExactScalar> bad = {S("1/30"), S("1/40"), S("1/11")};
  auto inst2 = basic_instance(PsiFamily::table(bad, false));
  auto rep2 = check_hypotheses(inst2, 1000);
  CHECK(rep2.at("A2").verdict == Verdict::fails);
  CHECK(rep2.at("A2").diagnostic == 3.0);
}

TEST_CASE("survey_measure pigeonhole regime") {
  auto inst = basic_instance(PsiFamily::constant(S("0.09")));
  SurveyReport rep = survey_measure(inst, 100, 1000, 1, 42);
  CHECK(rep.fraction == 1.0);
  CHECK(rep.determinate_count == 100);
  CHECK(rep.per_theta.size() == 100);

  CHECK_THROWS_AS(survey_measure(inst, 0, 10, 1, 1), DomainError);
}

TEST_CASE("survey_measure convergent regime stays near zero") {
  auto inst = basic_instance(PsiFamily::power_law(S("0.1"), S("1.5")));
  SurveyReport rep = survey_measure(inst, 100, 100000, 3, 7);
  // frozen regression: with this seed no sample reaches 3 hits
  CHECK(rep.fraction <= 0.05);
  CHECK(rep.determinate_count == 100);
}

TEST_CASE("survey_measure is seed-deterministic across worker counts") {
  auto inst = basic_instance(PsiFamily::power_law(S("0.1"), S("0.5")));
  SurveyReport a = survey_measure(inst, 24, 2000, 5, 123, {}, 1);
  SurveyReport b = survey_measure(inst, 24, 2000, 5, 123, {}, 8);
  REQUIRE(a.per_theta.size() == b.per_theta.size());
  for (size_t i = 0; i < a.per_theta.size(); ++i) {
    CHECK(a.per_theta[i].theta == b.per_theta[i].theta);
    CHECK(a.per_theta[i].hits == b.per_theta[i].hits);
  }
  CHECK(a.fraction == b.fraction);
}

TEST_CASE("hit counts dominate pointwise when the accuracy shrinks slower") {
  auto slow = basic_instance(PsiFamily::power_law(S("0.1"), S("0.5")));
  auto fast = basic_instance(PsiFamily::power_law(S("0.1"), S("1.5")));
  for (const char* t : {"0.1375", "0.61", "0.934"}) {
    ExactScalar theta = S(t);
    for (int64_t n_max : {200, 1000, 5000}) {
      CHECK(count_solutions(slow, theta, 1, n_max) >= count_solutions(fast, theta, 1, n_max));
    }
  }
}

TEST_CASE("twist membership filters solutions") {
  // rho_n = n * golden ratio equidistributes; half-length window should
  // cut the solution count roughly in half
  auto full = basic_instance(PsiFamily::power_law(S("0.1"), S("0.5")));
  SystemInstance half = full;
  half.rho = TwistFamily::power_phase(S("0.6180339887498948482"), S("1"));
  half.I = ScalarInterval{S("0"), S("0.5")};
  ExactScalar theta = S("0.381966");
  auto all = passing_ns(solve_system(full, theta, 1, 4000));
  auto cut = passing_ns(solve_system(half, theta, 1, 4000));
  CHECK(cut.size() < all.size());
  CHECK(cut.size() > 0);
  // twisted solutions are a subset
  std::set<int64_t> allset(all.begin(), all.end());
  for (int64_t n : cut) CHECK(allset.count(n) == 1);
}
