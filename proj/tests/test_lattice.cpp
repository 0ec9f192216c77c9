#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <dioph/lattice.hpp>
#include <dioph/rng.hpp>

using namespace dioph;

namespace {

ExactScalar S(const char* s) { return ExactScalar::parse(s); }

LatticeQuery make_query(int64_t p, int64_t Q, std::vector<int64_t> qset, ExactScalar L,
                        ExactScalar j1, ExactScalar j2) {
  LatticeQuery q;
  q.p = p;
  q.Q = Q;
  q.qset = std::move(qset);
  q.L = BoundValue::exact(std::move(L));
  q.J = {std::move(j1), std::move(j2)};
  return q;
}

}  // namespace

TEST_CASE("count_basic pinned examples") {
  auto q1 = make_query(3, 5, {5}, S("1"), S("0"), S("1"));
  CHECK(count_basic(q1).count == 2);  // (5,1,2), (5,2,3)
  CHECK(count_basic_oracle(q1) == 2);

  auto q2 = make_query(5, 7, {7}, S("1"), S("0"), S("1"));
  CHECK(count_basic(q2).count == 2);  // (7,2,3), (7,3,4)
  CHECK(count_basic_oracle(q2) == 2);

  auto q3 = make_query(3, 5, {}, S("1"), S("0"), S("1"));
  CHECK(count_basic(q3).count == 0);

  // exhaustive enumeration, r in {1..5}: (4,1,1),(4,2,3),(4,3,4),(4,4,5),(4,5,7)
  auto q4 = make_query(3, 4, {4}, S("1"), S("0"), S("2"));
  CHECK(count_basic_oracle(q4) == 5);
  CHECK(count_basic(q4).count == 5);

  auto bad = make_query(3, 5, {5}, S("0.5"), S("0"), S("1"));
  CHECK_THROWS_AS(count_basic(bad), InvalidQuery);
}

TEST_CASE("count_basic equals oracle and congruence route on a random family") {
  SplitMix64 rng(2024);
  int checked = 0;
  for (int64_t p : {3, 5, 7, 11, 13}) {
    for (int rep = 0; rep < 12; ++rep) {
      int64_t Q = p + 1 + static_cast<int64_t>(rng.next() % 30);
      std::vector<int64_t> qset;
      for (int64_t q = Q; q < 2 * Q; ++q)
        if (q % p != 0 && rng.next() % 3 == 0) qset.push_back(q);
      long j1n = static_cast<long>(rng.next() % 200) - 100;
      long width = 1 + static_cast<long>(rng.next() % 300);
      ExactScalar j1 = ExactScalar::rational(j1n, 100);
      ExactScalar j2 = ExactScalar::rational(j1n + width, 100);
      long Ln = 1 + static_cast<long>(rng.next() % 4);
      auto q = make_query(p, Q, qset, ExactScalar::from_int(Ln), j1, j2);
      int64_t fast = count_basic(q).count;
      CHECK(fast == count_basic_oracle(q));
      CHECK(fast == count_basic_congruence(q));
      ++checked;
    }
  }
  CHECK(checked == 60);
}

TEST_CASE("count monotone in L and in the band") {
  auto base = make_query(5, 8, {8, 9, 11}, S("1"), S("0.1"), S("1.3"));
  int64_t c1 = count_basic(base).count;
  auto bigger_L = base;
  bigger_L.L = BoundValue::exact(S("3"));
  CHECK(count_basic(bigger_L).count >= c1);
  auto bigger_set = base;
  bigger_set.qset = {8, 9, 11, 12, 13};
  CHECK(count_basic(bigger_set).count >= c1);
}

TEST_CASE("omega") {
  auto q = make_query(101, 150, {151}, S("1"), S("0"), S("1"));
  q.phi = PerturbationFamily::zero();
  OmegaReport om = omega(q);
  CHECK(om.omega == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(om.hypothesis_ok);  // 10 max(1/101, 1/15150, 0) = 0.0990... <= 0.1

  auto q2 = make_query(7, 10, {11}, S("1"), S("0"), S("1"));
  q2.phi = PerturbationFamily::zero();
  OmegaReport om2 = omega(q2);
  CHECK_FALSE(om2.hypothesis_ok);  // 10/7 > 0.1

  auto q3 = make_query(7, 10, {11}, S("1"), S("0.5"), S("0.5"));
  q3.phi = PerturbationFamily::zero();
  CHECK_THROWS_AS(omega(q3), InvalidQuery);  // empty J

  CHECK_THROWS_AS(omega(make_query(7, 10, {11}, S("1"), S("0"), S("1"))), InvalidQuery);
}

TEST_CASE("count_perturbed pinned examples") {
  auto q1 = make_query(3, 5, {5}, S("1"), S("0"), S("1"));
  q1.phi = PerturbationFamily::zero();
  CHECK(count_perturbed(q1).count == 2);  // both s/q constraints inactive here
  CHECK(count_perturbed_oracle(q1) == 2);

  // frozen from an exhaustive 256-bit scan: 6 tuples
  auto q2 = make_query(11, 16, {17, 19}, S("2"), S("0.2"), S("0.9"));
  q2.phi = PerturbationFamily::sinusoid(S("1/3"), S("1/6"));
  CountReport rep = count_perturbed(q2);
  CHECK(rep.count == 6);
  CHECK(count_perturbed_oracle(q2) == 6);
  CHECK(rep.bound_basic > 0);
}

TEST_CASE("count_perturbed with zero phi equals doubly-constrained basic count") {
  SplitMix64 rng(99);
  for (int rep = 0; rep < 10; ++rep) {
    int64_t p = (rep % 2) ? 5 : 7;
    int64_t Q = p + 2 + static_cast<int64_t>(rng.next() % 10);
    std::vector<int64_t> qset;
    for (int64_t q = Q; q < 2 * Q; ++q)
      if (q % p != 0 && rng.next() % 2 == 0) qset.push_back(q);
    auto q = make_query(p, Q, qset, ExactScalar::from_int(1 + static_cast<long>(rng.next() % 3)),
                        S("0.05"), S("1.15"));
    q.phi = PerturbationFamily::zero();
    // direct reference with both constraints
    int64_t ref = 0;
    for (int64_t qq : q.qset) {
      for (int64_t r = 1; r * 100 < 115 * p; ++r) {
        if (!(ExactScalar::rational(r, 1) * S("100") > S("5") * ExactScalar::from_int(p)))
          continue;
        for (int64_t s = 1; s * 100 < 115 * qq; ++s) {
          if (!(ExactScalar::rational(s, 1) * S("100") > S("5") * ExactScalar::from_int(qq)))
            continue;
          mpz_class v = abs(mpz_class(qq) * r - mpz_class(q.p) * s);
          if (q.L.compare_int(v) <= 0) ++ref;
        }
      }
    }
    CHECK(count_perturbed(q).count == ref);
  }
}

TEST_CASE("count_perturbed equals its oracle on seeded queries") {
  SplitMix64 rng(5150);
  for (int rep = 0; rep < 12; ++rep) {
    int64_t p = (rep % 3 == 0) ? 3 : (rep % 3 == 1 ? 5 : 11);
    int64_t Q = p + 2 + static_cast<int64_t>(rng.next() % 8);
    std::vector<int64_t> qset;
    for (int64_t q = Q; q < 2 * Q; ++q)
      if (q % p != 0 && rng.next() % 2 == 0) qset.push_back(q);
    auto q = make_query(p, Q, qset, ExactScalar::from_int(1 + static_cast<long>(rng.next() % 2)),
                        S("0.2"), S("0.9"));
    q.phi = (rep % 2) ? PerturbationFamily::sinusoid(S("1/3"), S("1/6"))
                      : PerturbationFamily::zero();
    CHECK(count_perturbed(q).count == count_perturbed_oracle(q));
  }
}

TEST_CASE("overlap_query_from_systems") {
  // power-law psi: L = 4 * 32 * 0.1 / sqrt(11) = 12.8/sqrt(11) = 3.8591...
  auto psi = PsiFamily::power_law(S("0.1"), S("0.5"));
  LatticeQuery q = overlap_query_from_systems(11, 16, psi, PerturbationFamily::zero(),
                                              {S("0"), S("1")});
  CHECK(q.L.value_double() == doctest::Approx(3.8593335).epsilon(1e-5));
  CHECK(q.L.floor_value() == 3);  // exact: 3^2*11 = 99 <= 163.84 < 176 = 4^2*11
  CHECK(q.L.ceil_value() == 4);
  CHECK(q.qset.size() == 15);  // 16..31 minus {22}
  for (int64_t qq : q.qset) CHECK(qq % 11 != 0);

  // table psi with psi_13 = 1/40: L = 4 * 40 / 40 = 4
  std::vector<ExactScalar> tbl;
  for (int i = 0; i < 13; ++i) tbl.push_back(ExactScalar::rational(1, 40));
  auto psi_t = PsiFamily::table(tbl, false);
  LatticeQuery qt = overlap_query_from_systems(13, 20, psi_t, PerturbationFamily::zero(),
                                               {S("0"), S("1")});
  CHECK(qt.L.compare_int(4) == 0);

  CHECK_THROWS_AS(
      overlap_query_from_systems(13, 11, psi, PerturbationFamily::zero(), {S("0"), S("1")}),
      InvalidQuery);
}

TEST_CASE("bound ratio stays controlled over a doubling family") {
  // recorded empirical behavior; the asymptotic constant is unspecified, so
  // only a generous fixed ceiling is asserted
  double worst = 0.0;
  for (int k = 3; k <= 7; ++k) {
    int64_t Q = int64_t(1) << k;
    std::vector<int64_t> qset;
    for (int64_t q = Q; q < 2 * Q; ++q)
      if (q % 5 != 0) qset.push_back(q);
    auto q = make_query(5, Q, qset, S("2"), S("0.1"), S("0.9"));
    CountReport rep = count_basic(q);
    worst = std::max(worst, rep.ratio);
  }
  CHECK(worst < 5.0);
  CHECK(worst > 0.0);
}
