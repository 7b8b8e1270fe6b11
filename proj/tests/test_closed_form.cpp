#include <doctest.h>

#include <cmath>
#include <random>

#include "relaysec/closed_form.hpp"
#include "relaysec/errors.hpp"
#include "support.hpp"

using namespace relaysec;
using relaysec::testing::instance;

namespace {

// alpha = 1, sigma = 0.01, h_SE > alpha h_RE.
SingleCarrierInstance worked() { return instance(1.0, 1.0, 0.5, 0.4, 0.1, 0.01, 1.0); }

}  // namespace

TEST_CASE("approximate rates on the worked instance") {
  const ApproxRates r = approx_rates(worked());
  CHECK(r.sr3 == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(r.sr1 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r[3] == r.sr3);

  const ApproxSinrs s = approx_sinrs(worked());
  CHECK(s.relay_fdj == doctest::Approx(10.0));
  CHECK(s.dest_fdj == doctest::Approx(100.0));
  CHECK(s.sej == doctest::Approx(1.25));
  CHECK(s.rej == doctest::Approx(0.8));
  CHECK(s.re_hd == doctest::Approx(40.0));
}

TEST_CASE("symmetric jamming point") {
  // h_SE = alpha h_RE gives beta = alpha.
  const SingleCarrierInstance in = instance(2.0, 3.0, 0.6, 0.3, 0.05, 1e-3, 2.0);
  const ApproxSinrs s = approx_sinrs(in);
  CHECK(s.sej == doctest::Approx(1.0));
  CHECK(s.rej == doctest::Approx(1.0));
  const ApproxRates r = approx_rates(in);
  const double legit = std::log2(std::min(s.relay_fdj, s.dest_fdj));
  CHECK(r.sr3 == doctest::Approx(legit));
  CHECK(r.sr4 == doctest::Approx(legit - 1.0));
}

TEST_CASE("informed FDJ eavesdropper is beta/alpha + alpha/beta") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const SingleCarrierInstance in = relaysec::testing::sample_margin_instance(rng, 1e3, 1.0);
    const ApproxSinrs s = approx_sinrs(in);
    const double b = in.beta(), a = in.alpha;
    CHECK(s.sej + s.rej == doctest::Approx(b / a + a / b).epsilon(1e-12));
  }
}

TEST_CASE("approximations need positive divisors") {
  for (auto in : {instance(1, 1, 0.5, 0.4, 0.0, 0.01, 1), instance(1, 1, 0.0, 0.4, 0.1, 0.01, 1),
                  instance(1, 1, 0.5, 0.0, 0.1, 0.01, 1)}) {
    try {
      approx_rates(in);
      FAIL("expected ApproximationUndefined");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ApproximationUndefined);
    }
  }
  CHECK_THROWS_AS(approx_rates(instance(1, 1, 0.5, 0.4, 0.1, 0.0, 1)), Error);
  CHECK_THROWS_AS(approx_rates(instance(1, 1, 0.5, 0.4, 0.1, 0.01, 0.0)), Error);
}

TEST_CASE("non-zero conditions") {
  CHECK(check_nonzero(worked()).c01);
  // h_SE above both min terms.
  CHECK_FALSE(check_nonzero(instance(1.0, 1.0, 2.0, 0.4, 0.1, 0.01, 1.0)).c01);
  // beta = alpha with vanishing noise and SI: 2 < huge.
  CHECK(check_nonzero(instance(1.0, 1.0, 0.5, 0.5, 1e-9, 1e-9, 1.0)).c04);
  // C03: h_SE + alpha h_RE = 0.9 < 1.
  CHECK(check_nonzero(worked()).c03);
  CHECK_FALSE(check_nonzero(instance(1.0, 1.0, 0.6, 0.5, 0.1, 0.01, 1.0)).c03);
}

TEST_CASE("superiority conditions") {
  const SuperiorityConditions c = check_fdj_superior(worked());
  CHECK(c.c11);
  CHECK_FALSE(c.c12);
  CHECK_FALSE(c.c13);

  // beta = alpha = 1: the C21 bound collapses to h_SI <= h_RE.
  const SingleCarrierInstance at = instance(0.5, 1.0, 0.4, 0.4, 0.4, 1e-3, 1.0);
  CHECK(check_fdj_superior(at).c21);
  const SingleCarrierInstance above = instance(0.5, 1.0, 0.4, 0.4, 0.4000001, 1e-3, 1.0);
  CHECK_FALSE(check_fdj_superior(above).c21);

  // SI stronger than h_RE and alpha h_SI above h_SE.
  const SuperiorityConditions strong = check_fdj_superior(instance(1.0, 1.0, 0.5, 0.4, 0.9, 0.01, 1.0));
  CHECK_FALSE(strong.c11);
  CHECK_FALSE(strong.c12);
}

TEST_CASE("C11, C12 and C13 are mutually exclusive") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 5000; ++i) {
    const SingleCarrierInstance in = relaysec::testing::sample_margin_instance(rng, 1.0, 1.0, 1e-2, 1e2);
    const SuperiorityConditions c = check_fdj_superior(in);
    CHECK(int(c.c11) + int(c.c12) + int(c.c13) <= 1);
  }
}

TEST_CASE("margin test and report") {
  const SingleCarrierInstance in = worked();
  // min(alpha h_SI, h_SE, alpha h_RE) = 0.1.
  CHECK(margin_ok(in, 9.99));
  CHECK_FALSE(margin_ok(in, 10.01));
  const ConditionReport r = evaluate_conditions(in, 10.0);
  CHECK(r.margin_ok);
  CHECK(r.margin == 10.0);
  CHECK(r.superior.c11);
  CHECK(r.nonzero.c01);
}

TEST_CASE("proposition implications hold on sampled instances") {
  std::mt19937_64 rng(5);
  int superior_naive = 0, superior_informed = 0;
  for (int i = 0; i < 3000; ++i) {
    const SingleCarrierInstance in = relaysec::testing::sample_margin_instance(rng, kDefaultMargin, 10.0);
    const ConditionReport c = evaluate_conditions(in);
    const ApproxRates r = approx_rates(in);
    if (c.superior.c11 || c.superior.c12 || c.superior.c13) {
      ++superior_naive;
      CHECK(r.sr3 > r.sr1);
    }
    if ((c.superior.c21 || c.superior.c22) && c.informed_case_guard) {
      ++superior_informed;
      CHECK(r.sr4 > r.sr2);
    }
    if (c.nonzero.c01) CHECK(r.sr1 > 0.0);
    if (c.nonzero.c02) CHECK(r.sr3 > 0.0);
    if (c.nonzero.c03) CHECK(r.sr2 > 0.0);
    if (c.nonzero.c04) CHECK(r.sr4 > 0.0);
  }
  CHECK(superior_naive > 100);
  CHECK(superior_informed > 100);
}

TEST_CASE("C21/C22 are invariant under joint scaling of E gains, SI and noise") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int i = 0; i < 2000; ++i) {
    SingleCarrierInstance in = relaysec::testing::sample_margin_instance(rng, 1.0, 1.0, 1e-2, 1e2);
    const SuperiorityConditions a = check_fdj_superior(in);
    const double c = scale(rng);
    in.h_se *= c;
    in.h_re *= c;
    in.h_si *= c;
    in.sigma *= c;
    // Keep the h_SR vs alpha h_RD split unchanged.
    const SuperiorityConditions b = check_fdj_superior(in);
    CHECK(a.c21 == b.c21);
    CHECK(a.c22 == b.c22);
  }
}

TEST_CASE("HD approximation tracks the exact full-power rate without active clamp") {
  std::mt19937_64 rng(8);
  int used = 0;
  while (used < 500) {
    const SingleCarrierInstance in = relaysec::testing::sample_margin_instance(rng, 1e4, 10.0);
    const double e1 = exact_full_power_rate(in, kSR1), e2 = exact_full_power_rate(in, kSR2);
    if (!(e1 > 0.0 && e2 > 0.0)) continue;
    ++used;
    const ApproxRates r = approx_rates(in);
    CHECK(std::abs(r.sr1 - e1) <= 0.02);
    CHECK(std::abs(r.sr2 - e2) <= 0.02);
  }
}

TEST_CASE("naive FDJ eavesdropper keeps an O(1) SINR at any noise level") {
  // gamma_SEJ * gamma_REJ = 1, so log2(1 + x) and log2(x) stay apart.
  const SingleCarrierInstance in = instance(1e3, 1e3, 0.5, 0.4, 0.1, 1e-9, 1.0);
  const double exact = exact_full_power_rate(in, kSR3);
  const double approx = approx_rates(in).sr3;
  CHECK(approx - exact == doctest::Approx(std::log2(2.25 / 1.25)).epsilon(1e-3));
}

TEST_CASE("full-power allocation") {
  const SingleCarrierInstance in = instance(1, 1, 0.5, 0.4, 0.1, 0.01, 2.5);
  const PowerAllocation hd = full_power_allocation(in, kSR1);
  CHECK(hd.p_s1[0] == 1.0);
  CHECK(hd.p_r2[0] == 2.5);
  CHECK(hd.p_r1[0] == 0.0);
  const PowerAllocation fdj = full_power_allocation(in, kSR4);
  CHECK(fdj.p_r1[0] == 2.5);
  CHECK(fdj.p_s2[0] == 1.0);
}
