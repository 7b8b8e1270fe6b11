#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "relaysec/dc_power_allocation.hpp"
#include "relaysec/errors.hpp"
#include "support.hpp"

using namespace relaysec;
using relaysec::testing::make_spec;
using relaysec::testing::random_channel;

namespace {

ChannelRealization single(double h_sr, double h_rd, double h_se, double h_re, double h_si, double sigma = 1.0) {
  ChannelRealization h;
  h.h_sr = {h_sr};
  h.h_rd = {h_rd};
  h.h_se = {h_se};
  h.h_re = {h_re};
  h.h_si = {h_si};
  h.sigma = sigma;
  return h;
}

DcConfig single_start() {
  DcConfig cfg;
  cfg.multistarts = 1;
  return cfg;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_CASE("no-eavesdropper FDJ-naive optimum") {
  const ProblemSpec spec = make_spec(kSR3, single(1.0, 1.0, 0.0, 0.0, 0.5));
  const DcSolution sol = solve(spec, DcConfig{});
  CHECK(sol.secrecy_rate == doctest::Approx(std::log2(6.0)).epsilon(1e-6));
  CHECK(sol.allocation.p_r1[0] == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(sol.allocation.p_s1[0] == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(sol.allocation.p_r2[0] == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(sol.all_converged());
}

TEST_CASE("HD-informed with no eavesdropper uses full power") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 20; ++i) {
    const double h_sr = testing::log_uniform(rng, 0.05, 5), h_rd = testing::log_uniform(rng, 0.05, 5);
    const double sigma = testing::log_uniform(rng, 0.1, 2);
    const ProblemSpec spec = make_spec(kSR2, single(h_sr, h_rd, 0.0, 0.0, 0.3, sigma));
    const DcSolution sol = solve(spec, single_start());
    CHECK(sol.secrecy_rate ==
          doctest::Approx(std::log2(1.0 + std::min(5.0 * h_sr, 5.0 * h_rd) / sigma)).epsilon(1e-6));
  }
}

TEST_CASE("zero budgets give the zero allocation") {
  std::mt19937_64 rng(22);
  for (ScenarioSpec sc : {kSR1, kSR2, kSR3, kSR4}) {
    const ProblemSpec spec = make_spec(sc, random_channel(rng, 3), 0.0, 0.0);
    const DcSolution sol = solve(spec, single_start());
    for (double v : sol.allocation.flatten()) CHECK(v == 0.0);
    CHECK(sol.secrecy_rate == 0.0);
    CHECK(sol.objective == 0.0);
  }
}

TEST_CASE("identical subcarriers receive equal power") {
  ChannelRealization h = single(2.0, 1.5, 0.3, 0.2, 0.1);
  for (Link link : kAllLinks) h.gains(link).push_back(h.gains(link)[0]);
  for (ScenarioSpec sc : {kSR1, kSR3, kSR4}) {
    const ProblemSpec spec = make_spec(sc, h);
    const InnerResult r = inner_solve(build_subproblem(uniform_start(spec), spec, single_start()), single_start());
    const PowerAllocation& p = r.allocation;
    CHECK(p.p_s1[0] == doctest::Approx(p.p_s1[1]).epsilon(1e-4));
    CHECK(p.p_r2[0] == doctest::Approx(p.p_r2[1]).epsilon(1e-4));
    CHECK(std::abs(p.p_r1[0] - p.p_r1[1]) <= 1e-4);
    CHECK(std::abs(p.p_s2[0] - p.p_s2[1]) <= 1e-4);
  }
}

TEST_CASE("surrogate is tight at the expansion point") {
  std::mt19937_64 rng(23);
  for (Linearization lin : {Linearization::Corrected, Linearization::PlainTangent}) {
    for (ScenarioSpec sc : {kSR1, kSR2, kSR3, kSR4}) {
      for (int i = 0; i < 20; ++i) {
        const ProblemSpec spec = make_spec(sc, random_channel(rng, 4));
        const PowerAllocation prev = testing::random_interior(rng, spec);
        const Subproblem sub(spec, prev, lin);
        CHECK(sub.objective(prev) ==
              doctest::Approx(secrecy_objective(prev, spec.channel, sc)).epsilon(1e-12));
        for (std::size_t k = 0; k < 4; ++k) {
          const SubcarrierPowers p = powers_at(prev, k);
          const SubcarrierGains g = gains_at(spec.channel, k);
          const SurrogateValues v = sub.values(k, to_vec(p));
          const SubcarrierSurrogate full = sub.evaluate(k, to_vec(p));
          const double eav = std::log2(1.0 + gamma_eav(p, g, sc));
          double varpi = v.eav[0];
          if (v.num_eav == 2) varpi = std::max(varpi, v.eav[1]);
          CHECK(varpi == doctest::Approx(eav).epsilon(1e-12));
          CHECK(v.objective() == doctest::Approx(full.objective()).epsilon(1e-12));
          CHECK(std::min(v.legit[0], v.legit[1]) ==
                doctest::Approx(std::log2(1.0 + gamma_legit(p, g, sc))).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("corrected surrogate minorizes the exact objective") {
  std::mt19937_64 rng(24);
  for (ScenarioSpec sc : {kSR1, kSR2, kSR3, kSR4}) {
    for (int i = 0; i < 30; ++i) {
      const ProblemSpec spec = make_spec(sc, random_channel(rng, 2));
      const Subproblem sub(spec, testing::random_interior(rng, spec), Linearization::Corrected);
      for (int j = 0; j < 20; ++j) {
        const PowerAllocation x = testing::random_interior(rng, spec);
        CHECK(sub.objective(x) <= secrecy_objective(x, spec.channel, sc) + 1e-12);
      }
    }
  }
}

TEST_CASE("surrogate gradients match central differences") {
  std::mt19937_64 rng(25);
  for (ScenarioSpec sc : {kSR3, kSR4}) {
    const ProblemSpec spec = make_spec(sc, random_channel(rng, 1));
    const Subproblem sub(spec, testing::random_interior(rng, spec), Linearization::Corrected);
    for (int i = 0; i < 50; ++i) {
      const Vec4 x = to_vec(powers_at(testing::random_interior(rng, spec), 0));
      const SubcarrierSurrogate s = sub.evaluate(0, x);
      for (int piece = 0; piece < s.num_eav; ++piece) {
        for (int j = 0; j < 4; ++j) {
          const double h = 1e-6 * std::max(x[j], 1e-3);
          Vec4 up = x, dn = x;
          up[j] += h;
          dn[j] -= h;
          const double fd = (sub.values(0, up).eav[piece] - sub.values(0, dn).eav[piece]) / (2.0 * h);
          CHECK(s.eav[piece].grad[j] == doctest::Approx(fd).epsilon(1e-5).scale(1e-3));
        }
      }
    }
  }
}

TEST_CASE("DC traces are feasible and monotone") {
  std::mt19937_64 rng(26);
  for (BudgetMode mode : {BudgetMode::PerSlot, BudgetMode::PerFrame}) {
    for (ScenarioSpec sc : {kSR1, kSR2, kSR3, kSR4}) {
      for (int i = 0; i < 5; ++i) {
        const ProblemSpec spec = make_spec(sc, random_channel(rng, 4), 5.0, 5.0, mode);
        const DcTrace trace = run_dc(spec, single_start(), uniform_start(spec));
        REQUIRE(!trace.iterates.empty());
        CHECK(trace.converged);
        CHECK(!trace.nonconvex_subproblems);
        double prev_sub = -1e300, prev_obj = secrecy_objective(trace.start, spec.channel, sc);
        for (const DcIterate& it : trace.iterates) {
          CHECK(is_feasible(it.allocation, spec));
          CHECK(it.subproblem_objective >= prev_sub - 1e-6);
          CHECK(it.objective >= prev_obj - 1e-6);
          prev_sub = it.subproblem_objective;
          prev_obj = it.objective;
        }
      }
    }
  }
}

TEST_CASE("solve returns the best recorded iterate") {
  std::mt19937_64 rng(27);
  for (ScenarioSpec sc : {kSR3, kSR4}) {
    const ProblemSpec spec = make_spec(sc, random_channel(rng, 4));
    DcConfig cfg;
    cfg.multistarts = 3;
    const DcSolution sol = solve(spec, cfg);
    CHECK(sol.traces.size() == 3);
    CHECK(sol.traces[0].start == uniform_start(spec));
    CHECK(is_feasible(sol.allocation, spec));
    for (const DcTrace& t : sol.traces)
      for (const DcIterate& it : t.iterates) CHECK(sol.secrecy_rate >= it.secrecy_rate);
    CHECK(sol.secrecy_rate == secrecy_rate_total(sol.allocation, spec.channel, sc));
  }
}

TEST_CASE("HD problems keep the jamming powers at zero") {
  std::mt19937_64 rng(28);
  for (ScenarioSpec sc : {kSR1, kSR2}) {
    const ProblemSpec spec = make_spec(sc, random_channel(rng, 4));
    const VariableLayout layout = make_layout(spec);
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK_FALSE(layout.free[1 * 4 + k]);
      CHECK_FALSE(layout.free[3 * 4 + k]);
    }
    const DcTrace trace = run_dc(spec, single_start(), uniform_start(spec));
    for (const DcIterate& it : trace.iterates) {
      CHECK(sum(it.allocation.p_r1) == 0.0);
      CHECK(sum(it.allocation.p_s2) == 0.0);
      // With the jamming powers at zero the FDJ rate expressions equal the HD ones.
      const ScenarioSpec fdj{Protocol::FDJ, sc.eavesdropper};
      CHECK(secrecy_objective(it.allocation, spec.channel, fdj) ==
            doctest::Approx(it.objective).epsilon(1e-12));
    }
    const DcTrace again = run_dc(spec, single_start(), uniform_start(spec));
    REQUIRE(again.iterates.size() == trace.iterates.size());
    for (std::size_t i = 0; i < trace.iterates.size(); ++i)
      CHECK(again.iterates[i].allocation == trace.iterates[i].allocation);
  }
}

TEST_CASE("plain-tangent mode runs and is flagged") {
  std::mt19937_64 rng(29);
  const ProblemSpec spec = make_spec(kSR4, random_channel(rng, 2));
  DcConfig cfg = single_start();
  cfg.linearization = Linearization::PlainTangent;
  const DcTrace trace = run_dc(spec, cfg, uniform_start(spec));
  CHECK(trace.nonconvex_subproblems);
  for (const DcIterate& it : trace.iterates) CHECK(is_feasible(it.allocation, spec));
}

TEST_CASE("infeasible expansion point") {
  std::mt19937_64 rng(30);
  const ProblemSpec spec = make_spec(kSR3, random_channel(rng, 2));
  PowerAllocation p(2);
  p.p_s1 = {3.0, 3.0};
  try {
    build_subproblem(p, spec, DcConfig{});
    FAIL("expected InfeasibleStart");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InfeasibleStart);
  }
  const ProblemSpec hd = make_spec(kSR1, random_channel(rng, 2));
  PowerAllocation jam(2);
  jam.p_r1 = {0.1, 0.0};
  CHECK_THROWS_AS(build_subproblem(jam, hd, DcConfig{}), Error);
  CHECK_NOTHROW(build_subproblem(PowerAllocation(2), spec, DcConfig{}));
}

TEST_CASE("capped simplex projection") {
  CHECK(project_capped_simplex({1.0, 2.0}, 5.0) == std::vector<double>{1.0, 2.0});
  CHECK(project_capped_simplex({-1.0, 2.0}, 5.0) == std::vector<double>{0.0, 2.0});
  const std::vector<double> p = project_capped_simplex({4.0, 3.0, -2.0}, 5.0);
  CHECK(p[0] == doctest::Approx(3.0));
  CHECK(p[1] == doctest::Approx(2.0));
  CHECK(p[2] == 0.0);
  CHECK(sum(p) <= 5.0);
  std::mt19937_64 rng(31);
  std::normal_distribution<double> n(1.0, 2.0);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> v(6);
    for (double& x : v) x = n(rng);
    const std::vector<double> q = project_capped_simplex(v, 3.0);
    CHECK(sum(q) <= 3.0);
    for (double x : q) CHECK(x >= 0.0);
  }
}

TEST_CASE("starts are feasible") {
  std::mt19937_64 rng(32);
  for (BudgetMode mode : {BudgetMode::PerSlot, BudgetMode::PerFrame}) {
    for (ScenarioSpec sc : {kSR1, kSR4}) {
      const ProblemSpec spec = make_spec(sc, random_channel(rng, 5), 2.0, 3.0, mode);
      CHECK(is_feasible(uniform_start(spec), spec));
      for (std::uint64_t s = 0; s < 50; ++s) CHECK(is_feasible(random_start(spec, s), spec));
      CHECK(random_start(spec, 7) == random_start(spec, 7));
    }
  }
}
