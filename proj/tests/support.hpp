#pragma once

// Shared instance generators for the test binaries.

#include <algorithm>
#include <cmath>
#include <random>

#include "relaysec/channel_model.hpp"
#include "relaysec/closed_form.hpp"
#include "relaysec/dc_power_allocation.hpp"
#include "relaysec/fg_bank.hpp"

namespace relaysec::testing {

// Log-uniform draw in [lo, hi].
inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

inline ChannelRealization random_channel(std::mt19937_64& rng, std::size_t k_count, double lo = 0.05,
                                         double hi = 5.0, double sigma = 1.0) {
  ChannelRealization h;
  h.sigma = sigma;
  for (Link link : kAllLinks) {
    auto& v = h.gains(link);
    v.resize(k_count);
    for (double& g : v) g = log_uniform(rng, lo, hi);
  }
  return h;
}

inline ProblemSpec make_spec(ScenarioSpec scenario, ChannelRealization channel, double p_s_max = 5.0,
                             double p_r_max = 5.0, BudgetMode mode = BudgetMode::PerSlot) {
  ProblemSpec spec;
  spec.scenario = scenario;
  spec.channel = std::move(channel);
  spec.p_s_max = p_s_max;
  spec.p_r_max = p_r_max;
  spec.budget_mode = mode;
  return spec;
}

// Strictly positive point inside the budget polytope.
inline PowerAllocation random_interior(std::mt19937_64& rng, const ProblemSpec& spec) {
  PowerAllocation p = random_start(spec, rng());
  std::vector<double> flat = p.flatten();
  const VariableLayout layout = make_layout(spec);
  for (std::size_t j = 0; j < flat.size(); ++j)
    if (layout.free[j]) flat[j] = 0.9 * flat[j] + 0.01;
  return project_feasible(PowerAllocation::unflatten(flat), spec);
}

inline SingleCarrierInstance instance(double h_sr, double h_rd, double h_se, double h_re, double h_si, double sigma,
                                      double alpha) {
  SingleCarrierInstance inst;
  inst.h_sr = h_sr;
  inst.h_rd = h_rd;
  inst.h_se = h_se;
  inst.h_re = h_re;
  inst.h_si = h_si;
  inst.sigma = sigma;
  inst.alpha = alpha;
  return inst;
}

// True when every case split used by the closed-form analysis is decided by
// at least the given factor.
inline bool far_from_boundaries(const SingleCarrierInstance& in, double factor) {
  auto far = [factor](double lhs, double rhs) { return lhs >= factor * rhs || rhs >= factor * lhs; };
  const double a = in.alpha, beta = in.beta();
  const double fdj_switch = a * a * in.h_rd * in.h_si / in.sigma;
  return far(in.h_sr, a * in.h_rd + fdj_switch) && far(in.h_sr, fdj_switch) && far(in.h_sr, a * in.h_rd) &&
         far(in.h_se, a * in.h_re) && far(in.h_si, in.h_re) && far(a * in.h_si, in.h_se) && far(in.sigma, in.h_se) &&
         far(in.h_si, in.h_re * (beta * beta + a * beta) / (beta * beta + a * a)) &&
         far(in.sigma / in.h_re, a * beta * (a + beta) / (a * a + beta * beta));
}

// Instance inside the high-SNR margin and far from every case split.
// Gains are log-uniform over [lo, hi]; sigma sits 1x..100x below the margin.
inline SingleCarrierInstance sample_margin_instance(std::mt19937_64& rng, double margin, double factor,
                                                    double lo = 1e-3, double hi = 1e3) {
  while (true) {
    SingleCarrierInstance in;
    in.h_sr = log_uniform(rng, lo, hi);
    in.h_rd = log_uniform(rng, lo, hi);
    in.h_se = log_uniform(rng, lo, hi);
    in.h_re = log_uniform(rng, lo, hi);
    in.h_si = log_uniform(rng, lo, hi);
    in.alpha = log_uniform(rng, 0.1, 10.0);
    const double cap = std::min({in.alpha * in.h_si, in.h_se, in.alpha * in.h_re}) / margin;
    in.sigma = cap / log_uniform(rng, 1.0, 100.0);
    if (margin_ok(in, margin) && far_from_boundaries(in, factor)) return in;
  }
}

// Long-double evaluation of each term from its defining expression.
inline long double fg_reference(FgTerm t, const Vec4& xd, const SubcarrierGains& gd) {
  const long double s1 = xd[0], r1 = xd[1], r2 = xd[2], s2 = xd[3];
  const long double sg = gd.sigma, sr = gd.h_sr, rd = gd.h_rd, se = gd.h_se, re = gd.h_re, si = gd.h_si;
  const long double a = r1 * re, b = s2 * se, c = s1 * se, d = r2 * re;
  switch (t) {
    case FgTerm::F_R: return std::log2(sg + r1 * si + s1 * sr);
    case FgTerm::F_SE: return std::log2(sg + r1 * re + s1 * se);
    case FgTerm::F_RE: return std::log2(sg + r2 * re + s2 * se);
    case FgTerm::F_D: return std::log2(1.0L + r2 * rd / sg);
    case FgTerm::G_R: return std::log2(sg + r1 * si);
    case FgTerm::G_SE: return std::log2(sg + r1 * re);
    case FgTerm::G_RE: return std::log2(sg + s2 * se);
    case FgTerm::F_E4: return std::log2((sg + a) * (sg + b) + c * (sg + b) + d * (sg + a));
    case FgTerm::G_E4: return std::log2((sg + a) * (sg + b));
  }
  return 0.0L;
}

}  // namespace relaysec::testing
