#include "relaysec/closed_form.hpp"

#include <algorithm>
#include <cmath>

#include "relaysec/errors.hpp"

namespace relaysec {

void SingleCarrierInstance::validate() const {
  for (double g : {h_sr, h_rd, h_se, h_re, h_si})
    if (!(g >= 0.0) || !std::isfinite(g)) throw Error(ErrorKind::InvalidParameter, "gains must be finite and >= 0");
  if (!(sigma > 0.0)) throw Error(ErrorKind::InvalidParameter, "sigma must be > 0");
  if (!(alpha > 0.0)) throw Error(ErrorKind::InvalidParameter, "alpha must be > 0");
}

namespace {

void require_divisors(const SingleCarrierInstance& inst) {
  inst.validate();
  if (inst.h_si == 0.0 || inst.h_se == 0.0 || inst.h_re == 0.0)
    throw Error(ErrorKind::ApproximationUndefined, "high-SNR approximation needs h_SI, h_SE, h_RE > 0");
}

}  // namespace

ApproxSinrs approx_sinrs(const SingleCarrierInstance& inst) {
  require_divisors(inst);
  const double a = inst.alpha;
  return ApproxSinrs{
      inst.h_sr / (a * inst.h_si),
      a * inst.h_rd / inst.sigma,
      inst.h_se / (a * inst.h_re),
      a * inst.h_re / inst.h_se,
      inst.h_sr / inst.sigma,
      a * inst.h_rd / inst.sigma,
      inst.h_se / inst.sigma,
      a * inst.h_re / inst.sigma,
  };
}

ApproxRates approx_rates(const SingleCarrierInstance& inst) {
  const ApproxSinrs s = approx_sinrs(inst);
  const double legit_hd = std::min(s.relay_hd, s.dest_hd);
  const double legit_fdj = std::min(s.relay_fdj, s.dest_fdj);
  return ApproxRates{
      std::log2(legit_hd) - std::log2(std::max(s.se_hd, s.re_hd)),
      std::log2(legit_hd) - std::log2(s.se_hd + s.re_hd),
      std::log2(legit_fdj) - std::log2(std::max(s.sej, s.rej)),
      std::log2(legit_fdj) - std::log2(s.sej + s.rej),
  };
}

NonzeroConditions check_nonzero(const SingleCarrierInstance& inst) {
  require_divisors(inst);
  const double a = inst.alpha;
  const double sig = inst.sigma;
  const double h_sr = inst.h_sr, h_rd = inst.h_rd, h_se = inst.h_se, h_re = inst.h_re, h_si = inst.h_si;
  NonzeroConditions c{};
  c.c01 = h_se < std::min(h_sr, a * h_rd) && h_re < std::min(h_rd, h_sr / a);
  c.c02 = h_se < std::min(h_sr * h_re / h_si, a * a * h_rd * h_re / sig) &&
          h_re < std::min(h_rd * h_se / sig, h_sr * h_se / (a * a * h_si));
  c.c03 = h_se + a * h_re < std::min(h_sr, a * h_rd);
  c.c04 = h_se / (a * h_re) + a * h_re / h_se < std::min(h_sr / (a * h_si), a * h_rd / sig);
  return c;
}

SuperiorityConditions check_fdj_superior(const SingleCarrierInstance& inst) {
  require_divisors(inst);
  const double a = inst.alpha;
  const double sig = inst.sigma;
  const double h_sr = inst.h_sr, h_rd = inst.h_rd, h_se = inst.h_se, h_re = inst.h_re, h_si = inst.h_si;
  const double b = inst.beta();
  const double split = a * h_rd + a * a * h_rd * h_si / sig;

  SuperiorityConditions c{};
  c.c11 = h_sr < split && h_se > a * h_re && h_si < h_re;
  c.c12 = h_sr < split && h_se <= a * h_re && a * h_si < h_se;
  c.c13 = h_sr >= split && sig < h_se;
  c.c21 = h_sr < a * h_rd && h_si <= h_re * (b * b + a * b) / (b * b + a * a);
  c.c22 = h_sr >= a * h_rd && sig / h_re <= a * b * (a + b) / (a * a + b * b);
  return c;
}

bool margin_ok(const SingleCarrierInstance& inst, double margin) {
  const double floor = std::min({inst.alpha * inst.h_si, inst.h_se, inst.alpha * inst.h_re});
  return inst.sigma <= floor / margin;
}

bool informed_case_guard(const SingleCarrierInstance& inst) {
  const double a = inst.alpha;
  if (inst.h_sr < a * inst.h_rd) return true;
  return inst.h_sr >= a * a * inst.h_rd * inst.h_si / inst.sigma;
}

ConditionReport evaluate_conditions(const SingleCarrierInstance& inst, double margin) {
  ConditionReport r;
  r.nonzero = check_nonzero(inst);
  r.superior = check_fdj_superior(inst);
  r.margin_ok = margin_ok(inst, margin);
  r.informed_case_guard = informed_case_guard(inst);
  r.margin = margin;
  return r;
}

ChannelRealization to_channel(const SingleCarrierInstance& inst) {
  ChannelRealization h;
  h.h_sr = {inst.h_sr};
  h.h_rd = {inst.h_rd};
  h.h_se = {inst.h_se};
  h.h_re = {inst.h_re};
  h.h_si = {inst.h_si};
  h.sigma = inst.sigma;
  return h;
}

PowerAllocation full_power_allocation(const SingleCarrierInstance& inst, ScenarioSpec scenario) {
  PowerAllocation p(1);
  p.p_s1[0] = 1.0;
  p.p_r2[0] = inst.alpha;
  if (!scenario.is_hd()) {
    p.p_r1[0] = inst.alpha;
    p.p_s2[0] = 1.0;
  }
  return p;
}

double exact_full_power_rate(const SingleCarrierInstance& inst, ScenarioSpec scenario) {
  return secrecy_rate(full_power_allocation(inst, scenario), to_channel(inst), scenario).unclamped_total;
}

}  // namespace relaysec
