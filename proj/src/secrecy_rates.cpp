#include "relaysec/secrecy_rates.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "relaysec/errors.hpp"

namespace relaysec {

ScenarioSpec ScenarioSpec::from_index(int i) {
  switch (i) {
    case 1: return kSR1;
    case 2: return kSR2;
    case 3: return kSR3;
    case 4: return kSR4;
    default: throw Error(ErrorKind::InvalidParameter, "scenario index must be 1..4");
  }
}

std::optional<ScenarioSpec> ScenarioSpec::parse(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "sr1") return kSR1;
  if (lower == "sr2") return kSR2;
  if (lower == "sr3") return kSR3;
  if (lower == "sr4") return kSR4;
  return std::nullopt;
}

void PowerAllocation::validate() const {
  const std::size_t k = p_s1.size();
  if (p_r1.size() != k || p_r2.size() != k || p_s2.size() != k)
    throw Error(ErrorKind::LengthMismatch, "power vectors differ in length");
  for (const auto* v : {&p_s1, &p_r1, &p_r2, &p_s2})
    for (double x : *v)
      if (!(x >= 0.0) || !std::isfinite(x))
        throw Error(ErrorKind::InvalidParameter, "transmit powers must be finite and >= 0");
}

std::vector<double> PowerAllocation::flatten() const {
  std::vector<double> out;
  out.reserve(4 * size());
  for (const auto* v : {&p_s1, &p_r1, &p_r2, &p_s2}) out.insert(out.end(), v->begin(), v->end());
  return out;
}

PowerAllocation PowerAllocation::unflatten(const std::vector<double>& flat) {
  if (flat.size() % 4 != 0) throw Error(ErrorKind::LengthMismatch, "flattened allocation length not divisible by 4");
  const std::size_t k = flat.size() / 4;
  PowerAllocation p(k);
  for (std::size_t i = 0; i < k; ++i) {
    p.p_s1[i] = flat[i];
    p.p_r1[i] = flat[k + i];
    p.p_r2[i] = flat[2 * k + i];
    p.p_s2[i] = flat[3 * k + i];
  }
  return p;
}

SubcarrierPowers powers_at(const PowerAllocation& p, std::size_t k) {
  return {p.p_s1[k], p.p_r1[k], p.p_r2[k], p.p_s2[k]};
}

SubcarrierGains gains_at(const ChannelRealization& h, std::size_t k) {
  return {h.h_sr[k], h.h_rd[k], h.h_se[k], h.h_re[k], h.h_si[k], h.sigma};
}

void require_hd(const SubcarrierPowers& p) {
  if (p.r1 != 0.0 || p.s2 != 0.0)
    throw Error(ErrorKind::HdRestrictionViolated, "HD-Relay requires zero jamming power (p_r1 = p_s2 = 0)");
}

HopSinr gamma_hd(const PowerAllocation& p, const ChannelRealization& h, std::size_t k) {
  return gamma_hd(powers_at(p, k), gains_at(h, k));
}

HopSinr gamma_fdj(const PowerAllocation& p, const ChannelRealization& h, std::size_t k) {
  return gamma_fdj(powers_at(p, k), gains_at(h, k));
}

double gamma_eav(const PowerAllocation& p, const ChannelRealization& h, std::size_t k, ScenarioSpec scenario) {
  return gamma_eav(powers_at(p, k), gains_at(h, k), scenario);
}

double subcarrier_rate_unclamped(const SubcarrierPowers& p, const SubcarrierGains& g, ScenarioSpec scenario) {
  return std::log2(1.0 + gamma_legit(p, g, scenario)) - std::log2(1.0 + gamma_eav(p, g, scenario));
}

RateReport secrecy_rate(const PowerAllocation& p, const ChannelRealization& h, ScenarioSpec scenario) {
  if (p.size() != h.size()) throw Error(ErrorKind::LengthMismatch, "allocation and channel differ in K");
  const std::size_t k_count = h.size();
  RateReport report;
  report.per_subcarrier.resize(k_count);
  report.sinr_legit.resize(k_count);
  report.sinr_eav.resize(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    const SubcarrierPowers pk = powers_at(p, k);
    const SubcarrierGains gk = gains_at(h, k);
    const double legit = gamma_legit(pk, gk, scenario);
    const double eav = gamma_eav(pk, gk, scenario);
    const double diff = std::log2(1.0 + legit) - std::log2(1.0 + eav);
    report.sinr_legit[k] = legit;
    report.sinr_eav[k] = eav;
    report.per_subcarrier[k] = std::max(0.0, diff);
    report.total += report.per_subcarrier[k];
    report.unclamped_total += diff;
  }
  return report;
}

double secrecy_rate_total(const PowerAllocation& p, const ChannelRealization& h, ScenarioSpec scenario) {
  return secrecy_rate(p, h, scenario).total;
}

double secrecy_objective(const PowerAllocation& p, const ChannelRealization& h, ScenarioSpec scenario) {
  return secrecy_rate(p, h, scenario).unclamped_total;
}

}  // namespace relaysec
