#pragma once

// Exact SINR and secrecy-rate evaluation for the two relay protocols
// (half-duplex DF, full-duplex relay with jamming) against naive and
// informed eavesdroppers.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relaysec/channel_model.hpp"

namespace relaysec {

enum class Protocol { HD, FDJ };
enum class Eavesdropper { Naive, Informed };

struct ScenarioSpec {
  Protocol protocol = Protocol::FDJ;
  Eavesdropper eavesdropper = Eavesdropper::Naive;

  // 1..4 for SR1 (HD, naive), SR2 (HD, informed), SR3 (FDJ, naive), SR4 (FDJ, informed).
  int index() const {
    return (protocol == Protocol::HD ? 1 : 3) + (eavesdropper == Eavesdropper::Informed ? 1 : 0);
  }
  std::string id() const { return "SR" + std::to_string(index()); }
  bool is_hd() const { return protocol == Protocol::HD; }

  static ScenarioSpec from_index(int i);
  // Accepts "sr1".."sr4" in any case.
  static std::optional<ScenarioSpec> parse(std::string_view text);

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

inline constexpr ScenarioSpec kSR1{Protocol::HD, Eavesdropper::Naive};
inline constexpr ScenarioSpec kSR2{Protocol::HD, Eavesdropper::Informed};
inline constexpr ScenarioSpec kSR3{Protocol::FDJ, Eavesdropper::Naive};
inline constexpr ScenarioSpec kSR4{Protocol::FDJ, Eavesdropper::Informed};

// Per-slot transmit powers. s1: source data (t=1), r1: relay jamming (t=1),
// r2: relay data (t=2), s2: source jamming (t=2).
struct PowerAllocation {
  std::vector<double> p_s1, p_r1, p_r2, p_s2;

  PowerAllocation() = default;
  explicit PowerAllocation(std::size_t k) : p_s1(k, 0.0), p_r1(k, 0.0), p_r2(k, 0.0), p_s2(k, 0.0) {}

  std::size_t size() const { return p_s1.size(); }
  void validate() const;

  // Flattened as [s1..., r1..., r2..., s2...].
  std::vector<double> flatten() const;
  static PowerAllocation unflatten(const std::vector<double>& flat);

  friend bool operator==(const PowerAllocation&, const PowerAllocation&) = default;
};

// Scalar views of one subcarrier.
struct SubcarrierPowers {
  double s1 = 0.0, r1 = 0.0, r2 = 0.0, s2 = 0.0;
};
struct SubcarrierGains {
  double h_sr = 0.0, h_rd = 0.0, h_se = 0.0, h_re = 0.0, h_si = 0.0;
  double sigma = 1.0;
};

SubcarrierPowers powers_at(const PowerAllocation& p, std::size_t k);
SubcarrierGains gains_at(const ChannelRealization& h, std::size_t k);

struct HopSinr {
  double relay;        // first hop (t = 1)
  double destination;  // second hop (t = 2)
  double end_to_end;   // DF: min of the two
};

// Throws HdRestrictionViolated when an HD allocation carries jamming power.
void require_hd(const SubcarrierPowers& p);

inline HopSinr gamma_hd(const SubcarrierPowers& p, const SubcarrierGains& g) {
  require_hd(p);
  const double relay = p.s1 * g.h_sr / g.sigma;
  const double dest = p.r2 * g.h_rd / g.sigma;
  return {relay, dest, std::min(relay, dest)};
}

inline HopSinr gamma_fdj(const SubcarrierPowers& p, const SubcarrierGains& g) {
  const double relay = p.s1 * g.h_sr / (g.sigma + p.r1 * g.h_si);
  const double dest = p.r2 * g.h_rd / g.sigma;
  return {relay, dest, std::min(relay, dest)};
}

inline double gamma_eav(const SubcarrierPowers& p, const SubcarrierGains& g, ScenarioSpec scenario) {
  if (scenario.is_hd()) {
    require_hd(p);
    const double from_s = p.s1 * g.h_se / g.sigma;
    const double from_r = p.r2 * g.h_re / g.sigma;
    return scenario.eavesdropper == Eavesdropper::Naive ? std::max(from_s, from_r) : from_s + from_r;
  }
  const double slot1 = p.s1 * g.h_se / (g.sigma + p.r1 * g.h_re);
  const double slot2 = p.r2 * g.h_re / (g.sigma + p.s2 * g.h_se);
  return scenario.eavesdropper == Eavesdropper::Naive ? std::max(slot1, slot2) : slot1 + slot2;
}

inline double gamma_legit(const SubcarrierPowers& p, const SubcarrierGains& g, ScenarioSpec scenario) {
  return scenario.is_hd() ? gamma_hd(p, g).end_to_end : gamma_fdj(p, g).end_to_end;
}

// Vector-level overloads; k indexes the subcarrier.
HopSinr gamma_hd(const PowerAllocation& p, const ChannelRealization& h, std::size_t k);
HopSinr gamma_fdj(const PowerAllocation& p, const ChannelRealization& h, std::size_t k);
double gamma_eav(const PowerAllocation& p, const ChannelRealization& h, std::size_t k, ScenarioSpec scenario);

// log2(1+legit) - log2(1+eav), without the [.]^+ clamp.
double subcarrier_rate_unclamped(const SubcarrierPowers& p, const SubcarrierGains& g, ScenarioSpec scenario);

struct RateReport {
  std::vector<double> per_subcarrier;  // clamped, bits/channel use
  double total = 0.0;
  double unclamped_total = 0.0;
  std::vector<double> sinr_legit;
  std::vector<double> sinr_eav;
};

RateReport secrecy_rate(const PowerAllocation& p, const ChannelRealization& h, ScenarioSpec scenario);

// Convenience: clamped total only.
double secrecy_rate_total(const PowerAllocation& p, const ChannelRealization& h, ScenarioSpec scenario);
// Unclamped objective as optimized by the power allocation problems.
double secrecy_objective(const PowerAllocation& p, const ChannelRealization& h, ScenarioSpec scenario);

}  // namespace relaysec
