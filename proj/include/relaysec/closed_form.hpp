#pragma once

// Single-carrier high-SNR analysis: approximate rates with all noise terms
// dropped against interference, the non-zero secrecy conditions C01-C04 and
// the FDJ-over-HD superiority conditions C11-C13 (naive) and C21-C22
// (informed). P_S^max is normalised to 1 and alpha = P_R^max / P_S^max.

#include "relaysec/channel_model.hpp"
#include "relaysec/secrecy_rates.hpp"

namespace relaysec {

struct SingleCarrierInstance {
  double h_sr = 0.0, h_rd = 0.0, h_se = 0.0, h_re = 0.0, h_si = 0.0;
  double sigma = 1.0;
  double alpha = 1.0;

  double beta() const { return h_se / h_re; }
  void validate() const;
};

inline constexpr double kDefaultMargin = 1e3;

// Approximate SINRs; FDJ slot SINRs have noise dropped against SI/jamming,
// HD SINRs are plain SNRs.
struct ApproxSinrs {
  double relay_fdj, dest_fdj, sej, rej;
  double relay_hd, dest_hd, se_hd, re_hd;
};

struct ApproxRates {
  double sr1, sr2, sr3, sr4;  // unclamped, bits

  double operator[](int i) const {
    switch (i) {
      case 1: return sr1;
      case 2: return sr2;
      case 3: return sr3;
      default: return sr4;
    }
  }
};

ApproxSinrs approx_sinrs(const SingleCarrierInstance& inst);
ApproxRates approx_rates(const SingleCarrierInstance& inst);

struct NonzeroConditions {
  bool c01, c02, c03, c04;
};
NonzeroConditions check_nonzero(const SingleCarrierInstance& inst);

struct SuperiorityConditions {
  bool c11, c12, c13, c21, c22;
};
SuperiorityConditions check_fdj_superior(const SingleCarrierInstance& inst);

// sigma <= min(alpha h_SI, h_SE, alpha h_RE) / margin.
bool margin_ok(const SingleCarrierInstance& inst, double margin = kDefaultMargin);

// The informed-eavesdropper comparison assumes the FDJ end-to-end SINR takes
// the same branch as HD: relay-limited when h_SR < alpha h_RD, destination-
// limited (h_SR >= alpha^2 h_RD h_SI / sigma) otherwise.
bool informed_case_guard(const SingleCarrierInstance& inst);

struct ConditionReport {
  NonzeroConditions nonzero;
  SuperiorityConditions superior;
  bool margin_ok = false;
  bool informed_case_guard = false;
  double margin = kDefaultMargin;
};

ConditionReport evaluate_conditions(const SingleCarrierInstance& inst, double margin = kDefaultMargin);

// K = 1 channel and full-power allocations (P_S = 1, P_R = alpha) for
// comparing the approximation against the exact engine.
ChannelRealization to_channel(const SingleCarrierInstance& inst);
PowerAllocation full_power_allocation(const SingleCarrierInstance& inst, ScenarioSpec scenario);
double exact_full_power_rate(const SingleCarrierInstance& inst, ScenarioSpec scenario);

}  // namespace relaysec
