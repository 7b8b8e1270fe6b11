#pragma once

// Monte Carlo sweeps over eavesdropper distance ratio, self-interference
// level and source power budget.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "relaysec/channel_model.hpp"
#include "relaysec/dc_power_allocation.hpp"
#include "relaysec/secrecy_rates.hpp"

namespace relaysec {

struct ExperimentConfig {
  std::vector<double> ratios{0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1};
  std::vector<double> rhos{0.01, 0.1, 0.3, 0.6};
  std::vector<double> ps_max_sweep{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::size_t trials = 1000;
  std::size_t num_subcarriers = 16;
  std::vector<ScenarioSpec> scenarios{kSR1, kSR2, kSR3, kSR4};
  std::uint64_t seed = 0;
  bool optimize = true;

  Geometry geometry;  // ratio_sr_se is overwritten per cell
  double zeta = 4.0;
  double sigma = 1.0;
  double p_s_max = 5.0;
  double p_r_max = 5.0;
  BudgetMode budget_mode = BudgetMode::PerSlot;
  DcConfig dc = sweep_dc_defaults();

  // Fixed coordinates for the power sweep.
  double power_sweep_ratio = 1.0;
  double power_sweep_rho = 0.01;

  unsigned threads = 0;  // 0: default_thread_count(); never affects results

  void validate() const;
  static DcConfig sweep_dc_defaults();
};

inline constexpr double kPowerSweepAnchor = 5.0;

struct ResultRow {
  double ratio = 0.0;
  double rho = 0.0;
  double ps_max = 0.0;
  ScenarioSpec scenario;
  double mean_rate = 0.0;
  double std_rate = 0.0;
  std::optional<double> eta_s;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::size_t nonconverged = 0;  // DC solves that hit the iteration cap
};

// Clamped secrecy rate of one trial: DC-optimized or uniform full power.
struct TrialOutcome {
  double rate = 0.0;
  bool converged = true;
};
TrialOutcome evaluate_trial(const ProblemSpec& spec, const DcConfig& dc, bool optimize);

std::vector<ResultRow> run_ratio_sweep(const ExperimentConfig& cfg);
std::vector<ResultRow> run_power_sweep(const ExperimentConfig& cfg);

std::string rows_to_csv(const std::vector<ResultRow>& rows);

// Population statistics helpers used by the sweeps.
double mean_of(const std::vector<double>& v);
double sample_std(const std::vector<double>& v);

}  // namespace relaysec
