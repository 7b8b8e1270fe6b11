#pragma once

// Brute-force grid search over the power allocation for small K. Used as an
// independent check on the DC solver.

#include <cstdint>

#include "relaysec/dc_power_allocation.hpp"

namespace relaysec {

struct GridSpec {
  int steps_per_axis = 101;
  // Evaluate an FDJ problem with r1 = s2 = 0 pinned (drops those axes).
  bool pin_jamming_zero = false;
  unsigned threads = 0;  // 0: default_thread_count()
};

inline constexpr double kMaxGridPoints = 1e9;
inline constexpr std::size_t kMaxGridVariables = 6;

struct GridResult {
  PowerAllocation allocation;
  double secrecy_rate = 0.0;
  std::uint64_t points_evaluated = 0;  // budget-feasible points
};

// Throws GridTooLarge when the grid guard trips.
GridResult grid_search(const ProblemSpec& spec, const GridSpec& grid);

// Lipschitz-style allowance for one grid cell: the largest sampled gradient
// norm of the clamped rate times the cell diagonal.
double discretization_allowance(const ProblemSpec& spec, const GridSpec& grid, std::uint64_t seed = 0,
                                int samples = 256);

struct OracleVerdict {
  bool pass = false;
  double dc_rate = 0.0;
  double oracle_rate = 0.0;
  double raw_gap = 0.0;  // oracle - dc
  double allowance = 0.0;
  double net_gap = 0.0;  // raw_gap - allowance
  bool dc_converged = false;
  PowerAllocation dc_allocation;
  PowerAllocation oracle_allocation;
};

OracleVerdict validate_dc(const ProblemSpec& spec, const GridSpec& grid, const DcConfig& cfg, double slack);

unsigned default_thread_count();

}  // namespace relaysec
