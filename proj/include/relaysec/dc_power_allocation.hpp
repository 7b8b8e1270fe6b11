#pragma once

// Multi-carrier secrecy-rate power allocation by DC programming (successive
// convex approximation).
//
// Each outer iteration replaces the non-concave parts of every subcarrier's
//   min(log2(1+gamma_R), log2(1+gamma_D)) - log2(1+gamma_E)
// by first-order expansions around the previous allocation, solves the
// resulting convex program, and stops once consecutive allocations differ by
// at most epsilon in Euclidean norm.

#include <cstdint>
#include <string>
#include <vector>

#include "relaysec/channel_model.hpp"
#include "relaysec/fg_bank.hpp"
#include "relaysec/secrecy_rates.hpp"

namespace relaysec {

enum class BudgetMode {
  PerSlot,   // sum_k s1 <= Ps, sum_k s2 <= Ps, sum_k r1 <= Pr, sum_k r2 <= Pr
  PerFrame,  // sum_k (s1 + s2) <= Ps, sum_k (r1 + r2) <= Pr
};

enum class Linearization {
  // Legitimate side: tangent of g_R. Eavesdropper side: the
  // f-term is replaced by a first-order-tight convex majorant and the g-term
  // is kept, so every subproblem is convex and minorizes the true objective.
  Corrected,
  // f-term kept, g-term tangent-linearized in the eavesdropper constraints.
  // Non-convex; solved best-effort.
  PlainTangent,
};

struct ProblemSpec {
  ScenarioSpec scenario;
  ChannelRealization channel;
  double p_s_max = 5.0;
  double p_r_max = 5.0;
  BudgetMode budget_mode = BudgetMode::PerSlot;

  void validate() const;
};

struct DcConfig {
  double epsilon = 1e-3;
  int max_outer_iters = 200;
  double inner_tol = 1e-7;
  Linearization linearization = Linearization::Corrected;
  int multistarts = 5;
  std::uint64_t start_seed = 0;
  int max_newton_steps = 400;
  // Expand around an extrapolated point P(l) + beta (P(l) - P(l-1)) when it
  // improves the exact objective over P(l).
  bool extrapolate = true;
};

// Budget bookkeeping over the flattened [s1.., r1.., r2.., s2..] layout.
struct BudgetGroup {
  std::vector<std::size_t> members;  // flat indices of free variables
  double budget = 0.0;
};

struct VariableLayout {
  std::size_t num_subcarriers = 0;
  std::vector<bool> free;  // per flat index
  std::vector<BudgetGroup> groups;
};

VariableLayout make_layout(const ProblemSpec& spec);

// Exact feasibility check: nonnegativity, HD zeros, every budget sum.
bool is_feasible(const PowerAllocation& p, const ProblemSpec& spec, double rel_tol = 0.0);

// Euclidean projection onto {x >= 0, sum x <= budget}.
std::vector<double> project_capped_simplex(std::vector<double> v, double budget);
// Projects every budget group; fixed variables are set to zero.
PowerAllocation project_feasible(const PowerAllocation& p, const ProblemSpec& spec);

PowerAllocation uniform_start(const ProblemSpec& spec);
PowerAllocation random_start(const ProblemSpec& spec, std::uint64_t seed);

// Subproblem surrogate pieces for one subcarrier. legit holds the two upper
// bounds on pi^k (C43, C44); eav holds the lower bounds on varpi^k (two for
// a naive eavesdropper, one for an informed one).
struct SurrogatePiece {
  double value = 0.0;
  Vec4 grad = Vec4::Zero();
  Mat4 hess = Mat4::Zero();
};

struct SubcarrierSurrogate {
  SurrogatePiece legit[2];
  SurrogatePiece eav[2];
  int num_eav = 0;

  double objective() const;  // min(legit) - max(eav)
};

// Values only, for line searches.
struct SurrogateValues {
  double legit[2];
  double eav[2];
  int num_eav = 0;

  double objective() const;
};

class Subproblem {
 public:
  Subproblem(const ProblemSpec& spec, const PowerAllocation& expansion_point, Linearization linearization);

  const ProblemSpec& spec() const { return *spec_; }
  const PowerAllocation& expansion_point() const { return prev_; }
  const VariableLayout& layout() const { return layout_; }
  Linearization linearization() const { return linearization_; }
  bool convex() const { return linearization_ == Linearization::Corrected; }

  SubcarrierSurrogate evaluate(std::size_t k, const Vec4& x, bool with_hessian = true) const;
  SurrogateValues values(std::size_t k, const Vec4& x) const;
  // Sum over subcarriers of (pi^k - varpi^k) with pi, varpi eliminated.
  double objective(const PowerAllocation& p) const;

 private:
  const ProblemSpec* spec_;
  PowerAllocation prev_;
  Linearization linearization_;
  VariableLayout layout_;

  // Per-subcarrier data fixed by the expansion point.
  struct Linearized {
    double value = 0.0;
    Vec4 grad = Vec4::Zero();
    double at(const Vec4& x, const Vec4& x0) const { return value + grad.dot(x - x0); }
  };
  struct Expansion {
    SubcarrierGains gains;
    Vec4 x0 = Vec4::Zero();
    Linearized t0, t1;  // tangents of the linearized eav terms
    Linearized g_r;     // tangent of g_R
    double q0 = 1.0;    // informed polynomial at x0
  };
  std::vector<Expansion> cache_;
};

// Throws InfeasibleStart when prev violates the budgets.
Subproblem build_subproblem(const PowerAllocation& prev, const ProblemSpec& spec, const DcConfig& cfg);

struct InnerResult {
  PowerAllocation allocation;
  double objective = 0.0;  // surrogate value at allocation
  bool converged = false;  // barrier reached its duality-gap target
  bool kept_previous = false;
  int newton_steps = 0;
};

InnerResult inner_solve(const Subproblem& sub, const DcConfig& cfg);

enum class StopReason { Converged, MaxIterations };
std::string to_string(StopReason reason);

struct DcIterate {
  PowerAllocation allocation;
  double subproblem_objective = 0.0;
  double objective = 0.0;     // exact unclamped secrecy objective
  double secrecy_rate = 0.0;  // exact clamped secrecy rate
  bool inner_converged = true;
  bool extrapolated = false;  // subproblem was built at an extrapolated point
};

struct DcTrace {
  PowerAllocation start;
  std::vector<DcIterate> iterates;
  bool converged = false;
  StopReason stop_reason = StopReason::MaxIterations;
  bool nonconvex_subproblems = false;
  int inner_failures = 0;
};

struct DcSolution {
  PowerAllocation allocation;
  double secrecy_rate = 0.0;
  double objective = 0.0;
  std::vector<DcTrace> traces;  // traces[0] starts from the uniform split
  std::size_t best_start = 0;

  const DcTrace& trace() const { return traces.front(); }
  bool all_converged() const;
};

// Outer loop from a single feasible start.
DcTrace run_dc(const ProblemSpec& spec, const DcConfig& cfg, const PowerAllocation& start);

DcSolution solve(const ProblemSpec& spec, const DcConfig& cfg);

}  // namespace relaysec
