#include "relaysec/dc_power_allocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "relaysec/errors.hpp"

namespace relaysec {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr std::size_t kS1 = 0, kR1 = 1, kR2 = 2, kS2 = 3;

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
constexpr int kPi = 4, kVarpi = 5;

Vec4 local_vec(const PowerAllocation& p, std::size_t k) { return to_vec(powers_at(p, k)); }

double group_sum(const std::vector<double>& flat, const BudgetGroup& g) {
  double s = 0.0;
  for (std::size_t j : g.members) s += flat[j];
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Problem layout and feasibility

void ProblemSpec::validate() const {
  channel.validate();
  if (!(p_s_max >= 0.0) || !(p_r_max >= 0.0) || !std::isfinite(p_s_max) || !std::isfinite(p_r_max))
    throw Error(ErrorKind::InvalidParameter, "power budgets must be finite and >= 0");
}

VariableLayout make_layout(const ProblemSpec& spec) {
  const std::size_t k_count = spec.channel.size();
  VariableLayout layout;
  layout.num_subcarriers = k_count;
  layout.free.assign(4 * k_count, true);
  const double budget_of_var[4] = {spec.p_s_max, spec.p_r_max, spec.p_r_max, spec.p_s_max};
  for (std::size_t v = 0; v < 4; ++v) {
    const bool jamming = (v == kR1 || v == kS2);
    const bool fixed = (jamming && spec.scenario.is_hd()) || budget_of_var[v] == 0.0;
    if (fixed)
      for (std::size_t k = 0; k < k_count; ++k) layout.free[v * k_count + k] = false;
  }

  auto add_group = [&](std::initializer_list<std::size_t> vars, double budget) {
    BudgetGroup g;
    g.budget = budget;
    for (std::size_t v : vars)
      for (std::size_t k = 0; k < k_count; ++k)
        if (layout.free[v * k_count + k]) g.members.push_back(v * k_count + k);
    if (!g.members.empty()) layout.groups.push_back(std::move(g));
  };
  if (spec.budget_mode == BudgetMode::PerSlot) {
    add_group({kS1}, spec.p_s_max);
    add_group({kR1}, spec.p_r_max);
    add_group({kR2}, spec.p_r_max);
    add_group({kS2}, spec.p_s_max);
  } else {
    add_group({kS1, kS2}, spec.p_s_max);
    add_group({kR1, kR2}, spec.p_r_max);
  }
  return layout;
}

bool is_feasible(const PowerAllocation& p, const ProblemSpec& spec, double rel_tol) {
  if (p.size() != spec.channel.size()) return false;
  const VariableLayout layout = make_layout(spec);
  const std::vector<double> flat = p.flatten();
  for (std::size_t j = 0; j < flat.size(); ++j) {
    if (!(flat[j] >= 0.0) || !std::isfinite(flat[j])) return false;
    if (!layout.free[j] && flat[j] != 0.0) return false;
  }
  for (const auto& g : layout.groups)
    if (group_sum(flat, g) > g.budget * (1.0 + rel_tol)) return false;
  return true;
}

std::vector<double> project_capped_simplex(std::vector<double> v, double budget) {
  for (double& x : v) x = std::max(0.0, x);
  double sum = 0.0;
  for (double x : v) sum += x;
  if (sum <= budget) return v;
  if (budget <= 0.0) return std::vector<double>(v.size(), 0.0);

  // Sort-based threshold for the simplex {x >= 0, sum x = budget}.
  std::vector<double> sorted(v);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0, theta = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    cumulative += sorted[i];
    const double candidate = (cumulative - budget) / static_cast<double>(i + 1);
    if (sorted[i] - candidate > 0.0) theta = candidate;
  }
  for (double& x : v) x = std::max(0.0, x - theta);
  // Round-off can leave the sum a few ulps above the budget.
  for (int pass = 0; pass < 4; ++pass) {
    double s = 0.0;
    for (double x : v) s += x;
    if (s <= budget) break;
    const double scale = budget / s * (1.0 - 4.0 * std::numeric_limits<double>::epsilon());
    for (double& x : v) x *= scale;
  }
  return v;
}

PowerAllocation project_feasible(const PowerAllocation& p, const ProblemSpec& spec) {
  const VariableLayout layout = make_layout(spec);
  std::vector<double> flat = p.flatten();
  for (std::size_t j = 0; j < flat.size(); ++j)
    if (!layout.free[j]) flat[j] = 0.0;
  for (const auto& g : layout.groups) {
    std::vector<double> sub;
    sub.reserve(g.members.size());
    for (std::size_t j : g.members) sub.push_back(flat[j]);
    sub = project_capped_simplex(std::move(sub), g.budget);
    for (std::size_t i = 0; i < g.members.size(); ++i) flat[g.members[i]] = sub[i];
  }
  return PowerAllocation::unflatten(flat);
}

PowerAllocation uniform_start(const ProblemSpec& spec) {
  const VariableLayout layout = make_layout(spec);
  std::vector<double> flat(4 * layout.num_subcarriers, 0.0);
  for (const auto& g : layout.groups)
    for (std::size_t j : g.members) flat[j] = g.budget / static_cast<double>(g.members.size());
  return project_feasible(PowerAllocation::unflatten(flat), spec);
}

PowerAllocation random_start(const ProblemSpec& spec, std::uint64_t seed) {
  const VariableLayout layout = make_layout(spec);
  std::mt19937_64 rng(seed);
  auto exp1 = [&rng]() {
    const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    return -std::log(u);
  };
  std::vector<double> flat(4 * layout.num_subcarriers, 0.0);
  for (const auto& g : layout.groups) {
    // Uniform on {x >= 0, sum x <= b}: drop the slack coordinate of a
    // flat Dirichlet over members + 1.
    std::vector<double> e(g.members.size() + 1);
    double total = 0.0;
    for (double& v : e) total += (v = exp1());
    for (std::size_t i = 0; i < g.members.size(); ++i) flat[g.members[i]] = g.budget * e[i] / total;
  }
  return project_feasible(PowerAllocation::unflatten(flat), spec);
}

// ---------------------------------------------------------------------------
// Subproblem construction

double SubcarrierSurrogate::objective() const {
  const double pi = std::min(legit[0].value, legit[1].value);
  double varpi = eav[0].value;
  if (num_eav == 2) varpi = std::max(varpi, eav[1].value);
  return pi - varpi;
}

double SurrogateValues::objective() const {
  const double pi = std::min(legit[0], legit[1]);
  const double varpi = num_eav == 2 ? std::max(eav[0], eav[1]) : eav[0];
  return pi - varpi;
}

Subproblem::Subproblem(const ProblemSpec& spec, const PowerAllocation& expansion_point, Linearization linearization)
    : spec_(&spec), prev_(expansion_point), linearization_(linearization), layout_(make_layout(spec)) {
  const bool corrected = linearization == Linearization::Corrected;
  const bool naive = spec.scenario.eavesdropper == Eavesdropper::Naive;
  cache_.resize(spec.channel.size());
  for (std::size_t k = 0; k < cache_.size(); ++k) {
    Expansion& e = cache_[k];
    e.gains = gains_at(spec.channel, k);
    e.x0 = local_vec(prev_, k);
    auto lin = [&e](FgTerm term) {
      const FgEval f = evaluate_fg(term, e.x0, e.gains);
      return Linearized{f.value, f.grad};
    };
    e.g_r = lin(FgTerm::G_R);
    if (naive) {
      e.t0 = lin(corrected ? FgTerm::F_SE : FgTerm::G_SE);
      e.t1 = lin(corrected ? FgTerm::F_RE : FgTerm::G_RE);
    } else if (!corrected) {
      e.t0 = lin(FgTerm::G_E4);
    }
    e.q0 = informed_polynomial(e.x0, e.gains);
  }
}

namespace {

SurrogatePiece from_fg(const FgEval& e) { return {e.value, e.grad, e.hess}; }

SurrogatePiece minus(SurrogatePiece a, const SurrogatePiece& b) {
  a.value -= b.value;
  a.grad -= b.grad;
  a.hess -= b.hess;
  return a;
}

// Convex quadratic majorant of u*v, tight to first order at (u0, v0):
// uv = ((u+v)^2 - (u-v)^2)/4 with the concave part linearized.
struct BilinearMajorant {
  double value, du, dv;
};
BilinearMajorant bilinear_majorant(double u, double v, double u0, double v0) {
  const double d0 = u0 - v0;
  const double sum = u + v;
  return {sum * sum / 4.0 - d0 * d0 / 4.0 - d0 * ((u - v) - d0) / 2.0, sum / 2.0 - d0 / 2.0, sum / 2.0 + d0 / 2.0};
}

// Convex majorant of f_E4 = log2(q): log2 is replaced by its tangent in q and
// each bilinear term of q by its convex majorant.
SurrogatePiece informed_f_majorant(const Vec4& x0, double q0, const Vec4& x, const SubcarrierGains& g,
                                   bool with_derivatives) {
  const double s = g.sigma;
  const double a = x[kR1] * g.h_re, b = x[kS2] * g.h_se, c = x[kS1] * g.h_se, d = x[kR2] * g.h_re;
  const double a0 = x0[kR1] * g.h_re, b0 = x0[kS2] * g.h_se, c0 = x0[kS1] * g.h_se, d0 = x0[kR2] * g.h_re;

  const BilinearMajorant ab = bilinear_majorant(a, b, a0, b0);
  const BilinearMajorant bc = bilinear_majorant(b, c, b0, c0);
  const BilinearMajorant ad = bilinear_majorant(a, d, a0, d0);
  const double q_hat = s * s + s * (a + b + c + d) + ab.value + bc.value + ad.value;
  const double scale = 1.0 / (q0 * kLn2);

  SurrogatePiece out;
  out.value = std::log2(q0) + (q_hat - q0) * scale;
  if (!with_derivatives) return out;

  const double dq_da = s + ab.du + ad.du;
  const double dq_db = s + ab.dv + bc.du;
  const double dq_dc = s + bc.dv;
  const double dq_dd = s + ad.dv;
  out.grad[kS1] = dq_dc * g.h_se * scale;
  out.grad[kR1] = dq_da * g.h_re * scale;
  out.grad[kR2] = dq_dd * g.h_re * scale;
  out.grad[kS2] = dq_db * g.h_se * scale;

  // Each majorant has Hessian [[1/2, 1/2], [1/2, 1/2]] in its own pair.
  auto add_pair = [&out, scale](std::size_t i, double si, std::size_t j, double sj) {
    out.hess(i, i) += 0.5 * si * si * scale;
    out.hess(j, j) += 0.5 * sj * sj * scale;
    out.hess(i, j) += 0.5 * si * sj * scale;
    out.hess(j, i) += 0.5 * si * sj * scale;
  };
  add_pair(kR1, g.h_re, kS2, g.h_se);  // ab
  add_pair(kS2, g.h_se, kS1, g.h_se);  // bc
  add_pair(kR1, g.h_re, kR2, g.h_re);  // ad
  return out;
}

}  // namespace

SubcarrierSurrogate Subproblem::evaluate(std::size_t k, const Vec4& x, bool with_hessian) const {
  const Expansion& e = cache_[k];
  const SubcarrierGains& g = e.gains;
  SubcarrierSurrogate out;
  auto tangent = [&](const Linearized& l) {
    SurrogatePiece piece;
    piece.value = l.at(x, e.x0);
    piece.grad = l.grad;
    return piece;
  };

  // C43: f_R minus tangent of g_R; C44: f_D.
  out.legit[0] = minus(from_fg(evaluate_fg(FgTerm::F_R, x, g)), tangent(e.g_r));
  out.legit[1] = from_fg(evaluate_fg(FgTerm::F_D, x, g));

  const bool corrected = linearization_ == Linearization::Corrected;
  if (spec_->scenario.eavesdropper == Eavesdropper::Naive) {
    out.num_eav = 2;
    if (corrected) {
      out.eav[0] = minus(tangent(e.t0), from_fg(evaluate_fg(FgTerm::G_SE, x, g)));
      out.eav[1] = minus(tangent(e.t1), from_fg(evaluate_fg(FgTerm::G_RE, x, g)));
    } else {
      out.eav[0] = minus(from_fg(evaluate_fg(FgTerm::F_SE, x, g)), tangent(e.t0));
      out.eav[1] = minus(from_fg(evaluate_fg(FgTerm::F_RE, x, g)), tangent(e.t1));
    }
  } else {
    out.num_eav = 1;
    if (corrected)
      out.eav[0] = minus(informed_f_majorant(e.x0, e.q0, x, g, true), from_fg(evaluate_fg(FgTerm::G_E4, x, g)));
    else
      out.eav[0] = minus(from_fg(evaluate_fg(FgTerm::F_E4, x, g)), tangent(e.t0));
  }
  if (!with_hessian) {
    for (auto& piece : out.legit) piece.hess.setZero();
    for (auto& piece : out.eav) piece.hess.setZero();
  }
  return out;
}

SurrogateValues Subproblem::values(std::size_t k, const Vec4& x) const {
  const Expansion& e = cache_[k];
  const SubcarrierGains& g = e.gains;
  const double s = g.sigma;
  SurrogateValues out;
  out.legit[0] = std::log2(s + x[kR1] * g.h_si + x[kS1] * g.h_sr) - e.g_r.at(x, e.x0);
  out.legit[1] = std::log2(1.0 + x[kR2] * g.h_rd / s);

  const bool corrected = linearization_ == Linearization::Corrected;
  const double jam_at_e1 = std::log2(s + x[kR1] * g.h_re);
  const double jam_at_e2 = std::log2(s + x[kS2] * g.h_se);
  if (spec_->scenario.eavesdropper == Eavesdropper::Naive) {
    out.num_eav = 2;
    if (corrected) {
      out.eav[0] = e.t0.at(x, e.x0) - jam_at_e1;
      out.eav[1] = e.t1.at(x, e.x0) - jam_at_e2;
    } else {
      out.eav[0] = std::log2(s + x[kR1] * g.h_re + x[kS1] * g.h_se) - e.t0.at(x, e.x0);
      out.eav[1] = std::log2(s + x[kR2] * g.h_re + x[kS2] * g.h_se) - e.t1.at(x, e.x0);
    }
  } else {
    out.num_eav = 1;
    if (corrected)
      out.eav[0] = informed_f_majorant(e.x0, e.q0, x, g, false).value - jam_at_e1 - jam_at_e2;
    else
      out.eav[0] = std::log2(informed_polynomial(x, g)) - e.t0.at(x, e.x0);
  }
  return out;
}

double Subproblem::objective(const PowerAllocation& p) const {
  double total = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) total += values(k, local_vec(p, k)).objective();
  return total;
}

Subproblem build_subproblem(const PowerAllocation& prev, const ProblemSpec& spec, const DcConfig& cfg) {
  spec.validate();
  prev.validate();
  if (!is_feasible(prev, spec, 1e-12))
    throw Error(ErrorKind::InfeasibleStart, "expansion point violates the power budgets or HD restriction");
  return Subproblem(spec, prev, cfg.linearization);
}

// ---------------------------------------------------------------------------
// Inner solver: log-barrier method on the epigraph form
//
//   max sum_k (pi_k - varpi_k)
//   s.t. pi_k <= legit_i(x_k), varpi_k >= eav_j(x_k), x >= 0, budgets.
//
// Per-subcarrier variables z_k = (s1, r1, r2, s2, pi, varpi). The Newton
// system is block diagonal plus one rank-one term per budget group, solved
// with the Woodbury identity.

namespace {

class BarrierSolver {
 public:
  BarrierSolver(const Subproblem& sub, const DcConfig& cfg)
      : sub_(sub), cfg_(cfg), layout_(sub.layout()), k_count_(layout_.num_subcarriers) {
    free_local_.resize(k_count_);
    for (std::size_t k = 0; k < k_count_; ++k)
      for (std::size_t v = 0; v < 4; ++v) free_local_[k][v] = layout_.free[v * k_count_ + k];
    const int num_eav = sub.spec().scenario.eavesdropper == Eavesdropper::Naive ? 2 : 1;
    num_constraints_ = layout_.groups.size();
    for (const auto& g : layout_.groups) {
      std::vector<int> vars;
      for (std::size_t j : g.members) {
        const int v = static_cast<int>(j / k_count_);
        if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
      }
      group_vars_.push_back(std::move(vars));
    }
    for (std::size_t k = 0; k < k_count_; ++k) {
      num_constraints_ += 2 + num_eav;
      for (std::size_t v = 0; v < 4; ++v) num_constraints_ += free_local_[k][v] ? 1 : 0;
    }
  }

  InnerResult run() {
    InnerResult result;
    if (layout_.groups.empty()) {
      // Nothing free: the only feasible point is zero power.
      result.allocation = PowerAllocation(k_count_);
      result.objective = sub_.objective(result.allocation);
      result.converged = true;
      return result;
    }

    init_point();
    double t = kInitialT;
    const double gap_target = cfg_.inner_tol;
    int steps = 0;
    bool ok = true;
    while (true) {
      ok = center(t, steps) && ok;
      if (static_cast<double>(num_constraints_) / t <= gap_target) break;
      if (steps >= cfg_.max_newton_steps) {
        ok = false;
        break;
      }
      const double next_t = std::min(t * kMu, static_cast<double>(num_constraints_) / gap_target);
      predict(t, next_t);
      t = next_t;
    }
    result.newton_steps = steps;
    result.converged = ok;
    result.allocation = extract();
    result.objective = sub_.objective(result.allocation);

    // The expansion point is feasible with surrogate value equal to the true
    // objective; never return anything worse.
    const double prev_objective = sub_.objective(sub_.expansion_point());
    if (!(result.objective >= prev_objective)) {
      result.allocation = sub_.expansion_point();
      result.objective = prev_objective;
      result.kept_previous = true;
    }
    return result;
  }

 private:
  // Warm starts sit near the previous optimum, so the path starts late.
  static constexpr double kInitialT = 1e3;
  static constexpr double kMu = 100.0;
  static constexpr double kCenteringTol = 1e-10;

  void init_point() {
    const std::vector<double> prev = sub_.expansion_point().flatten();
    std::vector<double> flat(prev.size(), 0.0);
    constexpr double tau = 0.05;
    for (const auto& g : layout_.groups) {
      const double center = g.budget / (2.0 * static_cast<double>(g.members.size()));
      for (std::size_t j : g.members) flat[j] = (1.0 - tau) * prev[j] + tau * center;
    }
    z_.assign(k_count_, Vec6::Zero());
    for (std::size_t k = 0; k < k_count_; ++k) {
      for (std::size_t v = 0; v < 4; ++v) z_[k][v] = flat[v * k_count_ + k];
      const SurrogateValues s = sub_.values(k, z_[k].head<4>());
      double eav = s.eav[0];
      if (s.num_eav == 2) eav = std::max(eav, s.eav[1]);
      z_[k][kPi] = std::min(s.legit[0], s.legit[1]) - 1.0;
      z_[k][kVarpi] = eav + 1.0;
    }
  }

  // Barrier objective; +inf outside the domain.
  double value(const std::vector<Vec6>& z, double t) const {
    double f = 0.0;
    for (std::size_t k = 0; k < k_count_; ++k) {
      const Vec6& zk = z[k];
      for (std::size_t v = 0; v < 4; ++v) {
        if (!free_local_[k][v]) continue;
        if (!(zk[v] > 0.0)) return kInf;
        f -= std::log(zk[v]);
      }
      const SurrogateValues s = sub_.values(k, zk.head<4>());
      for (double legit : s.legit) {
        const double c = legit - zk[kPi];
        if (!(c > 0.0)) return kInf;
        f -= std::log(c);
      }
      for (int e = 0; e < s.num_eav; ++e) {
        const double c = zk[kVarpi] - s.eav[e];
        if (!(c > 0.0)) return kInf;
        f -= std::log(c);
      }
      f += t * (zk[kVarpi] - zk[kPi]);
    }
    for (const auto& g : layout_.groups) {
      const double slack = g.budget - group_sum_z(z, g);
      if (!(slack > 0.0)) return kInf;
      f -= std::log(slack);
    }
    return f;
  }

  double group_sum_z(const std::vector<Vec6>& z, const BudgetGroup& g) const {
    double s = 0.0;
    for (std::size_t j : g.members) s += z[j % k_count_][static_cast<int>(j / k_count_)];
    return s;
  }

  // Assembles the gradient and block Hessians at z_.
  void assemble(double t) {
    grad_.assign(k_count_, Vec6::Zero());
    blocks_.assign(k_count_, Mat6::Zero());
    const bool convex = sub_.convex();
    for (std::size_t k = 0; k < k_count_; ++k) {
      const Vec6& zk = z_[k];
      Vec6& gk = grad_[k];
      Mat6& hk = blocks_[k];
      gk[kPi] -= t;
      gk[kVarpi] += t;
      for (std::size_t v = 0; v < 4; ++v) {
        if (!free_local_[k][v]) continue;
        gk[v] -= 1.0 / zk[v];
        hk(v, v) += 1.0 / (zk[v] * zk[v]);
      }
      const SubcarrierSurrogate s = sub_.evaluate(k, zk.head<4>(), true);
      // -log(legit(x) - pi): the constraint function is concave.
      for (const auto& piece : s.legit) {
        const double c = piece.value - zk[kPi];
        Vec6 dc = Vec6::Zero();
        dc.head<4>() = piece.grad;
        dc[kPi] = -1.0;
        gk -= dc / c;
        hk += dc * dc.transpose() / (c * c);
        hk.topLeftCorner<4, 4>() -= piece.hess / c;
      }
      // -log(varpi - eav(x)): convex eav in corrected mode. In literal mode
      // the curvature term is dropped (Gauss-Newton) to keep the block PD.
      for (int e = 0; e < s.num_eav; ++e) {
        const double c = zk[kVarpi] - s.eav[e].value;
        Vec6 dc = Vec6::Zero();
        dc.head<4>() = -s.eav[e].grad;
        dc[kVarpi] = 1.0;
        gk -= dc / c;
        hk += dc * dc.transpose() / (c * c);
        if (convex) hk.topLeftCorner<4, 4>() += s.eav[e].hess / c;
      }
      for (std::size_t v = 0; v < 4; ++v) {
        if (free_local_[k][v]) continue;
        gk[v] = 0.0;
        hk.row(v).setZero();
        hk.col(v).setZero();
        hk(v, v) = 1.0;
      }
    }
    slack_.resize(layout_.groups.size());
    for (std::size_t gi = 0; gi < layout_.groups.size(); ++gi) {
      const auto& g = layout_.groups[gi];
      slack_[gi] = g.budget - group_sum_z(z_, g);
      for (std::size_t j : g.members) grad_[j % k_count_][static_cast<int>(j / k_count_)] += 1.0 / slack_[gi];
    }
  }

  // Newton direction via Woodbury on blockdiag + sum_g u_g u_g^T.
  // First-order step along the central path from t to next_t:
  // dz/dt = -H^-1 c with c the gradient of the linear objective term.
  void predict(double t, double next_t) {
    assemble(t);
    std::vector<Vec6> rhs(k_count_, Vec6::Zero()), dir;
    for (auto& r : rhs) {
      r[kPi] = next_t - t;
      r[kVarpi] = -(next_t - t);
    }
    if (!direction(dir, rhs)) return;
    double alpha = std::min(1.0, 0.99 * max_linear_step(dir));
    const double f0 = value(z_, next_t);
    std::vector<Vec6> trial(k_count_);
    for (int bt = 0; bt < 8; ++bt, alpha *= 0.5) {
      for (std::size_t k = 0; k < k_count_; ++k) trial[k] = z_[k] + alpha * dir[k];
      if (value(trial, next_t) < f0) {
        z_.swap(trial);
        return;
      }
    }
  }

  bool direction(std::vector<Vec6>& dir) {
    std::vector<Vec6> rhs(k_count_);
    for (std::size_t k = 0; k < k_count_; ++k) rhs[k] = -grad_[k];
    return direction(dir, rhs);
  }

  // Solves (blockdiag + sum_g u_g u_g^T) dir = rhs.
  bool direction(std::vector<Vec6>& dir, const std::vector<Vec6>& rhs) {
    const std::size_t r = layout_.groups.size();
    dir.resize(k_count_);
    // u_g restricted to block k is slack_g^-1 on the member coordinates;
    // w_g = H^-1 u_g.
    w_.resize(r * k_count_);
    for (std::size_t k = 0; k < k_count_; ++k) {
      factor_.compute(blocks_[k]);
      if (factor_.info() != Eigen::Success) return false;
      dir[k] = factor_.solve(rhs[k]);
      for (std::size_t gi = 0; gi < r; ++gi) {
        Vec6 u = Vec6::Zero();
        for (int v : group_vars_[gi]) u[v] = 1.0 / slack_[gi];
        w_[gi * k_count_ + k] = factor_.solve(u);
      }
    }
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    Eigen::Vector4d uty = Eigen::Vector4d::Zero();
    for (std::size_t gi = 0; gi < r; ++gi) {
      for (std::size_t k = 0; k < k_count_; ++k) {
        for (int v : group_vars_[gi]) {
          uty[gi] += dir[k][v] / slack_[gi];
          for (std::size_t hi = 0; hi < r; ++hi) m(gi, hi) += w_[hi * k_count_ + k][v] / slack_[gi];
        }
      }
    }
    const auto n = static_cast<Eigen::Index>(r);
    const Eigen::VectorXd coef = m.topLeftCorner(n, n).partialPivLu().solve(uty.head(n));
    for (std::size_t k = 0; k < k_count_; ++k)
      for (std::size_t gi = 0; gi < r; ++gi) dir[k] -= w_[gi * k_count_ + k] * coef[static_cast<Eigen::Index>(gi)];
    return true;
  }

  // Largest step keeping the linear constraints (x >= 0, budgets) strict.
  double max_linear_step(const std::vector<Vec6>& dir) const {
    double step = kInf;
    for (std::size_t k = 0; k < k_count_; ++k)
      for (std::size_t v = 0; v < 4; ++v)
        if (free_local_[k][v] && dir[k][v] < 0.0) step = std::min(step, -z_[k][v] / dir[k][v]);
    for (std::size_t gi = 0; gi < layout_.groups.size(); ++gi) {
      const double rate = group_sum_z(dir, layout_.groups[gi]);
      if (rate > 0.0) step = std::min(step, slack_[gi] / rate);
    }
    return step;
  }

  bool center(double t, int& steps) {
    double f = value(z_, t);
    std::vector<Vec6> dir, trial(k_count_);
    while (steps < cfg_.max_newton_steps) {
      assemble(t);
      if (!direction(dir)) return false;
      double decrement = 0.0;
      for (std::size_t k = 0; k < k_count_; ++k) decrement -= grad_[k].dot(dir[k]);
      ++steps;
      if (decrement / 2.0 <= kCenteringTol) return true;

      double alpha = std::min(1.0, 0.99 * max_linear_step(dir));
      bool accepted = false;
      for (int bt = 0; bt < 60; ++bt) {
        for (std::size_t k = 0; k < k_count_; ++k) trial[k] = z_[k] + alpha * dir[k];
        const double ft = value(trial, t);
        if (ft <= f - 0.25 * alpha * decrement) {
          // No representable decrease left: centred to rounding precision.
          if (!(ft < f)) return true;
          z_.swap(trial);
          f = ft;
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) return decrement < 1e-6;
    }
    return false;
  }

  PowerAllocation extract() const {
    std::vector<double> flat(4 * k_count_, 0.0);
    for (std::size_t k = 0; k < k_count_; ++k)
      for (std::size_t v = 0; v < 4; ++v)
        if (free_local_[k][v]) flat[v * k_count_ + k] = std::max(0.0, z_[k][v]);
    return project_feasible(PowerAllocation::unflatten(flat), sub_.spec());
  }

  static constexpr double kInf = std::numeric_limits<double>::infinity();

  const Subproblem& sub_;
  const DcConfig& cfg_;
  const VariableLayout& layout_;
  std::size_t k_count_;
  std::vector<std::array<bool, 4>> free_local_;
  std::size_t num_constraints_ = 0;

  std::vector<Vec6> z_;
  std::vector<Vec6> grad_;
  std::vector<Mat6> blocks_;
  std::vector<double> slack_;
  std::vector<std::vector<int>> group_vars_;  // per group: local variable indices (same for every block)
  std::vector<Vec6> w_;
  Eigen::LLT<Mat6> factor_;
};

}  // namespace

InnerResult inner_solve(const Subproblem& sub, const DcConfig& cfg) { return BarrierSolver(sub, cfg).run(); }

// ---------------------------------------------------------------------------
// Outer loop

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Converged: return "converged";
    case StopReason::MaxIterations: return "max_iterations";
  }
  return "?";
}

bool DcSolution::all_converged() const {
  return std::all_of(traces.begin(), traces.end(), [](const DcTrace& t) { return t.converged; });
}

namespace {

double distance_between(const PowerAllocation& a, const PowerAllocation& b) {
  const std::vector<double> fa = a.flatten(), fb = b.flatten();
  double s = 0.0;
  for (std::size_t i = 0; i < fa.size(); ++i) s += (fa[i] - fb[i]) * (fa[i] - fb[i]);
  return std::sqrt(s);
}

std::uint64_t start_seed_for(std::uint64_t base, std::size_t index) {
  std::uint64_t x = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

DcTrace run_dc(const ProblemSpec& spec, const DcConfig& cfg, const PowerAllocation& start) {
  DcTrace trace;
  trace.start = start;
  trace.nonconvex_subproblems = cfg.linearization == Linearization::PlainTangent;
  PowerAllocation current = start;
  PowerAllocation previous = start;
  double current_objective = secrecy_objective(current, spec.channel, spec.scenario);
  double theta = 1.0;
  for (int l = 1; l <= cfg.max_outer_iters; ++l) {
    PowerAllocation expansion = current;
    bool extrapolated = false;
    if (cfg.extrapolate && l > 1) {
      const double next_theta = (1.0 + std::sqrt(1.0 + 4.0 * theta * theta)) / 2.0;
      const double beta = (theta - 1.0) / next_theta;
      theta = next_theta;
      const std::vector<double> x = current.flatten(), y = previous.flatten();
      std::vector<double> v(x.size());
      for (std::size_t j = 0; j < x.size(); ++j) v[j] = x[j] + beta * (x[j] - y[j]);
      PowerAllocation candidate = project_feasible(PowerAllocation::unflatten(v), spec);
      if (beta > 0.0) {
        if (secrecy_objective(candidate, spec.channel, spec.scenario) > current_objective) {
          expansion = std::move(candidate);
          extrapolated = true;
        } else {
          theta = 1.0;
        }
      }
    }

    const Subproblem sub = build_subproblem(expansion, spec, cfg);
    InnerResult inner = inner_solve(sub, cfg);
    if (!inner.converged) ++trace.inner_failures;

    const RateReport exact = secrecy_rate(inner.allocation, spec.channel, spec.scenario);
    const double step = distance_between(inner.allocation, current);
    trace.iterates.push_back(DcIterate{inner.allocation, inner.objective, exact.unclamped_total, exact.total,
                                       inner.converged, extrapolated});
    previous = std::move(current);
    current = std::move(inner.allocation);
    current_objective = exact.unclamped_total;
    if (step <= cfg.epsilon) {
      trace.converged = true;
      trace.stop_reason = StopReason::Converged;
      break;
    }
  }
  return trace;
}

DcSolution solve(const ProblemSpec& spec, const DcConfig& cfg) {
  spec.validate();
  DcSolution solution;
  const int starts = std::max(1, cfg.multistarts);
  double best_rate = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < starts; ++s) {
    const PowerAllocation start =
        s == 0 ? uniform_start(spec) : random_start(spec, start_seed_for(cfg.start_seed, static_cast<std::size_t>(s)));
    DcTrace trace = run_dc(spec, cfg, start);

    const double start_rate = secrecy_rate_total(start, spec.channel, spec.scenario);
    if (start_rate > best_rate) {
      best_rate = start_rate;
      solution.allocation = start;
      solution.best_start = static_cast<std::size_t>(s);
    }
    for (const auto& it : trace.iterates) {
      if (it.secrecy_rate > best_rate) {
        best_rate = it.secrecy_rate;
        solution.allocation = it.allocation;
        solution.best_start = static_cast<std::size_t>(s);
      }
    }
    solution.traces.push_back(std::move(trace));
  }
  const RateReport report = secrecy_rate(solution.allocation, spec.channel, spec.scenario);
  solution.secrecy_rate = report.total;
  solution.objective = report.unclamped_total;
  return solution;
}

}  // namespace relaysec
