#include "relaysec/exhaustive_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "relaysec/errors.hpp"

namespace relaysec {

unsigned default_thread_count() {
  if (const char* env = std::getenv("RELAYSEC_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

struct Axis {
  std::size_t flat_index;
  std::size_t group;
  double step;
};

struct GridLayout {
  std::vector<Axis> axes;
  std::size_t num_groups = 0;
  std::size_t k_count = 0;
  ScenarioSpec scenario;
};

GridLayout grid_layout(const ProblemSpec& spec, const GridSpec& grid) {
  ProblemSpec axes_spec = spec;
  if (grid.pin_jamming_zero) axes_spec.scenario.protocol = Protocol::HD;
  const VariableLayout layout = make_layout(axes_spec);
  GridLayout out;
  out.k_count = layout.num_subcarriers;
  out.num_groups = layout.groups.size();
  out.scenario = spec.scenario;
  for (std::size_t gi = 0; gi < layout.groups.size(); ++gi)
    for (std::size_t j : layout.groups[gi].members)
      out.axes.push_back({j, gi, layout.groups[gi].budget / static_cast<double>(grid.steps_per_axis - 1)});
  std::sort(out.axes.begin(), out.axes.end(), [](const Axis& a, const Axis& b) { return a.flat_index < b.flat_index; });
  return out;
}

struct ChunkBest {
  double score = 0.0;  // product of clamped (1+legit)/(1+eav) ratios
  std::vector<int> index;
  std::uint64_t evaluated = 0;
  bool found = false;
};

class GridEvaluator {
 public:
  GridEvaluator(const GridLayout& layout, const ChannelRealization& h, int steps)
      : layout_(layout), steps_(steps), flat_(4 * layout.k_count, 0.0) {
    for (std::size_t k = 0; k < layout.k_count; ++k) gains_.push_back(gains_at(h, k));
  }

  // Enumerates every point whose first-axis index equals first.
  ChunkBest run_chunk(int first) {
    ChunkBest best;
    const std::size_t n = layout_.axes.size();
    std::vector<int> idx(n, 0);
    idx[0] = first;
    std::vector<int> group_sum(layout_.num_groups, 0);
    while (true) {
      std::fill(group_sum.begin(), group_sum.end(), 0);
      bool feasible = true;
      for (std::size_t a = 0; a < n; ++a) {
        group_sum[layout_.axes[a].group] += idx[a];
        if (group_sum[layout_.axes[a].group] > steps_ - 1) {
          feasible = false;
          break;
        }
      }
      if (feasible) {
        const double score = evaluate(idx);
        ++best.evaluated;
        if (!best.found || score > best.score) {
          best.score = score;
          best.index = idx;
          best.found = true;
        }
      }
      // Odometer over axes 1..n-1; last axis fastest.
      std::size_t a = n;
      while (a > 1) {
        --a;
        if (++idx[a] < steps_) break;
        idx[a] = 0;
        if (a == 1) return best;
      }
      if (n == 1) return best;
    }
  }

  PowerAllocation allocation(const std::vector<int>& idx) const {
    std::vector<double> flat(4 * layout_.k_count, 0.0);
    for (std::size_t a = 0; a < layout_.axes.size(); ++a)
      flat[layout_.axes[a].flat_index] = idx[a] * layout_.axes[a].step;
    return PowerAllocation::unflatten(flat);
  }

 private:
  double evaluate(const std::vector<int>& idx) {
    for (std::size_t a = 0; a < layout_.axes.size(); ++a)
      flat_[layout_.axes[a].flat_index] = idx[a] * layout_.axes[a].step;
    const std::size_t kc = layout_.k_count;
    double score = 1.0;
    for (std::size_t k = 0; k < kc; ++k) {
      const SubcarrierPowers p{flat_[k], flat_[kc + k], flat_[2 * kc + k], flat_[3 * kc + k]};
      const double legit = gamma_legit(p, gains_[k], layout_.scenario);
      const double eav = gamma_eav(p, gains_[k], layout_.scenario);
      score *= std::max(1.0, (1.0 + legit) / (1.0 + eav));
    }
    return score;
  }

  const GridLayout& layout_;
  int steps_;
  std::vector<SubcarrierGains> gains_;
  std::vector<double> flat_;
};

}  // namespace

GridResult grid_search(const ProblemSpec& spec, const GridSpec& grid) {
  spec.validate();
  if (grid.steps_per_axis < 2) throw Error(ErrorKind::InvalidParameter, "steps_per_axis must be >= 2");
  const GridLayout layout = grid_layout(spec, grid);
  const std::size_t n = layout.axes.size();
  if (n > kMaxGridVariables)
    throw Error(ErrorKind::GridTooLarge, std::to_string(n) + " free variables exceed the limit of 6");
  if (std::pow(static_cast<double>(grid.steps_per_axis), static_cast<double>(n)) > kMaxGridPoints)
    throw Error(ErrorKind::GridTooLarge, "grid has more than 1e9 points");

  GridResult result;
  result.allocation = PowerAllocation(layout.k_count);
  if (n == 0) {
    result.secrecy_rate = secrecy_rate_total(result.allocation, spec.channel, spec.scenario);
    return result;
  }

  const int steps = grid.steps_per_axis;
  std::vector<ChunkBest> chunks(static_cast<std::size_t>(steps));
  const unsigned threads = std::min<unsigned>(grid.threads ? grid.threads : default_thread_count(),
                                              static_cast<unsigned>(steps));
  auto worker = [&](unsigned tid) {
    GridEvaluator eval(layout, spec.channel, steps);
    for (int first = static_cast<int>(tid); first < steps; first += static_cast<int>(threads))
      chunks[static_cast<std::size_t>(first)] = eval.run_chunk(first);
  };
  if (threads <= 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }

  // Chunks are in lexicographic order of the first axis, so a strict '>'
  // keeps the lexicographically smallest maximiser.
  const ChunkBest* best = nullptr;
  for (const auto& c : chunks) {
    result.points_evaluated += c.evaluated;
    if (c.found && (best == nullptr || c.score > best->score)) best = &c;
  }
  GridEvaluator eval(layout, spec.channel, steps);
  result.allocation = eval.allocation(best->index);
  result.secrecy_rate = secrecy_rate_total(result.allocation, spec.channel, spec.scenario);
  return result;
}

double discretization_allowance(const ProblemSpec& spec, const GridSpec& grid, std::uint64_t seed, int samples) {
  ProblemSpec axes_spec = spec;
  if (grid.pin_jamming_zero) axes_spec.scenario.protocol = Protocol::HD;
  const VariableLayout layout = make_layout(axes_spec);

  double diag2 = 0.0;
  double max_budget = 0.0;
  for (const auto& g : layout.groups) {
    const double cell = g.budget / static_cast<double>(grid.steps_per_axis - 1);
    diag2 += cell * cell * static_cast<double>(g.members.size());
    max_budget = std::max(max_budget, g.budget);
  }
  if (diag2 == 0.0) return 0.0;
  const double h = 1e-6 * std::max(1.0, max_budget);

  double max_norm = 0.0;
  for (int s = 0; s < samples; ++s) {
    const PowerAllocation p = random_start(axes_spec, seed * 7919u + static_cast<std::uint64_t>(s));
    std::vector<double> flat = p.flatten();
    double norm2 = 0.0;
    for (const auto& g : layout.groups) {
      for (std::size_t j : g.members) {
        std::vector<double> up = flat, down = flat;
        up[j] += h;
        down[j] = std::max(0.0, down[j] - h);
        const double width = up[j] - down[j];
        const double d = (secrecy_rate_total(PowerAllocation::unflatten(up), spec.channel, spec.scenario) -
                          secrecy_rate_total(PowerAllocation::unflatten(down), spec.channel, spec.scenario)) /
                         width;
        norm2 += d * d;
      }
    }
    max_norm = std::max(max_norm, std::sqrt(norm2));
  }
  return max_norm * std::sqrt(diag2);
}

OracleVerdict validate_dc(const ProblemSpec& spec, const GridSpec& grid, const DcConfig& cfg, double slack) {
  const GridResult oracle = grid_search(spec, grid);
  const DcSolution dc = solve(spec, cfg);
  OracleVerdict v;
  v.dc_rate = dc.secrecy_rate;
  v.oracle_rate = oracle.secrecy_rate;
  v.raw_gap = oracle.secrecy_rate - dc.secrecy_rate;
  v.allowance = discretization_allowance(spec, grid, cfg.start_seed);
  v.net_gap = v.raw_gap - v.allowance;
  v.pass = dc.secrecy_rate >= oracle.secrecy_rate - slack - v.allowance;
  v.dc_converged = dc.all_converged();
  v.dc_allocation = dc.allocation;
  v.oracle_allocation = oracle.allocation;
  return v;
}

}  // namespace relaysec
