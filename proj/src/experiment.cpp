#include "relaysec/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <cmath>
#include <cstdio>
#include <thread>

#include "relaysec/errors.hpp"
#include "relaysec/exhaustive_oracle.hpp"

namespace relaysec {

DcConfig ExperimentConfig::sweep_dc_defaults() {
  DcConfig dc;
  dc.multistarts = 1;
  return dc;
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw Error(ErrorKind::ConfigError, "trials must be >= 1");
  if (num_subcarriers < 1) throw Error(ErrorKind::ConfigError, "K must be >= 1");
  if (ratios.empty() || rhos.empty() || ps_max_sweep.empty() || scenarios.empty())
    throw Error(ErrorKind::ConfigError, "sweep lists must be non-empty");
  for (double r : ratios)
    if (!(r > 0.0)) throw Error(ErrorKind::ConfigError, "ratios must be positive");
  for (double r : rhos)
    if (!(r >= 0.0)) throw Error(ErrorKind::ConfigError, "rhos must be nonnegative");
  for (double p : ps_max_sweep)
    if (!(p > 0.0)) throw Error(ErrorKind::ConfigError, "ps_max_sweep values must be positive");
  if (!(zeta > 0.0) || !(sigma > 0.0) || !(p_s_max > 0.0) || !(p_r_max > 0.0))
    throw Error(ErrorKind::ConfigError, "zeta, sigma and budgets must be positive");
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

TrialOutcome evaluate_trial(const ProblemSpec& spec, const DcConfig& dc, bool optimize) {
  if (!optimize) return {secrecy_rate_total(uniform_start(spec), spec.channel, spec.scenario), true};
  const DcSolution sol = solve(spec, dc);
  return {sol.secrecy_rate, sol.all_converged()};
}

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t trial) {
  std::uint64_t x = seed ^ (0x9E3779B97F4A7C15ULL * (trial + 1));
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct Cell {
  double ratio, rho, ps_max;
  ScenarioSpec scenario;
};

// HD never transmits in the SI-affected slot, so HD cells that differ only
// in rho share their trials bit for bit. Maps each cell to the first cell
// with identical results.
std::vector<std::size_t> canonical_cells(const std::vector<Cell>& cells) {
  std::vector<std::size_t> source(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    source[c] = c;
    if (!cells[c].scenario.is_hd()) continue;
    for (std::size_t d = 0; d < c; ++d) {
      if (source[d] == d && cells[d].scenario == cells[c].scenario && cells[d].ratio == cells[c].ratio &&
          cells[d].ps_max == cells[c].ps_max) {
        source[c] = d;
        break;
      }
    }
  }
  return source;
}

// Runs every (cell, trial) pair; results land in a fixed slot so the output
// does not depend on scheduling.
std::vector<std::vector<TrialOutcome>> run_cells(const ExperimentConfig& cfg, const std::vector<Cell>& cells) {
  const std::size_t trials = cfg.trials;
  std::vector<std::vector<TrialOutcome>> out(cells.size(), std::vector<TrialOutcome>(trials));
  const std::vector<std::size_t> source = canonical_cells(cells);
  std::vector<std::size_t> work;
  for (std::size_t c = 0; c < cells.size(); ++c)
    if (source[c] == c) work.push_back(c);
  const std::size_t total = work.size() * trials;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};

  auto worker = [&]() {
    try {
      while (!failed.load()) {
        const std::size_t task = next.fetch_add(1);
        if (task >= total) break;
        const std::size_t c = work[task / trials];
        const std::size_t t = task % trials;
        const Cell& cell = cells[c];

        Geometry geometry = cfg.geometry;
        geometry.ratio_sr_se = cell.ratio;
        FadingParams fading;
        fading.num_subcarriers = cfg.num_subcarriers;
        fading.zeta = cfg.zeta;
        fading.sigma = cfg.sigma;
        fading.rho = cell.rho;
        fading.seed = cfg.seed;

        ProblemSpec spec;
        spec.scenario = cell.scenario;
        // Same (seed, trial) across cells: common random numbers.
        spec.channel = sample_realization(geometry, fading, t);
        spec.p_s_max = cell.ps_max;
        spec.p_r_max = cfg.p_r_max;
        spec.budget_mode = cfg.budget_mode;

        DcConfig dc = cfg.dc;
        dc.start_seed = mix_seed(cfg.seed, t);
        out[c][t] = evaluate_trial(spec, dc, cfg.optimize);
      }
    } catch (...) {
      if (!failed.exchange(true)) failure = std::current_exception();
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(cfg.threads ? cfg.threads : default_thread_count(),
                                                           static_cast<unsigned>(std::max<std::size_t>(1, total))));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  for (std::size_t c = 0; c < cells.size(); ++c)
    if (source[c] != c) out[c] = out[source[c]];
  return out;
}

ResultRow summarize(const ExperimentConfig& cfg, const Cell& cell, const std::vector<TrialOutcome>& outcomes) {
  std::vector<double> rates;
  rates.reserve(outcomes.size());
  std::size_t nonconverged = 0;
  for (const auto& o : outcomes) {
    rates.push_back(o.rate);
    if (!o.converged) ++nonconverged;
  }
  ResultRow row;
  row.ratio = cell.ratio;
  row.rho = cell.rho;
  row.ps_max = cell.ps_max;
  row.scenario = cell.scenario;
  row.mean_rate = mean_of(rates);
  row.std_rate = sample_std(rates);
  row.trials = outcomes.size();
  row.seed = cfg.seed;
  row.nonconverged = nonconverged;
  return row;
}

}  // namespace

std::vector<ResultRow> run_ratio_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  for (double r : cfg.ratios)
    if (r > 2.0) throw Error(ErrorKind::InfeasibleGeometry, "ratio " + std::to_string(r) + " exceeds 2");
  std::vector<Cell> cells;
  for (double ratio : cfg.ratios)
    for (double rho : cfg.rhos)
      for (const auto& sc : cfg.scenarios) cells.push_back({ratio, rho, cfg.p_s_max, sc});
  const auto outcomes = run_cells(cfg, cells);
  std::vector<ResultRow> rows;
  for (std::size_t c = 0; c < cells.size(); ++c) rows.push_back(summarize(cfg, cells[c], outcomes[c]));
  return rows;
}

std::vector<ResultRow> run_power_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  bool has_anchor = false;
  for (double p : cfg.ps_max_sweep) has_anchor = has_anchor || p == kPowerSweepAnchor;
  if (!has_anchor) throw Error(ErrorKind::MissingAnchor, "ps_max_sweep must contain 5 (the normalisation anchor)");

  std::vector<Cell> cells;
  for (double ps : cfg.ps_max_sweep)
    for (const auto& sc : cfg.scenarios) cells.push_back({cfg.power_sweep_ratio, cfg.power_sweep_rho, ps, sc});
  const auto outcomes = run_cells(cfg, cells);
  std::vector<ResultRow> rows;
  for (std::size_t c = 0; c < cells.size(); ++c) rows.push_back(summarize(cfg, cells[c], outcomes[c]));

  for (auto& row : rows) {
    for (const auto& anchor : rows) {
      if (anchor.ps_max == kPowerSweepAnchor && anchor.scenario == row.scenario) {
        if (anchor.mean_rate > 0.0) row.eta_s = row.mean_rate / anchor.mean_rate;
        break;
      }
    }
  }
  return rows;
}

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
  std::string out = "ratio,rho,psmax,scenario,mean_rate,std_rate,eta_s,trials,seed\n";
  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::string(buf);
  };
  for (const auto& r : rows) {
    out += num(r.ratio) + "," + num(r.rho) + "," + num(r.ps_max) + "," + r.scenario.id() + "," + num(r.mean_rate) +
           "," + num(r.std_rate) + "," + (r.eta_s ? num(*r.eta_s) : std::string()) + "," + std::to_string(r.trials) +
           "," + std::to_string(r.seed) + "\n";
  }
  return out;
}

}  // namespace relaysec
