#include "relaysec/json_io.hpp"

#include <fstream>
#include <sstream>
#include <unistd.h>

#include "relaysec/errors.hpp"

namespace relaysec::io {

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <typename T>
T get_required(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) config_error(std::string("missing key '") + key + "'");
  return get_or<T>(j, key, T{});
}

Point2 point_from_json(const json& j, const char* key, Point2 fallback) {
  if (!j.contains(key)) return fallback;
  const auto v = get_or<std::vector<double>>(j, key, {});
  if (v.size() != 2) config_error(std::string("'") + key + "' must be a [x, y] array");
  return {v[0], v[1]};
}

std::string budget_mode_name(BudgetMode m) { return m == BudgetMode::PerSlot ? "per_slot" : "per_frame"; }

BudgetMode budget_mode_from(const std::string& s) {
  if (s == "per_slot") return BudgetMode::PerSlot;
  if (s == "per_frame") return BudgetMode::PerFrame;
  config_error("budget_mode must be per_slot or per_frame");
}

}  // namespace

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    config_error(path.string() + ": " + e.what());
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) config_error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) config_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

ScenarioSpec scenario_from_json(const json& j) {
  if (!j.is_string()) config_error("scenario must be a string sr1..sr4");
  const auto parsed = ScenarioSpec::parse(j.get<std::string>());
  if (!parsed) config_error("unknown scenario '" + j.get<std::string>() + "'");
  return *parsed;
}

Geometry geometry_from_json(const json& j) {
  Geometry g;
  g.source = point_from_json(j, "S", g.source);
  g.relay = point_from_json(j, "R", g.relay);
  g.destination = point_from_json(j, "D", g.destination);
  g.ratio_sr_se = get_or<double>(j, "ratio_sr_se", g.ratio_sr_se);
  return g;
}

json to_json(const Geometry& g) {
  return {{"S", {g.source.x, g.source.y}},
          {"R", {g.relay.x, g.relay.y}},
          {"D", {g.destination.x, g.destination.y}},
          {"ratio_sr_se", g.ratio_sr_se}};
}

FadingParams fading_from_json(const json& j) {
  FadingParams f;
  f.num_subcarriers = get_or<std::size_t>(j, "K", f.num_subcarriers);
  f.zeta = get_or<double>(j, "zeta", f.zeta);
  f.sigma = get_or<double>(j, "sigma", f.sigma);
  f.rho = get_or<double>(j, "rho", f.rho);
  f.seed = get_or<std::uint64_t>(j, "seed", f.seed);
  return f;
}

json to_json(const FadingParams& f) {
  return {{"K", f.num_subcarriers}, {"zeta", f.zeta}, {"sigma", f.sigma}, {"rho", f.rho}, {"seed", f.seed}};
}

ChannelRealization channel_from_json(const json& j) {
  ChannelRealization h;
  h.sigma = get_or<double>(j, "sigma", 1.0);
  h.h_sr = get_required<std::vector<double>>(j, "h_sr");
  h.h_rd = get_required<std::vector<double>>(j, "h_rd");
  h.h_se = get_required<std::vector<double>>(j, "h_se");
  h.h_re = get_required<std::vector<double>>(j, "h_re");
  h.h_si = get_or<std::vector<double>>(j, "h_si", std::vector<double>(h.h_sr.size(), 0.0));
  if (j.contains("K") && get_or<std::size_t>(j, "K", 0) != h.h_sr.size()) config_error("K does not match h_sr length");
  try {
    h.validate();
  } catch (const Error& e) {
    config_error(e.what());
  }
  return h;
}

json to_json(const ChannelRealization& h) {
  return {{"K", h.size()}, {"sigma", h.sigma}, {"h_sr", h.h_sr}, {"h_rd", h.h_rd},
          {"h_se", h.h_se}, {"h_re", h.h_re},  {"h_si", h.h_si}};
}

PowerAllocation allocation_from_json(const json& j) {
  PowerAllocation p;
  p.p_s1 = get_required<std::vector<double>>(j, "p_s1");
  p.p_r2 = get_required<std::vector<double>>(j, "p_r2");
  p.p_r1 = get_or<std::vector<double>>(j, "p_r1", std::vector<double>(p.p_s1.size(), 0.0));
  p.p_s2 = get_or<std::vector<double>>(j, "p_s2", std::vector<double>(p.p_s1.size(), 0.0));
  try {
    p.validate();
  } catch (const Error& e) {
    config_error(e.what());
  }
  return p;
}

json to_json(const PowerAllocation& p) {
  return {{"p_s1", p.p_s1}, {"p_r1", p.p_r1}, {"p_r2", p.p_r2}, {"p_s2", p.p_s2}};
}

json to_json(const RateReport& r) {
  return {{"total", r.total},
          {"unclamped_total", r.unclamped_total},
          {"per_subcarrier", r.per_subcarrier},
          {"sinr_legit", r.sinr_legit},
          {"sinr_eav", r.sinr_eav}};
}

ChannelRealization channel_from_config(const json& j, const std::filesystem::path& base_dir) {
  if (j.contains("channel")) return channel_from_json(j.at("channel"));
  if (j.contains("channel_file")) {
    std::filesystem::path p = get_or<std::string>(j, "channel_file", "");
    if (p.is_relative()) p = base_dir / p;
    return channel_from_json(read_json_file(p));
  }
  config_error("config needs 'channel' or 'channel_file'");
}

ProblemSpec problem_from_json(const json& j, const std::filesystem::path& base_dir) {
  ProblemSpec p;
  if (j.contains("scenario")) p.scenario = scenario_from_json(j.at("scenario"));
  p.channel = channel_from_config(j, base_dir);
  p.p_s_max = get_or<double>(j, "p_s_max", p.p_s_max);
  p.p_r_max = get_or<double>(j, "p_r_max", p.p_r_max);
  p.budget_mode = budget_mode_from(get_or<std::string>(j, "budget_mode", "per_slot"));
  if (!(p.p_s_max >= 0.0) || !(p.p_r_max >= 0.0)) config_error("budgets must be >= 0");
  return p;
}

json to_json(const ProblemSpec& p) {
  return {{"scenario", p.scenario.id()},
          {"channel", to_json(p.channel)},
          {"p_s_max", p.p_s_max},
          {"p_r_max", p.p_r_max},
          {"budget_mode", budget_mode_name(p.budget_mode)}};
}

DcConfig dc_config_from_json(const json& j, DcConfig c) {
  if (j.is_null()) return c;
  c.epsilon = get_or<double>(j, "epsilon", c.epsilon);
  c.max_outer_iters = get_or<int>(j, "max_outer_iters", c.max_outer_iters);
  c.inner_tol = get_or<double>(j, "inner_tol", c.inner_tol);
  c.multistarts = get_or<int>(j, "multistarts", c.multistarts);
  c.start_seed = get_or<std::uint64_t>(j, "start_seed", c.start_seed);
  c.max_newton_steps = get_or<int>(j, "max_newton_steps", c.max_newton_steps);
  c.extrapolate = get_or<bool>(j, "extrapolate", c.extrapolate);
  const std::string lin = get_or<std::string>(
      j, "linearization", c.linearization == Linearization::Corrected ? "corrected" : "plain_tangent");
  if (lin == "corrected")
    c.linearization = Linearization::Corrected;
  else if (lin == "plain_tangent")
    c.linearization = Linearization::PlainTangent;
  else
    config_error("linearization must be corrected or plain_tangent");
  if (!(c.epsilon > 0.0) || c.max_outer_iters < 1 || !(c.inner_tol > 0.0) || c.multistarts < 1)
    config_error("invalid DC configuration");
  return c;
}

json to_json(const DcConfig& c) {
  return {{"epsilon", c.epsilon},
          {"max_outer_iters", c.max_outer_iters},
          {"inner_tol", c.inner_tol},
          {"linearization", c.linearization == Linearization::Corrected ? "corrected" : "plain_tangent"},
          {"multistarts", c.multistarts},
          {"start_seed", c.start_seed},
          {"max_newton_steps", c.max_newton_steps},
          {"extrapolate", c.extrapolate}};
}

json to_json(const DcTrace& t) {
  json iterates = json::array();
  for (const auto& it : t.iterates)
    iterates.push_back({{"allocation", to_json(it.allocation)},
                        {"subproblem_objective", it.subproblem_objective},
                        {"objective", it.objective},
                        {"secrecy_rate", it.secrecy_rate},
                        {"inner_converged", it.inner_converged},
                        {"extrapolated", it.extrapolated}});
  return {{"start", to_json(t.start)},
          {"iterates", iterates},
          {"converged", t.converged},
          {"stop_reason", to_string(t.stop_reason)},
          {"nonconvex_subproblems", t.nonconvex_subproblems},
          {"inner_failures", t.inner_failures}};
}

json to_json(const DcSolution& s) {
  json traces = json::array();
  for (const auto& t : s.traces) traces.push_back(to_json(t));
  return {{"allocation", to_json(s.allocation)},
          {"secrecy_rate", s.secrecy_rate},
          {"objective", s.objective},
          {"best_start", s.best_start},
          {"converged", s.all_converged()},
          {"traces", traces}};
}

SingleCarrierInstance instance_from_json(const json& j) {
  SingleCarrierInstance inst;
  inst.h_sr = get_required<double>(j, "h_sr");
  inst.h_rd = get_required<double>(j, "h_rd");
  inst.h_se = get_required<double>(j, "h_se");
  inst.h_re = get_required<double>(j, "h_re");
  inst.h_si = get_required<double>(j, "h_si");
  inst.sigma = get_or<double>(j, "sigma", 1.0);
  inst.alpha = get_or<double>(j, "alpha", 1.0);
  try {
    inst.validate();
  } catch (const Error& e) {
    config_error(e.what());
  }
  return inst;
}

json to_json(const SingleCarrierInstance& inst) {
  return {{"h_sr", inst.h_sr}, {"h_rd", inst.h_rd}, {"h_se", inst.h_se}, {"h_re", inst.h_re},
          {"h_si", inst.h_si}, {"sigma", inst.sigma}, {"alpha", inst.alpha}};
}

json to_json(const ConditionReport& r) {
  return {{"C01", r.nonzero.c01},  {"C02", r.nonzero.c02},  {"C03", r.nonzero.c03},
          {"C04", r.nonzero.c04},  {"C11", r.superior.c11}, {"C12", r.superior.c12},
          {"C13", r.superior.c13}, {"C21", r.superior.c21}, {"C22", r.superior.c22},
          {"margin_ok", r.margin_ok}, {"informed_case_guard", r.informed_case_guard}, {"margin", r.margin}};
}

json to_json(const ApproxRates& r) { return {{"SR1", r.sr1}, {"SR2", r.sr2}, {"SR3", r.sr3}, {"SR4", r.sr4}}; }

ExperimentConfig experiment_from_json(const json& j) {
  if (!j.is_object()) config_error("experiment config must be a JSON object");
  ExperimentConfig c;
  c.ratios = get_or(j, "ratios", c.ratios);
  c.rhos = get_or(j, "rhos", c.rhos);
  c.ps_max_sweep = get_or(j, "ps_max_sweep", c.ps_max_sweep);
  c.trials = get_or<std::size_t>(j, "trials", c.trials);
  c.num_subcarriers = get_or<std::size_t>(j, "K", c.num_subcarriers);
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
  c.optimize = get_or<bool>(j, "optimize", c.optimize);
  c.zeta = get_or<double>(j, "zeta", c.zeta);
  c.sigma = get_or<double>(j, "sigma", c.sigma);
  c.p_s_max = get_or<double>(j, "p_s_max", c.p_s_max);
  c.p_r_max = get_or<double>(j, "p_r_max", c.p_r_max);
  c.budget_mode = budget_mode_from(get_or<std::string>(j, "budget_mode", "per_slot"));
  c.power_sweep_ratio = get_or<double>(j, "power_sweep_ratio", c.power_sweep_ratio);
  c.power_sweep_rho = get_or<double>(j, "power_sweep_rho", c.power_sweep_rho);
  if (j.contains("geometry")) c.geometry = geometry_from_json(j.at("geometry"));
  if (j.contains("dc")) c.dc = dc_config_from_json(j.at("dc"), c.dc);
  if (j.contains("scenarios")) {
    c.scenarios.clear();
    for (const auto& s : j.at("scenarios")) c.scenarios.push_back(scenario_from_json(s));
  }
  try {
    c.validate();
  } catch (const Error& e) {
    config_error(e.what());
  }
  return c;
}

json to_json(const ResultRow& r) {
  return {{"ratio", r.ratio},
          {"rho", r.rho},
          {"psmax", r.ps_max},
          {"scenario", r.scenario.id()},
          {"mean_rate", r.mean_rate},
          {"std_rate", r.std_rate},
          {"eta_s", r.eta_s ? json(*r.eta_s) : json(nullptr)},
          {"trials", r.trials},
          {"seed", r.seed},
          {"nonconverged", r.nonconverged}};
}

json rows_to_json(const std::vector<ResultRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) out.push_back(to_json(r));
  return out;
}

json to_json(const OracleVerdict& v) {
  return {{"pass", v.pass},
          {"dc_rate", v.dc_rate},
          {"oracle_rate", v.oracle_rate},
          {"raw_gap", v.raw_gap},
          {"allowance", v.allowance},
          {"net_gap", v.net_gap},
          {"dc_converged", v.dc_converged},
          {"dc_allocation", to_json(v.dc_allocation)},
          {"oracle_allocation", to_json(v.oracle_allocation)}};
}

}  // namespace relaysec::io
