#include "relaysec/cli.hpp"

#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "relaysec/closed_form.hpp"
#include "relaysec/errors.hpp"
#include "relaysec/json_io.hpp"

namespace relaysec {

namespace {

using io::json;
namespace fs = std::filesystem;

struct CommonOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::string scenario;
  std::string format;  // empty: the command's default
  bool no_optimize = false;
};

enum class Command { SampleChannels, Rate, Optimize, Sweep, PowerSweep, ValidateOracle, CheckConditions };

struct Outcome {
  std::string text;
  int code = kExitOk;
  std::string stdout_line;  // summary line; replaces text on stdout unless --format is given
};

std::optional<ScenarioSpec> scenario_override(const CommonOptions& o) {
  if (o.scenario.empty()) return std::nullopt;
  return ScenarioSpec::parse(o.scenario);
}

fs::path base_dir(const CommonOptions& o) { return fs::path(o.config).parent_path(); }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

Outcome run_sample_channels(const CommonOptions& o, const json& cfg) {
  const Geometry geometry = cfg.contains("geometry") ? io::geometry_from_json(cfg.at("geometry")) : Geometry{};
  FadingParams fading = cfg.contains("fading") ? io::fading_from_json(cfg.at("fading")) : FadingParams{};
  if (o.seed) fading.seed = *o.seed;
  const std::size_t trials = o.trials.value_or(cfg.value("trials", std::size_t{1}));
  json realizations = json::array();
  for (std::size_t t = 0; t < trials; ++t) realizations.push_back(io::to_json(sample_realization(geometry, fading, t)));
  return {dump({{"geometry", io::to_json(geometry)},
                {"eavesdropper", {place_eavesdropper(geometry).x, place_eavesdropper(geometry).y}},
                {"fading", io::to_json(fading)},
                {"realizations", realizations}}),
          kExitOk,
          {}};
}

Outcome run_rate(const CommonOptions& o, const json& cfg) {
  ScenarioSpec scenario = cfg.contains("scenario") ? io::scenario_from_json(cfg.at("scenario")) : kSR1;
  if (auto s = scenario_override(o)) scenario = *s;
  const ChannelRealization h = io::channel_from_config(cfg, base_dir(o));
  if (!cfg.contains("allocation")) throw Error(ErrorKind::ConfigError, "rate needs an 'allocation' object");
  const PowerAllocation p = io::allocation_from_json(cfg.at("allocation"));
  const RateReport report = secrecy_rate(p, h, scenario);
  char line[64];
  std::snprintf(line, sizeof line, "%.4f", report.total);
  json j = io::to_json(report);
  j["scenario"] = scenario.id();
  return {dump(j), kExitOk, line};
}

Outcome run_optimize(const CommonOptions& o, const json& cfg) {
  ProblemSpec spec = io::problem_from_json(cfg, base_dir(o));
  if (auto s = scenario_override(o)) spec.scenario = *s;
  DcConfig dc = cfg.contains("dc") ? io::dc_config_from_json(cfg.at("dc")) : DcConfig{};
  if (o.seed) dc.start_seed = *o.seed;
  const DcSolution sol = solve(spec, dc);
  json j = io::to_json(sol);
  j["scenario"] = spec.scenario.id();
  return {dump(j), sol.all_converged() ? kExitOk : kExitNonConvergence, {}};
}

ExperimentConfig experiment_config(const CommonOptions& o, const json& cfg) {
  ExperimentConfig c = io::experiment_from_json(cfg);
  if (o.seed) c.seed = *o.seed;
  if (o.trials) c.trials = *o.trials;
  if (auto s = scenario_override(o)) c.scenarios = {*s};
  if (o.no_optimize) c.optimize = false;
  c.validate();
  return c;
}

Outcome format_rows(const CommonOptions& o, const std::vector<ResultRow>& rows, std::ostream& err) {
  std::size_t nonconverged = 0;
  for (const auto& r : rows) nonconverged += r.nonconverged;
  if (nonconverged > 0) err << "warning: " << nonconverged << " DC solves hit the iteration cap\n";
  const bool csv = o.format == "csv" || (o.format.empty() && fs::path(o.out).extension() == ".csv");
  if (csv) return {rows_to_csv(rows), kExitOk, {}};
  return {dump(io::rows_to_json(rows)), kExitOk, {}};
}

Outcome run_validate_oracle(const CommonOptions& o, const json& cfg) {
  GridSpec grid;
  grid.steps_per_axis = cfg.value("steps_per_axis", grid.steps_per_axis);
  grid.pin_jamming_zero = cfg.value("pin_jamming_zero", false);
  const double slack = cfg.value("slack", 0.05);
  DcConfig dc = cfg.contains("dc") ? io::dc_config_from_json(cfg.at("dc")) : DcConfig{};
  if (o.seed) dc.start_seed = *o.seed;
  if (grid.steps_per_axis < 2) throw Error(ErrorKind::ConfigError, "steps_per_axis must be >= 2");

  std::vector<json> problems;
  if (cfg.contains("instances")) {
    for (const auto& inst : cfg.at("instances")) problems.push_back(inst);
  } else {
    problems.push_back(cfg);
  }
  json verdicts = json::array();
  int code = kExitOk;
  for (const auto& pj : problems) {
    ProblemSpec spec = io::problem_from_json(pj, base_dir(o));
    if (auto s = scenario_override(o)) spec.scenario = *s;
    const OracleVerdict v = validate_dc(spec, grid, dc, slack);
    json j = io::to_json(v);
    j["scenario"] = spec.scenario.id();
    verdicts.push_back(j);
    if (!v.dc_converged) code = kExitNonConvergence;
  }
  return {dump(verdicts), code, {}};
}

Outcome run_check_conditions(const json& cfg) {
  const SingleCarrierInstance inst = io::instance_from_json(cfg);
  const double margin = cfg.value("margin", kDefaultMargin);
  json j = io::to_json(evaluate_conditions(inst, margin));
  if (inst.h_si > 0.0 && inst.h_se > 0.0 && inst.h_re > 0.0) j["approx_rates"] = io::to_json(approx_rates(inst));
  j["instance"] = io::to_json(inst);
  return {dump(j), kExitOk, {}};
}

Outcome run_command(Command cmd, const CommonOptions& o, std::ostream& err) {
  if (!o.scenario.empty() && !scenario_override(o))
    throw Error(ErrorKind::ConfigError, "unknown scenario '" + o.scenario + "'");
  const json cfg = o.config.empty() ? json::object() : io::read_json_file(o.config);
  switch (cmd) {
    case Command::SampleChannels: return run_sample_channels(o, cfg);
    case Command::Rate: return run_rate(o, cfg);
    case Command::Optimize: return run_optimize(o, cfg);
    case Command::Sweep: return format_rows(o, run_ratio_sweep(experiment_config(o, cfg)), err);
    case Command::PowerSweep: return format_rows(o, run_power_sweep(experiment_config(o, cfg)), err);
    case Command::ValidateOracle: return run_validate_oracle(o, cfg);
    case Command::CheckConditions: return run_check_conditions(cfg);
  }
  return {};
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Secrecy-rate analysis and power allocation for full-duplex jamming relays", "relaysec"};
  app.require_subcommand(1, 1);
  CommonOptions opts;
  Command selected = Command::Rate;

  const std::vector<std::pair<Command, std::pair<const char*, const char*>>> commands = {
      {Command::SampleChannels, {"sample-channels", "Draw channel realizations from a scenario file"}},
      {Command::Rate, {"rate", "Evaluate the secrecy rate of a given allocation"}},
      {Command::Optimize, {"optimize", "Run the DC power allocation"}},
      {Command::Sweep, {"sweep", "Monte Carlo sweep over distance ratio and SI level"}},
      {Command::PowerSweep, {"power-sweep", "Monte Carlo sweep over the source power budget"}},
      {Command::ValidateOracle, {"validate-oracle", "Compare the DC solver against grid search"}},
      {Command::CheckConditions, {"check-conditions", "Evaluate the single-carrier closed-form conditions"}},
  };
  for (const auto& [cmd, names] : commands) {
    CLI::App* sub = app.add_subcommand(names.first, names.second);
    sub->add_option("--config", opts.config, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out, "Output path (stdout when omitted)");
    sub->add_option("--seed", opts.seed, "Seed override");
    sub->add_option("--trials", opts.trials, "Trial count override")->check(CLI::PositiveNumber);
    sub->add_option("--scenario", opts.scenario, "Scenario override")
        ->check(CLI::IsMember({"sr1", "sr2", "sr3", "sr4"}, CLI::ignore_case));
    sub->add_option("--format", opts.format, "Output format (default: csv for a .csv --out path, else json)")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--no-optimize", opts.no_optimize, "Evaluate uniform full power instead of DC");
    sub->callback([&selected, cmd = cmd] { selected = cmd; });
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitConfig;
  }

  try {
    const Outcome result = run_command(selected, opts, err);
    if (opts.out.empty()) {
      if (!result.stdout_line.empty() && opts.format.empty())
        out << result.stdout_line << "\n";
      else
        out << result.text;
    } else {
      io::write_file_atomic(opts.out, result.text);
      if (!result.stdout_line.empty()) out << result.stdout_line << "\n";
    }
    if (result.code == kExitNonConvergence) err << "warning: DC iterations did not converge\n";
    return result.code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const io::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

int cli_dispatch(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_dispatch(args, std::cout, std::cerr);
}

}  // namespace relaysec
