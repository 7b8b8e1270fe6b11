#pragma once

// JSON schemas for scenario files, channel realizations, allocations,
// problem specs, traces and experiment configs. Malformed input throws
// Error(ConfigError).

#include <filesystem>
#include <string>

#include <json.hpp>

#include "relaysec/channel_model.hpp"
#include "relaysec/closed_form.hpp"
#include "relaysec/dc_power_allocation.hpp"
#include "relaysec/exhaustive_oracle.hpp"
#include "relaysec/experiment.hpp"
#include "relaysec/secrecy_rates.hpp"

namespace relaysec::io {

using nlohmann::json;

json read_json_file(const std::filesystem::path& path);
// Writes through a temporary file in the same directory, then renames.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

ScenarioSpec scenario_from_json(const json& j);

// {"geometry": {"S": [x,y], "R": [x,y], "D": [x,y], "ratio_sr_se": r},
//  "fading": {"K": n, "zeta": z, "sigma": s, "rho": p, "seed": u64}}
Geometry geometry_from_json(const json& j);
json to_json(const Geometry& g);
FadingParams fading_from_json(const json& j);
json to_json(const FadingParams& f);

// {"K": n, "sigma": s, "h_sr": [...], "h_rd": [...], "h_se": [...], "h_re": [...], "h_si": [...]}
ChannelRealization channel_from_json(const json& j);
json to_json(const ChannelRealization& h);

// {"p_s1": [...], "p_r1": [...], "p_r2": [...], "p_s2": [...]}; missing
// jamming arrays default to zeros.
PowerAllocation allocation_from_json(const json& j);
json to_json(const PowerAllocation& p);

json to_json(const RateReport& r);

// Resolves "channel" inline or "channel_file" relative to base_dir.
ChannelRealization channel_from_config(const json& j, const std::filesystem::path& base_dir);

// {"scenario": "sr3", "channel"|"channel_file": ..., "p_s_max": 5, "p_r_max": 5,
//  "budget_mode": "per_slot"|"per_frame"}
ProblemSpec problem_from_json(const json& j, const std::filesystem::path& base_dir);
json to_json(const ProblemSpec& p);

// {"epsilon", "max_outer_iters", "inner_tol", "linearization": "corrected"|"plain_tangent",
//  "multistarts", "start_seed", "max_newton_steps", "extrapolate"}; every key optional.
DcConfig dc_config_from_json(const json& j, DcConfig base = {});
json to_json(const DcConfig& c);

json to_json(const DcTrace& t);
json to_json(const DcSolution& s);

// {"h_sr", "h_rd", "h_se", "h_re", "h_si", "sigma", "alpha"}
SingleCarrierInstance instance_from_json(const json& j);
json to_json(const SingleCarrierInstance& inst);
json to_json(const ConditionReport& r);
json to_json(const ApproxRates& r);

ExperimentConfig experiment_from_json(const json& j);
json to_json(const ResultRow& r);
json rows_to_json(const std::vector<ResultRow>& rows);

json to_json(const OracleVerdict& v);

}  // namespace relaysec::io
