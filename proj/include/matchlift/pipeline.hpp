#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "matchlift/error.hpp"
#include "matchlift/instance_io.hpp"
#include "matchlift/rounding.hpp"
#include "matchlift/sdp.hpp"
#include "matchlift/spectral.hpp"
#include "matchlift/synth.hpp"

#include <json.hpp>

namespace matchlift {

/// How the three tunables of a run are chosen. Unset optionals mean
/// "estimate m", "default lambda" and "r = m".
struct MatchOptions {
  std::optional<int> m;
  std::optional<double> lambda;
  std::optional<int> r;
  AdmmOptions admm;
};

struct MatchOutcome {
  std::optional<MEstimate> estimate;
  int m_used = 0;
  double lambda = 0.0;
  int r_used = 0;
  SolveReport solve;
  RoundingResult rounded;
};

/// Step I (estimate m unless given), Step II (ADMM), then rounding.
/// `seed` feeds the trimming step only.
MatchOutcome run_matchlift(const BlockMapMatrix& x_in, const MapGraph& graph, const MatchOptions& opts,
                           std::uint64_t seed);

struct PipelineConfig {
  std::optional<std::filesystem::path> instance_file;
  std::optional<ModelParams> generate;
  MatchOptions match;
  std::filesystem::path output_dir = ".";
  std::uint64_t seed = 0;
  SymmetrizePolicy symmetrize = SymmetrizePolicy::kReject;
};

/// Reads a pipeline config:
///
///   { "seed": 7,
///     "instance": {"file": "in.txt"} | {"generate": {"m":3,"n":6,"p_set":1,"p_obs":1,"p_true":1}},
///     "m": {"given": 3} | {"estimate": true},
///     "lambda": {"default": true} | {"value": 0.3},
///     "r": {"from_m": true} | {"value": 4},
///     "admm": {"mu": 1, "max_iter": 500, "tol_feas": 1e-5, "tol_change": 1e-5},
///     "output_dir": "out",
///     "symmetrize": "reject" | "transpose-or" }
///
/// Conflicting variants (e.g. both m.given and m.estimate) are InvalidParams.
/// The generator seed, when absent, is derived from the top-level seed.
PipelineConfig parse_pipeline_config(const nlohmann::json& j);

struct PipelineResult {
  MatchOutcome outcome;
  std::optional<MatchMetrics> metrics;
};

/// Runs estimate -> solve -> round -> evaluate, writing into output_dir:
/// instance.txt, estimate.json (when m is estimated), solution.txt,
/// trace.csv, solve.json, rounded.txt and metrics.json (when truth is known).
/// Errors are rethrown with the failing stage named in the message.
PipelineResult run_pipeline(const PipelineConfig& config);

/// Process exit code for an error code: 2 invalid input, 3 numerical,
/// 4 I/O or parse, 5 degenerate input, 6 timeout.
int exit_code_for(ErrorCode code);

nlohmann::json to_json(const ModelParams& p);
ModelParams model_params_from_json(const nlohmann::json& j);
nlohmann::json solve_summary(const SolveReport& report);
nlohmann::json metrics_json(const MatchMetrics& m);
std::string trace_csv(const SolveReport& report);

}  // namespace matchlift
