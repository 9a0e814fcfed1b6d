#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "matchlift/pipeline.hpp"
#include "matchlift/synth.hpp"

#include <json.hpp>

namespace matchlift {

/// Sweepable model parameters. p_true and p_false address the same parameter.
struct SweepAxis {
  std::string name;  // m | n | p_set | p_obs | p_true | p_false
  std::vector<double> values;
};

struct TrialOptions {
  /// Use the generator's m instead of estimating it.
  bool m_known = true;
  /// Explicit lambda; otherwise the default scaled by lambda_scale.
  std::optional<double> lambda;
  double lambda_scale = 1.0;
  AdmmOptions admm;
  /// Per-trial wall-clock budget; exceeded trials count as timeouts.
  std::optional<double> timeout_seconds;
};

struct SweepSpec {
  SweepAxis axis1;
  SweepAxis axis2;
  ModelParams fixed;
  int trials = 10;
  std::uint64_t base_seed = 0;
  TrialOptions options;
};

enum class TrialStatus { kOk, kFailed, kTimeout };

struct TrialOutcome {
  TrialStatus status = TrialStatus::kOk;
  bool success = false;
  MatchMetrics metrics;
  int iterations = 0;
  int m_used = 0;
  double seconds = 0.0;
  std::string error;
};

struct CellResult {
  double value1 = 0.0;
  double value2 = 0.0;
  int successes = 0;
  int trials = 0;
  int failures = 0;
  int timeouts = 0;
  double precision = 0.0;
  double recall = 0.0;
  double iterations = 0.0;
  double seconds = 0.0;
};

struct SweepResult {
  std::string axis1;
  std::string axis2;
  std::vector<double> grid1;
  std::vector<double> grid2;
  /// Row-major: cell (a, b) at index a * grid2.size() + b.
  std::vector<CellResult> cells;
};

/// Throws InvalidParams for unknown or duplicate axes, empty grids, trials < 1.
void validate(const SweepSpec& spec);

/// Model parameters of one cell (axis values applied over `fixed`, seed unset).
ModelParams cell_params(const SweepSpec& spec, double value1, double value2);

/// Seed of a trial: a pure function of the base seed, the cell's parameter
/// values and the trial index, so sub-grids reproduce full-grid cells.
std::uint64_t trial_seed(std::uint64_t base_seed, double value1, double value2, int trial);

/// generate -> (estimate m) -> solve -> round -> evaluate; never throws.
TrialOutcome run_trial(const ModelParams& params, const TrialOptions& options);

/// Worker-pool size from MATCHLIFT_THREADS, capped by hardware concurrency.
int default_threads();

SweepResult run_sweep(const SweepSpec& spec, int threads = 0);

void emit_csv(std::ostream& out, const SweepResult& result);
/// SVG heat map of success probability: blue (0,0,255) = 1, red (255,0,0) = 0.
void emit_heatmap(std::ostream& out, const SweepResult& result);
void emit_csv(const std::filesystem::path& path, const SweepResult& result);
void emit_heatmap(const std::filesystem::path& path, const SweepResult& result);

/// Sweep config:
///
///   { "axis1": {"name": "p_false", "values": [0, 0.2]},
///     "axis2": {"name": "n", "values": [20, 40]},
///     "fixed": {"m": 8, "n": 40, "p_set": 1, "p_obs": 1, "p_true": 1},
///     "trials": 10, "seed": 1,
///     "m": "known" | "estimate", "lambda": 0.3, "lambda_scale": 1,
///     "admm": {"mu": 1, "max_iter": 500, "tol_feas": 1e-5, "tol_change": 1e-5},
///     "timeout_seconds": 60,
///     "output": {"csv": "sweep.csv", "heatmap": "sweep.svg"} }
struct SweepConfig {
  SweepSpec spec;
  std::optional<std::filesystem::path> csv_path;
  std::optional<std::filesystem::path> heatmap_path;
};

SweepConfig parse_sweep_config(const nlohmann::json& j);

}  // namespace matchlift
