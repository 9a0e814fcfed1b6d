// matchlift: joint partial-map matching from the command line.
//
//   matchlift gen        --m 3 --n 6 --out inst.txt
//   matchlift estimate-m --in inst.txt [--spectrum spec.csv]
//   matchlift solve      --in inst.txt --out sol.txt [--m 3] [--lambda 0.2]
//   matchlift round      --in sol.txt --r 3 --out rounded.txt [--truth inst.txt]
//   matchlift pipeline   --config run.json | --in inst.txt --out-dir out
//   matchlift sweep      --config sweep.json

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "matchlift/bench.hpp"
#include "matchlift/error.hpp"
#include "matchlift/instance_io.hpp"
#include "matchlift/log.hpp"
#include "matchlift/pipeline.hpp"
#include "matchlift/rng.hpp"

namespace {

using namespace matchlift;
using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

struct Globals {
  std::uint64_t seed = 0;
  std::string log_level = "warn";
  std::string symmetrize = "reject";

  SymmetrizePolicy policy() const {
    return symmetrize == "transpose-or" ? SymmetrizePolicy::kTransposeOr : SymmetrizePolicy::kReject;
  }
};

std::string with_suffix(const std::string& path, const std::string& suffix) { return path + suffix; }

struct GenArgs {
  ModelParams params;
  std::optional<double> p_false;
  std::string out;
  std::string params_out;
};

int run_gen(const Globals& g, GenArgs a) {
  if (a.p_false) a.params.p_true = 1.0 - *a.p_false;
  a.params.seed = derive_seed(g.seed, "gen");
  const Instance inst = generate(a.params);
  save_instance(a.out, to_instance_file(inst));
  const std::string sidecar = a.params_out.empty() ? with_suffix(a.out, ".params.json") : a.params_out;
  write_text_file(sidecar, to_json(a.params).dump(2) + "\n");
  log::info("stage=gen out=" + a.out + " corruptions=" + std::to_string(inst.corruptions.size()));
  return 0;
}

struct EstimateArgs {
  std::string in;
  std::string spectrum;
};

int run_estimate(const Globals& g, const EstimateArgs& a) {
  const InstanceFile inst = load_instance(a.in, g.policy());
  const MEstimate est = estimate_m(inst.x_in, inst.graph, derive_seed(g.seed, "trim"));
  if (!a.spectrum.empty()) {
    std::string csv = "index,eigenvalue\n";
    char buf[64];
    for (std::size_t i = 0; i < est.spectrum.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i + 1, est.spectrum[i]);
      csv += buf;
    }
    write_text_file(a.spectrum, csv);
  }
  std::cout << est.m_hat << "\n";
  return 0;
}

struct SolveArgs {
  std::string in;
  std::string out;
  std::string trace;
  std::string report;
  std::optional<int> m;
  std::optional<double> lambda;
  std::optional<double> tol;
  AdmmOptions admm;
};

int run_solve(const Globals& g, SolveArgs a) {
  const InstanceFile inst = load_instance(a.in, g.policy());
  if (a.tol) a.admm.tol_feas = a.admm.tol_change = *a.tol;
  const int m = a.m ? *a.m : estimate_m(inst.x_in, inst.graph, derive_seed(g.seed, "trim")).m_hat;
  const double lambda = a.lambda.value_or(default_lambda(inst.graph));
  const SolveReport report = admm_solve(inst.x_in, inst.graph, m, lambda, a.admm);
  save_relaxed(a.out, report.x_hat);
  write_text_file(a.trace.empty() ? with_suffix(a.out, ".trace.csv") : a.trace, trace_csv(report));
  write_text_file(a.report.empty() ? with_suffix(a.out, ".json") : a.report, solve_summary(report).dump(2) + "\n");
  log::info("stage=solve m=" + std::to_string(m) + " iterations=" + std::to_string(report.iterations) +
            " converged=" + (report.converged ? "true" : "false"));
  return 0;
}

struct RoundArgs {
  std::string in;
  int r = 0;
  std::string out;
  std::string truth;
  std::string metrics;
};

int run_round(const Globals& g, const RoundArgs& a) {
  const BlockMapMatrix x_hat = load_relaxed(a.in);
  const RoundingResult rounded = round_solution(x_hat, a.r);
  save_instance(a.out, to_instance_file(rounded.maps));
  if (!a.truth.empty()) {
    const InstanceFile truth_file = load_instance(a.truth, g.policy());
    const auto truth = truth_file.truth();
    if (!truth) throw Error(ErrorCode::kInvalidParams, "truth file " + a.truth + " carries no universe labels");
    const MatchMetrics metrics = evaluate(rounded.maps, truth->gram());
    const json j = metrics_json(metrics);
    write_text_file(a.metrics.empty() ? with_suffix(a.out, ".metrics.json") : a.metrics, j.dump(2) + "\n");
    std::cout << j.dump() << "\n";
  }
  return 0;
}

struct PipelineArgs {
  std::string config;
  std::string in;
  std::string out_dir;
  std::optional<int> m;
  std::optional<double> lambda;
  std::optional<int> r;
};

int run_pipeline_cmd(const Globals& g, const PipelineArgs& a, bool seed_given) {
  PipelineConfig cfg;
  if (!a.config.empty()) {
    json j;
    try {
      j = json::parse(read_text_file(a.config));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParse, "stage=config: " + a.config + ": " + e.what());
    }
    if (seed_given) j["seed"] = g.seed;
    if (!j.contains("symmetrize")) j["symmetrize"] = g.symmetrize;
    cfg = parse_pipeline_config(j);
  } else {
    if (a.in.empty()) throw Error(ErrorCode::kInvalidParams, "stage=config: pipeline needs --config or --in");
    cfg.instance_file = a.in;
    cfg.seed = g.seed;
    cfg.symmetrize = g.policy();
  }
  if (!a.out_dir.empty()) cfg.output_dir = a.out_dir;
  if (a.m) cfg.match.m = a.m;
  if (a.lambda) cfg.match.lambda = a.lambda;
  if (a.r) cfg.match.r = a.r;

  const PipelineResult result = run_pipeline(cfg);
  json summary{{"m", result.outcome.m_used},
               {"lambda", result.outcome.lambda},
               {"r", result.outcome.r_used},
               {"iterations", result.outcome.solve.iterations},
               {"converged", result.outcome.solve.converged}};
  if (result.metrics) summary["metrics"] = metrics_json(*result.metrics);
  std::cout << summary.dump() << "\n";
  return 0;
}

struct SweepArgs {
  std::string config;
  std::string csv;
  std::string heatmap;
  int threads = 0;
};

int run_sweep_cmd(const Globals& g, const SweepArgs& a, bool seed_given) {
  json j;
  try {
    j = json::parse(read_text_file(a.config));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, a.config + ": " + e.what());
  }
  if (seed_given) j["seed"] = g.seed;
  SweepConfig cfg = parse_sweep_config(j);
  if (!a.csv.empty()) cfg.csv_path = a.csv;
  if (!a.heatmap.empty()) cfg.heatmap_path = a.heatmap;
  const SweepResult result = run_sweep(cfg.spec, a.threads);
  if (cfg.csv_path) {
    emit_csv(*cfg.csv_path, result);
  } else {
    emit_csv(std::cout, result);
  }
  if (cfg.heatmap_path) emit_heatmap(*cfg.heatmap_path, result);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint matching of partial maps via convex relaxation", "matchlift"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Globals g;
  auto* seed_opt = app.add_option("--seed", g.seed, "Root seed; every random choice derives from it");
  app.add_option("--log-level", g.log_level, "debug|info|warn|error|off")
      ->check(CLI::IsMember({"debug", "info", "warn", "error", "off"}));
  app.add_option("--symmetrize", g.symmetrize, "Asymmetric input handling")
      ->check(CLI::IsMember({"reject", "transpose-or"}));

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Sample an instance from the randomized model");
  gen_cmd->add_option("--m", gen.params.m, "Universe size")->required();
  gen_cmd->add_option("--n", gen.params.n, "Number of objects")->required();
  gen_cmd->add_option("--p-set", gen.params.p_set, "Membership probability");
  gen_cmd->add_option("--p-obs", gen.params.p_obs, "Pair observation probability");
  auto* p_true = gen_cmd->add_option("--p-true", gen.params.p_true, "Probability an observed block is correct");
  gen_cmd->add_option("--p-false", gen.p_false, "1 - p_true")->excludes(p_true);
  gen_cmd->add_option("--out", gen.out, "Instance file to write")->required();
  gen_cmd->add_option("--params", gen.params_out, "Parameter sidecar (default <out>.params.json)");

  EstimateArgs est;
  auto* est_cmd = app.add_subcommand("estimate-m", "Estimate the universe size from the spectrum");
  est_cmd->add_option("--in", est.in, "Instance file")->required();
  est_cmd->add_option("--spectrum", est.spectrum, "Write the trimmed spectrum as CSV");

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Run the ADMM solver and write the relaxed solution");
  solve_cmd->add_option("--in", solve.in, "Instance file")->required();
  solve_cmd->add_option("--out", solve.out, "Relaxed matrix file to write")->required();
  solve_cmd->add_option("--trace", solve.trace, "Residual trace CSV (default <out>.trace.csv)");
  solve_cmd->add_option("--report", solve.report, "Solve summary JSON (default <out>.json)");
  solve_cmd->add_option("--m", solve.m, "Universe size (estimated when absent)");
  solve_cmd->add_option("--lambda", solve.lambda, "Sparsity weight (default sqrt|E|/(2n))");
  solve_cmd->add_option("--mu", solve.admm.mu, "ADMM penalty");
  solve_cmd->add_option("--max-iter", solve.admm.max_iter, "Iteration cap");
  solve_cmd->add_option("--tol", solve.tol, "Feasibility and change tolerance");

  RoundArgs rnd;
  auto* round_cmd = app.add_subcommand("round", "Round a relaxed solution to consistent maps");
  round_cmd->add_option("--in", rnd.in, "Relaxed matrix file")->required();
  round_cmd->add_option("--r", rnd.r, "Number of clusters to embed")->required();
  round_cmd->add_option("--out", rnd.out, "Rounded maps, instance format")->required();
  round_cmd->add_option("--truth", rnd.truth, "Instance file with universe labels");
  round_cmd->add_option("--metrics", rnd.metrics, "Metrics JSON (default <out>.metrics.json)");

  PipelineArgs pipe;
  auto* pipe_cmd = app.add_subcommand("pipeline", "Estimate, solve, round and evaluate in one go");
  auto* pipe_config = pipe_cmd->add_option("--config", pipe.config, "Pipeline config JSON");
  pipe_cmd->add_option("--in", pipe.in, "Instance file")->excludes(pipe_config);
  pipe_cmd->add_option("--out-dir", pipe.out_dir, "Artifact directory");
  pipe_cmd->add_option("--m", pipe.m, "Universe size (estimated when absent)");
  pipe_cmd->add_option("--lambda", pipe.lambda, "Sparsity weight");
  pipe_cmd->add_option("--r", pipe.r, "Rounding rank (default m)");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo phase-transition sweep");
  sweep_cmd->add_option("--config", sweep.config, "Sweep config JSON")->required();
  sweep_cmd->add_option("--csv", sweep.csv, "CSV output (overrides config)");
  sweep_cmd->add_option("--heatmap", sweep.heatmap, "SVG heat map output (overrides config)");
  sweep_cmd->add_option("--threads", sweep.threads, "Worker count (default MATCHLIFT_THREADS or all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    log::set_level(log::parse_level(g.log_level));
    const bool seed_given = seed_opt->count() > 0;
    if (*gen_cmd) return run_gen(g, gen);
    if (*est_cmd) return run_estimate(g, est);
    if (*solve_cmd) return run_solve(g, solve);
    if (*round_cmd) return run_round(g, rnd);
    if (*pipe_cmd) return run_pipeline_cmd(g, pipe, seed_given);
    if (*sweep_cmd) return run_sweep_cmd(g, sweep, seed_given);
  } catch (const Error& e) {
    log::error(std::string("code=") + to_string(e.code()) + " message=\"" + e.detail() + "\"");
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
