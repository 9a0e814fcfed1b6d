#include "matchlift/pipeline.hpp"

#include <cstdio>
#include <sstream>

#include "matchlift/error.hpp"
#include "matchlift/log.hpp"
#include "matchlift/rng.hpp"

namespace matchlift {

using nlohmann::json;

MatchOutcome run_matchlift(const BlockMapMatrix& x_in, const MapGraph& graph, const MatchOptions& opts,
                           std::uint64_t seed) {
  MatchOutcome out;
  if (opts.m) {
    out.m_used = *opts.m;
  } else {
    out.estimate = estimate_m(x_in, graph, derive_seed(seed, "trim"));
    out.m_used = out.estimate->m_hat;
  }
  out.lambda = opts.lambda.value_or(default_lambda(graph));
  out.solve = admm_solve(x_in, graph, out.m_used, out.lambda, opts.admm);
  out.r_used = opts.r.value_or(out.m_used);
  out.rounded = round_solution(out.solve.x_hat, out.r_used);
  return out;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidParams:
    case ErrorCode::kShapeMismatch:
    case ErrorCode::kAsymmetricInput:
    case ErrorCode::kInvalidR:
      return 2;
    case ErrorCode::kNumericalBreakdown:
    case ErrorCode::kNoConvergence:
      return 3;
    case ErrorCode::kIo:
    case ErrorCode::kParse:
      return 4;
    case ErrorCode::kEmptyGraph:
    case ErrorCode::kDegenerateSpectrum:
      return 5;
    case ErrorCode::kTimeout:
      return 6;
  }
  return 1;
}

json to_json(const ModelParams& p) {
  return json{{"m", p.m}, {"n", p.n}, {"p_set", p.p_set}, {"p_obs", p.p_obs}, {"p_true", p.p_true}, {"seed", p.seed}};
}

ModelParams model_params_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidParams, "model params must be an object");
  ModelParams p;
  try {
    p.m = j.at("m").get<int>();
    p.n = j.at("n").get<int>();
    p.p_set = j.value("p_set", 1.0);
    p.p_obs = j.value("p_obs", 1.0);
    if (j.contains("p_true") && j.contains("p_false")) {
      throw Error(ErrorCode::kInvalidParams, "give either p_true or p_false, not both");
    }
    p.p_true = j.contains("p_false") ? 1.0 - j.at("p_false").get<double>() : j.value("p_true", 1.0);
    p.seed = j.value("seed", std::uint64_t{0});
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidParams, std::string("model params: ") + e.what());
  }
  validate(p);
  return p;
}

namespace {

// Exactly one key of `variants` may be present in j[key].
std::string pick_variant(const json& j, const char* key, std::initializer_list<const char*> variants) {
  const json& node = j.at(key);
  if (!node.is_object()) throw Error(ErrorCode::kInvalidParams, std::string(key) + " must be an object");
  std::string chosen;
  for (const char* v : variants) {
    if (!node.contains(v)) continue;
    if (!chosen.empty()) {
      throw Error(ErrorCode::kInvalidParams,
                  std::string(key) + "." + chosen + " and " + key + "." + v + " are mutually exclusive");
    }
    chosen = v;
  }
  if (chosen.empty()) throw Error(ErrorCode::kInvalidParams, std::string(key) + " names no known variant");
  for (auto it = node.begin(); it != node.end(); ++it) {
    bool known = false;
    for (const char* v : variants) known = known || it.key() == v;
    if (!known) throw Error(ErrorCode::kInvalidParams, "unknown key " + std::string(key) + "." + it.key());
  }
  return chosen;
}

}  // namespace

PipelineConfig parse_pipeline_config(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidParams, "pipeline config must be a JSON object");
  PipelineConfig c;
  try {
    c.seed = j.value("seed", std::uint64_t{0});
    if (!j.contains("instance")) throw Error(ErrorCode::kInvalidParams, "config needs an instance source");
    if (pick_variant(j, "instance", {"file", "generate"}) == "file") {
      c.instance_file = j["instance"]["file"].get<std::string>();
    } else {
      json g = j["instance"]["generate"];
      if (!g.contains("seed")) g["seed"] = derive_seed(c.seed, "gen");
      c.generate = model_params_from_json(g);
    }
    if (j.contains("m")) {
      if (pick_variant(j, "m", {"given", "estimate"}) == "given") {
        c.match.m = j["m"]["given"].get<int>();
        if (*c.match.m < 1) throw Error(ErrorCode::kInvalidParams, "m.given must be >= 1");
      } else if (!j["m"]["estimate"].get<bool>()) {
        throw Error(ErrorCode::kInvalidParams, "m.estimate must be true when present");
      }
    }
    if (j.contains("lambda") && pick_variant(j, "lambda", {"default", "value"}) == "value") {
      c.match.lambda = j["lambda"]["value"].get<double>();
      if (*c.match.lambda < 0) throw Error(ErrorCode::kInvalidParams, "lambda.value must be >= 0");
    }
    if (j.contains("r") && pick_variant(j, "r", {"from_m", "value"}) == "value") {
      c.match.r = j["r"]["value"].get<int>();
    }
    if (j.contains("admm")) {
      const json& a = j["admm"];
      c.match.admm.mu = a.value("mu", c.match.admm.mu);
      c.match.admm.max_iter = a.value("max_iter", c.match.admm.max_iter);
      c.match.admm.tol_feas = a.value("tol_feas", c.match.admm.tol_feas);
      c.match.admm.tol_change = a.value("tol_change", c.match.admm.tol_change);
      if (!(c.match.admm.mu > 0)) throw Error(ErrorCode::kInvalidParams, "admm.mu must be > 0");
    }
    c.output_dir = j.value("output_dir", std::string("."));
    const std::string sym = j.value("symmetrize", std::string("reject"));
    if (sym == "reject") {
      c.symmetrize = SymmetrizePolicy::kReject;
    } else if (sym == "transpose-or") {
      c.symmetrize = SymmetrizePolicy::kTransposeOr;
    } else {
      throw Error(ErrorCode::kInvalidParams, "symmetrize must be reject or transpose-or");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidParams, std::string("pipeline config: ") + e.what());
  }
  return c;
}

json solve_summary(const SolveReport& r) {
  json j{{"iterations", r.iterations}, {"converged", r.converged}, {"lambda", r.lambda},
         {"m", r.m},                   {"mu", r.mu},               {"order", r.x_hat.order()}};
  if (!r.trace.empty()) {
    const auto& last = r.trace.back();
    j["final"] = {{"infeasibility", last.infeasibility},
                  {"negativity", last.negativity},
                  {"min_eig", last.min_eig},
                  {"change", last.change},
                  {"identity_gap", last.identity_gap}};
  }
  return j;
}

json metrics_json(const MatchMetrics& m) {
  return json{{"precision", m.precision}, {"recall", m.recall}, {"exact", m.exact},
              {"recovered", m.recovered}, {"truth", m.truth},   {"correct", m.correct}};
}

std::string trace_csv(const SolveReport& report) {
  std::ostringstream out;
  out << "iter,infeasibility,negativity,min_eig,change,identity_gap\n";
  char buf[160];
  for (std::size_t k = 0; k < report.trace.size(); ++k) {
    const auto& t = report.trace[k];
    std::snprintf(buf, sizeof buf, "%zu,%.9e,%.9e,%.9e,%.9e,%.9e\n", k + 1, t.infeasibility, t.negativity,
                  t.min_eig, t.change, t.identity_gap);
    out << buf;
  }
  return out.str();
}

namespace {

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  log::info(std::string("stage=") + name + " event=start");
  try {
    auto result = f();
    log::info(std::string("stage=") + name + " event=done");
    return result;
  } catch (const Error& e) {
    throw Error(e.code(), std::string("stage=") + name + ": " + e.detail());
  }
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config) {
  if (config.instance_file.has_value() == config.generate.has_value()) {
    throw Error(ErrorCode::kInvalidParams, "stage=config: exactly one instance source is required");
  }
  const auto& dir = config.output_dir;
  stage("config", [&] {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
    return 0;
  });

  InstanceFile inst = stage("load", [&] {
    if (config.instance_file) return load_instance(*config.instance_file, config.symmetrize);
    const Instance generated = generate(*config.generate);
    write_text_file(dir / "params.json", to_json(*config.generate).dump(2) + "\n");
    return to_instance_file(generated);
  });
  stage("load", [&] {
    save_instance(dir / "instance.txt", inst);
    return 0;
  });

  PipelineResult result;
  const MatchOptions& opts = config.match;
  MatchOutcome& out = result.outcome;
  stage("estimate", [&] {
    if (opts.m) {
      out.m_used = *opts.m;
      return 0;
    }
    out.estimate = estimate_m(inst.x_in, inst.graph, derive_seed(config.seed, "trim"));
    out.m_used = out.estimate->m_hat;
    json j{{"m_hat", out.m_used}, {"spectrum", out.estimate->spectrum}, {"d_min", out.estimate->trim.d_min},
           {"zeroed_edges", out.estimate->trim.zeroed_edges.size()}};
    write_text_file(dir / "estimate.json", j.dump(2) + "\n");
    return 0;
  });
  log::info("stage=estimate m=" + std::to_string(out.m_used));

  stage("solve", [&] {
    out.lambda = opts.lambda.value_or(default_lambda(inst.graph));
    out.solve = admm_solve(inst.x_in, inst.graph, out.m_used, out.lambda, opts.admm);
    save_relaxed(dir / "solution.txt", out.solve.x_hat);
    write_text_file(dir / "trace.csv", trace_csv(out.solve));
    write_text_file(dir / "solve.json", solve_summary(out.solve).dump(2) + "\n");
    return 0;
  });
  log::info("stage=solve iterations=" + std::to_string(out.solve.iterations) +
            " converged=" + (out.solve.converged ? "true" : "false"));

  stage("round", [&] {
    out.r_used = opts.r.value_or(out.m_used);
    out.rounded = round_solution(out.solve.x_hat, out.r_used);
    save_instance(dir / "rounded.txt", to_instance_file(out.rounded.maps));
    return 0;
  });

  if (auto truth = inst.truth()) {
    stage("evaluate", [&] {
      result.metrics = evaluate(out.rounded.maps, truth->gram());
      write_text_file(dir / "metrics.json", metrics_json(*result.metrics).dump(2) + "\n");
      return 0;
    });
    log::info(std::string("stage=evaluate exact=") + (result.metrics->exact ? "true" : "false"));
  }
  return result;
}

}  // namespace matchlift
