#include "matchlift/bench.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "matchlift/error.hpp"
#include "matchlift/log.hpp"
#include "matchlift/rng.hpp"

namespace matchlift {

using nlohmann::json;

namespace {

const char* const kAxisNames[] = {"m", "n", "p_set", "p_obs", "p_true", "p_false"};

bool known_axis(const std::string& name) {
  return std::find(std::begin(kAxisNames), std::end(kAxisNames), name) != std::end(kAxisNames);
}

std::string canonical_axis(const std::string& name) { return name == "p_false" ? "p_true" : name; }

void apply_axis(ModelParams& p, const std::string& name, double value) {
  if (name == "m") {
    p.m = static_cast<int>(std::lround(value));
  } else if (name == "n") {
    p.n = static_cast<int>(std::lround(value));
  } else if (name == "p_set") {
    p.p_set = value;
  } else if (name == "p_obs") {
    p.p_obs = value;
  } else if (name == "p_true") {
    p.p_true = value;
  } else if (name == "p_false") {
    p.p_true = 1.0 - value;
  } else {
    throw Error(ErrorCode::kInvalidParams, "unknown sweep axis '" + name + "'");
  }
}

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

void validate(const SweepSpec& spec) {
  for (const auto* axis : {&spec.axis1, &spec.axis2}) {
    if (!known_axis(axis->name)) throw Error(ErrorCode::kInvalidParams, "unknown sweep axis '" + axis->name + "'");
    if (axis->values.empty()) throw Error(ErrorCode::kInvalidParams, "axis '" + axis->name + "' has an empty grid");
  }
  if (canonical_axis(spec.axis1.name) == canonical_axis(spec.axis2.name)) {
    throw Error(ErrorCode::kInvalidParams, "sweep axes must be distinct parameters");
  }
  if (spec.trials < 1) throw Error(ErrorCode::kInvalidParams, "trials must be at least 1");
  for (double a : spec.axis1.values) {
    for (double b : spec.axis2.values) validate(cell_params(spec, a, b));
  }
}

ModelParams cell_params(const SweepSpec& spec, double value1, double value2) {
  ModelParams p = spec.fixed;
  apply_axis(p, spec.axis1.name, value1);
  apply_axis(p, spec.axis2.name, value2);
  return p;
}

std::uint64_t trial_seed(std::uint64_t base_seed, double value1, double value2, int trial) {
  std::uint64_t s = derive_seed(base_seed, "cell", std::bit_cast<std::uint64_t>(value1));
  s = derive_seed(s, "cell", std::bit_cast<std::uint64_t>(value2));
  return derive_seed(s, "trial", static_cast<std::uint64_t>(trial));
}

TrialOutcome run_trial(const ModelParams& params, const TrialOptions& options) {
  TrialOutcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    const Instance inst = generate(params);
    MatchOptions mo;
    if (options.m_known) mo.m = params.m;
    mo.lambda = options.lambda.value_or(options.lambda_scale * default_lambda(inst.graph));
    mo.admm = options.admm;
    if (options.timeout_seconds) {
      mo.admm.deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                     std::chrono::duration<double>(*options.timeout_seconds));
    }
    const MatchOutcome match = run_matchlift(inst.x_in, inst.graph, mo, params.seed);
    out.metrics = evaluate(match.rounded.maps, inst.x_gt);
    out.success = out.metrics.exact;
    out.iterations = match.solve.iterations;
    out.m_used = match.m_used;
  } catch (const Error& e) {
    out.status = e.code() == ErrorCode::kTimeout ? TrialStatus::kTimeout : TrialStatus::kFailed;
    out.error = e.what();
    out.metrics = MatchMetrics{0.0, 0.0, false, 0, 0, 0};
    log::warn(std::string("stage=trial status=") + (out.status == TrialStatus::kTimeout ? "timeout" : "failed") +
              " seed=" + std::to_string(params.seed));
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

int default_threads() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("MATCHLIFT_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) return std::min(cap, hw);
  }
  return hw;
}

SweepResult run_sweep(const SweepSpec& spec, int threads) {
  validate(spec);
  if (threads < 1) threads = default_threads();

  SweepResult result;
  result.axis1 = spec.axis1.name;
  result.axis2 = spec.axis2.name;
  result.grid1 = spec.axis1.values;
  result.grid2 = spec.axis2.values;
  const std::size_t cols = result.grid2.size();
  const std::size_t cells = result.grid1.size() * cols;
  const std::size_t trials = static_cast<std::size_t>(spec.trials);

  std::vector<TrialOutcome> outcomes(cells * trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t task = next++; task < outcomes.size(); task = next++) {
      const std::size_t cell = task / trials;
      const int t = static_cast<int>(task % trials);
      const double v1 = result.grid1[cell / cols], v2 = result.grid2[cell % cols];
      ModelParams p = cell_params(spec, v1, v2);
      p.seed = trial_seed(spec.base_seed, v1, v2, t);
      outcomes[task] = run_trial(p, spec.options);
      log::debug("stage=sweep " + spec.axis1.name + "=" + format_value(v1) + " " + spec.axis2.name + "=" +
                 format_value(v2) + " trial=" + std::to_string(t) +
                 " success=" + (outcomes[task].success ? "1" : "0"));
    }
  };
  const int workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), outcomes.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  result.cells.resize(cells);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    CellResult& c = result.cells[cell];
    c.value1 = result.grid1[cell / cols];
    c.value2 = result.grid2[cell % cols];
    c.trials = spec.trials;
    for (std::size_t t = 0; t < trials; ++t) {
      const TrialOutcome& o = outcomes[cell * trials + t];
      c.successes += o.success;
      c.failures += o.status == TrialStatus::kFailed;
      c.timeouts += o.status == TrialStatus::kTimeout;
      c.precision += o.metrics.precision;
      c.recall += o.metrics.recall;
      c.iterations += o.iterations;
      c.seconds += o.seconds;
    }
    const double count = static_cast<double>(trials);
    c.precision /= count;
    c.recall /= count;
    c.iterations /= count;
    c.seconds /= count;
  }
  return result;
}

void emit_csv(std::ostream& out, const SweepResult& result) {
  out << result.axis1 << ',' << result.axis2 << ",successes,trials,precision,recall,iters,seconds\n";
  char buf[256];
  for (const auto& c : result.cells) {
    std::snprintf(buf, sizeof buf, "%s,%s,%d,%d,%.6f,%.6f,%.2f,%.3f\n", format_value(c.value1).c_str(),
                  format_value(c.value2).c_str(), c.successes, c.trials, c.precision, c.recall, c.iterations,
                  c.seconds);
    out << buf;
  }
}

void emit_heatmap(std::ostream& out, const SweepResult& result) {
  constexpr int kCell = 40, kMarginLeft = 80, kMarginTop = 40;
  const int rows = static_cast<int>(result.grid1.size()), cols = static_cast<int>(result.grid2.size());
  const int width = kMarginLeft + cols * kCell + 10, height = kMarginTop + rows * kCell + 10;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  out << "<text x=\"4\" y=\"14\" font-size=\"12\">rows: " << result.axis1 << ", columns: " << result.axis2
      << "</text>\n";
  for (int b = 0; b < cols; ++b) {
    out << "<text x=\"" << kMarginLeft + b * kCell + 4 << "\" y=\"" << kMarginTop - 6 << "\" font-size=\"10\">"
        << format_value(result.grid2[static_cast<std::size_t>(b)]) << "</text>\n";
  }
  for (int a = 0; a < rows; ++a) {
    out << "<text x=\"4\" y=\"" << kMarginTop + a * kCell + kCell / 2 + 4 << "\" font-size=\"10\">"
        << format_value(result.grid1[static_cast<std::size_t>(a)]) << "</text>\n";
    for (int b = 0; b < cols; ++b) {
      const auto& c = result.cells[static_cast<std::size_t>(a) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(b)];
      const double p = c.trials ? static_cast<double>(c.successes) / c.trials : 0.0;
      const int red = static_cast<int>(std::lround(255.0 * (1.0 - p)));
      const int blue = static_cast<int>(std::lround(255.0 * p));
      out << "<rect class=\"cell\" x=\"" << kMarginLeft + b * kCell << "\" y=\"" << kMarginTop + a * kCell
          << "\" width=\"" << kCell << "\" height=\"" << kCell << "\" fill=\"rgb(" << red << ",0," << blue
          << ")\"/>\n";
    }
  }
  out << "</svg>\n";
}

namespace {

template <typename Emit>
void emit_to_file(const std::filesystem::path& path, const SweepResult& result, Emit emit) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  emit(out, result);
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace

void emit_csv(const std::filesystem::path& path, const SweepResult& result) {
  emit_to_file(path, result, [](std::ostream& o, const SweepResult& r) { emit_csv(o, r); });
}

void emit_heatmap(const std::filesystem::path& path, const SweepResult& result) {
  emit_to_file(path, result, [](std::ostream& o, const SweepResult& r) { emit_heatmap(o, r); });
}

SweepConfig parse_sweep_config(const json& j) {
  SweepConfig cfg;
  SweepSpec& s = cfg.spec;
  try {
    auto axis = [](const json& a) {
      return SweepAxis{a.at("name").get<std::string>(), a.at("values").get<std::vector<double>>()};
    };
    s.axis1 = axis(j.at("axis1"));
    s.axis2 = axis(j.at("axis2"));
    s.fixed = model_params_from_json(j.at("fixed"));
    s.trials = j.value("trials", 10);
    s.base_seed = j.value("seed", std::uint64_t{0});
    const std::string m = j.value("m", std::string("known"));
    if (m != "known" && m != "estimate") throw Error(ErrorCode::kInvalidParams, "m must be known or estimate");
    s.options.m_known = m == "known";
    if (j.contains("lambda")) s.options.lambda = j["lambda"].get<double>();
    s.options.lambda_scale = j.value("lambda_scale", 1.0);
    if (j.contains("admm")) {
      const json& a = j["admm"];
      s.options.admm.mu = a.value("mu", s.options.admm.mu);
      s.options.admm.max_iter = a.value("max_iter", s.options.admm.max_iter);
      s.options.admm.tol_feas = a.value("tol_feas", s.options.admm.tol_feas);
      s.options.admm.tol_change = a.value("tol_change", s.options.admm.tol_change);
    }
    if (j.contains("timeout_seconds")) s.options.timeout_seconds = j["timeout_seconds"].get<double>();
    if (j.contains("output")) {
      const json& o = j["output"];
      if (o.contains("csv")) cfg.csv_path = o["csv"].get<std::string>();
      if (o.contains("heatmap")) cfg.heatmap_path = o["heatmap"].get<std::string>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidParams, std::string("sweep config: ") + e.what());
  }
  validate(s);
  return cfg;
}

}  // namespace matchlift
