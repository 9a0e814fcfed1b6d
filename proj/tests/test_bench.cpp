#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "matchlift/bench.hpp"
#include "test_util.hpp"

using namespace matchlift;

namespace {

SweepSpec small_spec() {
  SweepSpec s;
  s.axis1 = {"p_false", {0.0, 0.4}};
  s.axis2 = {"n", {4, 5}};
  s.fixed = {3, 4, 1, 1, 1, 0};
  s.trials = 3;
  s.base_seed = 77;
  return s;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::string csv_of(const SweepResult& r) {
  std::ostringstream out;
  emit_csv(out, r);
  return out.str();
}

// CSV with the wall-time column removed.
std::string csv_without_time(const SweepResult& r) {
  std::string out;
  for (const auto& line : lines_of(csv_of(r))) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

}  // namespace

TEST_CASE("noiseless 1x1 grid succeeds every time") {
  SweepSpec s;
  s.axis1 = {"p_false", {0.0}};
  s.axis2 = {"m", {3}};
  s.fixed = {3, 6, 1, 1, 1, 0};
  s.trials = 10;
  const auto r = run_sweep(s, 1);
  REQUIRE(r.cells.size() == 1);
  CHECK(r.cells[0].successes == 10);
  CHECK(r.cells[0].trials == 10);
  CHECK(r.cells[0].precision == 1.0);
  CHECK(r.cells[0].recall == 1.0);
  const auto lines = lines_of(csv_of(r));
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "p_false,m,successes,trials,precision,recall,iters,seconds");
  CHECK(lines[1].rfind("0,3,10,10,1.000000,1.000000,", 0) == 0);

  std::ostringstream svg;
  emit_heatmap(svg, r);
  CHECK(svg.str().find("<svg") == 0);
  CHECK(svg.str().find("class=\"cell\"") != std::string::npos);
  CHECK(svg.str().find("fill=\"rgb(0,0,255)\"") != std::string::npos);
}

TEST_CASE("2x2 grid: row-major CSV, deterministic, thread-independent") {
  const auto spec = small_spec();
  const auto a = run_sweep(spec, 1);
  const auto b = run_sweep(spec, 2);
  const auto lines = lines_of(csv_of(a));
  REQUIRE(lines.size() == 5);
  CHECK(lines[1].rfind("0,4,", 0) == 0);
  CHECK(lines[2].rfind("0,5,", 0) == 0);
  CHECK(lines[3].rfind("0.4,4,", 0) == 0);
  CHECK(lines[4].rfind("0.4,5,", 0) == 0);
  CHECK(csv_without_time(a) == csv_without_time(b));
  CHECK(csv_without_time(a) == csv_without_time(run_sweep(spec, 1)));
  for (const auto& c : a.cells) CHECK(c.successes <= c.trials);
}

TEST_CASE("sub-grid cells reproduce full-grid cells") {
  const auto spec = small_spec();
  const auto full = run_sweep(spec, 1);
  auto sub = spec;
  sub.axis1.values = {0.4};
  sub.axis2.values = {5};
  const auto part = run_sweep(sub, 1);
  const auto& f = full.cells[3];
  const auto& p = part.cells[0];
  CHECK(f.value1 == p.value1);
  CHECK(f.value2 == p.value2);
  CHECK(f.successes == p.successes);
  CHECK(f.precision == p.precision);
  CHECK(f.recall == p.recall);
  CHECK(f.iterations == p.iterations);
}

TEST_CASE("all-success heatmap is uniformly blue; all-failure is red") {
  SweepResult r;
  r.axis1 = "p_obs";
  r.axis2 = "n";
  r.grid1 = {0.5, 1.0};
  r.grid2 = {10, 20, 30};
  for (double a : r.grid1)
    for (double b : r.grid2) r.cells.push_back({a, b, 10, 10, 0, 0, 1, 1, 50, 0.1});
  std::ostringstream svg;
  emit_heatmap(svg, r);
  const std::string text = svg.str();
  std::size_t cells = 0, blue = 0;
  for (std::size_t pos = text.find("class=\"cell\""); pos != std::string::npos; pos = text.find("class=\"cell\"", pos + 1)) {
    ++cells;
    const auto end = text.find("/>", pos);
    blue += text.substr(pos, end - pos).find("fill=\"rgb(0,0,255)\"") != std::string::npos;
  }
  CHECK(cells == 6);
  CHECK(blue == 6);
  for (auto& c : r.cells) c.successes = 0;
  std::ostringstream red;
  emit_heatmap(red, r);
  CHECK(red.str().find("rgb(0,0,255)") == std::string::npos);
  CHECK(red.str().find("fill=\"rgb(255,0,0)\"") != std::string::npos);
}

TEST_CASE("sweep validation") {
  auto s = small_spec();
  s.axis1.name = "bogus";
  CHECK_CODE(validate(s), ErrorCode::kInvalidParams);
  s = small_spec();
  s.axis1.name = "p_true";
  s.axis2.name = "p_false";
  CHECK_CODE(validate(s), ErrorCode::kInvalidParams);
  s = small_spec();
  s.axis2.values.clear();
  CHECK_CODE(validate(s), ErrorCode::kInvalidParams);
  s = small_spec();
  s.trials = 0;
  CHECK_CODE(validate(s), ErrorCode::kInvalidParams);
  s = small_spec();
  s.axis2.values = {1};  // n = 1 is not a valid model
  CHECK_CODE(run_sweep(s), ErrorCode::kInvalidParams);
}

TEST_CASE("cell params and seeds") {
  const auto spec = small_spec();
  const auto p = cell_params(spec, 0.4, 5);
  CHECK(p.p_true == doctest::Approx(0.6));
  CHECK(p.n == 5);
  CHECK(p.m == 3);
  CHECK(trial_seed(1, 0.4, 5, 0) == trial_seed(1, 0.4, 5, 0));
  CHECK(trial_seed(1, 0.4, 5, 0) != trial_seed(1, 0.4, 5, 1));
  CHECK(trial_seed(1, 0.4, 5, 0) != trial_seed(1, 5, 0.4, 0));
  CHECK(trial_seed(1, 0.4, 5, 0) != trial_seed(2, 0.4, 5, 0));
}

TEST_CASE("per-trial failures and timeouts never abort the sweep") {
  SUBCASE("timeouts") {
    auto s = small_spec();
    s.options.timeout_seconds = 0.0;
    const auto r = run_sweep(s, 1);
    for (const auto& c : r.cells) {
      CHECK(c.timeouts == c.trials);
      CHECK(c.successes == 0);
    }
    const auto t = run_trial({3, 4, 1, 1, 1, 1}, s.options);
    CHECK(t.status == TrialStatus::kTimeout);
    CHECK(!t.success);
  }
  SUBCASE("estimation failure") {
    // Two singleton objects: the eigengap range is empty.
    TrialOptions opts;
    opts.m_known = false;
    const auto t = run_trial({1, 2, 1, 1, 1, 1}, opts);
    CHECK(t.status == TrialStatus::kFailed);
    CHECK(t.error.find("DegenerateSpectrum") != std::string::npos);
  }
}

TEST_CASE("lambda options") {
  TrialOptions opts;
  opts.lambda_scale = 2.0;
  const auto t = run_trial({3, 6, 1, 1, 1, 4}, opts);
  CHECK(t.status == TrialStatus::kOk);
  CHECK(t.success);
  opts.lambda = -1.0;
  CHECK(run_trial({3, 6, 1, 1, 1, 4}, opts).status == TrialStatus::kFailed);
}

TEST_CASE("thread count from the environment") {
  ::setenv("MATCHLIFT_THREADS", "1", 1);
  CHECK(default_threads() == 1);
  ::setenv("MATCHLIFT_THREADS", "junk", 1);
  CHECK(default_threads() >= 1);
  ::unsetenv("MATCHLIFT_THREADS");
  CHECK(default_threads() >= 1);
}

TEST_CASE("sweep config parsing") {
  const auto j = nlohmann::json::parse(R"({
    "axis1": {"name": "p_false", "values": [0, 0.2]},
    "axis2": {"name": "n", "values": [20, 40]},
    "fixed": {"m": 8, "n": 40, "p_set": 1, "p_obs": 1, "p_true": 1},
    "trials": 4, "seed": 9, "m": "estimate", "lambda_scale": 0.5,
    "admm": {"mu": 2, "max_iter": 100},
    "timeout_seconds": 30,
    "output": {"csv": "a.csv", "heatmap": "a.svg"}
  })");
  const auto cfg = parse_sweep_config(j);
  CHECK(cfg.spec.axis1.name == "p_false");
  CHECK(cfg.spec.axis2.values == std::vector<double>{20, 40});
  CHECK(cfg.spec.fixed.m == 8);
  CHECK(cfg.spec.trials == 4);
  CHECK(cfg.spec.base_seed == 9);
  CHECK(!cfg.spec.options.m_known);
  CHECK(cfg.spec.options.lambda_scale == 0.5);
  CHECK(cfg.spec.options.admm.mu == 2);
  CHECK(cfg.spec.options.admm.max_iter == 100);
  CHECK(cfg.spec.options.admm.tol_feas == 1e-5);
  CHECK(*cfg.spec.options.timeout_seconds == 30);
  CHECK(cfg.csv_path->string() == "a.csv");
  CHECK(cfg.heatmap_path->string() == "a.svg");

  auto bad = j;
  bad["m"] = "sometimes";
  CHECK_CODE(parse_sweep_config(bad), ErrorCode::kInvalidParams);
  bad = j;
  bad.erase("axis1");
  CHECK_CODE(parse_sweep_config(bad), ErrorCode::kInvalidParams);
}

TEST_CASE("csv and heatmap files") {
  const auto dir = std::filesystem::temp_directory_path() / "matchlift_bench_test";
  std::filesystem::create_directories(dir);
  SweepResult r;
  r.axis1 = "m";
  r.axis2 = "n";
  r.grid1 = {3};
  r.grid2 = {6};
  r.cells.push_back({3, 6, 5, 10, 0, 0, 0.9, 0.8, 120, 0.5});
  emit_csv(dir / "s.csv", r);
  emit_heatmap(dir / "s.svg", r);
  CHECK(std::filesystem::file_size(dir / "s.csv") > 0);
  CHECK(std::filesystem::file_size(dir / "s.svg") > 0);
  CHECK_CODE(emit_csv(dir / "missing" / "s.csv", r), ErrorCode::kIo);
  std::filesystem::remove_all(dir);
}
