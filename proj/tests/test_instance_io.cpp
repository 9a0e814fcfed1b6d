#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "matchlift/instance_io.hpp"
#include "matchlift/synth.hpp"
#include "test_util.hpp"

using namespace matchlift;

namespace {

std::string written(const InstanceFile& f) {
  std::ostringstream out;
  write_instance(out, f);
  return out.str();
}

InstanceFile parse(const std::string& text, SymmetrizePolicy policy = SymmetrizePolicy::kReject) {
  std::istringstream in(text);
  return read_instance(in, policy);
}

}  // namespace

TEST_CASE("hand-written instance parses") {
  const std::string text =
      "3 3\n"
      "0: 0 1\n"
      "1: 1 2\n"
      "2: 2 0\n"
      "0 1 1\n"
      "1 0\n"
      "1 2 1\n"
      "1 0\n";
  const auto f = parse(text);
  CHECK(f.m == 3);
  CHECK(f.sizes() == std::vector<int>{2, 2, 2});
  CHECK(f.graph.edge_count() == 2);
  CHECK(f.x_in.at(1, 2) == 1.0);
  CHECK(f.x_in.at(3, 4) == 1.0);
  CHECK(f.x_in.at(0, 5) == 0.0);  // pair (0,2) unobserved
  const auto y = f.truth();
  REQUIRE(y.has_value());
  CHECK(y->labels == std::vector<int>{0, 1, 1, 2, 2, 0});
  CHECK(written(f) == text);
}

TEST_CASE("generated instances round-trip byte for byte") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Instance inst = generate({7, 6, 0.6, 0.7, 0.5, seed});
    const InstanceFile f = to_instance_file(inst);
    const std::string text = written(f);
    const InstanceFile back = parse(text);
    CHECK(back.x_in == inst.x_in);
    CHECK(back.graph == inst.graph);
    CHECK(back.truth()->gram() == inst.x_gt);
    CHECK(written(back) == text);
  }
}

TEST_CASE("observed empty blocks survive") {
  const std::string text = "2 0\n0: 0\n1: 0\n0 1 0\n";
  const auto f = parse(text);
  CHECK(f.graph.has_edge(0, 1));
  CHECK(f.x_in.block(0, 1).is_zero());
  CHECK(!f.truth().has_value());
  CHECK(written(f) == text);
}

TEST_CASE("parse errors carry line numbers") {
  try {
    parse("2 0\n0: 0\n1: x\n");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParse);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_CODE(parse("2\n"), ErrorCode::kParse);
  CHECK_CODE(parse("2 0\n0: 0\n"), ErrorCode::kParse);
  CHECK_CODE(parse("2 0\n1: 0\n0: 0\n"), ErrorCode::kParse);
  CHECK_CODE(parse("2 0\n0: 0\n1: 0\n0 0 0\n"), ErrorCode::kParse);
  CHECK_CODE(parse("2 0\n0: 0\n1: 0\n0 1 2\n0 0\n"), ErrorCode::kParse);
}

TEST_CASE("sub-stochasticity and symmetry are enforced") {
  CHECK_CODE(parse("2 0\n0: 0 1\n1: 0 1\n0 1 2\n0 0\n0 1\n"), ErrorCode::kParse);
  const std::string asym = "2 0\n0: 0 1\n1: 0 1\n0 1 1\n0 0\n1 0 1\n1 1\n";
  CHECK_CODE(parse(asym), ErrorCode::kAsymmetricInput);
  const auto merged = parse(asym, SymmetrizePolicy::kTransposeOr);
  CHECK(merged.x_in.block(0, 1).nnz() == 2);
}

TEST_CASE("truth labels are validated") {
  CHECK_CODE(parse("2 2\n0: 0 0\n1: 1\n"), ErrorCode::kInvalidParams);
  CHECK_CODE(parse("2 2\n0: 0 5\n1: 1\n"), ErrorCode::kInvalidParams);
}

TEST_CASE("rounded output as instance file") {
  const Instance inst = generate({4, 4, 1, 1, 1, 5});
  const InstanceFile f = to_instance_file(inst.x_gt);
  CHECK(f.m == 4);
  CHECK(f.truth()->gram() == inst.x_gt);
  CHECK(f.graph.edge_count() == 6);
  CHECK_CODE(to_instance_file(inst.x_gt.to_relaxed()), ErrorCode::kInvalidParams);
}

TEST_CASE("relaxed matrix round trip is exact") {
  BlockMapMatrix x({2, 1, 2}, BlockMode::kRelaxed);
  x.set_block(0, 1, PartialMapBlock::relaxed(2, 1, {0.1, 1.0 / 3.0}));
  x.set_block(1, 2, PartialMapBlock::relaxed(1, 2, {-1e-12, 0.7071067811865476}));
  x.set_block(0, 2, PartialMapBlock::relaxed(2, 2, {0.25, 0, 0, 0.999999999999}));
  std::ostringstream out;
  write_relaxed(out, x);
  std::istringstream in(out.str());
  CHECK(read_relaxed(in) == x);
  std::istringstream bad("relaxed 3 1\n3\n1 2\n");
  CHECK_CODE(read_relaxed(bad), ErrorCode::kParse);
}

TEST_CASE("file helpers report paths") {
  const auto dir = std::filesystem::temp_directory_path() / "matchlift_io_test";
  std::filesystem::create_directories(dir);
  const Instance inst = generate({3, 3, 1, 1, 1, 1});
  save_instance(dir / "a.txt", to_instance_file(inst));
  CHECK(load_instance(dir / "a.txt").x_in == inst.x_in);
  try {
    load_instance(dir / "missing.txt");
    FAIL("expected an IO error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIo);
    CHECK(std::string(e.what()).find("missing.txt") != std::string::npos);
  }
  CHECK_CODE(write_text_file(dir / "no" / "such" / "dir.txt", "x"), ErrorCode::kIo);
  std::filesystem::remove_all(dir);
}
