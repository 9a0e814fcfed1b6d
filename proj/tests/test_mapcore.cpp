#include <doctest.h>

#include <variant>

#include "matchlift/mapcore.hpp"
#include "matchlift/rng.hpp"
#include "matchlift/synth.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace matchlift;

namespace {

PartialMapBlock perm_block(std::vector<int> perm) {
  std::vector<Correspondence> ones;
  for (int r = 0; r < static_cast<int>(perm.size()); ++r) ones.push_back({r, perm[static_cast<std::size_t>(r)]});
  const int n = static_cast<int>(perm.size());
  return PartialMapBlock::binary(n, n, ones);
}

}  // namespace

TEST_CASE("binary block construction") {
  auto b = PartialMapBlock::binary(2, 3, {{1, 2}, {0, 0}});
  CHECK(b.nnz() == 2);
  CHECK(b.ones()[0] == Correspondence{0, 0});
  CHECK(b.at(1, 2) == 1.0);
  CHECK(b.at(1, 1) == 0.0);
  CHECK(b.transposed().at(2, 1) == 1.0);
  CHECK_CODE(PartialMapBlock::binary(2, 2, {{0, 0}, {0, 0}}), ErrorCode::kInvalidParams);
  CHECK_CODE(PartialMapBlock::binary(2, 2, {{2, 0}}), ErrorCode::kShapeMismatch);
  CHECK_CODE(PartialMapBlock::relaxed(2, 2, {0.5}), ErrorCode::kShapeMismatch);
  CHECK(PartialMapBlock::zeros(3, 4).is_zero());
  CHECK(PartialMapBlock::identity(3).nnz() == 3);
}

TEST_CASE("validate_substochastic examples") {
  CHECK(validate_substochastic(PartialMapBlock::zeros(3, 3)).empty());
  CHECK(validate_substochastic(perm_block({2, 0, 1})).empty());

  auto two_in_row = PartialMapBlock::binary(2, 3, {{0, 0}, {0, 2}});
  auto v = validate_substochastic(two_in_row);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == SubstochasticViolation::Kind::kRow);
  CHECK(v[0].index == 0);
  CHECK(v[0].value == 2.0);

  auto two_in_col = PartialMapBlock::binary(2, 2, {{0, 1}, {1, 1}});
  v = validate_substochastic(two_in_col);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == SubstochasticViolation::Kind::kCol);
  CHECK(v[0].index == 1);

  SUBCASE("relaxed slack") {
    CHECK(validate_substochastic(PartialMapBlock::relaxed(1, 2, {0.5, 0.5 + 5e-10})).empty());
    CHECK(validate_substochastic(PartialMapBlock::relaxed(1, 2, {0.5, 0.5 + 1e-8})).size() == 1);
    auto out_of_range = validate_substochastic(PartialMapBlock::relaxed(1, 2, {-0.1, 0.0}));
    REQUIRE(out_of_range.size() == 1);
    CHECK(out_of_range[0].kind == SubstochasticViolation::Kind::kRange);
  }
}

TEST_CASE("map graph") {
  MapGraph g(4);
  g.add_edge(2, 0);
  g.add_edge(0, 2);
  g.add_edge(1, 3);
  CHECK(g.edge_count() == 2);
  CHECK(g.edges()[0] == std::pair{0, 2});
  CHECK(g.has_edge(2, 0));
  CHECK(!g.has_edge(0, 1));
  CHECK(g.degree(0) == 1);
  CHECK(!g.is_connected());
  g.add_edge(0, 1);
  CHECK(g.is_connected());
  CHECK(g.neighbors(0) == std::vector<int>{1, 2});
  CHECK_CODE(g.add_edge(1, 1), ErrorCode::kInvalidParams);
  CHECK_CODE(g.add_edge(0, 4), ErrorCode::kShapeMismatch);
  CHECK(MapGraph::complete(5).edge_count() == 10);
}

TEST_CASE("assemble: identity map on sizes [2,2]") {
  std::vector<BlockEntry> blocks{{0, 1, PartialMapBlock::identity(2)}};
  auto x = assemble({2, 2}, blocks);
  for (int p = 0; p < 4; ++p)
    for (int q = 0; q < 4; ++q) CHECK(x.at(p, q) == (p % 2 == q % 2 ? 1.0 : 0.0));
}

TEST_CASE("assemble: transposed lower block on sizes [2,3]") {
  auto b = PartialMapBlock::binary(2, 3, {{0, 0}, {1, 2}});
  std::vector<BlockEntry> blocks{{0, 1, b}};
  auto x = assemble({2, 3}, blocks);
  CHECK(x.block(1, 0) == b.transposed());
  CHECK(x.block(0, 0) == PartialMapBlock::identity(2));
  CHECK(x.block(1, 1) == PartialMapBlock::identity(3));
  CHECK(x.at(4, 1) == 1.0);  // point 2 of object 1 <-> point 1 of object 0
}

TEST_CASE("assemble: hand-built consistent Y with m = 3 gives Y Y^T") {
  // Objects of size 2 over universe {0,1,2}: S_0 = {0,1}, S_1 = {1,2}, S_2 = {2,0}.
  const std::vector<int> labels{0, 1, 1, 2, 2, 0};
  std::vector<BlockEntry> blocks{
      {0, 1, PartialMapBlock::binary(2, 2, {{1, 0}})},
      {0, 2, PartialMapBlock::binary(2, 2, {{0, 1}})},
      {1, 2, PartialMapBlock::binary(2, 2, {{1, 0}})},
  };
  auto x = assemble({2, 2, 2}, blocks);
  CHECK(oracle::dense_of(x) == oracle::gram_of_labels(labels, 3));
}

TEST_CASE("assemble: symmetry handling") {
  auto b = PartialMapBlock::binary(2, 2, {{0, 1}});
  std::vector<BlockEntry> agree{{0, 1, b}, {1, 0, b.transposed()}};
  CHECK(assemble({2, 2}, agree).block(0, 1) == b);

  std::vector<BlockEntry> clash{{0, 1, b}, {1, 0, PartialMapBlock::binary(2, 2, {{0, 0}})}};
  CHECK_CODE(assemble({2, 2}, clash), ErrorCode::kAsymmetricInput);
  // union {(0,1)} + {(0,0)} in upper orientation: row 0 gets two entries.
  CHECK_CODE(assemble({2, 2}, clash, SymmetrizePolicy::kTransposeOr), ErrorCode::kAsymmetricInput);

  std::vector<BlockEntry> mergeable{{0, 1, b}, {1, 0, PartialMapBlock::binary(2, 2, {{0, 1}})}};
  auto merged = assemble({2, 2}, mergeable, SymmetrizePolicy::kTransposeOr);
  CHECK(merged.block(0, 1) == PartialMapBlock::binary(2, 2, {{0, 1}, {1, 0}}));

  std::vector<BlockEntry> bad_shape{{0, 1, PartialMapBlock::zeros(3, 2)}};
  CHECK_CODE(assemble({2, 2}, bad_shape), ErrorCode::kShapeMismatch);
  std::vector<BlockEntry> bad_diag{{0, 0, PartialMapBlock::zeros(2, 2)}};
  CHECK_CODE(assemble({2, 2}, bad_diag), ErrorCode::kInvalidParams);
}

TEST_CASE("assemble o extract is the identity on generated instances") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    ModelParams p{5, 6, 0.7, 0.6, 0.5, seed};
    const Instance inst = generate(p);
    const auto blocks = extract(inst.x_in);
    for (const auto& e : blocks) CHECK(e.i < e.j);
    CHECK(assemble(inst.x_in.sizes(), blocks) == inst.x_in);
  }
}

TEST_CASE("dense round trip and binary check") {
  const Instance inst = generate({4, 4, 0.8, 1, 1, 3});
  const auto dense = inst.x_gt.to_dense();
  CHECK(BlockMapMatrix::from_dense(inst.x_gt.sizes(), dense, BlockMode::kBinary) == inst.x_gt);
  // A fractional entry inside an off-diagonal block.
  const auto total = static_cast<std::size_t>(inst.x_gt.order());
  const auto p = static_cast<std::size_t>(inst.x_gt.offset(0)), q = static_cast<std::size_t>(inst.x_gt.offset(1));
  REQUIRE(inst.x_gt.size(0) > 0);
  REQUIRE(inst.x_gt.size(1) > 0);
  auto broken = dense;
  broken[p * total + q] = broken[q * total + p] = 0.5;
  CHECK_CODE(BlockMapMatrix::from_dense(inst.x_gt.sizes(), broken, BlockMode::kBinary), ErrorCode::kInvalidParams);
  CHECK(inst.x_gt.to_relaxed().to_dense() == dense);
}

TEST_CASE("factorize: swap-swap-identity triangle") {
  // n = 3, m = 2, every set holds both elements.
  auto swap = perm_block({1, 0});
  auto id = PartialMapBlock::identity(2);
  SUBCASE("consistent") {
    std::vector<BlockEntry> blocks{{0, 1, swap}, {1, 2, swap}, {0, 2, id}};
    auto x = assemble({2, 2, 2}, blocks);
    auto f = factorize_consistent(x);
    REQUIRE(std::holds_alternative<MembershipMatrix>(f));
    auto y = std::get<MembershipMatrix>(f);
    CHECK(y.universe_size == 2);
    CHECK(y.gram() == x);
    CHECK(oracle::triangles_consistent(x));
  }
  SUBCASE("inconsistent") {
    std::vector<BlockEntry> blocks{{0, 1, swap}, {1, 2, swap}, {0, 2, swap}};
    auto x = assemble({2, 2, 2}, blocks);
    auto f = factorize_consistent(x);
    REQUIRE(std::holds_alternative<Inconsistent>(f));
    auto w = std::get<Inconsistent>(f);
    std::vector<int> cyc{w.cycle.i, w.cycle.j, w.cycle.k};
    std::sort(cyc.begin(), cyc.end());
    CHECK(cyc == std::vector<int>{0, 1, 2});
    CHECK(x.at(w.a, w.b) == 1.0);
    CHECK(x.at(w.b, w.c) == 1.0);
    CHECK(x.at(w.a, w.c) == 0.0);
    CHECK(!oracle::triangles_consistent(x));
  }
}

TEST_CASE("factorize recovers generated ground truth") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Instance inst = generate({6, 5, 0.6, 0.5, 0.5, seed});
    auto f = factorize_consistent(inst.x_gt);
    REQUIRE(std::holds_alternative<MembershipMatrix>(f));
    const auto& y = std::get<MembershipMatrix>(f);
    CHECK(y.gram() == inst.x_gt);
    CHECK(oracle::dense_of(y.gram()) == oracle::gram_of_labels(inst.truth.labels, inst.truth.universe_size));
    // Canonical labels: first appearance order.
    int next = 0;
    for (int l : y.labels) {
      CHECK(l <= next);
      if (l == next) ++next;
    }
  }
}

TEST_CASE("factorize agrees with exhaustive triangle check on random binary collections") {
  // Random partial permutations between every pair; N <= 12.
  int consistent = 0, inconsistent = 0;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    Rng rng(seed);
    const int n = 2 + static_cast<int>(rng.below(3));
    std::vector<int> sizes;
    int total = 0;
    for (int i = 0; i < n; ++i) {
      sizes.push_back(static_cast<int>(rng.below(4)));
      total += sizes.back();
    }
    if (total > 12) continue;
    BlockMapMatrix x(sizes, BlockMode::kBinary);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const int k = std::max(sizes[static_cast<std::size_t>(i)], sizes[static_cast<std::size_t>(j)]);
        auto perm = rng.permutation(k);
        std::vector<Correspondence> ones;
        for (int r = 0; r < sizes[static_cast<std::size_t>(i)]; ++r) {
          const int c = perm[static_cast<std::size_t>(r)];
          if (c < sizes[static_cast<std::size_t>(j)] && rng.bernoulli(0.7)) ones.push_back({r, c});
        }
        x.set_block(i, j, PartialMapBlock::binary(sizes[static_cast<std::size_t>(i)],
                                                  sizes[static_cast<std::size_t>(j)], ones));
      }
    const bool ok = std::holds_alternative<MembershipMatrix>(factorize_consistent(x));
    CHECK(ok == oracle::triangles_consistent(x));
    (ok ? consistent : inconsistent)++;
  }
  CHECK(consistent > 20);
  CHECK(inconsistent > 20);
}

TEST_CASE("membership and universe") {
  auto y = make_membership({2, 1, 0, 3}, {0, 2, 2, 0, 1, 2}, 4);
  CHECK(y.label(3, 1) == 1);
  const auto u = universe_of(y);
  CHECK(u.m == 4);
  CHECK(u.occupancy == std::vector<int>{2, 1, 3, 0});
  int sum = 0;
  for (int o : u.occupancy) sum += o;
  CHECK(sum == y.order());
  CHECK(y.dense().size() == 6u * 4u);
  CHECK(oracle::dense_of(y.gram()) == oracle::gram_of_labels(y.labels, 4));
  CHECK_CODE(make_membership({2}, {1, 1}, 2), ErrorCode::kInvalidParams);
  CHECK_CODE(make_membership({2}, {0, 5}, 2), ErrorCode::kInvalidParams);
  CHECK_CODE(make_membership({2}, {0}, 2), ErrorCode::kShapeMismatch);
  CHECK(canonical_labels(std::vector<int>{7, 3, 7, 1}) == std::vector<int>{0, 1, 0, 2});
}

TEST_CASE("empty objects keep stable indexing") {
  BlockMapMatrix x({2, 0, 1}, BlockMode::kBinary);
  CHECK(x.order() == 3);
  CHECK(x.offset(2) == 2);
  CHECK(x.object_of(2) == 2);
  CHECK(x.block(0, 1).rows() == 2);
  CHECK(x.block(0, 1).cols() == 0);
  CHECK(std::holds_alternative<MembershipMatrix>(factorize_consistent(x)));
}
