#include "matchlift/synth.hpp"

#include <string>

#include "matchlift/error.hpp"
#include "matchlift/rng.hpp"

namespace matchlift {

namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

void validate(const ModelParams& params) {
  if (params.m < 1) throw Error(ErrorCode::kInvalidParams, "m must be at least 1");
  if (params.n < 2) throw Error(ErrorCode::kInvalidParams, "n must be at least 2");
  if (!is_probability(params.p_set) || !is_probability(params.p_obs) || !is_probability(params.p_true)) {
    throw Error(ErrorCode::kInvalidParams, "probabilities must lie in [0, 1]");
  }
}

Instance generate(const ModelParams& params) {
  validate(params);
  Rng rng(params.seed);
  const int m = params.m, n = params.n;

  std::vector<int> sizes;
  std::vector<int> labels;
  sizes.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::vector<int> members;
    for (int s = 0; s < m; ++s) {
      if (rng.bernoulli(params.p_set)) members.push_back(s);
    }
    rng.shuffle(std::span<int>(members));
    sizes.push_back(static_cast<int>(members.size()));
    labels.insert(labels.end(), members.begin(), members.end());
  }

  Instance inst;
  inst.params = params;
  inst.truth = make_membership(sizes, labels, m);
  inst.x_gt = inst.truth.gram();
  inst.x_in = BlockMapMatrix(sizes, BlockMode::kBinary);
  inst.graph = MapGraph(n);

  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!rng.bernoulli(params.p_obs)) continue;
      inst.graph.add_edge(i, j);
      if (rng.bernoulli(params.p_true)) {
        inst.x_in.set_block(i, j, inst.x_gt.block(i, j));
        continue;
      }
      // Outlier: a uniform permutation of the whole universe restricted to
      // S_i x S_j, so the augmented block has mean (1/m) 1 1^T.
      auto perm = rng.permutation(m);
      std::vector<int> row_of(static_cast<std::size_t>(m), -1);
      for (int c = 0; c < inst.x_in.size(j); ++c) {
        row_of[static_cast<std::size_t>(inst.truth.labels[static_cast<std::size_t>(inst.x_in.offset(j) + c)])] = c;
      }
      std::vector<Correspondence> ones;
      for (int r = 0; r < inst.x_in.size(i); ++r) {
        const int s = inst.truth.labels[static_cast<std::size_t>(inst.x_in.offset(i) + r)];
        const int c = row_of[static_cast<std::size_t>(perm[static_cast<std::size_t>(s)])];
        if (c >= 0) ones.push_back({r, c});
      }
      inst.x_in.set_block(i, j, PartialMapBlock::binary(inst.x_in.size(i), inst.x_in.size(j), std::move(ones)));
      inst.corruptions.push_back({i, j, std::move(perm)});
    }
  }
  return inst;
}

double EmpiricalStats::membership_rate() const {
  return membership_trials ? static_cast<double>(membership_hits) / static_cast<double>(membership_trials) : 0.0;
}

double EmpiricalStats::observation_rate() const {
  return pair_trials ? static_cast<double>(observed) / static_cast<double>(pair_trials) : 0.0;
}

double EmpiricalStats::corruption_rate() const {
  return observed ? static_cast<double>(corrupted) / static_cast<double>(observed) : 0.0;
}

std::vector<double> EmpiricalStats::augmented_mean() const {
  std::vector<double> mean(augmented_sum.size(), 0.0);
  if (augmented_draws == 0) return mean;
  for (std::size_t k = 0; k < mean.size(); ++k) mean[k] = augmented_sum[k] / static_cast<double>(augmented_draws);
  return mean;
}

EmpiricalStats empirical_stats(const ModelParams& params, int trials) {
  validate(params);
  if (trials < 1) throw Error(ErrorCode::kInvalidParams, "trials must be at least 1");
  const std::size_t m = static_cast<std::size_t>(params.m);
  EmpiricalStats stats;
  stats.augmented_sum.assign(m * m, 0.0);
  for (int t = 0; t < trials; ++t) {
    ModelParams p = params;
    p.seed = derive_seed(params.seed, "stats", static_cast<std::uint64_t>(t));
    const Instance inst = generate(p);
    stats.membership_hits += static_cast<std::uint64_t>(inst.x_gt.order());
    stats.membership_trials += static_cast<std::uint64_t>(params.m) * static_cast<std::uint64_t>(params.n);
    stats.pair_trials += static_cast<std::uint64_t>(params.n) * static_cast<std::uint64_t>(params.n - 1) / 2;
    stats.observed += inst.graph.edge_count();
    stats.corrupted += inst.corruptions.size();
    for (const auto& c : inst.corruptions) {
      for (std::size_t s = 0; s < m; ++s) {
        stats.augmented_sum[s * m + static_cast<std::size_t>(c.permutation[s])] += 1.0;
      }
      ++stats.augmented_draws;
    }
  }
  return stats;
}

}  // namespace matchlift
