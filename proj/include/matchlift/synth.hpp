#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "matchlift/mapcore.hpp"

namespace matchlift {

/// Parameters of the randomized partial-similarity model.
struct ModelParams {
  int m = 1;            // universe size
  int n = 2;            // number of objects
  double p_set = 1.0;   // element membership probability
  double p_obs = 1.0;   // pair observation probability
  double p_true = 1.0;  // probability an observed block is uncorrupted
  std::uint64_t seed = 0;

  double p_false() const { return 1.0 - p_true; }
  bool operator==(const ModelParams&) const = default;
};

/// Throws InvalidParams unless m >= 1, n >= 2 and probabilities lie in [0, 1].
void validate(const ModelParams& params);

/// Bookkeeping for an observed block that was replaced by an outlier: the
/// full-universe permutation it was restricted from.
struct Corruption {
  int i = 0;
  int j = 0;
  std::vector<int> permutation;
};

struct Instance {
  ModelParams params;
  MembershipMatrix truth;
  BlockMapMatrix x_gt;
  BlockMapMatrix x_in;
  MapGraph graph;
  std::vector<Corruption> corruptions;
};

/// Draws one instance. Points inside each object are listed in random order
/// so that block structure carries no positional hint.
Instance generate(const ModelParams& params);

struct EmpiricalStats {
  std::uint64_t membership_hits = 0;
  std::uint64_t membership_trials = 0;
  std::uint64_t observed = 0;
  std::uint64_t pair_trials = 0;
  std::uint64_t corrupted = 0;
  /// Entry sums of the augmented m x m corrupted block over all corrupted draws.
  std::vector<double> augmented_sum;
  std::uint64_t augmented_draws = 0;

  double membership_rate() const;
  double observation_rate() const;
  double corruption_rate() const;
  /// Mean of the augmented corrupted block, m x m row-major.
  std::vector<double> augmented_mean() const;
};

/// Regenerates `trials` instances with seeds derived from params.seed and
/// tallies the model's observable frequencies.
EmpiricalStats empirical_stats(const ModelParams& params, int trials);

}  // namespace matchlift
