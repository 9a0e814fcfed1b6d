#pragma once

#include <vector>

#include "matchlift/mapcore.hpp"

namespace matchlift {

inline constexpr double kRoundingThreshold = 0.5;
inline constexpr double kDegenerateRowNorm = 1e-12;

struct RoundingResult {
  BlockMapMatrix maps;
  /// Cluster id per point, numbered in order of creation.
  std::vector<int> labels;
  int clusters = 0;
};

/// Greedy rounding of a fractional solution. Embeds the points as rows of
/// V = U Sigma^{1/2} from the top-r eigenpairs (eigenvalues clamped at 0),
/// then repeatedly takes the first unassigned row as a pivot, reflects V so
/// the pivot lies on e_1, and adds to the pivot's cluster, per other object,
/// the unassigned row with the largest first coordinate provided it exceeds
/// 0.5 (ties to the lowest row). Throws InvalidR unless 1 <= r <= N.
RoundingResult round_solution(const BlockMapMatrix& x_hat, int r);

struct MatchMetrics {
  double precision = 1.0;
  double recall = 1.0;
  bool exact = false;
  std::size_t recovered = 0;
  std::size_t truth = 0;
  std::size_t correct = 0;
};

/// Off-diagonal correspondence precision/recall. Precision is 1 when nothing
/// is recovered; recall is 1 when the truth has no correspondences.
MatchMetrics evaluate(const BlockMapMatrix& rounded, const BlockMapMatrix& truth);

}  // namespace matchlift
