#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "matchlift/mapcore.hpp"

namespace matchlift {

struct TrimReport {
  int d_min = 0;
  std::vector<int> overrepresented;
  /// Edges (i < j) whose blocks were zeroed.
  std::vector<std::pair<int, int>> zeroed_edges;
  std::uint64_t seed = 0;
};

struct TrimResult {
  BlockMapMatrix matrix;
  TrimReport report;
};

/// Zeroes the blocks of edges discarded by over-represented vertices (degree
/// above 2 * d_min). Each such vertex keeps a uniformly random subset of
/// 2 * d_min incident edges; an edge is zeroed if either endpoint discards it.
/// The graph itself is not modified. Throws EmptyGraph when G has no edges.
TrimResult trim(const BlockMapMatrix& x_in, const MapGraph& graph, std::uint64_t seed);

struct MEstimate {
  int m_hat = 0;
  /// Descending spectrum of the trimmed input.
  std::vector<double> spectrum;
  TrimReport trim;
};

inline constexpr double kMinSpectralGap = 1e-12;

/// Universe-size estimate: the (1-based) index i in [M, N) maximising
/// |lambda_i - lambda_{i+1}| of the trimmed input, M = max(2, max_i m_i).
/// Ties go to the smallest index. Throws DegenerateSpectrum when the range is
/// empty or every gap is below kMinSpectralGap.
MEstimate estimate_m(const BlockMapMatrix& x_in, const MapGraph& graph, std::uint64_t seed);

/// The argmax step alone, on a given descending spectrum.
int eigengap_index(const std::vector<double>& spectrum, int lower);

}  // namespace matchlift
