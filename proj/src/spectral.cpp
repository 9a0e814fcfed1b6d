#include "matchlift/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "matchlift/eig.hpp"
#include "matchlift/error.hpp"
#include "matchlift/rng.hpp"

namespace matchlift {

TrimResult trim(const BlockMapMatrix& x_in, const MapGraph& graph, std::uint64_t seed) {
  if (graph.edge_count() == 0) throw Error(ErrorCode::kEmptyGraph, "cannot trim a graph without edges");
  if (graph.n() != x_in.n()) throw Error(ErrorCode::kShapeMismatch, "graph and matrix disagree on n");

  const int n = graph.n();
  std::vector<std::vector<int>> incident(static_cast<std::size_t>(n));
  for (auto [i, j] : graph.edges()) {
    incident[static_cast<std::size_t>(i)].push_back(j);
    incident[static_cast<std::size_t>(j)].push_back(i);
  }
  int d_min = static_cast<int>(incident[0].size());
  for (const auto& nb : incident) d_min = std::min(d_min, static_cast<int>(nb.size()));

  TrimResult out{x_in, {d_min, {}, {}, seed}};
  Rng rng(seed);
  std::vector<std::pair<int, int>> discarded;
  const int keep = 2 * d_min;
  for (int i = 0; i < n; ++i) {
    auto nb = incident[static_cast<std::size_t>(i)];
    if (static_cast<int>(nb.size()) <= keep) continue;
    out.report.overrepresented.push_back(i);
    // The first `keep` entries after a shuffle are a uniform random subset.
    rng.shuffle(std::span<int>(nb));
    for (std::size_t k = static_cast<std::size_t>(keep); k < nb.size(); ++k) {
      discarded.emplace_back(std::min(i, nb[k]), std::max(i, nb[k]));
    }
  }
  std::sort(discarded.begin(), discarded.end());
  discarded.erase(std::unique(discarded.begin(), discarded.end()), discarded.end());
  for (auto [i, j] : discarded) {
    out.matrix.set_block(i, j, PartialMapBlock::zeros(x_in.size(i), x_in.size(j), x_in.mode()));
  }
  out.report.zeroed_edges = std::move(discarded);
  return out;
}

int eigengap_index(const std::vector<double>& spectrum, int lower) {
  const int total = static_cast<int>(spectrum.size());
  int best = -1;
  double best_gap = -1.0;
  // 1-based i in [lower, total - 1]: gap between lambda_i and lambda_{i+1}.
  for (int i = lower; i <= total - 1; ++i) {
    const double gap = std::abs(spectrum[static_cast<std::size_t>(i - 1)] - spectrum[static_cast<std::size_t>(i)]);
    if (gap > best_gap) {
      best_gap = gap;
      best = i;
    }
  }
  if (best < 0) {
    throw Error(ErrorCode::kDegenerateSpectrum, "eigengap range [" + std::to_string(lower) + ", " +
                                                    std::to_string(total) + ") is empty");
  }
  if (best_gap < kMinSpectralGap) {
    throw Error(ErrorCode::kDegenerateSpectrum, "all eigengaps are below " + std::to_string(kMinSpectralGap));
  }
  return best;
}

MEstimate estimate_m(const BlockMapMatrix& x_in, const MapGraph& graph, std::uint64_t seed) {
  if (x_in.order() < 2) throw Error(ErrorCode::kDegenerateSpectrum, "need at least two points");
  MEstimate out;
  BlockMapMatrix trimmed = x_in;
  if (graph.edge_count() > 0) {
    auto t = trim(x_in, graph, seed);
    trimmed = std::move(t.matrix);
    out.trim = std::move(t.report);
  } else {
    out.trim.seed = seed;
  }
  out.spectrum = eig::eigvals_sym(eig::SymmetricMatrix::from_dense(trimmed.order(), trimmed.to_dense()));
  const int max_size = *std::max_element(x_in.sizes().begin(), x_in.sizes().end());
  out.m_hat = eigengap_index(out.spectrum, std::max(2, max_size));
  return out;
}

}  // namespace matchlift
