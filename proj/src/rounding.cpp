#include "matchlift/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "matchlift/eig.hpp"
#include "matchlift/error.hpp"

namespace matchlift {

namespace {

BlockMapMatrix comembership(const std::vector<int>& sizes, const std::vector<int>& labels, int clusters) {
  return MembershipMatrix{sizes, clusters, labels}.gram();
}

// Householder reflection H = I - 2 u u^T / (u^T u) with H v = |v| e_1,
// applied to every row of V (row-major, `rank` columns).
void reflect_onto_e1(std::vector<double>& v, std::size_t rows, std::size_t rank, std::size_t pivot) {
  const double* p = v.data() + pivot * rank;
  double norm = 0.0;
  for (std::size_t c = 0; c < rank; ++c) norm += p[c] * p[c];
  norm = std::sqrt(norm);
  std::vector<double> u(p, p + rank);
  u[0] -= norm;
  double uu = 0.0;
  for (double x : u) uu += x * x;
  if (uu == 0.0) return;  // already aligned with e_1
  for (std::size_t i = 0; i < rows; ++i) {
    double* row = v.data() + i * rank;
    double dot = 0.0;
    for (std::size_t c = 0; c < rank; ++c) dot += row[c] * u[c];
    const double scale = 2.0 * dot / uu;
    for (std::size_t c = 0; c < rank; ++c) row[c] -= scale * u[c];
  }
}

}  // namespace

RoundingResult round_solution(const BlockMapMatrix& x_hat, int r) {
  const int total = x_hat.order();
  if (r < 1 || r > total) {
    throw Error(ErrorCode::kInvalidR, "r = " + std::to_string(r) + " outside [1, " + std::to_string(total) + "]");
  }
  const auto dense = x_hat.to_dense();
  const auto decomposition = eig::eig_sym(eig::SymmetricMatrix::from_dense(total, dense));

  const std::size_t rows = static_cast<std::size_t>(total), rank = static_cast<std::size_t>(r);
  std::vector<double> v(rows * rank);
  for (std::size_t k = 0; k < rank; ++k) {
    const double root = std::sqrt(std::max(decomposition.values[k], 0.0));
    const auto u = decomposition.vector(static_cast<int>(k));
    for (std::size_t i = 0; i < rows; ++i) v[i * rank + k] = u[i] * root;
  }

  std::vector<int> object(rows);
  for (int p = 0; p < total; ++p) object[static_cast<std::size_t>(p)] = x_hat.object_of(p);

  RoundingResult out;
  out.labels.assign(rows, -1);
  for (std::size_t pivot = 0; pivot < rows; ++pivot) {
    if (out.labels[pivot] >= 0) continue;
    const int cluster = out.clusters++;
    out.labels[pivot] = cluster;

    double norm = 0.0;
    for (std::size_t c = 0; c < rank; ++c) norm += v[pivot * rank + c] * v[pivot * rank + c];
    if (std::sqrt(norm) < kDegenerateRowNorm) continue;  // singleton cluster

    reflect_onto_e1(v, rows, rank, pivot);

    // Best unassigned row per object, by first coordinate.
    std::vector<int> best(static_cast<std::size_t>(x_hat.n()), -1);
    for (std::size_t i = 0; i < rows; ++i) {
      if (out.labels[i] >= 0) continue;
      const int obj = object[i];
      if (obj == object[pivot]) continue;
      int& slot = best[static_cast<std::size_t>(obj)];
      if (slot < 0 || v[i * rank] > v[static_cast<std::size_t>(slot) * rank]) slot = static_cast<int>(i);
    }
    for (int idx : best) {
      if (idx >= 0 && v[static_cast<std::size_t>(idx) * rank] > kRoundingThreshold) {
        out.labels[static_cast<std::size_t>(idx)] = cluster;
      }
    }
  }
  out.maps = comembership(x_hat.sizes(), out.labels, out.clusters);
  return out;
}

MatchMetrics evaluate(const BlockMapMatrix& rounded, const BlockMapMatrix& truth) {
  if (rounded.sizes() != truth.sizes()) throw Error(ErrorCode::kShapeMismatch, "evaluate: size mismatch");
  MatchMetrics m;
  for (int i = 0; i < truth.n(); ++i) {
    for (int j = i + 1; j < truth.n(); ++j) {
      const auto br = rounded.block(i, j), bt = truth.block(i, j);
      for (int r = 0; r < br.rows(); ++r) {
        for (int c = 0; c < br.cols(); ++c) {
          const bool got = br.at(r, c) != 0.0, want = bt.at(r, c) != 0.0;
          m.recovered += got;
          m.truth += want;
          m.correct += got && want;
        }
      }
    }
  }
  m.precision = m.recovered ? static_cast<double>(m.correct) / static_cast<double>(m.recovered) : 1.0;
  m.recall = m.truth ? static_cast<double>(m.correct) / static_cast<double>(m.truth) : 1.0;
  m.exact = m.correct == m.recovered && m.correct == m.truth;
  return m;
}

}  // namespace matchlift
