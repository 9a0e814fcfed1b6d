#include "matchlift/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "matchlift/error.hpp"

namespace matchlift {

double default_lambda(const MapGraph& graph) {
  if (graph.n() == 0) return 0.0;
  return std::sqrt(static_cast<double>(graph.edge_count())) / (2.0 * static_cast<double>(graph.n()));
}

// ---------------------------------------------------------------------------
// ConstraintSystem

ConstraintSystem::ConstraintSystem(const std::vector<int>& sizes, int m) {
  int total = 0;
  for (int s : sizes) total += s;
  lifted_order_ = total + 1;

  auto add = [&](int r, int c, double target) {
    positions_.emplace_back(r, c);
    packed_.push_back(SymmetricMatrix::packed_index(r, c));
    targets_.push_back(target);
    const double weight = r == c ? 1.0 : 2.0;
    b_.push_back(weight * target);
    aat_.push_back(weight);
  };

  add(0, 0, static_cast<double>(m));
  for (int p = 1; p <= total; ++p) add(0, p, 1.0);
  int offset = 1;
  for (int s : sizes) {
    for (int c = 0; c < s; ++c) {
      for (int r = 0; r <= c; ++r) add(offset + r, offset + c, r == c ? 1.0 : 0.0);
    }
    offset += s;
  }
}

void ConstraintSystem::check(const SymmetricMatrix& xbar) const {
  if (xbar.order() != lifted_order_) {
    throw Error(ErrorCode::kShapeMismatch, "lifted matrix has order " + std::to_string(xbar.order()) +
                                               ", constraints expect " + std::to_string(lifted_order_));
  }
}

std::vector<double> ConstraintSystem::apply(const SymmetricMatrix& xbar) const {
  check(xbar);
  auto packed = xbar.packed();
  std::vector<double> out(packed_.size());
  for (std::size_t k = 0; k < packed_.size(); ++k) out[k] = aat_[k] * packed[packed_[k]];
  return out;
}

SymmetricMatrix ConstraintSystem::apply_adjoint(std::span<const double> y) const {
  SymmetricMatrix out(lifted_order_);
  add_adjoint(y, out);
  return out;
}

void ConstraintSystem::add_adjoint(std::span<const double> y, SymmetricMatrix& out) const {
  check(out);
  if (y.size() != packed_.size()) throw Error(ErrorCode::kShapeMismatch, "dual vector length mismatch");
  auto packed = out.packed();
  for (std::size_t k = 0; k < packed_.size(); ++k) packed[packed_[k]] += y[k];
}

std::vector<double> ConstraintSystem::solve_aat(std::span<const double> v) const {
  if (v.size() != packed_.size()) throw Error(ErrorCode::kShapeMismatch, "vector length mismatch");
  std::vector<double> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out[k] = v[k] / aat_[k];
  return out;
}

double ConstraintSystem::entry_residual(const SymmetricMatrix& xbar) const {
  check(xbar);
  auto packed = xbar.packed();
  double worst = 0.0;
  for (std::size_t k = 0; k < packed_.size(); ++k) {
    worst = std::max(worst, std::abs(packed[packed_[k]] - targets_[k]));
  }
  return worst;
}

// ---------------------------------------------------------------------------

SymmetricMatrix coefficient_matrix(const BlockMapMatrix& x_in, const MapGraph& graph, double lambda) {
  if (graph.n() != x_in.n()) throw Error(ErrorCode::kShapeMismatch, "graph and matrix disagree on n");
  SymmetricMatrix w(x_in.order() + 1);
  for (int i = 0; i < x_in.n(); ++i) {
    for (int j = i + 1; j < x_in.n(); ++j) {
      const int oi = x_in.offset(i) + 1, oj = x_in.offset(j) + 1;
      for (int r = 0; r < x_in.size(i); ++r) {
        for (int c = 0; c < x_in.size(j); ++c) w(oi + r, oj + c) = lambda;
      }
      if (!graph.has_edge(i, j)) continue;
      const auto block = x_in.block(i, j);
      for (int r = 0; r < block.rows(); ++r) {
        for (int c = 0; c < block.cols(); ++c) w(oi + r, oj + c) -= block.at(r, c);
      }
    }
  }
  return w;
}

SymmetricMatrix lift(const BlockMapMatrix& x, int m) {
  const int total = x.order();
  SymmetricMatrix out(total + 1);
  out(0, 0) = static_cast<double>(m);
  for (int p = 1; p <= total; ++p) out(0, p) = 1.0;
  const auto dense = x.to_dense();
  for (int c = 0; c < total; ++c) {
    for (int r = 0; r <= c; ++r) {
      out(r + 1, c + 1) = dense[static_cast<std::size_t>(r) * static_cast<std::size_t>(total) + static_cast<std::size_t>(c)];
    }
  }
  return out;
}

BlockMapMatrix unlift(const SymmetricMatrix& xbar, const std::vector<int>& sizes) {
  const int total = xbar.order() - 1;
  std::vector<double> dense(static_cast<std::size_t>(total) * static_cast<std::size_t>(total));
  for (int r = 0; r < total; ++r) {
    for (int c = 0; c < total; ++c) {
      dense[static_cast<std::size_t>(r) * static_cast<std::size_t>(total) + static_cast<std::size_t>(c)] =
          xbar(r + 1, c + 1);
    }
  }
  return BlockMapMatrix::from_dense(sizes, dense, BlockMode::kRelaxed);
}

// ---------------------------------------------------------------------------
// ADMM

namespace {

// Initial point: feasible for every equality constraint, off-diagonal blocks 0.
SymmetricMatrix initial_xbar(const std::vector<int>& sizes, int m) {
  return lift(BlockMapMatrix(sizes, BlockMode::kRelaxed), m);
}

void require_finite(const SymmetricMatrix& a, const char* what, int iteration) {
  if (!a.all_finite()) {
    throw Error(ErrorCode::kNumericalBreakdown,
                std::string("non-finite ") + what + " at iteration " + std::to_string(iteration));
  }
}

}  // namespace

SolveReport admm_solve(const BlockMapMatrix& x_in, const MapGraph& graph, int m, double lambda,
                       const AdmmOptions& opts) {
  if (m < 1) throw Error(ErrorCode::kInvalidParams, "m must be at least 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw Error(ErrorCode::kInvalidParams, "lambda must be >= 0");
  if (!(opts.mu > 0.0) || !std::isfinite(opts.mu)) throw Error(ErrorCode::kInvalidParams, "mu must be > 0");
  if (opts.max_iter < 0) throw Error(ErrorCode::kInvalidParams, "max_iter must be >= 0");

  const double mu = opts.mu;
  const ConstraintSystem cons(x_in.sizes(), m);
  const SymmetricMatrix w = coefficient_matrix(x_in, graph, lambda);
  const int order = cons.lifted_order();

  SymmetricMatrix xbar = initial_xbar(x_in.sizes(), m);
  SymmetricMatrix z(order), s(order);
  std::vector<double> y(cons.size(), 0.0);

  SolveReport report;
  report.lambda = lambda;
  report.m = m;
  report.mu = mu;
  report.trace.reserve(static_cast<std::size_t>(opts.max_iter));

  SymmetricMatrix t(order), work(order);
  for (int k = 0; k < opts.max_iter; ++k) {
    if (opts.deadline && std::chrono::steady_clock::now() > *opts.deadline) {
      throw Error(ErrorCode::kTimeout, "ADMM deadline passed at iteration " + std::to_string(k));
    }
    auto pw = w.packed();
    auto px = xbar.packed();
    auto pz = z.packed();
    auto ps = s.packed();

    // y = (AA*)^{-1} (A(-W + S + mu Xbar + Z) - mu b)
    auto pwork = work.packed();
    for (std::size_t q = 0; q < pw.size(); ++q) pwork[q] = -pw[q] + ps[q] + mu * px[q] + pz[q];
    auto ay = cons.apply(work);
    const auto& b = cons.b();
    for (std::size_t q = 0; q < ay.size(); ++q) ay[q] -= mu * b[q];
    y = cons.solve_aat(ay);

    // T = W + A*(y)
    t = w;
    cons.add_adjoint(y, t);
    auto pt = t.packed();

    // Z = (T - S - mu Xbar)_+
    for (std::size_t q = 0; q < pt.size(); ++q) pz[q] = std::max(pt[q] - ps[q] - mu * px[q], 0.0);

    // M = T - Z - mu Xbar; S = P_psd(M); Xbar' = -(1/mu) P_nsd(M)
    for (std::size_t q = 0; q < pt.size(); ++q) pwork[q] = pt[q] - pz[q] - mu * px[q];
    require_finite(work, "ADMM iterate", k);
    auto split = eig::spectral_split(work);
    s = std::move(split.psd);
    ps = s.packed();
    SymmetricMatrix next = std::move(split.nsd);
    next *= -1.0 / mu;
    require_finite(next, "Xbar", k);

    IterationRecord rec;
    auto pn = next.packed();
    for (std::size_t q = 0; q < pn.size(); ++q) {
      // Incremental form: Xbar + (Z + S - W - A*(y)) / mu.
      const double incremental = px[q] + (pz[q] + ps[q] - pt[q]) / mu;
      rec.identity_gap = std::max(rec.identity_gap, std::abs(incremental - pn[q]));
      rec.change = std::max(rec.change, std::abs(pn[q] - px[q]));
    }
    xbar = std::move(next);
    rec.infeasibility = cons.entry_residual(xbar);
    rec.negativity = std::max(0.0, -xbar.min_entry());
    // Eigenvalues of Xbar are -lambda/mu over the negative part of M, else 0.
    const double largest = split.values.empty() ? 0.0 : split.values.front();
    rec.min_eig = largest >= 0.0 ? 0.0 : -largest / mu;
    report.trace.push_back(rec);
    report.iterations = k + 1;

    if (rec.infeasibility < opts.tol_feas && rec.change < opts.tol_change) {
      report.converged = true;
      break;
    }
  }

  report.x_hat = unlift(xbar, x_in.sizes());
  report.xbar = std::move(xbar);
  report.z = std::move(z);
  report.s = std::move(s);
  report.y = std::move(y);
  return report;
}

double matchlift_objective(const BlockMapMatrix& x, const BlockMapMatrix& x_in, const MapGraph& graph,
                           double lambda) {
  if (x.sizes() != x_in.sizes()) throw Error(ErrorCode::kShapeMismatch, "objective: size mismatch");
  double agreement = 0.0;
  double mass = 0.0;
  for (int i = 0; i < x.n(); ++i) {
    mass += static_cast<double>(x.size(i));
    for (int j = i + 1; j < x.n(); ++j) {
      const auto bx = x.block(i, j);
      for (int r = 0; r < bx.rows(); ++r) {
        for (int c = 0; c < bx.cols(); ++c) mass += 2.0 * bx.at(r, c);
      }
      if (!graph.has_edge(i, j)) continue;
      const auto bin = x_in.block(i, j);
      for (const auto& e : bin.ones()) agreement += 2.0 * bx.at(e.row, e.col);
    }
  }
  return agreement - lambda * mass;
}

KktReport kkt_report(const SolveReport& report, const BlockMapMatrix& x_in, const MapGraph& graph,
                     double lambda) {
  KktReport k;
  k.objective = matchlift_objective(report.x_hat, x_in, graph, lambda);
  k.gap_z = report.z.order() == report.xbar.order() ? eig::inner(report.z, report.xbar) : 0.0;
  k.gap_s = report.s.order() == report.xbar.order() ? eig::inner(report.s, report.xbar) : 0.0;
  k.negativity = std::max(0.0, -report.xbar.min_entry());
  k.psd_violation = std::max(0.0, -eig::min_eigenvalue(report.xbar));
  const ConstraintSystem cons(x_in.sizes(), report.m);
  k.equality_violation = cons.entry_residual(report.xbar);
  return k;
}

}  // namespace matchlift
