#pragma once

#include <chrono>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "matchlift/eig.hpp"
#include "matchlift/mapcore.hpp"

namespace matchlift {

using eig::SymmetricMatrix;

/// Regularization weight sqrt(|E|) / (2n).
double default_lambda(const MapGraph& graph);

/// Linear equality constraints A(Xbar) = b on the lifted variable
/// Xbar = [[m, 1^T], [1, X]] of order N + 1 (index 0 is the border row).
/// Constrained positions: (0,0) -> m, (0,p) -> 1, and every upper-triangle
/// entry of each diagonal block X_ii -> identity pattern.
///
/// Each constraint is the symmetric matrix E_rc + E_cr (just E_rr on the
/// diagonal), so A reads 2 Xbar(r,c) off the diagonal, A* writes y_k at both
/// (r,c) and (c,r), and A A* = diag(1 or 2).
class ConstraintSystem {
 public:
  ConstraintSystem(const std::vector<int>& sizes, int m);

  int lifted_order() const { return lifted_order_; }
  std::size_t size() const { return positions_.size(); }
  const std::vector<std::pair<int, int>>& positions() const { return positions_; }
  /// Right-hand side in the A convention above.
  const std::vector<double>& b() const { return b_; }
  /// Target value of the matrix entry at each constrained position.
  const std::vector<double>& targets() const { return targets_; }

  std::vector<double> apply(const SymmetricMatrix& xbar) const;
  SymmetricMatrix apply_adjoint(std::span<const double> y) const;
  /// out += A*(y)
  void add_adjoint(std::span<const double> y, SymmetricMatrix& out) const;
  /// (A A*)^{-1} v
  std::vector<double> solve_aat(std::span<const double> v) const;
  /// max over constraints of |Xbar(r,c) - target|.
  double entry_residual(const SymmetricMatrix& xbar) const;

 private:
  void check(const SymmetricMatrix& xbar) const;

  int lifted_order_ = 0;
  std::vector<std::pair<int, int>> positions_;
  std::vector<std::size_t> packed_;
  std::vector<double> targets_;
  std::vector<double> b_;
  std::vector<double> aat_;
};

/// Cost matrix W of the minimisation form: W_ij = lambda 1 1^T - X_ij^in on
/// observed pairs, lambda 1 1^T on unobserved pairs; zero border and zero
/// diagonal blocks.
SymmetricMatrix coefficient_matrix(const BlockMapMatrix& x_in, const MapGraph& graph, double lambda);

/// [[m, 1^T], [1, X]]
SymmetricMatrix lift(const BlockMapMatrix& x, int m);
/// Lower-right N x N part of a lifted matrix as a relaxed block matrix.
BlockMapMatrix unlift(const SymmetricMatrix& xbar, const std::vector<int>& sizes);

struct AdmmOptions {
  double mu = 1.0;
  int max_iter = 500;
  double tol_feas = 1e-5;
  double tol_change = 1e-5;
  /// Abort with Timeout once this instant has passed.
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct IterationRecord {
  double infeasibility = 0.0;  // max |Xbar(r,c) - target| over constraints
  double negativity = 0.0;     // max(0, -min entry of Xbar)
  double min_eig = 0.0;        // smallest eigenvalue of Xbar
  double change = 0.0;         // ||Xbar^{k+1} - Xbar^k||_max
  double identity_gap = 0.0;   // incremental vs projected Xbar-update
};

struct SolveReport {
  BlockMapMatrix x_hat;
  std::vector<IterationRecord> trace;
  int iterations = 0;
  bool converged = false;
  double lambda = 0.0;
  int m = 0;
  double mu = 1.0;
  SymmetricMatrix xbar;
  SymmetricMatrix z;
  SymmetricMatrix s;
  std::vector<double> y;
};

/// ADMM on the lifted MatchLift program: per iteration the closed-form
/// y, Z, S and Xbar updates. Throws InvalidParams for m < 1, lambda < 0 or
/// mu <= 0, NumericalBreakdown on non-finite iterates, Timeout past deadline.
SolveReport admm_solve(const BlockMapMatrix& x_in, const MapGraph& graph, int m, double lambda,
                       const AdmmOptions& opts = {});

/// Sum over ordered observed pairs of <X_ij^in, X_ij> minus lambda <1 1^T, X>.
double matchlift_objective(const BlockMapMatrix& x, const BlockMapMatrix& x_in, const MapGraph& graph,
                           double lambda);

struct KktReport {
  double objective = 0.0;
  double gap_z = 0.0;  // <Z, Xbar>
  double gap_s = 0.0;  // <S, Xbar>
  double negativity = 0.0;
  double psd_violation = 0.0;
  double equality_violation = 0.0;
};

KktReport kkt_report(const SolveReport& report, const BlockMapMatrix& x_in, const MapGraph& graph,
                     double lambda);

}  // namespace matchlift
