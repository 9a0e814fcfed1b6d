#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace matchlift {

/// Slack allowed on row/column sums and entry ranges of relaxed blocks.
inline constexpr double kRelaxedSlack = 1e-9;

enum class BlockMode { kBinary, kRelaxed };

struct Correspondence {
  int row = 0;
  int col = 0;
  auto operator<=>(const Correspondence&) const = default;
};

/// One pairwise map between object i (rows) and object j (cols). Binary blocks
/// keep a sorted list of unit entries; relaxed blocks keep a dense row-major
/// grid of fractional values.
class PartialMapBlock {
 public:
  PartialMapBlock() = default;

  static PartialMapBlock binary(int rows, int cols, std::vector<Correspondence> ones);
  static PartialMapBlock relaxed(int rows, int cols, std::vector<double> values);
  static PartialMapBlock zeros(int rows, int cols, BlockMode mode = BlockMode::kBinary);
  static PartialMapBlock identity(int size);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  BlockMode mode() const { return mode_; }

  /// Unit entries of a binary block, sorted by (row, col).
  std::span<const Correspondence> ones() const { return ones_; }
  /// Dense values of a relaxed block (row-major).
  std::span<const double> values() const { return values_; }

  double at(int r, int c) const;
  /// Number of nonzero entries.
  std::size_t nnz() const;
  bool is_zero() const { return nnz() == 0; }

  PartialMapBlock transposed() const;
  PartialMapBlock to_relaxed() const;

  bool operator==(const PartialMapBlock& other) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  BlockMode mode_ = BlockMode::kBinary;
  std::vector<Correspondence> ones_;
  std::vector<double> values_;
};

struct SubstochasticViolation {
  enum class Kind { kRow, kCol, kRange };
  Kind kind;
  int index;     // row or column index; flat entry index for kRange
  double value;  // offending sum or entry
};

/// Lists every row/column whose sum exceeds 1 (binary) or 1 + slack (relaxed),
/// and for relaxed blocks every entry outside [-slack, 1 + slack].
std::vector<SubstochasticViolation> validate_substochastic(const PartialMapBlock& block,
                                                           double slack = kRelaxedSlack);

/// Undirected graph over objects recording which pairwise maps were observed.
class MapGraph {
 public:
  explicit MapGraph(int n = 0);
  MapGraph(int n, std::span<const std::pair<int, int>> edges);

  void add_edge(int i, int j);
  bool has_edge(int i, int j) const;

  int n() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }
  /// Edges as (i, j) with i < j, sorted.
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  int degree(int i) const;
  std::vector<int> neighbors(int i) const;
  bool is_connected() const;

  static MapGraph complete(int n);

  bool operator==(const MapGraph&) const = default;

 private:
  int n_ = 0;
  std::vector<std::pair<int, int>> edges_;
};

/// Symmetric n x n block matrix of pairwise maps with identity diagonal blocks.
/// Only blocks (i, j) with i < j are stored; the lower triangle is read back
/// as transposes.
class BlockMapMatrix {
 public:
  BlockMapMatrix() = default;
  BlockMapMatrix(std::vector<int> sizes, BlockMode mode);

  int n() const { return static_cast<int>(sizes_.size()); }
  /// Total number of points N.
  int order() const { return order_; }
  BlockMode mode() const { return mode_; }
  const std::vector<int>& sizes() const { return sizes_; }
  int size(int i) const { return sizes_[static_cast<std::size_t>(i)]; }
  int offset(int i) const { return offsets_[static_cast<std::size_t>(i)]; }
  /// Object owning a global point index.
  int object_of(int point) const;

  PartialMapBlock block(int i, int j) const;
  void set_block(int i, int j, PartialMapBlock block);

  /// Entry at global point indices (p, q).
  double at(int p, int q) const;

  /// Dense N x N row-major copy including the identity diagonal blocks.
  std::vector<double> to_dense() const;
  static BlockMapMatrix from_dense(std::vector<int> sizes, std::span<const double> dense,
                                   BlockMode mode);
  BlockMapMatrix to_relaxed() const;

  /// Number of nonzero off-diagonal entries in the upper triangle.
  std::size_t correspondence_count() const;

  bool operator==(const BlockMapMatrix& other) const;

 private:
  const PartialMapBlock& upper(int i, int j) const;
  PartialMapBlock& upper(int i, int j);

  std::vector<int> sizes_;
  std::vector<int> offsets_;
  int order_ = 0;
  BlockMode mode_ = BlockMode::kBinary;
  std::vector<PartialMapBlock> upper_;
};

struct BlockEntry {
  int i = 0;
  int j = 0;
  PartialMapBlock block;
};

enum class SymmetrizePolicy {
  kReject,       // (i, j) and (j, i) both given must be mutual transposes
  kTransposeOr,  // union of both, then revalidate sub-stochasticity
};

/// Builds a block map matrix from off-diagonal blocks. Diagonal entries, when
/// present, must be identities. The result is relaxed if any block is relaxed.
BlockMapMatrix assemble(std::vector<int> sizes, std::span<const BlockEntry> blocks,
                        SymmetrizePolicy policy = SymmetrizePolicy::kReject);

/// Nonzero upper-triangle blocks (i < j); inverse of assemble.
std::vector<BlockEntry> extract(const BlockMapMatrix& x);

/// Point-to-universe assignment. Y_i(r, s) = 1 iff labels[offset_i + r] == s.
struct MembershipMatrix {
  std::vector<int> sizes;
  int universe_size = 0;
  std::vector<int> labels;

  int order() const { return static_cast<int>(labels.size()); }
  int label(int object, int row) const;
  /// Y Y^T as a binary block map matrix.
  BlockMapMatrix gram() const;
  /// Stacked Y, N x universe_size, row-major.
  std::vector<double> dense() const;

  bool operator==(const MembershipMatrix&) const = default;
};

/// Validates labels (range, at most one point per element per object).
MembershipMatrix make_membership(std::vector<int> sizes, std::vector<int> labels,
                                 int universe_size);

struct Universe {
  int m = 0;
  std::vector<int> occupancy;  // number of objects containing each element
};

Universe universe_of(const MembershipMatrix& y);

struct CycleWitness {
  int i = 0;
  int j = 0;
  int k = 0;
};

struct Inconsistent {
  CycleWitness cycle;
  /// Global points a in S_i, b in S_j, c in S_k with a~b, b~c but not a~c.
  int a = 0;
  int b = 0;
  int c = 0;
};

using Factorization = std::variant<MembershipMatrix, Inconsistent>;

/// Recovers Y with X = Y Y^T when the binary collection is cycle-consistent.
/// Universe labels are canonical: assigned in order of first appearance.
Factorization factorize_consistent(const BlockMapMatrix& x);

/// Maps every point to its canonical cluster label given arbitrary labels.
std::vector<int> canonical_labels(std::span<const int> labels);

}  // namespace matchlift
