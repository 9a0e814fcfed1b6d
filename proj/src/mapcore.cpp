#include "matchlift/mapcore.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "matchlift/error.hpp"

namespace matchlift {

namespace {

void check_shape(int rows, int cols) {
  if (rows < 0 || cols < 0) {
    throw Error(ErrorCode::kShapeMismatch, "negative block shape");
  }
}

std::string shape_str(int r, int c) { return std::to_string(r) + "x" + std::to_string(c); }

}  // namespace

// ---------------------------------------------------------------------------
// PartialMapBlock

PartialMapBlock PartialMapBlock::binary(int rows, int cols, std::vector<Correspondence> ones) {
  check_shape(rows, cols);
  for (const auto& e : ones) {
    if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols) {
      throw Error(ErrorCode::kShapeMismatch, "correspondence (" + std::to_string(e.row) + "," +
                                                 std::to_string(e.col) + ") outside block " +
                                                 shape_str(rows, cols));
    }
  }
  std::sort(ones.begin(), ones.end());
  if (std::adjacent_find(ones.begin(), ones.end()) != ones.end()) {
    throw Error(ErrorCode::kInvalidParams, "duplicate correspondence in binary block");
  }
  PartialMapBlock b;
  b.rows_ = rows;
  b.cols_ = cols;
  b.mode_ = BlockMode::kBinary;
  b.ones_ = std::move(ones);
  return b;
}

PartialMapBlock PartialMapBlock::relaxed(int rows, int cols, std::vector<double> values) {
  check_shape(rows, cols);
  if (values.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw Error(ErrorCode::kShapeMismatch, "relaxed block of shape " + shape_str(rows, cols) +
                                               " given " + std::to_string(values.size()) +
                                               " values");
  }
  PartialMapBlock b;
  b.rows_ = rows;
  b.cols_ = cols;
  b.mode_ = BlockMode::kRelaxed;
  b.values_ = std::move(values);
  return b;
}

PartialMapBlock PartialMapBlock::zeros(int rows, int cols, BlockMode mode) {
  if (mode == BlockMode::kBinary) return binary(rows, cols, {});
  return relaxed(rows, cols,
                 std::vector<double>(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)));
}

PartialMapBlock PartialMapBlock::identity(int size) {
  std::vector<Correspondence> ones;
  ones.reserve(static_cast<std::size_t>(size));
  for (int r = 0; r < size; ++r) ones.push_back({r, r});
  return binary(size, size, std::move(ones));
}

double PartialMapBlock::at(int r, int c) const {
  if (mode_ == BlockMode::kRelaxed) {
    return values_[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
                   static_cast<std::size_t>(c)];
  }
  return std::binary_search(ones_.begin(), ones_.end(), Correspondence{r, c}) ? 1.0 : 0.0;
}

std::size_t PartialMapBlock::nnz() const {
  if (mode_ == BlockMode::kBinary) return ones_.size();
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [](double v) { return v != 0.0; }));
}

PartialMapBlock PartialMapBlock::transposed() const {
  if (mode_ == BlockMode::kBinary) {
    std::vector<Correspondence> t;
    t.reserve(ones_.size());
    for (const auto& e : ones_) t.push_back({e.col, e.row});
    return binary(cols_, rows_, std::move(t));
  }
  std::vector<double> t(values_.size());
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      t[static_cast<std::size_t>(c) * static_cast<std::size_t>(rows_) + static_cast<std::size_t>(r)] =
          values_[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
                  static_cast<std::size_t>(c)];
    }
  }
  return relaxed(cols_, rows_, std::move(t));
}

PartialMapBlock PartialMapBlock::to_relaxed() const {
  if (mode_ == BlockMode::kRelaxed) return *this;
  std::vector<double> v(static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_), 0.0);
  for (const auto& e : ones_) {
    v[static_cast<std::size_t>(e.row) * static_cast<std::size_t>(cols_) +
      static_cast<std::size_t>(e.col)] = 1.0;
  }
  return relaxed(rows_, cols_, std::move(v));
}

bool PartialMapBlock::operator==(const PartialMapBlock& other) const {
  return rows_ == other.rows_ && cols_ == other.cols_ && mode_ == other.mode_ &&
         ones_ == other.ones_ && values_ == other.values_;
}

std::vector<SubstochasticViolation> validate_substochastic(const PartialMapBlock& block,
                                                           double slack) {
  using Kind = SubstochasticViolation::Kind;
  std::vector<SubstochasticViolation> out;
  std::vector<double> row_sum(static_cast<std::size_t>(block.rows()), 0.0);
  std::vector<double> col_sum(static_cast<std::size_t>(block.cols()), 0.0);
  double limit = 1.0;
  if (block.mode() == BlockMode::kBinary) {
    for (const auto& e : block.ones()) {
      row_sum[static_cast<std::size_t>(e.row)] += 1.0;
      col_sum[static_cast<std::size_t>(e.col)] += 1.0;
    }
  } else {
    limit += slack;
    auto values = block.values();
    for (int r = 0; r < block.rows(); ++r) {
      for (int c = 0; c < block.cols(); ++c) {
        const std::size_t idx = static_cast<std::size_t>(r) * static_cast<std::size_t>(block.cols()) +
                                static_cast<std::size_t>(c);
        const double v = values[idx];
        if (v < -slack || v > 1.0 + slack) {
          out.push_back({Kind::kRange, static_cast<int>(idx), v});
        }
        row_sum[static_cast<std::size_t>(r)] += v;
        col_sum[static_cast<std::size_t>(c)] += v;
      }
    }
  }
  for (std::size_t r = 0; r < row_sum.size(); ++r) {
    if (row_sum[r] > limit) out.push_back({Kind::kRow, static_cast<int>(r), row_sum[r]});
  }
  for (std::size_t c = 0; c < col_sum.size(); ++c) {
    if (col_sum[c] > limit) out.push_back({Kind::kCol, static_cast<int>(c), col_sum[c]});
  }
  return out;
}

// ---------------------------------------------------------------------------
// MapGraph

MapGraph::MapGraph(int n) : n_(n) {
  if (n < 0) throw Error(ErrorCode::kInvalidParams, "negative object count");
}

MapGraph::MapGraph(int n, std::span<const std::pair<int, int>> edges) : MapGraph(n) {
  for (auto [i, j] : edges) add_edge(i, j);
}

void MapGraph::add_edge(int i, int j) {
  if (i == j) throw Error(ErrorCode::kInvalidParams, "self-loop on object " + std::to_string(i));
  if (i < 0 || j < 0 || i >= n_ || j >= n_) {
    throw Error(ErrorCode::kShapeMismatch, "edge (" + std::to_string(i) + "," + std::to_string(j) +
                                               ") outside graph of " + std::to_string(n_) +
                                               " objects");
  }
  std::pair<int, int> e{std::min(i, j), std::max(i, j)};
  auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
  if (it == edges_.end() || *it != e) edges_.insert(it, e);
}

bool MapGraph::has_edge(int i, int j) const {
  std::pair<int, int> e{std::min(i, j), std::max(i, j)};
  return std::binary_search(edges_.begin(), edges_.end(), e);
}

int MapGraph::degree(int i) const {
  return static_cast<int>(std::count_if(edges_.begin(), edges_.end(), [i](const auto& e) {
    return e.first == i || e.second == i;
  }));
}

std::vector<int> MapGraph::neighbors(int i) const {
  std::vector<int> out;
  for (auto [a, b] : edges_) {
    if (a == i) out.push_back(b);
    if (b == i) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool MapGraph::is_connected() const {
  if (n_ <= 1) return true;
  std::vector<int> parent(static_cast<std::size_t>(n_));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    }
    return x;
  };
  int components = n_;
  for (auto [a, b] : edges_) {
    int ra = find(a), rb = find(b);
    if (ra != rb) {
      parent[static_cast<std::size_t>(ra)] = rb;
      --components;
    }
  }
  return components == 1;
}

MapGraph MapGraph::complete(int n) {
  MapGraph g(n);
  g.edges_.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(std::max(n - 1, 0)) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) g.edges_.emplace_back(i, j);
  }
  return g;
}

// ---------------------------------------------------------------------------
// BlockMapMatrix

BlockMapMatrix::BlockMapMatrix(std::vector<int> sizes, BlockMode mode)
    : sizes_(std::move(sizes)), mode_(mode) {
  offsets_.resize(sizes_.size());
  order_ = 0;
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    if (sizes_[i] < 0) throw Error(ErrorCode::kShapeMismatch, "negative object size");
    offsets_[i] = order_;
    order_ += sizes_[i];
  }
  const int count = n();
  upper_.reserve(static_cast<std::size_t>(count) * static_cast<std::size_t>(std::max(count - 1, 0)) / 2);
  for (int i = 0; i < count; ++i) {
    for (int j = i + 1; j < count; ++j) upper_.push_back(PartialMapBlock::zeros(size(i), size(j), mode));
  }
}

int BlockMapMatrix::object_of(int point) const {
  if (point < 0 || point >= order_) {
    throw Error(ErrorCode::kShapeMismatch, "point " + std::to_string(point) + " out of range");
  }
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), point);
  int obj = static_cast<int>(it - offsets_.begin()) - 1;
  // Skip back over empty objects sharing this offset.
  while (size(obj) == 0) --obj;
  return obj;
}

const PartialMapBlock& BlockMapMatrix::upper(int i, int j) const {
  const std::size_t count = sizes_.size();
  const std::size_t a = static_cast<std::size_t>(i), b = static_cast<std::size_t>(j);
  return upper_[a * count - a * (a + 1) / 2 + (b - a - 1)];
}

PartialMapBlock& BlockMapMatrix::upper(int i, int j) {
  return const_cast<PartialMapBlock&>(std::as_const(*this).upper(i, j));
}

PartialMapBlock BlockMapMatrix::block(int i, int j) const {
  if (i < 0 || j < 0 || i >= n() || j >= n()) {
    throw Error(ErrorCode::kShapeMismatch, "block index out of range");
  }
  if (i == j) {
    auto id = PartialMapBlock::identity(size(i));
    return mode_ == BlockMode::kRelaxed ? id.to_relaxed() : id;
  }
  if (i < j) return upper(i, j);
  return upper(j, i).transposed();
}

void BlockMapMatrix::set_block(int i, int j, PartialMapBlock block) {
  if (i < 0 || j < 0 || i >= n() || j >= n()) {
    throw Error(ErrorCode::kShapeMismatch, "block index out of range");
  }
  if (i == j) throw Error(ErrorCode::kInvalidParams, "diagonal blocks are fixed to identity");
  if (block.rows() != size(i) || block.cols() != size(j)) {
    throw Error(ErrorCode::kShapeMismatch, "block (" + std::to_string(i) + "," + std::to_string(j) +
                                               ") has shape " + shape_str(block.rows(), block.cols()) +
                                               ", expected " + shape_str(size(i), size(j)));
  }
  if (block.mode() != mode_) {
    if (mode_ == BlockMode::kBinary) {
      throw Error(ErrorCode::kInvalidParams, "relaxed block stored into binary matrix");
    }
    block = block.to_relaxed();
  }
  if (i < j) {
    upper(i, j) = std::move(block);
  } else {
    upper(j, i) = block.transposed();
  }
}

double BlockMapMatrix::at(int p, int q) const {
  const int i = object_of(p), j = object_of(q);
  const int r = p - offset(i), c = q - offset(j);
  if (i == j) return r == c ? 1.0 : 0.0;
  if (i < j) return upper(i, j).at(r, c);
  return upper(j, i).at(c, r);
}

std::vector<double> BlockMapMatrix::to_dense() const {
  const std::size_t total = static_cast<std::size_t>(order_);
  std::vector<double> d(total * total, 0.0);
  for (std::size_t p = 0; p < total; ++p) d[p * total + p] = 1.0;
  for (int i = 0; i < n(); ++i) {
    for (int j = i + 1; j < n(); ++j) {
      const auto& b = upper(i, j);
      const std::size_t oi = static_cast<std::size_t>(offset(i)), oj = static_cast<std::size_t>(offset(j));
      if (b.mode() == BlockMode::kBinary) {
        for (const auto& e : b.ones()) {
          const std::size_t p = oi + static_cast<std::size_t>(e.row), q = oj + static_cast<std::size_t>(e.col);
          d[p * total + q] = d[q * total + p] = 1.0;
        }
      } else {
        for (int r = 0; r < b.rows(); ++r) {
          for (int c = 0; c < b.cols(); ++c) {
            const std::size_t p = oi + static_cast<std::size_t>(r), q = oj + static_cast<std::size_t>(c);
            d[p * total + q] = d[q * total + p] = b.at(r, c);
          }
        }
      }
    }
  }
  return d;
}

BlockMapMatrix BlockMapMatrix::from_dense(std::vector<int> sizes, std::span<const double> dense,
                                          BlockMode mode) {
  BlockMapMatrix x(std::move(sizes), mode);
  const std::size_t total = static_cast<std::size_t>(x.order());
  if (dense.size() != total * total) {
    throw Error(ErrorCode::kShapeMismatch, "dense matrix has " + std::to_string(dense.size()) +
                                               " entries, expected " + std::to_string(total * total));
  }
  for (int i = 0; i < x.n(); ++i) {
    for (int j = i + 1; j < x.n(); ++j) {
      const std::size_t oi = static_cast<std::size_t>(x.offset(i)), oj = static_cast<std::size_t>(x.offset(j));
      if (mode == BlockMode::kBinary) {
        std::vector<Correspondence> ones;
        for (int r = 0; r < x.size(i); ++r) {
          for (int c = 0; c < x.size(j); ++c) {
            const double v = dense[(oi + static_cast<std::size_t>(r)) * total + oj + static_cast<std::size_t>(c)];
            if (v == 1.0) {
              ones.push_back({r, c});
            } else if (v != 0.0) {
              throw Error(ErrorCode::kInvalidParams, "non-binary entry in binary matrix");
            }
          }
        }
        x.upper(i, j) = PartialMapBlock::binary(x.size(i), x.size(j), std::move(ones));
      } else {
        std::vector<double> values(static_cast<std::size_t>(x.size(i)) * static_cast<std::size_t>(x.size(j)));
        for (int r = 0; r < x.size(i); ++r) {
          for (int c = 0; c < x.size(j); ++c) {
            values[static_cast<std::size_t>(r) * static_cast<std::size_t>(x.size(j)) + static_cast<std::size_t>(c)] =
                dense[(oi + static_cast<std::size_t>(r)) * total + oj + static_cast<std::size_t>(c)];
          }
        }
        x.upper(i, j) = PartialMapBlock::relaxed(x.size(i), x.size(j), std::move(values));
      }
    }
  }
  return x;
}

BlockMapMatrix BlockMapMatrix::to_relaxed() const {
  if (mode_ == BlockMode::kRelaxed) return *this;
  BlockMapMatrix out = *this;
  out.mode_ = BlockMode::kRelaxed;
  for (auto& b : out.upper_) b = b.to_relaxed();
  return out;
}

std::size_t BlockMapMatrix::correspondence_count() const {
  std::size_t total = 0;
  for (const auto& b : upper_) total += b.nnz();
  return total;
}

bool BlockMapMatrix::operator==(const BlockMapMatrix& other) const {
  return sizes_ == other.sizes_ && mode_ == other.mode_ && upper_ == other.upper_;
}

// ---------------------------------------------------------------------------
// assemble / extract

BlockMapMatrix assemble(std::vector<int> sizes, std::span<const BlockEntry> blocks,
                        SymmetrizePolicy policy) {
  const int n = static_cast<int>(sizes.size());
  bool relaxed = false;
  for (const auto& e : blocks) {
    if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n) {
      throw Error(ErrorCode::kShapeMismatch, "block (" + std::to_string(e.i) + "," +
                                                 std::to_string(e.j) + ") outside " +
                                                 std::to_string(n) + " objects");
    }
    const int rows = sizes[static_cast<std::size_t>(e.i)], cols = sizes[static_cast<std::size_t>(e.j)];
    if (e.block.rows() != rows || e.block.cols() != cols) {
      throw Error(ErrorCode::kShapeMismatch, "block (" + std::to_string(e.i) + "," +
                                                 std::to_string(e.j) + ") has shape " +
                                                 shape_str(e.block.rows(), e.block.cols()) +
                                                 ", expected " + shape_str(rows, cols));
    }
    if (e.i == e.j) {
      const auto id = PartialMapBlock::identity(rows);
      const bool ok = e.block.mode() == BlockMode::kBinary ? e.block == id : e.block == id.to_relaxed();
      if (!ok) throw Error(ErrorCode::kInvalidParams, "diagonal block is not the identity");
    }
    relaxed = relaxed || e.block.mode() == BlockMode::kRelaxed;
  }
  const BlockMode mode = relaxed ? BlockMode::kRelaxed : BlockMode::kBinary;
  BlockMapMatrix x(std::move(sizes), mode);

  // Collect each unordered pair's contributions in upper orientation.
  const std::size_t pairs = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  std::vector<int> seen(pairs, 0);
  std::vector<PartialMapBlock> given(pairs);
  for (const auto& e : blocks) {
    if (e.i == e.j) continue;
    const int a = std::min(e.i, e.j), b = std::max(e.i, e.j);
    const std::size_t key = static_cast<std::size_t>(a) * static_cast<std::size_t>(n) + static_cast<std::size_t>(b);
    PartialMapBlock oriented = e.i < e.j ? e.block : e.block.transposed();
    if (mode == BlockMode::kRelaxed) oriented = oriented.to_relaxed();
    if (seen[key] == 0) {
      given[key] = std::move(oriented);
      seen[key] = 1;
      continue;
    }
    if (given[key] == oriented) continue;
    if (policy == SymmetrizePolicy::kReject) {
      throw Error(ErrorCode::kAsymmetricInput, "blocks (" + std::to_string(a) + "," + std::to_string(b) +
                                                   ") and (" + std::to_string(b) + "," +
                                                   std::to_string(a) + ") are not mutual transposes");
    }
    if (mode == BlockMode::kBinary) {
      std::vector<Correspondence> merged(given[key].ones().begin(), given[key].ones().end());
      for (const auto& c : oriented.ones()) {
        if (!std::binary_search(given[key].ones().begin(), given[key].ones().end(), c)) merged.push_back(c);
      }
      given[key] = PartialMapBlock::binary(oriented.rows(), oriented.cols(), std::move(merged));
    } else {
      std::vector<double> merged(given[key].values().begin(), given[key].values().end());
      auto other = oriented.values();
      for (std::size_t k = 0; k < merged.size(); ++k) merged[k] = std::max(merged[k], other[k]);
      given[key] = PartialMapBlock::relaxed(oriented.rows(), oriented.cols(), std::move(merged));
    }
    if (!validate_substochastic(given[key]).empty()) {
      throw Error(ErrorCode::kAsymmetricInput, "union of blocks (" + std::to_string(a) + "," +
                                                   std::to_string(b) + ") and its transpose is not "
                                                   "doubly sub-stochastic");
    }
  }
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const std::size_t key = static_cast<std::size_t>(a) * static_cast<std::size_t>(n) + static_cast<std::size_t>(b);
      if (seen[key]) x.set_block(a, b, std::move(given[key]));
    }
  }
  return x;
}

std::vector<BlockEntry> extract(const BlockMapMatrix& x) {
  std::vector<BlockEntry> out;
  for (int i = 0; i < x.n(); ++i) {
    for (int j = i + 1; j < x.n(); ++j) {
      auto b = x.block(i, j);
      if (!b.is_zero()) out.push_back({i, j, std::move(b)});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Membership

int MembershipMatrix::label(int object, int row) const {
  int offset = 0;
  for (int i = 0; i < object; ++i) offset += sizes[static_cast<std::size_t>(i)];
  return labels[static_cast<std::size_t>(offset + row)];
}

BlockMapMatrix MembershipMatrix::gram() const {
  BlockMapMatrix x(sizes, BlockMode::kBinary);
  const int n = static_cast<int>(sizes.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      // Element -> row lookup for object j.
      std::vector<int> row_of(static_cast<std::size_t>(universe_size), -1);
      for (int c = 0; c < x.size(j); ++c) {
        row_of[static_cast<std::size_t>(labels[static_cast<std::size_t>(x.offset(j) + c)])] = c;
      }
      std::vector<Correspondence> ones;
      for (int r = 0; r < x.size(i); ++r) {
        const int c = row_of[static_cast<std::size_t>(labels[static_cast<std::size_t>(x.offset(i) + r)])];
        if (c >= 0) ones.push_back({r, c});
      }
      x.set_block(i, j, PartialMapBlock::binary(x.size(i), x.size(j), std::move(ones)));
    }
  }
  return x;
}

std::vector<double> MembershipMatrix::dense() const {
  const std::size_t m = static_cast<std::size_t>(universe_size);
  std::vector<double> y(labels.size() * m, 0.0);
  for (std::size_t p = 0; p < labels.size(); ++p) y[p * m + static_cast<std::size_t>(labels[p])] = 1.0;
  return y;
}

MembershipMatrix make_membership(std::vector<int> sizes, std::vector<int> labels, int universe_size) {
  const auto total = std::accumulate(sizes.begin(), sizes.end(), 0);
  if (static_cast<std::size_t>(total) != labels.size()) {
    throw Error(ErrorCode::kShapeMismatch, "label count does not match object sizes");
  }
  if (universe_size < 0) throw Error(ErrorCode::kInvalidParams, "negative universe size");
  std::size_t p = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    std::vector<char> used(static_cast<std::size_t>(universe_size), 0);
    for (int r = 0; r < sizes[i]; ++r, ++p) {
      const int s = labels[p];
      if (s < 0 || s >= universe_size) {
        throw Error(ErrorCode::kInvalidParams, "label " + std::to_string(s) + " outside universe");
      }
      if (used[static_cast<std::size_t>(s)]) {
        throw Error(ErrorCode::kInvalidParams, "object " + std::to_string(i) +
                                                   " holds two points of element " + std::to_string(s));
      }
      used[static_cast<std::size_t>(s)] = 1;
    }
  }
  return MembershipMatrix{std::move(sizes), universe_size, std::move(labels)};
}

Universe universe_of(const MembershipMatrix& y) {
  Universe u{y.universe_size, std::vector<int>(static_cast<std::size_t>(y.universe_size), 0)};
  for (int s : y.labels) ++u.occupancy[static_cast<std::size_t>(s)];
  return u;
}

std::vector<int> canonical_labels(std::span<const int> labels) {
  std::vector<int> remap;
  std::vector<int> out(labels.size());
  int next = 0;
  for (std::size_t p = 0; p < labels.size(); ++p) {
    const std::size_t s = static_cast<std::size_t>(labels[p]);
    if (s >= remap.size()) remap.resize(s + 1, -1);
    if (remap[s] < 0) remap[s] = next++;
    out[p] = remap[s];
  }
  return out;
}

Factorization factorize_consistent(const BlockMapMatrix& x) {
  const int total = x.order();
  // Adjacency over points from off-diagonal unit entries.
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(total));
  for (int i = 0; i < x.n(); ++i) {
    for (int j = i + 1; j < x.n(); ++j) {
      const auto b = x.block(i, j);
      for (int r = 0; r < b.rows(); ++r) {
        for (int c = 0; c < b.cols(); ++c) {
          if (b.at(r, c) == 0.0) continue;
          const int p = x.offset(i) + r, q = x.offset(j) + c;
          adj[static_cast<std::size_t>(p)].push_back(q);
          adj[static_cast<std::size_t>(q)].push_back(p);
        }
      }
    }
  }
  for (auto& nbrs : adj) std::sort(nbrs.begin(), nbrs.end());

  // A connected component is a clique iff no point has two non-adjacent
  // neighbours; such a pair is a three-object cycle whose composition fails.
  for (int b = 0; b < total; ++b) {
    const auto& nb = adj[static_cast<std::size_t>(b)];
    for (std::size_t u = 0; u < nb.size(); ++u) {
      for (std::size_t v = u + 1; v < nb.size(); ++v) {
        const int a = nb[u], c = nb[v];
        const auto& na = adj[static_cast<std::size_t>(a)];
        if (!std::binary_search(na.begin(), na.end(), c)) {
          return Inconsistent{{x.object_of(a), x.object_of(b), x.object_of(c)}, a, b, c};
        }
      }
    }
  }

  std::vector<int> labels(static_cast<std::size_t>(total), -1);
  int next = 0;
  for (int p = 0; p < total; ++p) {
    if (labels[static_cast<std::size_t>(p)] >= 0) continue;
    labels[static_cast<std::size_t>(p)] = next;
    for (int q : adj[static_cast<std::size_t>(p)]) labels[static_cast<std::size_t>(q)] = next;
    ++next;
  }
  return make_membership(x.sizes(), std::move(labels), next);
}

}  // namespace matchlift
