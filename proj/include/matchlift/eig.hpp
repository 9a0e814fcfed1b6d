#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace matchlift::eig {

/// Dense real symmetric matrix stored as its packed upper triangle.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(int order, double fill = 0.0);

  static SymmetricMatrix identity(int order);
  /// Reads the upper triangle of a row-major order x order array.
  static SymmetricMatrix from_dense(int order, std::span<const double> row_major);

  int order() const { return order_; }

  double operator()(int r, int c) const { return packed_[packed_index(r, c)]; }
  double& operator()(int r, int c) { return packed_[packed_index(r, c)]; }

  /// Offset of entry (r, c) in the column-packed upper triangle.
  static std::size_t packed_index(int r, int c) {
    if (r > c) std::swap(r, c);
    return static_cast<std::size_t>(c) * static_cast<std::size_t>(c + 1) / 2 + static_cast<std::size_t>(r);
  }

  std::span<double> packed() { return packed_; }
  std::span<const double> packed() const { return packed_; }

  std::vector<double> to_dense() const;

  SymmetricMatrix& operator+=(const SymmetricMatrix& other);
  SymmetricMatrix& operator-=(const SymmetricMatrix& other);
  SymmetricMatrix& operator*=(double scale);

  double max_abs() const;
  double frobenius() const;
  double min_entry() const;
  bool all_finite() const;

  bool operator==(const SymmetricMatrix&) const = default;

 private:
  int order_ = 0;
  std::vector<double> packed_;
};

SymmetricMatrix operator+(SymmetricMatrix a, const SymmetricMatrix& b);
SymmetricMatrix operator-(SymmetricMatrix a, const SymmetricMatrix& b);
SymmetricMatrix operator*(double s, SymmetricMatrix a);

/// Frobenius inner product <A, B> = tr(A^T B).
double inner(const SymmetricMatrix& a, const SymmetricMatrix& b);
/// max |A - B| entrywise.
double max_abs_diff(const SymmetricMatrix& a, const SymmetricMatrix& b);

struct EigenDecomposition {
  int order = 0;
  /// Eigenvalues sorted in descending order.
  std::vector<double> values;
  /// Eigenvector k occupies [k * order, (k + 1) * order); empty when only
  /// values were requested.
  std::vector<double> vectors;

  std::span<const double> vector(int k) const {
    return std::span<const double>(vectors).subspan(static_cast<std::size_t>(k) * static_cast<std::size_t>(order),
                                                    static_cast<std::size_t>(order));
  }
};

enum class Method { kAuto, kJacobi, kTridiagonalQl };

inline constexpr int kJacobiMaxOrder = 64;
inline constexpr int kJacobiMaxSweeps = 64;
inline constexpr double kJacobiRelTol = 1e-12;
inline constexpr double kTolOrth = 1e-9;
inline constexpr double kTolRecon = 1e-8;

/// Full symmetric eigendecomposition. kAuto uses cyclic Jacobi up to order
/// kJacobiMaxOrder and Householder tridiagonalization + implicit QL above.
/// Throws NoConvergence when the iteration cap is hit.
EigenDecomposition eig_sym(const SymmetricMatrix& a, Method method = Method::kAuto);

/// Eigenvalues only, descending.
std::vector<double> eigvals_sym(const SymmetricMatrix& a, Method method = Method::kAuto);

/// Sum of lambda_k v_k v_k^T over the eigenpairs selected by `keep`.
template <typename Pred>
SymmetricMatrix reconstruct(const EigenDecomposition& d, Pred keep);

struct SpectralSplit {
  SymmetricMatrix psd;  // nonnegative eigenpairs
  SymmetricMatrix nsd;  // negative eigenpairs
  std::vector<double> values;
};

/// One decomposition, both cone projections.
SpectralSplit spectral_split(const SymmetricMatrix& a);

SymmetricMatrix proj_psd(const SymmetricMatrix& a);
SymmetricMatrix proj_nsd(const SymmetricMatrix& a);
/// Entrywise max(a, 0).
SymmetricMatrix proj_nonneg(const SymmetricMatrix& a);

double min_eigenvalue(const SymmetricMatrix& a);

// ---------------------------------------------------------------------------

template <typename Pred>
SymmetricMatrix reconstruct(const EigenDecomposition& d, Pred keep) {
  SymmetricMatrix out(d.order);
  auto packed = out.packed();
  const std::size_t n = static_cast<std::size_t>(d.order);
  for (int k = 0; k < d.order; ++k) {
    const double lambda = d.values[static_cast<std::size_t>(k)];
    if (!keep(lambda)) continue;
    const double* v = d.vectors.data() + static_cast<std::size_t>(k) * n;
    double* col = packed.data();
    for (std::size_t c = 0; c < n; ++c) {
      const double scaled = lambda * v[c];
      for (std::size_t r = 0; r <= c; ++r) col[r] += scaled * v[r];
      col += c + 1;
    }
  }
  return out;
}

}  // namespace matchlift::eig
