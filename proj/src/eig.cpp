#include "matchlift/eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "matchlift/error.hpp"

namespace matchlift::eig {

// ---------------------------------------------------------------------------
// SymmetricMatrix

SymmetricMatrix::SymmetricMatrix(int order, double fill)
    : order_(order),
      packed_(static_cast<std::size_t>(order) * static_cast<std::size_t>(order + 1) / 2, fill) {
  if (order < 0) throw Error(ErrorCode::kShapeMismatch, "negative matrix order");
}

SymmetricMatrix SymmetricMatrix::identity(int order) {
  SymmetricMatrix m(order);
  for (int i = 0; i < order; ++i) m(i, i) = 1.0;
  return m;
}

SymmetricMatrix SymmetricMatrix::from_dense(int order, std::span<const double> row_major) {
  const std::size_t n = static_cast<std::size_t>(order);
  if (row_major.size() != n * n) {
    throw Error(ErrorCode::kShapeMismatch, "dense array size does not match order");
  }
  SymmetricMatrix m(order);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t r = 0; r <= c; ++r) m(static_cast<int>(r), static_cast<int>(c)) = row_major[r * n + c];
  }
  return m;
}

std::vector<double> SymmetricMatrix::to_dense() const {
  const std::size_t n = static_cast<std::size_t>(order_);
  std::vector<double> d(n * n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t r = 0; r <= c; ++r) {
      d[r * n + c] = d[c * n + r] = (*this)(static_cast<int>(r), static_cast<int>(c));
    }
  }
  return d;
}

SymmetricMatrix& SymmetricMatrix::operator+=(const SymmetricMatrix& other) {
  if (other.order_ != order_) throw Error(ErrorCode::kShapeMismatch, "order mismatch in +=");
  for (std::size_t k = 0; k < packed_.size(); ++k) packed_[k] += other.packed_[k];
  return *this;
}

SymmetricMatrix& SymmetricMatrix::operator-=(const SymmetricMatrix& other) {
  if (other.order_ != order_) throw Error(ErrorCode::kShapeMismatch, "order mismatch in -=");
  for (std::size_t k = 0; k < packed_.size(); ++k) packed_[k] -= other.packed_[k];
  return *this;
}

SymmetricMatrix& SymmetricMatrix::operator*=(double scale) {
  for (double& v : packed_) v *= scale;
  return *this;
}

double SymmetricMatrix::max_abs() const {
  double m = 0.0;
  for (double v : packed_) m = std::max(m, std::abs(v));
  return m;
}

double SymmetricMatrix::frobenius() const { return std::sqrt(inner(*this, *this)); }

double SymmetricMatrix::min_entry() const {
  return packed_.empty() ? 0.0 : *std::min_element(packed_.begin(), packed_.end());
}

bool SymmetricMatrix::all_finite() const {
  return std::all_of(packed_.begin(), packed_.end(), [](double v) { return std::isfinite(v); });
}

SymmetricMatrix operator+(SymmetricMatrix a, const SymmetricMatrix& b) { return a += b; }
SymmetricMatrix operator-(SymmetricMatrix a, const SymmetricMatrix& b) { return a -= b; }
SymmetricMatrix operator*(double s, SymmetricMatrix a) { return a *= s; }

double inner(const SymmetricMatrix& a, const SymmetricMatrix& b) {
  if (a.order() != b.order()) throw Error(ErrorCode::kShapeMismatch, "order mismatch in inner");
  double diag = 0.0, off = 0.0;
  auto pa = a.packed(), pb = b.packed();
  std::size_t k = 0;
  for (int c = 0; c < a.order(); ++c) {
    for (int r = 0; r < c; ++r, ++k) off += pa[k] * pb[k];
    diag += pa[k] * pb[k];
    ++k;
  }
  return diag + 2.0 * off;
}

double max_abs_diff(const SymmetricMatrix& a, const SymmetricMatrix& b) {
  if (a.order() != b.order()) throw Error(ErrorCode::kShapeMismatch, "order mismatch in diff");
  double m = 0.0;
  auto pa = a.packed(), pb = b.packed();
  for (std::size_t k = 0; k < pa.size(); ++k) m = std::max(m, std::abs(pa[k] - pb[k]));
  return m;
}

// ---------------------------------------------------------------------------
// Kernels. Both work on a dense row-major n x n buffer and leave eigenvector
// k in row k of `vecs`.

namespace {

struct RawDecomposition {
  std::vector<double> values;
  std::vector<double> vectors;
};

void check_finite(const SymmetricMatrix& a) {
  if (!a.all_finite()) throw Error(ErrorCode::kNumericalBreakdown, "non-finite entry in eigen input");
}

RawDecomposition jacobi(const SymmetricMatrix& input, bool want_vectors) {
  const std::size_t n = static_cast<std::size_t>(input.order());
  std::vector<double> a = input.to_dense();
  std::vector<double> v;
  if (want_vectors) {
    v.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  }
  auto at = [&](std::size_t r, std::size_t c) -> double& { return a[r * n + c]; };

  const double stop = kJacobiRelTol * input.frobenius();
  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = r + 1; c < n; ++c) s += 2.0 * at(r, c) * at(r, c);
    }
    return std::sqrt(s);
  };

  int sweep = 0;
  while (off_norm() > stop) {
    if (sweep++ >= kJacobiMaxSweeps) {
      throw Error(ErrorCode::kNoConvergence, "Jacobi exceeded " + std::to_string(kJacobiMaxSweeps) + " sweeps");
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        at(p, p) -= t * apq;
        at(q, q) += t * apq;
        at(p, q) = at(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = at(k, p), akq = at(k, q);
          at(k, p) = at(p, k) = c * akp - s * akq;
          at(k, q) = at(q, k) = s * akp + c * akq;
        }
        if (want_vectors) {
          // Rows of v are eigenvectors.
          double* vp = v.data() + p * n;
          double* vq = v.data() + q * n;
          for (std::size_t k = 0; k < n; ++k) {
            const double x = vp[k], y = vq[k];
            vp[k] = c * x - s * y;
            vq[k] = s * x + c * y;
          }
        }
      }
    }
  }
  RawDecomposition out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = at(i, i);
  out.vectors = std::move(v);
  return out;
}

// Householder reduction to tridiagonal form followed by the implicit QL
// iteration (EISPACK tred2/tql2 lineage). The working matrix `w` is the
// transpose of the classical V so that every inner loop is unit-stride.
RawDecomposition tridiagonal_ql(const SymmetricMatrix& input, bool want_vectors) {
  const int n = input.order();
  const std::size_t nn = static_cast<std::size_t>(n);
  std::vector<double> w = input.to_dense();
  std::vector<double> d(nn), e(nn);
  auto W = [&](int r, int c) -> double& { return w[static_cast<std::size_t>(r) * nn + static_cast<std::size_t>(c)]; };
  if (n == 0) return {};

  for (int j = 0; j < n; ++j) d[static_cast<std::size_t>(j)] = W(j, n - 1);

  for (int i = n - 1; i > 0; --i) {
    double scale = 0.0, h = 0.0;
    for (int k = 0; k < i; ++k) scale += std::abs(d[static_cast<std::size_t>(k)]);
    if (scale == 0.0) {
      e[static_cast<std::size_t>(i)] = d[static_cast<std::size_t>(i - 1)];
      for (int j = 0; j < i; ++j) {
        d[static_cast<std::size_t>(j)] = W(j, i - 1);
        W(j, i) = 0.0;
        W(i, j) = 0.0;
      }
    } else {
      for (int k = 0; k < i; ++k) {
        d[static_cast<std::size_t>(k)] /= scale;
        h += d[static_cast<std::size_t>(k)] * d[static_cast<std::size_t>(k)];
      }
      double f = d[static_cast<std::size_t>(i - 1)];
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e[static_cast<std::size_t>(i)] = scale * g;
      h -= f * g;
      d[static_cast<std::size_t>(i - 1)] = f - g;
      for (int j = 0; j < i; ++j) e[static_cast<std::size_t>(j)] = 0.0;

      for (int j = 0; j < i; ++j) {
        f = d[static_cast<std::size_t>(j)];
        W(i, j) = f;
        const double* wj = &W(j, 0);
        g = e[static_cast<std::size_t>(j)] + wj[j] * f;
        for (int k = j + 1; k <= i - 1; ++k) {
          g += wj[k] * d[static_cast<std::size_t>(k)];
          e[static_cast<std::size_t>(k)] += wj[k] * f;
        }
        e[static_cast<std::size_t>(j)] = g;
      }
      f = 0.0;
      for (int j = 0; j < i; ++j) {
        e[static_cast<std::size_t>(j)] /= h;
        f += e[static_cast<std::size_t>(j)] * d[static_cast<std::size_t>(j)];
      }
      const double hh = f / (h + h);
      for (int j = 0; j < i; ++j) e[static_cast<std::size_t>(j)] -= hh * d[static_cast<std::size_t>(j)];
      for (int j = 0; j < i; ++j) {
        f = d[static_cast<std::size_t>(j)];
        g = e[static_cast<std::size_t>(j)];
        double* wj = &W(j, 0);
        for (int k = j; k <= i - 1; ++k) {
          wj[k] -= (f * e[static_cast<std::size_t>(k)] + g * d[static_cast<std::size_t>(k)]);
        }
        d[static_cast<std::size_t>(j)] = W(j, i - 1);
        W(j, i) = 0.0;
      }
    }
    d[static_cast<std::size_t>(i)] = h;
  }

  if (want_vectors) {
    for (int i = 0; i < n - 1; ++i) {
      W(i, n - 1) = W(i, i);
      W(i, i) = 1.0;
      const double h = d[static_cast<std::size_t>(i + 1)];
      double* wi1 = &W(i + 1, 0);
      if (h != 0.0) {
        for (int k = 0; k <= i; ++k) d[static_cast<std::size_t>(k)] = wi1[k] / h;
        for (int j = 0; j <= i; ++j) {
          double* wj = &W(j, 0);
          double g = 0.0;
          for (int k = 0; k <= i; ++k) g += wi1[k] * wj[k];
          for (int k = 0; k <= i; ++k) wj[k] -= g * d[static_cast<std::size_t>(k)];
        }
      }
      for (int k = 0; k <= i; ++k) wi1[k] = 0.0;
    }
    for (int j = 0; j < n; ++j) {
      d[static_cast<std::size_t>(j)] = W(j, n - 1);
      W(j, n - 1) = 0.0;
    }
    W(n - 1, n - 1) = 1.0;
  } else {
    for (int j = 0; j < n; ++j) d[static_cast<std::size_t>(j)] = W(j, j);
  }
  e[0] = 0.0;

  // Implicit QL on the tridiagonal (d, e).
  for (int i = 1; i < n; ++i) e[static_cast<std::size_t>(i - 1)] = e[static_cast<std::size_t>(i)];
  e[nn - 1] = 0.0;
  double f = 0.0, tst1 = 0.0;
  const double eps = std::ldexp(1.0, -52);
  const int max_iter = 60;
  for (int l = 0; l < n; ++l) {
    const std::size_t ul = static_cast<std::size_t>(l);
    tst1 = std::max(tst1, std::abs(d[ul]) + std::abs(e[ul]));
    int m = l;
    while (m < n) {
      if (std::abs(e[static_cast<std::size_t>(m)]) <= eps * tst1) break;
      ++m;
    }
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > max_iter) {
          throw Error(ErrorCode::kNoConvergence, "QL iteration exceeded " + std::to_string(max_iter) +
                                                     " steps for eigenvalue " + std::to_string(l));
        }
        double g = d[ul];
        double p = (d[ul + 1] - g) / (2.0 * e[ul]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[ul] = e[ul] / (p + r);
        d[ul + 1] = e[ul] * (p + r);
        const double dl1 = d[ul + 1];
        double h = g - d[ul];
        for (std::size_t i = ul + 2; i < nn; ++i) d[i] -= h;
        f += h;

        p = d[static_cast<std::size_t>(m)];
        double c = 1.0, c2 = c, c3 = c;
        const double el1 = e[ul + 1];
        double s = 0.0, s2 = 0.0;
        for (int i = m - 1; i >= l; --i) {
          const std::size_t ui = static_cast<std::size_t>(i);
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[ui];
          h = c * p;
          r = std::hypot(p, e[ui]);
          e[ui + 1] = s * r;
          s = e[ui] / r;
          c = p / r;
          p = c * d[ui] - s * g;
          d[ui + 1] = h + s * (c * g + s * d[ui]);
          if (want_vectors) {
            double* vi = &W(i, 0);
            double* vi1 = &W(i + 1, 0);
            for (std::size_t k = 0; k < nn; ++k) {
              const double t = vi1[k];
              vi1[k] = s * vi[k] + c * t;
              vi[k] = c * vi[k] - s * t;
            }
          }
        }
        p = -s * s2 * c3 * el1 * e[ul] / dl1;
        e[ul] = s * p;
        d[ul] = c * p;
      } while (std::abs(e[ul]) > eps * tst1);
    }
    d[ul] += f;
    e[ul] = 0.0;
  }
  RawDecomposition out;
  out.values = std::move(d);
  if (want_vectors) out.vectors = std::move(w);
  return out;
}

EigenDecomposition finish(RawDecomposition raw, int order, bool want_vectors) {
  const std::size_t n = static_cast<std::size_t>(order);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(),
                   [&](std::size_t a, std::size_t b) { return raw.values[a] > raw.values[b]; });
  EigenDecomposition out;
  out.order = order;
  out.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.values[k] = raw.values[perm[k]];
  if (want_vectors) {
    out.vectors.resize(n * n);
    for (std::size_t k = 0; k < n; ++k) {
      std::copy_n(raw.vectors.begin() + static_cast<std::ptrdiff_t>(perm[k] * n), n,
                  out.vectors.begin() + static_cast<std::ptrdiff_t>(k * n));
    }
  }
  return out;
}

EigenDecomposition decompose(const SymmetricMatrix& a, Method method, bool want_vectors) {
  check_finite(a);
  if (method == Method::kAuto) {
    method = a.order() <= kJacobiMaxOrder ? Method::kJacobi : Method::kTridiagonalQl;
  }
  RawDecomposition raw = method == Method::kJacobi ? jacobi(a, want_vectors) : tridiagonal_ql(a, want_vectors);
  return finish(std::move(raw), a.order(), want_vectors);
}

}  // namespace

EigenDecomposition eig_sym(const SymmetricMatrix& a, Method method) { return decompose(a, method, true); }

std::vector<double> eigvals_sym(const SymmetricMatrix& a, Method method) {
  return decompose(a, method, false).values;
}

SpectralSplit spectral_split(const SymmetricMatrix& a) {
  const auto d = eig_sym(a);
  SpectralSplit out;
  out.psd = reconstruct(d, [](double l) { return l > 0.0; });
  out.nsd = reconstruct(d, [](double l) { return l < 0.0; });
  out.values = d.values;
  return out;
}

SymmetricMatrix proj_psd(const SymmetricMatrix& a) {
  return reconstruct(eig_sym(a), [](double l) { return l > 0.0; });
}

SymmetricMatrix proj_nsd(const SymmetricMatrix& a) {
  return reconstruct(eig_sym(a), [](double l) { return l < 0.0; });
}

SymmetricMatrix proj_nonneg(const SymmetricMatrix& a) {
  SymmetricMatrix out = a;
  for (double& v : out.packed()) v = std::max(v, 0.0);
  return out;
}

double min_eigenvalue(const SymmetricMatrix& a) {
  if (a.order() == 0) return 0.0;
  return eigvals_sym(a).back();
}

}  // namespace matchlift::eig
