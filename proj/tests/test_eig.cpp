#include <doctest.h>

#include <cmath>
#include <limits>

#include "matchlift/eig.hpp"
#include "matchlift/synth.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace matchlift;
using namespace matchlift::eig;

namespace {

SymmetricMatrix sym(const oracle::Dense& a) {
  return SymmetricMatrix::from_dense(static_cast<int>(a.size()), oracle::flatten(a));
}

// max |U^T U - I| and max |A - U diag(l) U^T|, computed by plain loops.
std::pair<double, double> residuals(const SymmetricMatrix& a, const EigenDecomposition& d) {
  const int n = a.order();
  double orth = 0, recon = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double dot = 0, sum = 0;
      for (int k = 0; k < n; ++k) {
        dot += d.vector(i)[static_cast<std::size_t>(k)] * d.vector(j)[static_cast<std::size_t>(k)];
        sum += d.values[static_cast<std::size_t>(k)] * d.vector(k)[static_cast<std::size_t>(i)] *
               d.vector(k)[static_cast<std::size_t>(j)];
      }
      orth = std::max(orth, std::abs(dot - (i == j ? 1.0 : 0.0)));
      recon = std::max(recon, std::abs(sum - a(i, j)));
    }
  return {orth, recon};
}

}  // namespace

TEST_CASE("identity of order 5") {
  const auto d = eig_sym(SymmetricMatrix::identity(5));
  for (double v : d.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(residuals(SymmetricMatrix::identity(5), d).first < kTolOrth);
}

TEST_CASE("all-ones of order 4") {
  const SymmetricMatrix a(4, 1.0);
  for (Method m : {Method::kJacobi, Method::kTridiagonalQl}) {
    const auto d = eig_sym(a, m);
    CHECK(d.values[0] == doctest::Approx(4.0).epsilon(1e-13));
    for (int k = 1; k < 4; ++k) CHECK(std::abs(d.values[static_cast<std::size_t>(k)]) < 1e-12);
  }
}

TEST_CASE("rank of a ground-truth matrix equals its universe size") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Instance inst = generate({3, 6, 1, 1, 1, seed});
    const auto dense = inst.x_gt.to_dense();
    const auto values = eigvals_sym(SymmetricMatrix::from_dense(inst.x_gt.order(), dense));
    int nonzero = 0;
    for (double v : values) nonzero += std::abs(v) > 1e-9;
    CHECK(nonzero == inst.truth.universe_size);
    CHECK(values[0] == doctest::Approx(6.0).epsilon(1e-12));
  }
}

TEST_CASE("2x2 and 3x3 hand cases against characteristic-polynomial roots") {
  const std::vector<oracle::Dense> cases{
      {{2, 1}, {1, 2}},
      {{0, 0}, {0, 0}},
      {{1, -3}, {-3, 1}},
      {{5, 0}, {0, -2}},
      {{2, 0, 0}, {0, 3, 4}, {0, 4, 9}},
      {{1, 1, 1}, {1, 1, 1}, {1, 1, 1}},
      {{4, -2, 0.5}, {-2, 1, 3}, {0.5, 3, -7}},
      {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}},
  };
  for (const auto& a : cases) {
    const auto expected = oracle::char_poly_roots(a);
    for (Method m : {Method::kJacobi, Method::kTridiagonalQl}) {
      const auto d = eig_sym(sym(a), m);
      for (std::size_t k = 0; k < expected.size(); ++k) CHECK(std::abs(d.values[k] - expected[k]) < 1e-10);
    }
  }
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto a = oracle::random_symmetric(3, seed, 5.0);
    const auto expected = oracle::char_poly_roots(a);
    const auto got = eigvals_sym(sym(a));
    for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(got[k] - expected[k]) < 1e-10);
  }
}

TEST_CASE("orthonormality and reconstruction across orders and methods") {
  for (int n : {1, 2, 6, 17, 64, 65, 150}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const auto a = sym(oracle::random_symmetric(n, seed * 31 + static_cast<std::uint64_t>(n)));
      for (Method m : {Method::kAuto, Method::kJacobi, Method::kTridiagonalQl}) {
        if (m == Method::kJacobi && n > 64) continue;
        const auto d = eig_sym(a, m);
        const auto [orth, recon] = residuals(a, d);
        CHECK(orth <= kTolOrth);
        CHECK(recon <= kTolRecon * a.max_abs());
        for (std::size_t k = 1; k < d.values.size(); ++k) CHECK(d.values[k - 1] >= d.values[k]);
      }
    }
  }
}

TEST_CASE("Jacobi and QL agree on eigenvalues; values-only matches") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto a = sym(oracle::random_symmetric(40, seed));
    const auto j = eig_sym(a, Method::kJacobi).values;
    const auto q = eig_sym(a, Method::kTridiagonalQl).values;
    const auto v = eigvals_sym(a, Method::kTridiagonalQl);
    for (std::size_t k = 0; k < j.size(); ++k) {
      CHECK(std::abs(j[k] - q[k]) < 1e-10);
      CHECK(std::abs(v[k] - q[k]) < 1e-10);
    }
  }
}

TEST_CASE("repeated eigenvalues: any orthonormal basis") {
  // Block-diagonal ones matrices: eigenvalue 3 twice, 0 four times.
  oracle::Dense a(6, std::vector<double>(6, 0.0));
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = (i / 3 == j / 3) ? 1 : 0;
  for (Method m : {Method::kJacobi, Method::kTridiagonalQl}) {
    const auto d = eig_sym(sym(a), m);
    const auto [orth, recon] = residuals(sym(a), d);
    CHECK(orth <= kTolOrth);
    CHECK(recon <= kTolRecon);
  }
}

TEST_CASE("non-finite input is a numerical breakdown") {
  SymmetricMatrix a(3);
  a(1, 2) = std::numeric_limits<double>::quiet_NaN();
  CHECK_CODE(eig_sym(a), ErrorCode::kNumericalBreakdown);
}

TEST_CASE("cone projections: examples") {
  SUBCASE("psd input") {
    const auto a = sym({{2, 1}, {1, 2}});
    CHECK(max_abs_diff(proj_psd(a), a) < 1e-12);
    CHECK(proj_nsd(a).max_abs() < 1e-12);
  }
  SUBCASE("diag(2, -3)") {
    const auto a = sym({{2, 0}, {0, -3}});
    CHECK(max_abs_diff(proj_psd(a), sym({{2, 0}, {0, 0}})) < 1e-14);
    CHECK(max_abs_diff(proj_nsd(a), sym({{0, 0}, {0, -3}})) < 1e-14);
  }
  SUBCASE("proj_nonneg") {
    CHECK(proj_nonneg(sym({{-1, 0}, {0, 2}})) == sym({{0, 0}, {0, 2}}));
    CHECK(proj_nonneg(sym({{-1, -2}, {-2, -3}})).max_abs() == 0.0);
  }
}

TEST_CASE("cone projection properties on random matrices") {
  for (int n : {6, 30, 90}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto a = sym(oracle::random_symmetric(n, 1000 + seed));
      const auto split = spectral_split(a);
      const auto p = proj_psd(a), q = proj_nsd(a);
      CHECK(max_abs_diff(p + q, a) < kTolRecon);
      CHECK(max_abs_diff(split.psd, p) < 1e-12);
      CHECK(max_abs_diff(split.nsd, q) < 1e-12);
      CHECK(std::abs(inner(p, q)) < 1e-8);
      CHECK(min_eigenvalue(p) >= -1e-9);
      CHECK(min_eigenvalue(-1.0 * q) >= -1e-9);
      CHECK(max_abs_diff(proj_psd(p), p) < 1e-9);
      const auto nn = proj_nonneg(a);
      CHECK(nn.min_entry() >= 0.0);
      CHECK(proj_nonneg(nn) == nn);
    }
  }
}

TEST_CASE("symmetric matrix arithmetic") {
  const auto a = sym({{1, 2}, {2, 3}});
  const auto b = sym({{0, -1}, {-1, 4}});
  CHECK(inner(a, b) == doctest::Approx(1 * 0 + 2 * 2 * -1 + 3 * 4));
  CHECK((a - b)(0, 1) == 3.0);
  CHECK((2.0 * a)(1, 1) == 6.0);
  CHECK(a.frobenius() == doctest::Approx(std::sqrt(1 + 4 + 4 + 9)));
  CHECK(a.to_dense() == std::vector<double>{1, 2, 2, 3});
  CHECK(SymmetricMatrix::packed_index(1, 0) == SymmetricMatrix::packed_index(0, 1));
}
