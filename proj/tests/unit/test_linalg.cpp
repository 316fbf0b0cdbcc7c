#include <cmath>
#include <random>

#include "doctest.h"
#include "socp/linalg.hpp"

using namespace socp;

namespace {

SymMatrix random_sym(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SymMatrix a(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) a.set(i, j, u(rng));
  return a;
}

}  // namespace

TEST_CASE("identity and diagonal spectra") {
  auto r = sym_eigen(SymMatrix::identity(3));
  for (double v : r.values) CHECK(v == doctest::Approx(1.0));

  const Vector d{-2.0, 5.0};
  r = sym_eigen(SymMatrix::diagonal(d));
  CHECK(r.values[0] == doctest::Approx(-2.0));
  CHECK(r.values[1] == doctest::Approx(5.0));
  CHECK(std::abs(r.vectors(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(r.vectors(1, 1)) == doctest::Approx(1.0));
}

TEST_CASE("min eigenvalue of a 2x2 against the characteristic polynomial") {
  CHECK(min_eigenvalue(SymMatrix(2)) == 0.0);
  // roots of l^2 - tr l + det
  const double a = 3, b = 4, c = 3;
  const double tr = a + c, det = a * c - b * b;
  const double lo = 0.5 * (tr - std::sqrt(tr * tr - 4 * det));
  CHECK(min_eigenvalue(SymMatrix::from_rows({{a, b}, {b, c}})) == doctest::Approx(lo).epsilon(1e-14));
  CHECK(lo == doctest::Approx(-1.0));
}

TEST_CASE("eigen reconstruction and orthonormality on random matrices") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> ord(1, 20);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = ord(rng);
    const SymMatrix a = random_sym(rng, n);
    const auto r = sym_eigen(a);
    const double fro = a.frobenius_norm();
    for (std::size_t k = 1; k < n; ++k) REQUIRE(r.values[k - 1] <= r.values[k]);
    double rec = 0.0, orth = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0, o = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          s += r.vectors(i, k) * r.values[k] * r.vectors(j, k);
          o += r.vectors(k, i) * r.vectors(k, j);
        }
        rec = std::max(rec, std::abs(s - a(i, j)));
        orth = std::max(orth, std::abs(o - (i == j ? 1.0 : 0.0)));
      }
    REQUIRE(rec <= 1e-9 * (1.0 + fro));
    REQUIRE(orth <= 1e-10);
    for (std::size_t k = 0; k < n; ++k) {
      const Vector v = r.vectors.col(k);
      Vector res = a.multiply(v);
      axpy(-r.values[k], v, res);
      REQUIRE(norm2(res) <= 1e-10 * (1.0 + fro));
    }
  }
}

TEST_CASE("non-finite input is rejected") {
  SymMatrix a(2);
  a.set(0, 1, std::nan(""));
  CHECK_THROWS_AS(sym_eigen(a), std::invalid_argument);
}

TEST_CASE("null space examples") {
  auto ns = null_space(Matrix::from_rows({{1.0, 1.0}}, 2), 2);
  CHECK(ns.rank == 1);
  REQUIRE(ns.nullity() == 1);
  CHECK(std::abs(ns.basis(0, 0)) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(ns.basis(0, 0) == doctest::Approx(-ns.basis(1, 0)));

  ns = null_space(Matrix::from_rows({{1.0, 0.0}, {0.0, 1.0}}, 2), 2);
  CHECK(ns.rank == 2);
  CHECK(ns.nullity() == 0);

  ns = null_space(Matrix::from_rows({{-2.0, -2.0}}, 2), 2);
  REQUIRE(ns.nullity() == 1);
  CHECK(ns.basis(0, 0) + ns.basis(1, 0) == doctest::Approx(0.0));

  ns = null_space(Matrix(0, 3), 3);
  CHECK(ns.rank == 0);
  CHECK(ns.nullity() == 3);
}

TEST_CASE("rank plus nullity and annihilation on random rows") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + trial % 7;
    const std::size_t r = trial % 5;  // true rank <= r
    const std::size_t k = r + trial % 3;
    Matrix base(r, n);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < n; ++j) base(i, j) = u(rng);
    Matrix rows(k, n);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t q = 0; q < r; ++q) axpy(u(rng), base.row(q), rows.row(i));
    const auto ns = null_space(rows, n);
    REQUIRE(ns.rank + ns.nullity() == n);
    REQUIRE(ns.rank <= std::min(r, n));
    const Matrix ab = rows.multiply(ns.basis);
    REQUIRE(ab.max_abs() <= 1e-8 * std::max(1.0, rows.frobenius_norm()));
    const Matrix btb = ns.basis.transpose().multiply(ns.basis);
    for (std::size_t i = 0; i < btb.rows(); ++i)
      for (std::size_t j = 0; j < btb.cols(); ++j)
        REQUIRE(std::abs(btb(i, j) - (i == j ? 1.0 : 0.0)) <= 1e-10);
  }
}

TEST_CASE("solve_spd") {
  const Vector b{3.0, -1.0};
  const Vector x = solve_spd(SymMatrix::identity(2), b);
  CHECK(x[0] == 3.0);
  CHECK(x[1] == -1.0);

  const Vector d{2.0, 4.0};
  const Vector y = solve_spd(SymMatrix::diagonal(d), Vector{2.0, 8.0});
  CHECK(y[0] == doctest::Approx(1.0));
  CHECK(y[1] == doctest::Approx(2.0));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 12;
    Matrix bm(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) bm(i, j) = u(rng);
    SymMatrix a = SymMatrix::identity(n);
    a.add_gram(1.0, bm.transpose());  // B B^T + I
    const Vector ones(n, 1.0);
    const Vector rhs = a.multiply(ones);
    const Vector sol = solve_spd(a, rhs);
    for (double v : sol) REQUIRE(std::abs(v - 1.0) <= 1e-9);
  }

  CHECK_THROWS_AS(solve_spd(SymMatrix::diagonal(Vector{1.0, -1.0}), Vector{1.0, 1.0}),
                  NotPositiveDefinite);
}

TEST_CASE("SymMatrix helpers keep exact symmetry") {
  SymMatrix a(3);
  const Matrix j = Matrix::from_rows({{1.0, 2.0, 3.0}, {0.5, -1.0, 0.25}}, 3);
  a.add_gram(0.7, j);
  a.add_congruence(-1.3, j, SymMatrix::from_rows({{1.0, 0.2}, {0.2, -2.0}}));
  a.add_outer(0.3, Vector{1.0, -2.0, 0.5});
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) CHECK(a(r, c) == a(c, r));
  CHECK_THROWS(SymMatrix::from_rows({{1.0, 2.0}, {3.0, 1.0}}));
}
