#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "socp/cone.hpp"
#include "support/oracles.hpp"

using namespace socp;

TEST_CASE("spectral decomposition examples") {
  const Vector z{3.0, 0.0, 4.0};
  auto s = spectral_decompose(z);
  CHECK(s.eta1 == doctest::Approx(-1.0));
  CHECK(s.eta2 == doctest::Approx(7.0));
  CHECK(s.u1 == std::vector<double>{0.5, 0.0, -0.5});
  CHECK(s.u2 == std::vector<double>{0.5, 0.0, 0.5});
  for (std::size_t j = 0; j < 3; ++j) CHECK(s.eta1 * s.u1[j] + s.eta2 * s.u2[j] == doctest::Approx(z[j]));
  CHECK_FALSE(s.degenerate_tail);

  s = spectral_decompose(Vector{5.0, 0.0, 0.0});
  CHECK(s.eta1 == 5.0);
  CHECK(s.eta2 == 5.0);
  CHECK(s.degenerate_tail);
  CHECK(s.u2 == std::vector<double>{0.5, 0.5, 0.0});

  s = spectral_decompose(Vector{0.0, 0.0});
  CHECK(s.eta1 == 0.0);
  CHECK(s.eta2 == 0.0);

  CHECK_THROWS_AS(spectral_decompose(Vector{1.0}), std::invalid_argument);
}

TEST_CASE("projection examples") {
  CHECK(project_block(Vector{2.0, 1.0, 0.0}) == std::vector<double>{2.0, 1.0, 0.0});
  const Vector zero = project_block(Vector{-2.0, 1.0, 0.0});
  for (double v : zero) CHECK(v == 0.0);
  const Vector p = project_block(Vector{0.0, 1.0});
  const Vector q = test::projection_oracle(Vector{0.0, 1.0});
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(0.5));
  CHECK(q[0] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(q[1] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(project_block(Vector{-3.0}) == std::vector<double>{0.0});
  CHECK(project_block(Vector{3.0}) == std::vector<double>{3.0});
}

TEST_CASE("projection optimality against random feasible points") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  for (std::size_t m : {2u, 3u, 5u}) {
    for (int trial = 0; trial < 300; ++trial) {
      Vector z(m);
      for (double& v : z) v = 2.0 * nd(rng);
      const Vector p = project_block(z);
      REQUIRE(eta_min(p) >= -1e-12);
      const double dist = norm2(sub(z, p));
      for (int k = 0; k < 100; ++k) {
        Vector y(m);
        for (double& v : y) v = nd(rng);
        y[0] = norm2(std::span<const double>(y).subspan(1)) + std::abs(nd(rng));
        REQUIRE(dist <= norm2(sub(z, y)) + 1e-9);
      }
    }
  }
}

TEST_CASE("projection equals the spectral clamp and is nonexpansive") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t m = 2 + trial % 4;
    Vector z(m), w(m);
    for (double& v : z) v = nd(rng);
    for (double& v : w) v = nd(rng);
    const auto s = spectral_decompose(z);
    Vector clamp(m);
    for (std::size_t j = 0; j < m; ++j)
      clamp[j] = std::max(0.0, s.eta1) * s.u1[j] + std::max(0.0, s.eta2) * s.u2[j];
    REQUIRE(project_block(z) == clamp);
    REQUIRE(norm2(sub(project_block(z), project_block(w))) <= norm2(sub(z, w)) + 1e-12);
  }
}

TEST_CASE("jordan product, gamma and tilde_g") {
  CHECK(jordan_product(Vector{1.0, 0.0}, Vector{3.0, -1.0}) == std::vector<double>{3.0, -1.0});
  CHECK(jordan_product(Vector{1.0, 0.0}, Vector{0.0, 1.0}) == std::vector<double>{0.0, 1.0});
  CHECK(jordan_product(Vector{1.0, 1.0}, Vector{0.5, -0.5}) == std::vector<double>{0.0, 0.0});

  CHECK(gamma_matrix(1)(0, 0) == 1.0);
  const SymMatrix g2 = gamma_matrix(2);
  CHECK(g2(0, 0) == 1.0);
  CHECK(g2(1, 1) == -1.0);
  CHECK(g2(0, 1) == 0.0);
  for (std::size_t m = 1; m <= 6; ++m) {
    const Matrix g = gamma_matrix(m).to_matrix();
    const Matrix sq = g.multiply(g);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) CHECK(sq(i, j) == (i == j ? 1.0 : 0.0));
  }

  CHECK(tilde_g(Vector{1.0, 1.0}) == std::vector<double>{1.0, 1.0});
  CHECK(tilde_g(Vector{5.0, 3.0, 4.0}) == std::vector<double>{5.0, 3.0, 4.0});
  CHECK(tilde_g(Vector{0.0, -2.0, 0.0}) == std::vector<double>{2.0, -2.0, 0.0});

  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 100; ++t) {
    Vector x(4), y(4);
    for (double& v : x) v = nd(rng);
    for (double& v : y) v = nd(rng);
    CHECK(jordan_product(x, y)[0] == dot(x, y));
  }
}

TEST_CASE("m_matrix entries and spectrum") {
  const SymMatrix m = m_matrix(1.0, Vector{1.0, 0.0});
  const double expect[3][3] = {{0.5, 0.5, 0.0}, {0.5, 0.5, 0.0}, {0.0, 0.0, 1.0}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(m(i, j) == doctest::Approx(expect[i][j]));

  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ux(-1.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const std::size_t mm = 2 + t % 5;
    Vector w(mm - 1);
    for (double& v : w) v = nd(rng);
    const double nw = norm2(w);
    for (double& v : w) v /= nw;
    const double xi = t % 10 == 0 ? -1.0 : ux(rng);
    std::vector<double> expected{0.0, 1.0};
    for (std::size_t k = 0; k + 2 < mm; ++k) expected.push_back(0.5 * (1.0 + xi));
    std::sort(expected.begin(), expected.end());
    const auto ev = sym_eigen(m_matrix(xi, w)).values;
    for (std::size_t k = 0; k < mm; ++k) REQUIRE(std::abs(ev[k] - expected[k]) <= 1e-9);
  }
  CHECK_THROWS_AS(m_matrix(0.0, Vector{1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("classification") {
  CHECK(classify(Vector{2.0, 1.0, 0.0}) == ConeRegion::InteriorK);
  CHECK(classify(Vector{1.0, 1.0}) == ConeRegion::BoundaryPlusK);
  CHECK(classify(Vector{0.0, 1.0}) == ConeRegion::Outside);
  CHECK(classify(Vector{-3.0, 1.0}) == ConeRegion::InteriorNegK);
  CHECK(classify(Vector{-1.0, 1.0}) == ConeRegion::BoundaryPlusNegK);
  CHECK(classify(Vector{0.0, 0.0, 0.0}) == ConeRegion::Zero);
  CHECK(classify(Vector{2.0}) == ConeRegion::InteriorK);
  CHECK(classify(Vector{-2.0}) == ConeRegion::InteriorNegK);
  CHECK(classify(Vector{1e-12}) == ConeRegion::Zero);
}

TEST_CASE("bsub_element selections") {
  const SymMatrix a = bsub_element(Vector{2.0, 1.0, 0.0});
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(a(i, j) == (i == j ? 1.0 : 0.0));
  CHECK(bsub_element(Vector{-3.0, 1.0}).max_abs() == 0.0);
  const SymMatrix o = bsub_element(Vector{0.0, 1.0});
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(o(i, j) == doctest::Approx(0.5));
  const Matrix fd = test::fd_projection_jacobian(Vector{0.0, 1.0}, 1e-6);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(std::abs(fd(i, j) - o(i, j)) <= 1e-5);
}

TEST_CASE("bsub_element matches finite-difference Jacobians at differentiable points") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  int checked = 0;
  while (checked < 500) {
    const std::size_t m = 2 + checked % 4;
    Vector z(m);
    for (double& v : z) v = nd(rng);
    const auto s = spectral_decompose(z);
    if (std::abs(s.eta1) <= 1e-3 || std::abs(s.eta2) <= 1e-3) continue;
    const SymMatrix b = bsub_element(z);
    const Matrix fd = test::fd_projection_jacobian(z, 1e-6);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) REQUIRE(std::abs(fd(i, j) - b(i, j)) <= 1e-5);
    ++checked;
  }
}
