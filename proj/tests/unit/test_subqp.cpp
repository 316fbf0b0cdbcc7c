#include <cmath>
#include <random>

#include "doctest.h"
#include "socp/subqp.hpp"
#include "support/oracles.hpp"

using namespace socp;

namespace {

// Projected gradient on (xi, kappa) with chi = t + kappa / rho ... written as
// the equivalent problem over (xi, w) with w = A xi + rho (chi - t) in K:
// chi = t + (w - A xi) / rho. Eliminating chi gives a smooth convex objective
// in (xi, w) with w constrained to K.
Vector reference_xi(const SubQp& q, int iters) {
  const std::size_t n = q.c.size();
  const std::size_t m = q.t.size();
  Vector xi(n, 0.0), w(m, 0.0);
  for (std::size_t i = 0; i < q.cone.blocks(); ++i) w[q.cone.offset(i)] = 1.0;
  auto chi_of = [&](const Vector& x, const Vector& ww) {
    Vector ax = q.A.multiply(x);
    Vector c(m);
    for (std::size_t j = 0; j < m; ++j) c[j] = q.t[j] + (ww[j] - ax[j]) / q.rho;
    return c;
  };
  // Lipschitz bound of the gradient
  double lip = q.M.frobenius_norm() + (q.A.frobenius_norm() * q.A.frobenius_norm() + 1.0) / q.rho + 1.0;
  const double step = 1.0 / lip;
  for (int it = 0; it < iters; ++it) {
    const Vector chi = chi_of(xi, w);
    // d/dxi = c + M xi - A^T chi ; d/dw = chi
    Vector gx = q.M.multiply(xi);
    for (std::size_t j = 0; j < n; ++j) gx[j] += q.c[j];
    axpy(-1.0, q.A.multiply_transpose(chi), gx);
    axpy(-step, gx, xi);
    axpy(-step, chi, w);
    w = project_cone(q.cone, w);
  }
  return xi;
}

}  // namespace

TEST_CASE("pure prox subproblem") {
  SubQp q;
  q.c = {};
  q.M = SymMatrix(0);
  q.rho = 2.0;
  q.cone = ConeProduct({3});
  q.A = Matrix(3, 0);
  q.t = {0.5, 2.0, -1.0};
  const auto s = solve_subqp(q, 1e-10);
  REQUIRE(s.status == SubQpStatus::Converged);
  const Vector neg{-0.5, -2.0, 1.0};
  const Vector expect = add(q.t, test::projection_oracle(neg));
  for (std::size_t j = 0; j < 3; ++j) CHECK(s.chi[j] == doctest::Approx(expect[j]).epsilon(1e-8));
  CHECK(s.kkt_residual <= 1e-10);
}

TEST_CASE("-t in K gives chi = 0") {
  SubQp q;
  q.c = {0.0};
  q.M = SymMatrix::identity(1);
  q.rho = 1.0;
  q.cone = ConeProduct({2});
  q.A = Matrix(2, 1);
  q.A(1, 0) = 1.0;
  q.t = {-2.0, 0.5};
  const auto s = solve_subqp(q);
  REQUIRE(s.status == SubQpStatus::Converged);
  CHECK(std::abs(s.xi[0]) <= 1e-8);
  CHECK(norm2(s.chi) <= 1e-8);
}

TEST_CASE("initial point is strictly interior") {
  const ConeProduct cone({3, 1, 2});
  Vector t{0.3, -1.0, 2.0, 0.5, -4.0, 1.0};
  Vector chi0 = t;
  for (std::size_t i = 0; i < cone.blocks(); ++i) chi0[cone.offset(i)] += 1.0;
  const double rho = 0.7;
  Vector s(t.size());
  for (std::size_t j = 0; j < t.size(); ++j) s[j] = rho * (chi0[j] - t[j]);
  for (std::size_t i = 0; i < cone.blocks(); ++i) CHECK(classify(cone.block(std::span<const double>(s), i)) == ConeRegion::InteriorK);
}

TEST_CASE("random instances match projected gradient reference") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> nd(1, 4);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = static_cast<std::size_t>(nd(rng));
    std::vector<std::size_t> dims;
    std::size_t m = 0;
    while (m < 2 || (m < 6 && u(rng) > 0.0)) {
      const std::size_t d = std::min<std::size_t>(6 - m, static_cast<std::size_t>(nd(rng)));
      if (d == 0) break;
      dims.push_back(d);
      m += d;
    }
    SubQp q;
    q.cone = ConeProduct(dims);
    q.c.resize(n);
    for (double& v : q.c) v = u(rng);
    Matrix b(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) b(i, j) = u(rng);
    q.M = SymMatrix::identity(n);
    q.M.add_gram(1.0, b);
    q.rho = 0.5 + std::abs(u(rng));
    q.A = Matrix(m, n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) q.A(i, j) = u(rng);
    q.t.resize(m);
    for (double& v : q.t) v = u(rng);

    const auto s = solve_subqp(q, 1e-10);
    INFO("trial " << trial);
    REQUIRE(s.status == SubQpStatus::Converged);
    CHECK(s.kkt_residual <= 1e-10);
    CHECK(in_cone(q.cone, s.lambda, 1e-9));
    const Vector ref = reference_xi(q, 200000);
    for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(s.xi[j] - ref[j]) <= 1e-5);
  }
}

TEST_CASE("non-SPD M is rejected") {
  SubQp q;
  q.c = {0.0};
  q.M = SymMatrix::diagonal(Vector{-1.0});
  q.cone = ConeProduct({2});
  q.A = Matrix(2, 1);
  q.t = {0.0, 0.0};
  CHECK_THROWS_AS(solve_subqp(q), SubQpError);
}

TEST_CASE("conic feasibility") {
  SUBCASE("interior point without equalities") {
    const ConeProduct cone({3});
    const Vector g{2.0, 0.5, 0.0};
    const Matrix G(3, 2);
    const auto r = solve_conic_feasibility(cone, g, G, Matrix(0, 2));
    CHECK(r.t == doctest::Approx(1.5).epsilon(1e-4));
  }
  SUBCASE("equalities spanning R^n") {
    const ConeProduct cone({2});
    const Vector g{1.0, 0.25};
    Matrix G(2, 2);
    G(1, 0) = 1.0;
    G(0, 1) = 1.0;
    const auto r = solve_conic_feasibility(cone, g, G, Matrix::identity(2));
    CHECK(r.t == doctest::Approx(0.75).epsilon(1e-9));
  }
  SUBCASE("grid search oracle") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
      const ConeProduct cone({3, 1});
      Vector g(4);
      for (double& v : g) v = u(rng);
      Matrix G(4, 2);
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 2; ++j) G(i, j) = u(rng);
      const auto r = solve_conic_feasibility(cone, g, G, Matrix(0, 2));
      double grid = -1e300;
      const int N = 400;
      for (int a = 0; a <= N; ++a) {
        for (int b = 0; b <= N; ++b) {
          const Vector d{-1.0 + 2.0 * a / N, -1.0 + 2.0 * b / N};
          Vector y = add(g, G.multiply(d));
          grid = std::max(grid, std::min(eta_min(std::span<const double>(y).subspan(0, 3)), y[3]));
        }
      }
      INFO("trial " << trial);
      // certified lower bound, and no worse than the grid
      CHECK(r.t >= grid - 1e-6);
      CHECK(r.t <= grid + 0.02);
      Vector y = add(g, G.multiply(r.d));
      CHECK(std::min(eta_min(std::span<const double>(y).subspan(0, 3)), y[3]) == doctest::Approx(r.t));
      CHECK(norm_inf(r.d) <= 1.0);
    }
  }
}
