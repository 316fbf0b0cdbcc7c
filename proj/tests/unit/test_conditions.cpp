#include <cmath>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "socp/conditions.hpp"
#include "socp/subqp.hpp"

using namespace socp;

namespace {

// g(x) = x on a single block of dimension m, objective 0
Problem identity_block(std::size_t m) {
  ProblemSpec s;
  s.n = m;
  s.objective = "0";
  std::vector<std::string> blk;
  for (std::size_t j = 0; j < m; ++j) blk.push_back("x" + std::to_string(j + 1));
  s.cones = {blk};
  return Problem(s);
}

const Vector kXs{1.0, 1.0};
const Vector kWs{0.5, -0.5};
const Vector kNone;

}  // namespace

TEST_CASE("index sets") {
  const ConeProduct c3({3});
  auto s = index_sets(c3, Vector{2.0, 1.0, 0.0}, 1e-8, 1e-8);
  CHECK(s.ii == IndexList{0});
  CHECK(s.i0.empty());
  CHECK(s.ib.empty());

  const ConeProduct c2({2});
  s = index_sets(c2, Vector{1.0, 1.0}, 1e-8, 0.1);
  CHECK(s.ib == IndexList{0});
  CHECK(s.ib_eps == IndexList{0});

  s = index_sets(c2, Vector{1.0, 0.5}, 1e-8, 0.1);
  CHECK(s.ib_eps.empty());
  CHECK(s.i0_eps.empty());

  s = index_sets(c2, Vector{1.0, 1.0}, 1e-8, 0.1, Vector{0.5, -0.5});
  CHECK(s.ibb_eps == IndexList{0});

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const ConeProduct mix({1, 2, 3, 1, 4});
  for (int t = 0; t < 1000; ++t) {
    Vector g(mix.total());
    for (double& v : g) v = u(rng) * (u(rng) > 0.5 ? 1e-9 : 1.0);
    const auto r = index_sets(mix, g, 1e-6, 1e-3);
    std::vector<int> seen(mix.blocks(), 0);
    for (auto i : r.i0) ++seen[i];
    for (auto i : r.ib) ++seen[i];
    for (auto i : r.ii) ++seen[i];
    for (int k : seen) REQUIRE(k == 1);
  }
}

TEST_CASE("sigma term") {
  const Problem p = builtin("paper_example");
  CHECK(sigma_term(p, kXs, Vector{0.0, 0.0}, {0}).max_abs() == 0.0);
  const SymMatrix s = sigma_term(p, kXs, kWs, {0});
  CHECK(s(0, 0) == 2.0);
  CHECK(s(0, 1) == 2.0);
  CHECK(s(1, 1) == 2.0);
  const SymMatrix s2 = sigma_term(p, kXs, Vector{1.0, -1.0}, {0});
  CHECK(s2(0, 1) == 2.0 * s(0, 1));
  CHECK(sigma_term(p, kXs, kWs, {}).max_abs() == 0.0);

  const Problem q = identity_block(2);
  CHECK_THROWS_AS(sigma_term(q, Vector{0.0, 1.0}, Vector{1.0, 0.0}, {0}), std::domain_error);
}

TEST_CASE("first order residuals") {
  const Problem p = builtin("paper_example");
  const auto r = first_order_residuals(p, kXs, kNone, kWs);
  CHECK(r.stationarity == 0.0);
  CHECK(r.feasibility == 0.0);
  CHECK(r.akkt_comp == 0.0);
  CHECK(r.cakkt_comp == 0.0);

  const Problem iq = builtin("interior_qp");
  const Vector x{0.2, 0.1};
  const auto r2 = first_order_residuals(iq, x, kNone, Vector{0.0, 0.0, 0.0});
  CHECK(r2.stationarity == doctest::Approx(norm2(iq.grad_f(x))));
  CHECK(r2.feasibility == 0.0);
  CHECK(r2.cakkt_comp == 0.0);

  const Problem sc = builtin("scalar_soc");
  CHECK(feasibility_residual(sc, Vector{0.0}) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("akkt2 matrix") {
  const Problem p = builtin("paper_example");
  const auto sets = index_sets(p, kXs, 1e-8, 1e-8, kWs);
  REQUIRE(sets.ib == IndexList{0});
  const Akkt2Params zero;
  const SymMatrix a = akkt2_matrix(p, kXs, kNone, kWs, zero, sets);
  CHECK(a(0, 0) == 3.0);
  CHECK(a(0, 1) == 4.0);
  CHECK(a(1, 1) == 3.0);
  CHECK(min_eigenvalue(a) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(a.quadratic_form(Vector{1.0, -1.0}) == -2.0);

  const auto empty = index_sets(p, Vector{2.0, 0.1}, 1e-8, 1e-8);
  const SymMatrix b = akkt2_matrix(p, Vector{2.0, 0.1}, kNone, Vector{0.0, 0.0}, zero, empty);
  const SymMatrix hf = p.hess_f(Vector{2.0, 0.1});
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(b(i, j) == hf(i, j));
}

TEST_CASE("lemma 13 parameters") {
  const Problem q = identity_block(2);
  IndexSets s;
  s.ib = {0};
  auto pr = lemma13_params(q, Vector{1.0, 1.0}, 10.0, s);
  REQUIRE(pr.gamma.size() == 1);
  CHECK(pr.gamma[0].second == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(pr.phi[0].second == 0.0);
  CHECK(pr.delta == 0.0);

  pr = lemma13_params(q, Vector{0.9, 1.0}, 10.0, s);
  CHECK(pr.gamma[0].second == doctest::Approx(9.0).epsilon(1e-14));
  CHECK(pr.phi[0].second == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
  // Dg = I, so lambda_max(Dg'Dg) = 1
  CHECK(pr.delta == doctest::Approx(1.0 / 9.0).epsilon(1e-14));

  pr = lemma13_params(q, Vector{2.0, 1.0}, 10.0, s);
  CHECK(pr.gamma[0].second == 0.0);
  CHECK(pr.phi[0].second == 0.0);

  CHECK_THROWS_AS(lemma13_params(q, Vector{1.0, 0.0}, 10.0, s), std::domain_error);

  IndexSets z;
  z.i0 = {0};
  pr = lemma13_params(builtin("eq_cone"), Vector{1.0, 1.0, 0.0}, 7.0, z);
  CHECK(pr.eta == Vector{7.0});
  CHECK(pr.theta[0].second == 7.0);
}

TEST_CASE("lemma 13 block matrix examples") {
  CHECK(lemma13_block_matrix(Vector{2.0, 1.0, 0.5}, 10.0).max_abs() == 0.0);

  // N2: rho (2 - alpha) M(-1, -gbar/|gbar|) with alpha = 1
  const Vector g{1.0, 0.6, 0.8};
  const SymMatrix b = lemma13_block_matrix(g, 3.0);
  const SymMatrix ref = m_matrix(-1.0, Vector{-0.6, -0.8});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(b(i, j) == doctest::Approx(3.0 * ref(i, j)).epsilon(1e-12));
  CHECK(min_eigenvalue(b) >= -1e-12);

  CHECK(min_eigenvalue(lemma13_block_matrix(Vector{0.9, 1.0, 0.0}, 10.0)) >= -1e-10);
}

TEST_CASE("lemma 13 PSD property") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> nd;
  std::uniform_int_distribution<int> dm(2, 5);
  int n2 = 0, n3 = 0;
  for (int t = 0; t < 10000; ++t) {
    const std::size_t m = static_cast<std::size_t>(dm(rng));
    Vector tail(m - 1);
    for (double& v : tail) v = nd(rng);
    const double scale = std::exp(4.0 * (u(rng) - 0.5));
    const double tn = norm2(tail);
    for (double& v : tail) v *= scale / tn;
    const double ratio = t % 4 == 0 ? 1.0 : 0.55 + 0.95 * u(rng);
    Vector g{ratio * scale};
    g.insert(g.end(), tail.begin(), tail.end());
    const double rho = std::exp(10.0 * u(rng) - 2.0);
    const BoundaryRegime reg = boundary_regime(g);
    if (reg == BoundaryRegime::N2) ++n2;
    if (reg == BoundaryRegime::N3) ++n3;
    const SymMatrix b = lemma13_block_matrix(g, rho);
    REQUIRE(min_eigenvalue(b) >= -1e-8 * b.frobenius_norm());
  }
  CHECK(n2 > 1000);
  CHECK(n3 > 3000);
}

TEST_CASE("lemma 10 matrix") {
  CHECK(min_eigenvalue(lemma10_matrix(1.0, 0.0, Vector{0.0, 0.0})) == doctest::Approx(0.0));
  CHECK(min_eigenvalue(lemma10_matrix(2.0, 1.0, Vector{1.0, 1.0})) > 0.0);
  CHECK(min_eigenvalue(lemma10_matrix(1.0, -0.5, Vector{0.0})) == doctest::Approx(-0.5));
  CHECK_THROWS_AS(lemma10_matrix(0.0, 1.0, Vector{1.0}), std::invalid_argument);

  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 10000; ++t) {
    const std::size_t k = 1 + t % 4;
    Vector b(k);
    for (double& v : b) v = 3.0 * nd(rng);
    const double beta = std::exp(6.0 * (u(rng) - 0.5));
    const double xi = t % 3 == 0 ? 0.0 : 2.0 * u(rng);
    const SymMatrix pm = lemma10_matrix(beta, xi, b);
    REQUIRE(min_eigenvalue(pm) >= -1e-10 * pm.frobenius_norm());
    if (xi > 0.0) {
      Vector v(k + 1);
      for (double& e : v) e = nd(rng);
      REQUIRE(pm.quadratic_form(v) > 0.0);
    }
  }
}

TEST_CASE("wsonc") {
  ProblemSpec s;
  s.n = 2;
  s.objective = "(x1 - 1)^2 + 2*(x2 + 1)^2";
  const Problem uq(s);
  const auto r0 = wsonc_check(uq, Vector{1.0, -1.0}, kNone, kNone);
  CHECK(r0.pass);
  CHECK(r0.basis.nullity() == 2);

  const Problem p = builtin("paper_example");
  const auto r = wsonc_check(p, kXs, kNone, kWs);
  REQUIRE(r.basis.nullity() == 1);
  const double b0 = r.basis.basis(0, 0), b1 = r.basis.basis(1, 0);
  CHECK(std::abs(b0 + b1) <= 1e-15);
  CHECK(std::abs(std::abs(b0) - 1.0 / std::sqrt(2.0)) <= 1e-15);
  REQUIRE(r.min_eig.has_value());
  CHECK(std::abs(*r.min_eig + 1.0) <= 1e-9);
  CHECK_FALSE(r.pass);

  const Problem sc = builtin("scalar_soc");
  const auto r2 = wsonc_check(sc, Vector{1.0}, kNone, Vector{1.0, -1.0});
  CHECK(r2.basis.nullity() == 0);
  CHECK(r2.pass);
  CHECK_FALSE(r2.min_eig.has_value());
}

TEST_CASE("robinson measure") {
  const auto d = robinson_measure(builtin("degenerate_eq"), Vector{0.0});
  CHECK_FALSE(d.dh_full_rank);
  CHECK_FALSE(d.t.has_value());
  CHECK_FALSE(d.holds);

  const auto iq = robinson_measure(builtin("interior_qp"), Vector{0.0, 0.0});
  REQUIRE(iq.t.has_value());
  CHECK(*iq.t >= 2.0 - 1e-12);

  // paper_example at (1,1): value(d) = 1 - |1 + 2(d1 + d2)|, grid maximum 1
  const Problem p = builtin("paper_example");
  const auto r = robinson_measure(p, kXs);
  REQUIRE(r.t.has_value());
  double grid = -1e300;
  for (int a = 0; a <= 200; ++a) {
    for (int b = 0; b <= 200; ++b) {
      const Vector dd{-1.0 + a / 100.0, -1.0 + b / 100.0};
      const Vector y = add(p.g(kXs), p.dg(kXs).multiply(dd));
      grid = std::max(grid, eta_min(y));
    }
  }
  CHECK(grid == doctest::Approx(1.0));
  CHECK(std::abs(*r.t - grid) <= 1e-6);
  CHECK(r.holds);
}

TEST_CASE("wcr probe") {
  ProblemSpec s;
  s.n = 2;
  s.objective = "x1";
  s.equalities = {"x1 + x2 - 1"};
  s.cones = {{"x1", "x2"}};
  const auto lin = wcr_probe(Problem(s), Vector{0.5, 0.5}, 0.1, 50, 7);
  CHECK(lin.constant_rank);

  const auto de = wcr_probe(builtin("degenerate_eq"), Vector{0.0}, 0.1, 20, 7);
  CHECK(de.rank_at_x == 0);
  CHECK_FALSE(de.constant_rank);

  const auto a = wcr_probe(builtin("paper_example"), kXs, 0.1, 20, 3);
  const auto b = wcr_probe(builtin("paper_example"), kXs, 0.1, 20, 3);
  CHECK(a.sample_ranks == b.sample_ranks);
}

TEST_CASE("penalty path at an interior solution") {
  const Problem p = builtin("interior_qp");
  PenaltyPathOptions o;
  o.rho = {10.0, 100.0, 1000.0};
  const auto c = penalty_path(p, Vector{1.0, 0.5}, o);
  for (const auto& row : c.rows()) {
    CHECK(norm2(row.omega) == 0.0);
    CHECK(row.stationarity == 0.0);
    CHECK(row.r_v == 0.0);
    CHECK(row.so_residual == 0.0);
    CHECK(row.converged);
  }
  CHECK_THROWS_AS(penalty_path(p, Vector{5.0, 0.0}, o), std::invalid_argument);
}

TEST_CASE("penalty path on scalar_soc decays") {
  const Problem p = builtin("scalar_soc");
  PenaltyPathOptions o;
  o.rho = {10.0, 100.0, 1000.0};
  for (const PenaltyMode mode : {PenaltyMode::Stationary, PenaltyMode::Minimize}) {
    o.mode = mode;
    const auto c = penalty_path(p, Vector{1.0}, o);
    const auto& r = c.rows();
    REQUIRE(r.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(r[k].converged);
      CHECK(*r[k].local_min);
    }
    for (std::size_t k = 1; k < 3; ++k) {
      CHECK(r[k].stationarity < r[k - 1].stationarity);
      CHECK(r[k].r_v < r[k - 1].r_v);
    }
  }
}

TEST_CASE("penalty path on paper_example") {
  const Problem p = builtin("paper_example");
  const auto c = penalty_path(p, kXs, PenaltyPathOptions{});
  const auto& r = c.rows();
  REQUIRE(r.size() == 6);
  for (std::size_t k = 0; k < r.size(); ++k) {
    INFO("row " << k);
    CHECK(r[k].converged);
    REQUIRE(r[k].probe_curvature.has_value());
    if (k > 0) {
      CHECK(r[k].r_v < r[k - 1].r_v);
      CHECK(r[k].akkt_comp < r[k - 1].akkt_comp);
      // below max(1e-11, 1e-14 rho) stationarity sits at the rounding floor of rho * g(x)
      const double floor_k = std::max(1e-11, 1e-14 * r[k].rho);
      CHECK((r[k].stationarity < r[k - 1].stationarity || r[k].stationarity <= floor_k));
      const auto agg = [](const CertificateRow& w) {
        return std::max({w.stationarity, w.r_v, w.akkt_comp, w.cakkt_comp});
      };
      CHECK(agg(r[k]) < agg(r[k - 1]));
      CHECK_FALSE(*r[k].local_min);
    }
  }
  for (std::size_t k = 3; k < 6; ++k) {
    CHECK(*r[k].probe_curvature <= -1.5);
    CHECK(r[k].so_residual >= 0.75);
    CHECK(std::abs(c.recompute_min_eig(p, k) - r[k].min_eig) <= 1e-12 * std::max(1.0, std::abs(r[k].min_eig)));
  }
  CHECK(*r.back().probe_curvature == doctest::Approx(-2.0).epsilon(1e-3));

  const auto j = nlohmann::json::parse(c.to_json());
  REQUIRE(j.size() == 6);
  CHECK(j[0].contains("so_residual"));
  CHECK(j[5]["rho"].get<double>() == 1e6);
}
