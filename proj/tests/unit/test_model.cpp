#include <cmath>
#include <random>

#include "doctest.h"
#include "socp/model.hpp"

using namespace socp;

TEST_CASE("parse and evaluate") {
  const Vector one{1.0, 1.0};
  CHECK(evaluate(parse_expr("x1 + 2*x2", 2), one) == 3.0);
  CHECK(evaluate(parse_expr("-x1^2", 1), Vector{3.0}) == -9.0);
  CHECK(evaluate(parse_expr("2^3^2", 1), Vector{0.0}) == 512.0);
  CHECK(evaluate(parse_expr("x1^-2", 1), Vector{2.0}) == 0.25);
  CHECK(evaluate(parse_expr("(x1 - 1)*(x1 + 1) / 2", 1), Vector{3.0}) == 4.0);
  CHECK(evaluate(parse_expr("exp(0) + cos(0) + sin(0) + log(1) + sqrt(4)", 1), Vector{0.0}) == 4.0);
  CHECK(evaluate(parse_expr("1.5e-1 * x1", 1), Vector{2.0}) == doctest::Approx(0.3));
}

TEST_CASE("parse errors carry offsets") {
  auto offset_of = [](const std::string& s, std::size_t n) -> long {
    try {
      parse_expr(s, n);
    } catch (const ParseError& e) {
      return static_cast<long>(e.offset());
    }
    return -1;
  };
  CHECK(offset_of("x1 +", 1) == 4);
  CHECK(offset_of("x3", 2) == 0);
  CHECK(offset_of("x1 + y", 1) == 5);
  CHECK(offset_of("1.2.3 + x1", 1) == 0);
  CHECK(offset_of("sin(x1, x1)", 1) == 6);
  CHECK(offset_of("x1^x1", 1) == 3);
  CHECK(offset_of("(x1", 1) == 3);
  CHECK(offset_of("", 1) == 0);
}

TEST_CASE("domain guards give NaN") {
  CHECK(std::isnan(evaluate(parse_expr("log(x1)", 1), Vector{0.0})));
  CHECK(std::isnan(evaluate(parse_expr("sqrt(x1)", 1), Vector{-1.0})));
  CHECK(evaluate(parse_expr("sqrt(x1)", 1), Vector{0.0}) == 0.0);
}

TEST_CASE("hessian of x1^2 x2^2 at (1,1)") {
  ProblemSpec s;
  s.n = 2;
  s.objective = "x1^2 * x2^2";
  const Problem p(s);
  const Vector x{1.0, 1.0};
  const SymMatrix hm = p.hess_f(x);
  // d2/dx1^2 = 2 x2^2, d2/dx1dx2 = 4 x1 x2, d2/dx2^2 = 2 x1^2
  CHECK(hm(0, 0) == 2.0);
  CHECK(hm(0, 1) == 4.0);
  CHECK(hm(1, 0) == 4.0);
  CHECK(hm(1, 1) == 2.0);
  // second differences of the value
  const double h = 1e-4;
  auto f = [&](double a, double b) { return p.f(Vector{a, b}); };
  const double fxy = (f(1 + h, 1 + h) - f(1 + h, 1 - h) - f(1 - h, 1 + h) + f(1 - h, 1 - h)) / (4 * h * h);
  CHECK(fxy == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("printed derivatives reparse to the same function") {
  const Expr e = parse_expr("sin(x1*x2) + exp(x1)/x2 - sqrt(x1^2 + 1) + log(x2)^3", 2);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  for (std::size_t v = 0; v < 2; ++v) {
    const Expr d = differentiate(e, v);
    const Expr back = parse_expr(to_string(d), 2);
    for (int t = 0; t < 50; ++t) {
      const Vector x{u(rng), u(rng)};
      CHECK(evaluate(back, x) == evaluate(d, x));
    }
  }
}

TEST_CASE("lagrangian data on paper_example") {
  const Problem p = builtin("paper_example");
  const Vector x{1.0, 1.0};
  const Vector none;
  auto d = eval_lagrangian_data(p, x, none, Vector{0.0, 0.0});
  CHECK(d.grad_l == p.grad_f(x));
  d = eval_lagrangian_data(p, x, none, Vector{0.5, -0.5});
  CHECK(d.grad_l[0] == 0.0);
  CHECK(d.grad_l[1] == 0.0);
  // -omega_2 * Hessian(x1^2 x2^2) = 1/2 [[2,4],[4,2]]
  CHECK(d.hess_l(0, 0) == 1.0);
  CHECK(d.hess_l(0, 1) == 2.0);
  CHECK(d.hess_l(1, 1) == 1.0);
  CHECK_THROWS_AS(eval_lagrangian_data(p, x, Vector{1.0}, Vector{0.5, -0.5}), std::invalid_argument);
}

TEST_CASE("finite difference audit") {
  ProblemSpec lin;
  lin.n = 2;
  lin.objective = "3*x1 - x2";
  const auto r = finite_diff_audit(Problem(lin), Vector{0.3, 0.4});
  CHECK(r.pass());
  CHECK(r.max_rel_hess == 0.0);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  for (const auto& name : builtin_names()) {
    const Problem p = builtin(name);
    for (int t = 0; t < 100; ++t) {
      Vector x(p.n());
      for (double& v : x) v = u(rng);
      const auto rep = finite_diff_audit(p, x);
      INFO(name);
      REQUIRE(rep.pass());
    }
  }

  ProblemSpec lg;
  lg.n = 1;
  lg.objective = "log(x1)";
  const auto edge = finite_diff_audit(Problem(lg), Vector{1e-6});
  CHECK_FALSE(edge.pass());
}

TEST_CASE("spec JSON round trip preserves semantics") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  for (const auto& name : builtin_names()) {
    const Problem a = builtin(name);
    const Problem b(parse_problem_spec(dump_problem_spec(a.spec())));
    CHECK(b.name() == a.name());
    CHECK(b.cone() == a.cone());
    for (int t = 0; t < 100; ++t) {
      Vector x(a.n());
      for (double& v : x) v = u(rng);
      REQUIRE(std::abs(a.f(x) - b.f(x)) <= 1e-12);
      const Vector ga = a.g(x), gb = b.g(x), ha = a.h(x), hb = b.h(x);
      for (std::size_t i = 0; i < ga.size(); ++i) REQUIRE(std::abs(ga[i] - gb[i]) <= 1e-12);
      for (std::size_t i = 0; i < ha.size(); ++i) REQUIRE(std::abs(ha[i] - hb[i]) <= 1e-12);
    }
  }
}

TEST_CASE("spec diagnostics are located") {
  auto msg = [](const std::string& text) -> std::string {
    try {
      Problem(parse_problem_spec(text));
    } catch (const SpecError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(msg(R"({"n": 2, "objective": "x1 +"})") == "objective: offset 4: unexpected end of expression");
  CHECK(msg(R"({"n": 1, "objective": "x1", "cones": [["x1", "x2"]]})").rfind("cones[0][1]: offset 0", 0) == 0);
  CHECK(msg(R"({"n": 1, "objective": )").rfind("offset ", 0) == 0);
  CHECK(msg(R"({"n": 1})") == "objective: required");
  CHECK(msg(R"({"n": 1, "objective": "x1", "bogus": 1})") == "bogus: unknown field");
}

TEST_CASE("builtin registry") {
  CHECK(builtin_names().size() >= 5);
  CHECK_THROWS_AS(builtin("nope"), SpecError);
  const Problem p = builtin("paper_example");
  CHECK(p.n() == 2);
  CHECK(p.cone().blocks() == 1);
  CHECK(p.cone().dim(0) == 2);
  CHECK(p.f(Vector{1.0, 1.0}) == -2.0);
  const Vector g = p.g(Vector{2.0, 3.0});
  CHECK(g[0] == 1.0);
  CHECK(g[1] == 36.0);
  CHECK(p.probe(Vector{1.0, 2.0}) == Vector{1.0, -2.0});
  const Problem d = builtin("degenerate_eq");
  CHECK(d.p() == 1);
  CHECK(d.m() == 0);
}

TEST_CASE("known solutions are KKT points") {
  for (const auto& name : builtin_names()) {
    const Problem p = builtin(name);
    const auto& ks = p.known_solution();
    REQUIRE(ks.has_value());
    if (name == "degenerate_eq") continue;
    const Vector mu = ks->mu.empty() ? Vector(p.p(), 0.0) : ks->mu;
    const Vector gl = lagrangian_grad(p, ks->x, mu, ks->omega);
    INFO(name);
    CHECK(norm2(gl) <= 1e-12);
    CHECK(std::abs(dot(p.g(ks->x), ks->omega)) <= 1e-12);
    CHECK(norm2(p.h(ks->x)) <= 1e-12);
  }
}
