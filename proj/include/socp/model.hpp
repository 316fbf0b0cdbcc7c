#pragma once

// Problem representation: min f(x) s.t. h(x) = 0, g_i(x) in K_i. Every
// function is an Expr; gradients and Hessians are differentiated once at
// construction.

#include <optional>
#include <string>
#include <vector>

#include "socp/cone.hpp"
#include "socp/expr.hpp"
#include "socp/linalg.hpp"

namespace socp {

struct KnownSolution {
  Vector x;
  Vector mu;
  Vector omega;
  std::string note;
};

/// Source-level description; what the JSON spec file holds.
struct ProblemSpec {
  std::string name;
  std::size_t n = 0;
  std::string objective;
  std::vector<std::string> equalities;
  std::vector<std::vector<std::string>> cones;
  std::optional<KnownSolution> known_solution;
  std::optional<Vector> start;
  /// Optional curvature probe direction d(x), one expression per variable.
  std::vector<std::string> probe;
};

class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Problem {
 public:
  /// Throws SpecError with a located message ("cones[0][1]: offset 4: ...").
  explicit Problem(ProblemSpec spec);

  const ProblemSpec& spec() const { return spec_; }
  const std::string& name() const { return spec_.name; }
  std::size_t n() const { return spec_.n; }
  std::size_t p() const { return h_.size(); }
  std::size_t m() const { return cone_.total(); }
  const ConeProduct& cone() const { return cone_; }
  const std::optional<KnownSolution>& known_solution() const { return spec_.known_solution; }
  Vector start() const;
  bool has_probe() const { return !probe_.empty(); }
  Vector probe(std::span<const double> x) const;

  double f(std::span<const double> x) const;
  Vector grad_f(std::span<const double> x) const;
  SymMatrix hess_f(std::span<const double> x) const;

  Vector g(std::span<const double> x) const;
  Matrix dg(std::span<const double> x) const;  // m x n
  Vector h(std::span<const double> x) const;
  Matrix dh(std::span<const double> x) const;  // p x n

  /// sum_j w_j * Hessian(g_j)
  SymMatrix hess_g_weighted(std::span<const double> x, std::span<const double> w) const;
  SymMatrix hess_h_weighted(std::span<const double> x, std::span<const double> w) const;

 private:
  struct Fn {
    Expr value;
    std::vector<Expr> grad;
    std::vector<Expr> hess;  // upper triangle, row-major i <= j
  };
  Fn build(const Expr& e) const;
  Vector eval_grad(const Fn& fn, std::span<const double> x) const;
  void add_hess(const Fn& fn, std::span<const double> x, double w, SymMatrix& out) const;

  ProblemSpec spec_;
  ConeProduct cone_;
  Fn f_;
  std::vector<Fn> g_;
  std::vector<Fn> h_;
  std::vector<Expr> probe_;
};

struct LagrangianData {
  Vector grad_l;
  SymMatrix hess_l;
  Matrix dg;
  Matrix dh;
  Vector g;
  Vector h;
};

/// L(x, mu, omega) = f + <h, mu> - <g, omega>.
LagrangianData eval_lagrangian_data(const Problem& p, std::span<const double> x,
                                    std::span<const double> mu, std::span<const double> omega);
Vector lagrangian_grad(const Problem& p, std::span<const double> x, std::span<const double> mu,
                       std::span<const double> omega);

struct FdEntry {
  std::string what;  // "f", "g[3]", "h[0]"
  std::string kind;  // "grad" or "hess"
  std::size_t i = 0;
  std::size_t j = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_error = 0.0;
};

struct FdAuditReport {
  double max_rel_grad = 0.0;
  double max_rel_hess = 0.0;
  std::vector<FdEntry> flagged;
  bool pass() const { return flagged.empty(); }
};

/// Central differences with step h; entries with |a - n| / max(1, |n|) above
/// flag_tol (or non-finite) are flagged.
FdAuditReport finite_diff_audit(const Problem& p, std::span<const double> x, double h = 1e-5,
                                double flag_tol = 1e-4);

// JSON spec files.
ProblemSpec parse_problem_spec(const std::string& json_text);
ProblemSpec load_problem_spec(const std::string& path);
std::string dump_problem_spec(const ProblemSpec& spec);

// Builtin registry.
std::vector<std::string> builtin_names();
Problem builtin(const std::string& name);

}  // namespace socp
