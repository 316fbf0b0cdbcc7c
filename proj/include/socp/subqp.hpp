#pragma once

// Convex conic-quadratic subproblem
//   min  c'xi + 1/2 xi'M xi + (rho/2)|chi|^2
//   s.t. A xi + rho (chi - t) in K
// solved by a primal log-barrier path-following method started at the
// strictly feasible point (0, t + e0).

#include <string>

#include "socp/cone.hpp"
#include "socp/linalg.hpp"

namespace socp {

struct SubQp {
  Vector c;
  SymMatrix M;
  double rho = 1.0;
  Matrix A;  // m x n
  Vector t;  // m
  ConeProduct cone;
};

enum class SubQpStatus { Converged, NonConvergence };

std::string to_string(SubQpStatus s);

struct SubQpSolution {
  Vector xi;
  Vector chi;
  Vector lambda;  // equals chi at the solution
  double kkt_residual = 0.0;
  int iterations = 0;
  SubQpStatus status = SubQpStatus::NonConvergence;
};

class SubQpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws SubQpError on malformed data or when M is not positive definite.
SubQpSolution solve_subqp(const SubQp& q, double tol = 1e-10, int cap = 500);

/// max(stationarity, feasibility violations, blockwise |<s_i, lambda_i>|).
double subqp_kkt_residual(const SubQp& q, std::span<const double> xi, std::span<const double> chi,
                          std::span<const double> lambda);

struct ConicFeasibility {
  double t = 0.0;
  Vector d;
  int subproblems = 0;
};

/// max t s.t. E d = 0, g_i + G_i d - t e0_i in K_i, |d|_inf <= 1, by bisection
/// on t. Every accepted lower bound is certified by the returned d.
ConicFeasibility solve_conic_feasibility(const ConeProduct& cone, std::span<const double> g,
                                         const Matrix& G, const Matrix& E, double tol = 1e-7);

}  // namespace socp
