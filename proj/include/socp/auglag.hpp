#pragma once

// Safeguarded augmented Lagrangian method with a second-order inner solver.
//
// Multiplier bookkeeping: the algorithm's own estimates (mu_hat, omega_hat)
// follow the printed L_rho formulas. The reported Lagrangian multiplier for
// L = f + <h, mu> - <g, omega> is mu = rho h(x) - mu_hat, omega =
// Pi_K(omega_hat - rho g(x)), so grad_x L(x, mu, omega) == auglag_grad exactly.

#include <limits>

#include "socp/conditions.hpp"
#include "socp/inner.hpp"
#include "socp/model.hpp"
#include "socp/trace.hpp"

namespace socp {

struct AuglagConfig {
  double gamma = 10.0;
  double rho1 = 10.0;
  double tau = 0.5;
  double eps0 = 1e-2;
  double eps_factor = 0.5;
  double eps_floor = 1e-10;
  double mu_max = 1e6;
  double omega_max = 1e6;
  int max_outer = 100;
  int max_inner = 500;
  /// Stop when stationarity, r_V and akkt_comp are all <= tol.
  double tol = 1e-8;
  double rho_max = 1e16;
  double cert_set_tol = 1e-6;

  /// Throws std::invalid_argument when a value is out of range.
  void validate() const;
  double eps(int k) const;
};

double auglag_value(const Problem& p, std::span<const double> x, std::span<const double> mu_hat,
                    std::span<const double> omega_hat, double rho);
Vector auglag_grad(const Problem& p, std::span<const double> x, std::span<const double> mu_hat,
                   std::span<const double> omega_hat, double rho);
/// grad^2 L(x, rho h - mu_hat, Pi(omega_hat - rho g)) + rho Dh'Dh + rho sum Dg_i' V_i Dg_i,
/// V_i = bsub_element(-g_i(x)).
SymMatrix surrogate_hessian(const Problem& p, std::span<const double> x, std::span<const double> mu_hat,
                            std::span<const double> omega_hat, double rho);

InnerResult inner_solve(const Problem& p, std::span<const double> x0, std::span<const double> mu_hat,
                        std::span<const double> omega_hat, double rho, double eps, int max_iter = 500);

struct AuglagState {
  int k = 1;
  Vector x;
  Vector mu_hat, omega_hat;
  Vector mu, omega;  // Lagrangian convention
  double rho = 0.0;
  double prev_infeasibility = std::numeric_limits<double>::infinity();
  double infeasibility = 0.0;
  bool penalty_kept = true;
};

/// Steps 3-5 at state.x: penalty test, multiplier update, safeguarding.
AuglagState outer_step(const AuglagState& state, const Problem& p, const AuglagConfig& config);

struct AuglagResult {
  Vector x, mu, omega;
  SolveStatus status = SolveStatus::IterationCap;
  Akkt2Certificate certificate;
  Trace trace;
  /// max [omega_i]_0 over iterates whose g_i(x^k) lies outside K and -K
  double max_outside_omega0 = 0.0;
};

AuglagResult auglag_solve(const Problem& p, const AuglagConfig& config, std::span<const double> x0);

}  // namespace socp
