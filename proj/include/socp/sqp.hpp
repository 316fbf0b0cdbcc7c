#pragma once

// Stabilized SQP with VOMF iterate classification.
//
// Sign convention: inside this module mu multiplies h with a minus sign,
// L = f - <h, mu> - <g, omega>, which is the sign the merit function is
// written in. Traces and certificates report -mu so that they agree with
// L = f + <h, mu> - <g, omega> used everywhere else.

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "socp/conditions.hpp"
#include "socp/model.hpp"
#include "socp/subqp.hpp"
#include "socp/trace.hpp"

namespace socp {

enum class HessianStrategy { ExactFloored, Identity };

struct SqpConfig {
  double tau = 1e-4;  // Armijo constant
  double alpha = 0.5;  // accepted, unused
  double beta = 0.5;
  double kappa = 0.5;
  double mu_max = 1e6;
  double omega_max = 1e6;
  double phi0 = 1.0, psi0 = 1.0, gamma0 = 1.0;
  double rho0 = 1.0;
  double eps0 = 1e-2, eps_factor = 0.5, eps_floor = 1e-10;
  int freeze_after = 5;
  int max_iter = 200;
  int max_backtracks = 60;
  HessianStrategy hessian = HessianStrategy::ExactFloored;
  double nu1 = 1e-6, nu2 = 1e6;
  double grad_zero_tol = 1e-12;
  /// stop when r_V + r_O <= tol at the accepted iterate
  double tol = 1e-8;
  double rho_min = 1e-12;
  double subqp_tol = 1e-10;
  int subqp_cap = 500;
  double cert_set_tol = 1e-6;

  void validate() const;
  double eps(int k) const;
};

enum class VomfClass { V, O, M, F };
std::string to_string(VomfClass c);

struct SqpState {
  int k = 0;
  Vector x, mu, omega;
  double rho = 1.0;
  double phi = 1.0, psi = 1.0, gamma = 1.0;
  Vector mu_bar, omega_bar;
  std::optional<VomfClass> last_class;
  double eps = 1e-2;
  bool eps_frozen = false;
  int stable_sets = 0;
};

struct OptimalityMeasures {
  double r_v = 0.0;
  double r_o = 0.0;
  double phi = 0.0;  // r_V + kappa r_O
  double psi = 0.0;  // kappa r_V + r_O
  double p_term = 0.0;  // max(lambda_max(-P), 0)
  IndexSets sets;
};

struct StabParams {
  Vector s, t;
  SymMatrix M;
};

StabParams stab_params(const Problem& p, std::span<const double> x, std::span<const double> mu,
                       std::span<const double> omega, double rho, const SymMatrix& H);

/// H_k from the configured strategy: exact Hessian of L shifted to
/// lambda_min >= nu1 and truncated at nu2.
SymMatrix sqp_hessian(const Problem& p, std::span<const double> x, std::span<const double> mu,
                      std::span<const double> omega, const SqpConfig& config);

/// The P matrix of r_O. Throws std::domain_error on a zero head in I_BBeps.
SymMatrix p_matrix(const Problem& p, std::span<const double> x, std::span<const double> mu,
                   std::span<const double> omega, double rho, const IndexSets& sets);

OptimalityMeasures measures(const Problem& p, std::span<const double> x, std::span<const double> mu,
                            std::span<const double> omega, double rho, double eps, double kappa);
double r_o_measure(const Problem& p, std::span<const double> x, std::span<const double> mu,
                   std::span<const double> omega, double rho, double eps);

double merit_value(const Problem& p, std::span<const double> x, double rho, std::span<const double> mu,
                   std::span<const double> omega);
Vector merit_grad(const Problem& p, std::span<const double> x, double rho, std::span<const double> mu,
                  std::span<const double> omega);

/// Box [-mu_max, mu_max]^p.
Vector project_c(std::span<const double> mu, double mu_max);
/// Box intersected with K, by alternating projections (cone last).
Vector project_d(const ConeProduct& cone, std::span<const double> omega, double omega_max, int cap = 100);

struct VomfInput {
  Vector x;                   // x^{k+1}
  OptimalityMeasures at_candidates;
  double merit_grad_norm = 0.0;  // |grad F(x^{k+1}; rho_k, mu^k, omega^k)|
};

SqpState vomf_step(const Problem& p, const SqpConfig& config, const SqpState& state, const VomfInput& in);

enum class LineSearchFailure { NoDescent, ExhaustedBacktracking };

class LineSearchError : public std::runtime_error {
 public:
  LineSearchError(LineSearchFailure kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  LineSearchFailure kind() const { return kind_; }

 private:
  LineSearchFailure kind_;
};

struct LineSearchResult {
  double step = 1.0;
  int backtracks = 0;
  Vector x;
  double merit = 0.0;
  double delta = 0.0;
};

/// Armijo backtracking on any merit; non-finite trial values are rejections.
LineSearchResult armijo(const std::function<double(std::span<const double>)>& merit, std::span<const double> x,
                        std::span<const double> grad, std::span<const double> dir, double tau, double beta,
                        int max_backtracks = 60);
LineSearchResult line_search(const Problem& p, std::span<const double> x, std::span<const double> dir, double rho,
                             std::span<const double> mu, std::span<const double> omega, double tau, double beta,
                             int max_backtracks = 60);

struct SqpResult {
  Vector x, mu, omega;  // mu in the library convention
  SolveStatus status = SolveStatus::IterationCap;
  Akkt2Certificate certificate;
  Trace trace;
  OptimalityMeasures final_measures;
  double max_subqp_residual = 0.0;
};

/// mu0 is given in the library convention (empty means zero); omega0 must lie in K.
SqpResult sqp_solve(const Problem& p, const SqpConfig& config, std::span<const double> x0,
                    std::span<const double> mu0 = {}, std::span<const double> omega0 = {});

/// Replays a stabilized-SQP trace: branch order, threshold halving and the
/// rho rule. Returns one message per violation.
std::vector<std::string> replay_check(const Trace& trace);

}  // namespace socp
