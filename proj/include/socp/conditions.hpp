#pragma once

// Optimality-condition machinery: index sets, the sigma term, first-order
// residuals, the AKKT2 matrix with explicit parameters, WSONC, Robinson and
// WCR diagnostics, and the quartic-penalty path.

#include <optional>
#include <string>
#include <vector>

#include "socp/cone.hpp"
#include "socp/linalg.hpp"
#include "socp/model.hpp"

namespace socp {

using IndexList = std::vector<std::size_t>;

struct IndexSets {
  IndexList i0, ib, ii;              // exact partition
  IndexList i0_eps, ib_eps, ibb_eps;  // relaxed, need not partition
  double eps_exact = 0.0;
  double eps_relaxed = 0.0;
};

/// i in I0 iff |g_i| <= eps_exact; I_I iff eta1(g_i) > eps_exact; I_B
/// otherwise. I_Beps needs |g0 - |gbar|| <= eps, g0 > 0 and m_i >= 2;
/// I_BBeps additionally |w0 - |wbar|| <= eps, w0 > 0 (empty without omega).
IndexSets index_sets(const ConeProduct& cone, std::span<const double> g, double eps_exact,
                     double eps_relaxed, std::optional<std::span<const double>> omega = {});
IndexSets index_sets(const Problem& p, std::span<const double> x, double eps_exact, double eps_relaxed,
                     std::optional<std::span<const double>> omega = {});

/// sum over active_b of -(w0 / g0) Dg_i' Gamma Dg_i. Throws
/// std::domain_error on a zero head.
SymMatrix sigma_term(const Problem& p, std::span<const double> x, std::span<const double> omega,
                     const IndexList& active_b);
SymMatrix sigma_term(const ConeProduct& cone, std::span<const double> g, const Matrix& dg,
                     std::span<const double> omega, const IndexList& active_b);

struct FirstOrderResiduals {
  double stationarity = 0.0;
  double feasibility = 0.0;
  double akkt_comp = 0.0;
  double cakkt_comp = 0.0;
};

double feasibility_residual(const Problem& p, std::span<const double> x);
FirstOrderResiduals first_order_residuals(const Problem& p, std::span<const double> x,
                                          std::span<const double> mu, std::span<const double> omega);

/// Worst block of the AKKT multiplier clause: on I_I the norm of omega_i, on
/// I_B the smaller of |omega_i| and the ray gap |wbar/|wbar| + gbar/|gbar||.
double akkt_multiplier_measure(const ConeProduct& cone, std::span<const double> g,
                               std::span<const double> omega, const IndexSets& sets, double tol = 1e-12);

struct Akkt2Params {
  Vector eta;                                  // p
  std::vector<std::pair<std::size_t, double>> theta;  // block, value (I0)
  std::vector<std::pair<std::size_t, double>> gamma;  // block, value (I_B)
  std::vector<std::pair<std::size_t, double>> phi;    // informational (I_B)
  double delta = 0.0;
};

SymMatrix akkt2_matrix(const Problem& p, std::span<const double> x, std::span<const double> mu,
                       std::span<const double> omega, const Akkt2Params& params, const IndexSets& sets);

enum class BoundaryRegime { N1, N2, N3 };
std::string to_string(BoundaryRegime r);

/// Regime of an I_B block from classify(g_i, 1e-10). Throws
/// std::domain_error when gbar = 0 or g0 <= 0.
BoundaryRegime boundary_regime(std::span<const double> gi);

/// theta = rho on I0, gamma/phi per regime on I_B, eta = rho,
/// delta = sum phi_i lambda_max(Dg_i' Dg_i).
Akkt2Params lemma13_params(const Problem& p, std::span<const double> x, double rho, const IndexSets& sets);

/// -rho V + gamma (Gamma gt)(Gamma gt)' - (w0/g0) Gamma + phi I for block i,
/// with w = rho Pi(-g_i) and V = bsub_element(-g_i).
SymMatrix lemma13_block_matrix(std::span<const double> gi, double rho);
SymMatrix lemma13_block_matrix(const Problem& p, std::span<const double> x, double rho, std::size_t i);

/// [[beta, b'], [b, b b' / beta + xi I]]
SymMatrix lemma10_matrix(double beta, double xi, std::span<const double> b);

struct WsoncReport {
  NullSpaceBasis basis;
  SymMatrix reduced;
  std::optional<double> min_eig;  // empty when S = {0}
  bool pass = true;
  FirstOrderResiduals kkt;
  IndexSets sets;
};

WsoncReport wsonc_check(const Problem& p, std::span<const double> x, std::span<const double> mu,
                        std::span<const double> omega, double tol = 1e-9, double set_tol = 1e-8);

struct RobinsonReport {
  std::size_t rank_dh = 0;
  bool dh_full_rank = true;
  std::optional<double> t;  // absent when the rank test already fails
  Vector d;
  bool holds = false;
};

RobinsonReport robinson_measure(const Problem& p, std::span<const double> x, double set_tol = 1e-8);

struct WcrReport {
  std::size_t rank_at_x = 0;
  std::vector<std::size_t> sample_ranks;
  bool constant_rank = true;
};

WcrReport wcr_probe(const Problem& p, std::span<const double> x, double radius, int samples,
                    unsigned long long seed = 0, double set_tol = 1e-8);

// ---- certificates ----------------------------------------------------------

struct CertificateRow {
  int k = 0;
  double rho = 0.0;
  Vector x, mu, omega;
  double stationarity = 0.0;
  double r_v = 0.0;
  double akkt_comp = 0.0;
  double cakkt_comp = 0.0;
  double akkt_mult = 0.0;
  /// min eigenvalue of the AKKT2 matrix; NaN when not computable
  double min_eig = 0.0;
  double so_residual = 0.0;
  std::optional<double> probe_curvature;
  Akkt2Params params;
  IndexSets sets;
  bool converged = true;
  std::optional<bool> local_min;
  std::string note;
};

/// Builds a row at (x, mu, omega): sets from set_point (defaults to x) with
/// set_tol, lemma13_params at rho, delta increased by extra_delta.
CertificateRow certify(const Problem& p, std::span<const double> x, std::span<const double> mu,
                       std::span<const double> omega, double rho, double extra_delta,
                       double set_tol = 1e-6, std::optional<std::span<const double>> set_point = {});

class Akkt2Certificate {
 public:
  void append(CertificateRow row) { rows_.push_back(std::move(row)); }
  const std::vector<CertificateRow>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }
  /// Recomputes min_eig of row r from its stored data.
  double recompute_min_eig(const Problem& p, std::size_t r) const;
  std::string to_json() const;

 private:
  std::vector<CertificateRow> rows_;
};

enum class PenaltyMode { Stationary, Minimize };

struct PenaltyPathOptions {
  std::vector<double> rho = {1e1, 1e2, 1e3, 1e4, 1e5, 1e6};
  std::vector<double> inner_tol;  // defaults to max(1e-11, 1e-14 rho_k)
  PenaltyMode mode = PenaltyMode::Stationary;
  int max_inner = 200;
  double set_tol = 1e-6;
};

double penalty_value(const Problem& p, std::span<const double> x, std::span<const double> center, double rho);
Vector penalty_grad(const Problem& p, std::span<const double> x, std::span<const double> center, double rho);
SymMatrix penalty_hess(const Problem& p, std::span<const double> x, std::span<const double> center, double rho);

/// Throws std::invalid_argument when the hint is infeasible beyond 1e-6.
Akkt2Certificate penalty_path(const Problem& p, std::span<const double> hint, const PenaltyPathOptions& opt);

}  // namespace socp
