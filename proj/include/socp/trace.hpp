#pragma once

// Per-iterate trace rows shared by the solvers, and their JSON export.

#include <optional>
#include <string>
#include <vector>

#include "socp/linalg.hpp"

namespace socp {

enum class SolveStatus { Converged, InfeasibleStationary, IterationCap, InnerStall, SubproblemFailure };

std::string to_string(SolveStatus s);

struct TraceRow {
  int k = 0;
  Vector x, mu, omega;
  double rho = 0.0;
  double eps = 0.0;
  double stationarity = 0.0;
  double r_v = 0.0;
  double akkt_comp = 0.0;
  double cakkt_comp = 0.0;
  double so_residual = 0.0;

  // augmented Lagrangian
  std::optional<int> inner_iterations;
  std::optional<double> inner_grad_norm;
  std::optional<double> inner_min_eig;
  std::optional<double> infeasibility;
  std::optional<bool> penalty_kept;

  // stabilized SQP
  std::optional<std::string> vomf_class;
  std::optional<double> r_o, phi_measure, psi_measure;
  std::optional<double> merit_grad_norm;
  std::optional<double> step;
  std::optional<int> backtracks;
  std::optional<double> subqp_residual;
  std::optional<double> phi, psi, gamma;
  std::optional<bool> rho_halved;
};

struct Trace {
  std::string solver;
  std::string problem;
  std::string status;
  std::vector<TraceRow> rows;

  std::string to_json() const;
};

}  // namespace socp
