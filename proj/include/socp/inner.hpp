#pragma once

// Second-order inner solvers over a smooth-enough objective supplied as
// value / gradient / (generalized) Hessian callbacks.

#include <functional>
#include <string>

#include "socp/linalg.hpp"

namespace socp {

struct SmoothObjective {
  std::function<double(std::span<const double>)> value;
  std::function<Vector(std::span<const double>)> grad;
  std::function<SymMatrix(std::span<const double>)> hess;
};

struct InnerOptions {
  double grad_tol = 1e-8;
  /// Exit also requires lambda_min(H) >= -curv_tol (trust-region mode only).
  double curv_tol = 1e-8;
  int max_iter = 500;
  double initial_radius = 1.0;
  double max_radius = 1e6;
};

struct InnerResult {
  Vector x;
  double grad_norm = 0.0;
  double min_eig = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string message;
};

struct TrustRegionStep {
  Vector step;
  double predicted = 0.0;  // model decrease, >= 0
  bool hard_case = false;
};

/// Exact solution of min g's + 1/2 s'Hs, |s| <= radius, through the
/// eigendecomposition of H (hard case included).
TrustRegionStep trust_region_step(const EigenResult& eig, std::span<const double> g, double radius);

/// Trust-region Newton; stops at a point with |grad| <= grad_tol and
/// lambda_min(hess) >= -curv_tol. Non-finite trial values shrink the radius.
InnerResult trust_region_newton(const SmoothObjective& obj, std::span<const double> x0,
                                const InnerOptions& opt);

/// Semismooth Newton on grad = 0 with backtracking on |grad|; converges to
/// nearby stationary points of any inertia. Uses the eigen pseudo-inverse
/// of the generalized Hessian.
InnerResult stationary_newton(const SmoothObjective& obj, std::span<const double> x0,
                              const InnerOptions& opt);

}  // namespace socp
