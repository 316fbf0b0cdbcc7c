#include "socp/auglag.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace socp {

void AuglagConfig::validate() const {
  if (!(gamma > 1.0)) throw std::invalid_argument("auglag: gamma must be > 1");
  if (!(rho1 > 0.0)) throw std::invalid_argument("auglag: rho1 must be > 0");
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("auglag: tau must lie in (0,1)");
  if (!(eps0 > 0.0) || !(eps_factor > 0.0 && eps_factor < 1.0) || !(eps_floor > 0.0))
    throw std::invalid_argument("auglag: eps schedule must be positive and decreasing");
  if (!(mu_max > 0.0) || !(omega_max > 0.0)) throw std::invalid_argument("auglag: multiplier bounds must be > 0");
  if (max_outer < 1 || max_inner < 1) throw std::invalid_argument("auglag: iteration caps must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("auglag: tol must be > 0");
}

double AuglagConfig::eps(int k) const { return std::max(eps_floor, eps0 * std::pow(eps_factor, k)); }

namespace {

Vector shifted_g(const Problem& p, std::span<const double> x, std::span<const double> omega_hat, double rho) {
  Vector v = p.g(x);
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = omega_hat[j] - rho * v[j];
  return v;
}

}  // namespace

double auglag_value(const Problem& p, std::span<const double> x, std::span<const double> mu_hat,
                    std::span<const double> omega_hat, double rho) {
  Vector eq = p.h(x);
  for (std::size_t j = 0; j < eq.size(); ++j) eq[j] = mu_hat[j] - rho * eq[j];
  double pen = dot(eq, eq);
  const Vector pr = project_cone(p.cone(), shifted_g(p, x, omega_hat, rho));
  pen += dot(pr, pr) - dot(omega_hat, omega_hat);
  return p.f(x) + pen / (2.0 * rho);
}

Vector auglag_grad(const Problem& p, std::span<const double> x, std::span<const double> mu_hat,
                   std::span<const double> omega_hat, double rho) {
  Vector gl = p.grad_f(x);
  Vector eq = p.h(x);
  for (std::size_t j = 0; j < eq.size(); ++j) eq[j] = rho * eq[j] - mu_hat[j];
  const Vector a = p.dh(x).multiply_transpose(eq);
  const Vector b = p.dg(x).multiply_transpose(project_cone(p.cone(), shifted_g(p, x, omega_hat, rho)));
  for (std::size_t i = 0; i < gl.size(); ++i) gl[i] += a[i] - b[i];
  return gl;
}

SymMatrix surrogate_hessian(const Problem& p, std::span<const double> x, std::span<const double> mu_hat,
                            std::span<const double> omega_hat, double rho) {
  Vector mu = p.h(x);
  for (std::size_t j = 0; j < mu.size(); ++j) mu[j] = rho * mu[j] - mu_hat[j];
  const Vector omega = project_cone(p.cone(), shifted_g(p, x, omega_hat, rho));
  const LagrangianData d = eval_lagrangian_data(p, x, mu, omega);
  SymMatrix out = d.hess_l;
  if (d.dh.rows()) out.add_gram(rho, d.dh);
  const Vector neg = scaled(-1.0, d.g);
  for (std::size_t i = 0; i < p.cone().blocks(); ++i) {
    const SymMatrix v = bsub_element(p.cone().block(std::span<const double>(neg), i));
    out.add_congruence(rho, d.dg.row_block(p.cone().offset(i), p.cone().dim(i)), v);
  }
  return out;
}

InnerResult inner_solve(const Problem& p, std::span<const double> x0, std::span<const double> mu_hat,
                        std::span<const double> omega_hat, double rho, double eps, int max_iter) {
  if (!(eps > 0.0)) throw std::invalid_argument("inner_solve: eps must be > 0");
  SmoothObjective obj{
      [&](std::span<const double> y) { return auglag_value(p, y, mu_hat, omega_hat, rho); },
      [&](std::span<const double> y) { return auglag_grad(p, y, mu_hat, omega_hat, rho); },
      [&](std::span<const double> y) { return surrogate_hessian(p, y, mu_hat, omega_hat, rho); },
  };
  InnerOptions io;
  io.grad_tol = eps;
  io.curv_tol = eps;
  io.max_iter = max_iter;
  return trust_region_newton(obj, x0, io);
}

AuglagState outer_step(const AuglagState& s, const Problem& p, const AuglagConfig& c) {
  AuglagState n = s;
  const Vector g = p.g(s.x);
  const Vector h = p.h(s.x);

  // Step 3
  Vector w(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) w[j] = s.omega_hat[j] / s.rho - g[j];
  Vector v = project_cone(p.cone(), w);
  for (std::size_t j = 0; j < v.size(); ++j) v[j] -= s.omega_hat[j] / s.rho;
  n.infeasibility = std::max(norm_inf(h), norm_inf(v));
  n.penalty_kept = n.infeasibility <= c.tau * s.prev_infeasibility;
  n.prev_infeasibility = n.infeasibility;

  // Step 4
  Vector mu_alg(h.size());
  for (std::size_t j = 0; j < h.size(); ++j) mu_alg[j] = s.mu_hat[j] - s.rho * h[j];
  n.mu = scaled(-1.0, mu_alg);
  n.omega = project_cone(p.cone(), shifted_g(p, s.x, s.omega_hat, s.rho));

  // Step 5
  for (std::size_t j = 0; j < h.size(); ++j) n.mu_hat[j] = std::clamp(mu_alg[j], -c.mu_max, c.mu_max);
  n.omega_hat = n.omega;
  for (std::size_t i = 0; i < p.cone().blocks(); ++i) {
    auto blk = p.cone().block(std::span<double>(n.omega_hat), i);
    const double nb = norm2(blk);
    if (nb > c.omega_max)
      for (double& e : blk) e *= c.omega_max / nb;
  }
  n.rho = n.penalty_kept ? s.rho : c.gamma * s.rho;
  n.k = s.k + 1;
  return n;
}

AuglagResult auglag_solve(const Problem& p, const AuglagConfig& c, std::span<const double> x0) {
  c.validate();
  if (x0.size() != p.n()) throw std::invalid_argument("auglag_solve: x0 has wrong length");
  AuglagResult res;
  res.trace.solver = "auglag";
  res.trace.problem = p.name();

  AuglagState s;
  s.x.assign(x0.begin(), x0.end());
  s.mu_hat.assign(p.p(), 0.0);
  s.omega_hat.assign(p.m(), 0.0);
  s.rho = c.rho1;

  for (int k = 1;; ++k) {
    if (k > c.max_outer) {
      res.status = SolveStatus::IterationCap;
      break;
    }
    const double eps = c.eps(k);
    s.k = k;
    const InnerResult inner = inner_solve(p, s.x, s.mu_hat, s.omega_hat, s.rho, eps, c.max_inner);
    s.x = inner.x;
    const AuglagState next = outer_step(s, p, c);

    CertificateRow row = certify(p, s.x, next.mu, next.omega, s.rho, eps, c.cert_set_tol);
    row.k = k;
    row.converged = inner.converged;
    if (!inner.converged) row.note = inner.message;

    TraceRow t;
    t.k = k;
    t.x = s.x;
    t.mu = next.mu;
    t.omega = next.omega;
    t.rho = s.rho;
    t.eps = eps;
    t.stationarity = row.stationarity;
    t.r_v = row.r_v;
    t.akkt_comp = row.akkt_comp;
    t.cakkt_comp = row.cakkt_comp;
    t.so_residual = row.so_residual;
    t.inner_iterations = inner.iterations;
    t.inner_grad_norm = inner.grad_norm;
    t.inner_min_eig = inner.min_eig;
    t.infeasibility = next.infeasibility;
    t.penalty_kept = next.penalty_kept;
    res.trace.rows.push_back(t);

    const Vector g = p.g(s.x);
    for (std::size_t i = 0; i < p.cone().blocks(); ++i) {
      const auto gi = p.cone().block(std::span<const double>(g), i);
      if (gi.size() >= 2 && classify(gi) == ConeRegion::Outside)
        res.max_outside_omega0 = std::max(res.max_outside_omega0, next.omega[p.cone().offset(i)]);
    }

    const bool done = row.stationarity <= c.tol && row.r_v <= c.tol && row.akkt_comp <= c.tol;
    res.certificate.append(std::move(row));
    res.x = s.x;
    res.mu = next.mu;
    res.omega = next.omega;

    if (!inner.converged) {
      res.status = SolveStatus::InnerStall;
      break;
    }
    if (done) {
      res.status = SolveStatus::Converged;
      break;
    }
    if (next.rho > c.rho_max) {
      res.status = SolveStatus::InfeasibleStationary;
      break;
    }
    s = next;
  }
  res.trace.status = to_string(res.status);
  return res;
}

}  // namespace socp
