#include "socp/sqp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace socp {

void SqpConfig::validate() const {
  auto unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!unit(tau) || !unit(alpha) || !unit(beta) || !unit(kappa))
    throw std::invalid_argument("sqp: tau, alpha, beta, kappa must lie in (0,1)");
  if (!(mu_max > 0.0) || !(omega_max > 0.0)) throw std::invalid_argument("sqp: multiplier bounds must be > 0");
  if (!(phi0 > 0.0) || !(psi0 > 0.0) || !(gamma0 > 0.0) || !(rho0 > 0.0))
    throw std::invalid_argument("sqp: phi0, psi0, gamma0, rho0 must be > 0");
  if (!(eps0 > 0.0) || !unit(eps_factor) || !(eps_floor > 0.0))
    throw std::invalid_argument("sqp: eps schedule must be positive and decreasing");
  if (!(nu1 > 0.0) || !(nu2 >= nu1)) throw std::invalid_argument("sqp: need 0 < nu1 <= nu2");
  if (max_iter < 1 || max_backtracks < 0 || subqp_cap < 1) throw std::invalid_argument("sqp: bad iteration caps");
  if (!(grad_zero_tol >= 0.0) || !(tol > 0.0)) throw std::invalid_argument("sqp: tolerances must be positive");
}

double SqpConfig::eps(int k) const { return std::max(eps_floor, eps0 * std::pow(eps_factor, k)); }

std::string to_string(VomfClass c) {
  switch (c) {
    case VomfClass::V: return "V";
    case VomfClass::O: return "O";
    case VomfClass::M: return "M";
    case VomfClass::F: return "F";
  }
  return "?";
}

StabParams stab_params(const Problem& p, std::span<const double> x, std::span<const double> mu,
                       std::span<const double> omega, double rho, const SymMatrix& H) {
  if (!(rho > 0.0)) throw std::invalid_argument("stab_params: rho must be > 0");
  StabParams out;
  const Vector h = p.h(x);
  const Vector g = p.g(x);
  out.s.resize(h.size());
  for (std::size_t j = 0; j < h.size(); ++j) out.s[j] = mu[j] - h[j] / rho;
  out.t.resize(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) out.t[j] = omega[j] - g[j] / rho;
  out.M = H;
  if (p.p()) out.M.add_gram(1.0 / rho, p.dh(x));
  return out;
}

SymMatrix sqp_hessian(const Problem& p, std::span<const double> x, std::span<const double> mu,
                      std::span<const double> omega, const SqpConfig& c) {
  if (c.hessian == HessianStrategy::Identity) return SymMatrix::identity(p.n());
  const SymMatrix h = eval_lagrangian_data(p, x, scaled(-1.0, mu), omega).hess_l;
  EigenResult e = sym_eigen(h);
  const double shift = e.values.empty() ? 0.0 : std::max(0.0, c.nu1 - e.values.front()) + c.nu1;
  SymMatrix out(p.n());
  for (std::size_t k = 0; k < e.values.size(); ++k) {
    const double lam = std::min(e.values[k] + shift, c.nu2);
    out.add_outer(lam, e.vectors.col(k));
  }
  return out;
}

SymMatrix p_matrix(const Problem& p, std::span<const double> x, std::span<const double> mu,
                   std::span<const double> omega, double rho, const IndexSets& sets) {
  Akkt2Params prm;
  prm.eta.assign(p.p(), 1.0 / rho);
  for (std::size_t i : sets.i0_eps) prm.theta.emplace_back(i, 1.0 / rho);
  for (std::size_t i : sets.ib_eps) prm.gamma.emplace_back(i, 1.0 / rho);
  IndexSets s = sets;
  s.ib = sets.ibb_eps;
  return akkt2_matrix(p, x, scaled(-1.0, mu), omega, prm, s);
}

OptimalityMeasures measures(const Problem& p, std::span<const double> x, std::span<const double> mu,
                            std::span<const double> omega, double rho, double eps, double kappa) {
  if (!(rho > 0.0) || !(eps > 0.0)) throw std::invalid_argument("measures: rho and eps must be > 0");
  OptimalityMeasures m;
  m.r_v = feasibility_residual(p, x);
  m.sets = index_sets(p, x, eps, eps, omega);
  double r = norm2(lagrangian_grad(p, x, scaled(-1.0, mu), omega));
  const Vector g = p.g(x);
  for (std::size_t i = 0; i < p.cone().blocks(); ++i) {
    const auto gi = p.cone().block(std::span<const double>(g), i);
    const auto wi = p.cone().block(omega, i);
    r += gi.size() == 1 ? std::abs(gi[0] * wi[0]) : norm2(jordan_product(gi, wi));
  }
  if (p.n()) m.p_term = std::max(0.0, -min_eigenvalue(p_matrix(p, x, mu, omega, rho, m.sets)));
  m.r_o = r + m.p_term;
  m.phi = m.r_v + kappa * m.r_o;
  m.psi = kappa * m.r_v + m.r_o;
  return m;
}

double r_o_measure(const Problem& p, std::span<const double> x, std::span<const double> mu,
                   std::span<const double> omega, double rho, double eps) {
  return measures(p, x, mu, omega, rho, eps, 0.5).r_o;
}

namespace {

Vector shifted(std::span<const double> base, double rho, std::span<const double> v) {
  Vector out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) out[j] = rho * base[j] - v[j];
  return out;
}

}  // namespace

double merit_value(const Problem& p, std::span<const double> x, double rho, std::span<const double> mu,
                   std::span<const double> omega) {
  const Vector e = shifted(mu, rho, p.h(x));
  const Vector c = project_cone(p.cone(), shifted(omega, rho, p.g(x)));
  return p.f(x) + (dot(e, e) + dot(c, c)) / (2.0 * rho);
}

Vector merit_grad(const Problem& p, std::span<const double> x, double rho, std::span<const double> mu,
                  std::span<const double> omega) {
  Vector out = p.grad_f(x);
  const Vector e = scaled(1.0 / rho, shifted(mu, rho, p.h(x)));
  const Vector c = scaled(1.0 / rho, project_cone(p.cone(), shifted(omega, rho, p.g(x))));
  if (!e.empty()) axpy(-1.0, p.dh(x).multiply_transpose(e), out);
  if (!c.empty()) axpy(-1.0, p.dg(x).multiply_transpose(c), out);
  return out;
}

Vector project_c(std::span<const double> mu, double mu_max) {
  Vector out(mu.begin(), mu.end());
  for (double& v : out) v = std::clamp(v, -mu_max, mu_max);
  return out;
}

Vector project_d(const ConeProduct& cone, std::span<const double> omega, double omega_max, int cap) {
  Vector w = project_cone(cone, omega);
  for (int it = 0; it < cap; ++it) {
    const Vector b = project_c(w, omega_max);
    const Vector next = project_cone(cone, b);
    const bool fixed = norm_inf(sub(next, w)) <= 1e-14 * std::max(1.0, norm_inf(w));
    w = next;
    if (fixed) break;
  }
  return w;
}

SqpState vomf_step(const Problem& p, const SqpConfig& c, const SqpState& s, const VomfInput& in) {
  SqpState n = s;
  n.x = in.x;
  if (in.at_candidates.phi <= 0.5 * s.phi) {
    n.mu = s.mu_bar;
    n.omega = s.omega_bar;
    n.phi = 0.5 * s.phi;
    n.last_class = VomfClass::V;
  } else if (in.at_candidates.psi <= 0.5 * s.psi) {
    n.mu = s.mu_bar;
    n.omega = s.omega_bar;
    n.psi = 0.5 * s.psi;
    n.last_class = VomfClass::O;
  } else if (in.merit_grad_norm <= s.gamma) {
    const Vector h = p.h(in.x);
    const Vector g = p.g(in.x);
    Vector mu(h.size()), w(g.size());
    for (std::size_t j = 0; j < h.size(); ++j) mu[j] = s.mu[j] - h[j] / s.rho;
    for (std::size_t j = 0; j < g.size(); ++j) w[j] = s.omega[j] - g[j] / s.rho;
    n.mu = project_c(mu, c.mu_max);
    n.omega = project_d(p.cone(), w, c.omega_max);
    n.gamma = 0.5 * s.gamma;
    n.last_class = VomfClass::M;
  } else {
    n.last_class = VomfClass::F;
  }
  return n;
}

LineSearchResult armijo(const std::function<double(std::span<const double>)>& merit, std::span<const double> x,
                        std::span<const double> grad, std::span<const double> dir, double tau, double beta,
                        int max_backtracks) {
  LineSearchResult r;
  r.delta = dot(grad, dir);
  if (!(r.delta < 0.0))
    throw LineSearchError(LineSearchFailure::NoDescent,
                          "line search: direction is not a descent direction (delta = " + std::to_string(r.delta) + ")");
  const double f0 = merit(x);
  double step = 1.0;
  for (int l = 0; l <= max_backtracks; ++l) {
    Vector trial(x.begin(), x.end());
    axpy(step, dir, trial);
    const double ft = merit(trial);
    if (std::isfinite(ft) && ft <= f0 + tau * step * r.delta) {
      r.step = step;
      r.backtracks = l;
      r.x = std::move(trial);
      r.merit = ft;
      return r;
    }
    step *= beta;
  }
  throw LineSearchError(LineSearchFailure::ExhaustedBacktracking,
                        "line search: no acceptable step after " + std::to_string(max_backtracks) + " backtracks");
}

LineSearchResult line_search(const Problem& p, std::span<const double> x, std::span<const double> dir, double rho,
                             std::span<const double> mu, std::span<const double> omega, double tau, double beta,
                             int max_backtracks) {
  const Vector grad = merit_grad(p, x, rho, mu, omega);
  return armijo([&](std::span<const double> y) { return merit_value(p, y, rho, mu, omega); }, x, grad, dir, tau,
                beta, max_backtracks);
}

namespace {

bool same_sets(const IndexSets& a, const IndexSets& b) {
  return a.i0_eps == b.i0_eps && a.ib_eps == b.ib_eps && a.ibb_eps == b.ibb_eps;
}

}  // namespace

SqpResult sqp_solve(const Problem& p, const SqpConfig& c, std::span<const double> x0, std::span<const double> mu0,
                    std::span<const double> omega0) {
  c.validate();
  if (x0.size() != p.n()) throw std::invalid_argument("sqp_solve: x0 has wrong length");
  if (!mu0.empty() && mu0.size() != p.p()) throw std::invalid_argument("sqp_solve: mu0 has wrong length");
  if (!omega0.empty() && omega0.size() != p.m()) throw std::invalid_argument("sqp_solve: omega0 has wrong length");

  SqpState s;
  s.x.assign(x0.begin(), x0.end());
  s.mu = mu0.empty() ? Vector(p.p(), 0.0) : scaled(-1.0, mu0);
  s.omega = omega0.empty() ? Vector(p.m(), 0.0) : Vector(omega0.begin(), omega0.end());
  for (std::size_t i = 0; i < p.cone().blocks(); ++i) {
    const auto wi = p.cone().block(std::span<const double>(s.omega), i);
    if (eta_min(wi) < -1e-12)
      throw std::invalid_argument("sqp_solve: omega0 block " + std::to_string(i) + " is not in K");
  }
  s.rho = c.rho0;
  s.phi = c.phi0;
  s.psi = c.psi0;
  s.gamma = c.gamma0;
  s.eps = c.eps(0);

  SqpResult res;
  res.trace.solver = "sqp";
  res.trace.problem = p.name();
  std::optional<IndexSets> prev_sets;

  for (int k = 0;; ++k) {
    if (k >= c.max_iter) {
      res.status = SolveStatus::IterationCap;
      break;
    }
    s.k = k;
    if (!s.eps_frozen) s.eps = c.eps(k);
    TraceRow t;
    t.k = k;
    t.rho = s.rho;
    t.eps = s.eps;
    t.phi = s.phi;
    t.psi = s.psi;
    t.gamma = s.gamma;

    Vector x_new;
    try {
      const Vector grad0 = merit_grad(p, s.x, s.rho, s.mu, s.omega);
      if (norm2(grad0) <= c.grad_zero_tol) {
        // (0, Pi(t)) solves the subproblem exactly when grad F = 0
        const StabParams sp = stab_params(p, s.x, s.mu, s.omega, s.rho, SymMatrix(p.n()));
        s.mu_bar = sp.s;
        s.omega_bar = project_cone(p.cone(), sp.t);
        x_new = s.x;
        t.step = 0.0;
        t.backtracks = 0;
        t.subqp_residual = 0.0;
      } else {
        const SymMatrix H = sqp_hessian(p, s.x, s.mu, s.omega, c);
        const StabParams sp = stab_params(p, s.x, s.mu, s.omega, s.rho, H);
        SubQp q;
        q.c = p.grad_f(s.x);
        if (p.p()) axpy(-1.0, p.dh(s.x).multiply_transpose(sp.s), q.c);
        q.M = sp.M;
        q.rho = s.rho;
        q.A = p.m() ? p.dg(s.x) : Matrix(0, p.n());
        q.t = sp.t;
        q.cone = p.cone();
        const SubQpSolution sol = solve_subqp(q, c.subqp_tol, c.subqp_cap);
        t.subqp_residual = sol.kkt_residual;
        res.max_subqp_residual = std::max(res.max_subqp_residual, sol.kkt_residual);
        if (sol.status != SubQpStatus::Converged) {
          res.status = SolveStatus::SubproblemFailure;
          res.trace.rows.push_back(t);
          break;
        }
        const Vector hx = p.h(s.x);
        const Vector dhxi = p.p() ? p.dh(s.x).multiply(sol.xi) : Vector{};
        s.mu_bar.resize(p.p());
        for (std::size_t j = 0; j < hx.size(); ++j) s.mu_bar[j] = s.mu[j] - (hx[j] + dhxi[j]) / s.rho;
        s.omega_bar = sol.chi;
        const LineSearchResult ls =
            line_search(p, s.x, sol.xi, s.rho, s.mu, s.omega, c.tau, c.beta, c.max_backtracks);
        x_new = ls.x;
        t.step = ls.step;
        t.backtracks = ls.backtracks;
      }
    } catch (const LineSearchError& e) {
      throw LineSearchError(e.kind(), "sqp iteration " + std::to_string(k) + ": " + e.what());
    } catch (const std::exception& e) {
      throw std::runtime_error("sqp iteration " + std::to_string(k) + ": " + e.what());
    }

    VomfInput in;
    in.x = x_new;
    in.at_candidates = measures(p, x_new, s.mu_bar, s.omega_bar, s.rho, s.eps, c.kappa);
    in.merit_grad_norm = norm2(merit_grad(p, x_new, s.rho, s.mu, s.omega));
    SqpState n = vomf_step(p, c, s, in);
    const bool halve = in.merit_grad_norm <= s.gamma;
    if (halve) n.rho = 0.5 * s.rho;

    t.vomf_class = to_string(*n.last_class);
    t.r_o = in.at_candidates.r_o;
    t.phi_measure = in.at_candidates.phi;
    t.psi_measure = in.at_candidates.psi;
    t.merit_grad_norm = in.merit_grad_norm;
    t.rho_halved = halve;

    const Vector mu_lib = scaled(-1.0, n.mu);
    CertificateRow row = certify(p, n.x, mu_lib, n.omega, 1.0 / s.rho, s.eps, c.cert_set_tol);
    row.k = k;
    row.note = t.vomf_class.value();
    t.x = n.x;
    t.mu = mu_lib;
    t.omega = n.omega;
    t.stationarity = row.stationarity;
    t.r_v = row.r_v;
    t.akkt_comp = row.akkt_comp;
    t.cakkt_comp = row.cakkt_comp;
    t.so_residual = row.so_residual;
    res.trace.rows.push_back(t);
    res.certificate.append(std::move(row));

    res.final_measures = measures(p, n.x, n.mu, n.omega, s.rho, s.eps, c.kappa);
    if (!n.eps_frozen) {
      if (prev_sets && same_sets(*prev_sets, res.final_measures.sets)) ++n.stable_sets;
      else n.stable_sets = 0;
      prev_sets = res.final_measures.sets;
      if (n.stable_sets >= c.freeze_after) n.eps_frozen = true;
    }
    s = std::move(n);
    res.x = s.x;
    res.mu = scaled(-1.0, s.mu);
    res.omega = s.omega;

    if (res.final_measures.r_v + res.final_measures.r_o <= c.tol) {
      res.status = SolveStatus::Converged;
      break;
    }
    if (s.rho < c.rho_min) {
      res.status = res.final_measures.r_v > c.tol ? SolveStatus::InfeasibleStationary : SolveStatus::IterationCap;
      break;
    }
  }
  if (res.x.empty()) {
    res.x = s.x;
    res.mu = scaled(-1.0, s.mu);
    res.omega = s.omega;
  }
  res.trace.status = to_string(res.status);
  return res;
}

std::vector<std::string> replay_check(const Trace& trace) {
  std::vector<std::string> bad;
  auto fail = [&](const TraceRow& r, const std::string& msg) {
    bad.push_back("row " + std::to_string(r.k) + ": " + msg);
  };
  for (std::size_t i = 0; i < trace.rows.size(); ++i) {
    const TraceRow& r = trace.rows[i];
    if (!r.vomf_class || !r.phi || !r.psi || !r.gamma || !r.phi_measure || !r.psi_measure || !r.merit_grad_norm ||
        !r.rho_halved) {
      if (!r.vomf_class && i + 1 == trace.rows.size()) continue;  // aborted iteration
      fail(r, "missing VOMF columns");
      continue;
    }
    const bool v = *r.phi_measure <= 0.5 * *r.phi;
    const bool o = !v && *r.psi_measure <= 0.5 * *r.psi;
    const bool m = !v && !o && *r.merit_grad_norm <= *r.gamma;
    const std::string expect = v ? "V" : o ? "O" : m ? "M" : "F";
    if (*r.vomf_class != expect) fail(r, "class " + *r.vomf_class + " but tests select " + expect);
    if (*r.rho_halved != (*r.merit_grad_norm <= *r.gamma)) fail(r, "rho rule mismatch");
    if (expect == "F" && i > 0 && (r.mu != trace.rows[i - 1].mu || r.omega != trace.rows[i - 1].omega))
      fail(r, "F iterate changed the multipliers");
    if (i + 1 >= trace.rows.size()) continue;
    const TraceRow& n = trace.rows[i + 1];
    if (!n.phi || !n.psi || !n.gamma) continue;
    const std::string& cls = *r.vomf_class;
    if (*n.phi != (cls == "V" ? 0.5 * *r.phi : *r.phi)) fail(r, "phi update");
    if (*n.psi != (cls == "O" ? 0.5 * *r.psi : *r.psi)) fail(r, "psi update");
    if (*n.gamma != (cls == "M" ? 0.5 * *r.gamma : *r.gamma)) fail(r, "gamma update");
    if (n.rho != (*r.rho_halved ? 0.5 * r.rho : r.rho)) fail(r, "rho trajectory");
  }
  return bad;
}

}  // namespace socp
