#include "socp/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "json.hpp"
#include "socp/inner.hpp"
#include "socp/subqp.hpp"

namespace socp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Matrix block_rows(const Matrix& dg, const ConeProduct& cone, std::size_t i) {
  return dg.row_block(cone.offset(i), cone.dim(i));
}

double tail_norm(std::span<const double> v) { return norm2(v.subspan(1)); }

/// Dg_i' Gamma gt_i
Vector boundary_row(const Matrix& dgi, std::span<const double> gi) {
  Vector w = tilde_g(gi);
  for (std::size_t j = 1; j < w.size(); ++j) w[j] = -w[j];
  return dgi.multiply_transpose(w);
}

}  // namespace

IndexSets index_sets(const ConeProduct& cone, std::span<const double> g, double eps_exact,
                     double eps_relaxed, std::optional<std::span<const double>> omega) {
  if (!(eps_exact > 0.0) || !(eps_relaxed > 0.0))
    throw std::invalid_argument("index_sets: tolerances must be positive");
  IndexSets s;
  s.eps_exact = eps_exact;
  s.eps_relaxed = eps_relaxed;
  for (std::size_t i = 0; i < cone.blocks(); ++i) {
    const auto gi = cone.block(g, i);
    if (gi.size() == 1) {
      if (gi[0] <= eps_exact) s.i0.push_back(i);
      else s.ii.push_back(i);
      if (std::abs(gi[0]) <= eps_relaxed) s.i0_eps.push_back(i);
      continue;
    }
    const double gn = norm2(gi);
    if (gn <= eps_exact) s.i0.push_back(i);
    else if (eta_min(gi) > eps_exact) s.ii.push_back(i);
    else s.ib.push_back(i);

    if (gn <= eps_relaxed) s.i0_eps.push_back(i);
    if (std::abs(gi[0] - tail_norm(gi)) <= eps_relaxed && gi[0] > 0.0) {
      s.ib_eps.push_back(i);
      if (omega) {
        const auto wi = cone.block(*omega, i);
        if (std::abs(wi[0] - tail_norm(wi)) <= eps_relaxed && wi[0] > 0.0) s.ibb_eps.push_back(i);
      }
    }
  }
  return s;
}

IndexSets index_sets(const Problem& p, std::span<const double> x, double eps_exact, double eps_relaxed,
                     std::optional<std::span<const double>> omega) {
  return index_sets(p.cone(), p.g(x), eps_exact, eps_relaxed, omega);
}

SymMatrix sigma_term(const ConeProduct& cone, std::span<const double> g, const Matrix& dg,
                     std::span<const double> omega, const IndexList& active_b) {
  SymMatrix s(dg.cols());
  for (const std::size_t i : active_b) {
    const double g0 = g[cone.offset(i)];
    if (g0 == 0.0) throw std::domain_error("sigma_term: block " + std::to_string(i) + " has zero head");
    const double w0 = omega[cone.offset(i)];
    if (w0 == 0.0) continue;
    s.add_congruence(-w0 / g0, block_rows(dg, cone, i), gamma_matrix(cone.dim(i)));
  }
  return s;
}

SymMatrix sigma_term(const Problem& p, std::span<const double> x, std::span<const double> omega,
                     const IndexList& active_b) {
  return sigma_term(p.cone(), p.g(x), p.dg(x), omega, active_b);
}

double feasibility_residual(const Problem& p, std::span<const double> x) {
  const Vector g = p.g(x);
  return norm2(p.h(x)) + norm2(project_cone(p.cone(), scaled(-1.0, g)));
}

FirstOrderResiduals first_order_residuals(const Problem& p, std::span<const double> x,
                                          std::span<const double> mu, std::span<const double> omega) {
  FirstOrderResiduals r;
  r.stationarity = norm2(lagrangian_grad(p, x, mu, omega));
  r.feasibility = feasibility_residual(p, x);
  const Vector g = p.g(x);
  const Vector h = p.h(x);
  for (std::size_t i = 0; i < p.cone().blocks(); ++i) {
    const auto gi = p.cone().block(std::span<const double>(g), i);
    const auto wi = p.cone().block(omega, i);
    r.akkt_comp = std::max(r.akkt_comp, std::abs(dot(gi, wi)));
    r.cakkt_comp = std::max(r.cakkt_comp, gi.size() == 1 ? std::abs(gi[0] * wi[0]) : norm2(jordan_product(gi, wi)));
  }
  for (std::size_t j = 0; j < h.size(); ++j) r.cakkt_comp = std::max(r.cakkt_comp, std::abs(h[j] * mu[j]));
  return r;
}

double akkt_multiplier_measure(const ConeProduct& cone, std::span<const double> g,
                               std::span<const double> omega, const IndexSets& sets, double tol) {
  double worst = 0.0;
  for (const std::size_t i : sets.ii) worst = std::max(worst, norm2(cone.block(omega, i)));
  for (const std::size_t i : sets.ib) {
    const auto wi = cone.block(omega, i);
    const auto gi = cone.block(g, i);
    const double wn = norm2(wi);
    double ray = wn;
    const double wt = tail_norm(wi), gt = tail_norm(gi);
    if (wt > tol && gt > 0.0) {
      double s = 0.0;
      for (std::size_t j = 1; j < wi.size(); ++j) {
        const double d = wi[j] / wt + gi[j] / gt;
        s += d * d;
      }
      ray = std::sqrt(s);
    }
    worst = std::max(worst, std::min(wn, ray));
  }
  return worst;
}

SymMatrix akkt2_matrix(const Problem& p, std::span<const double> x, std::span<const double> mu,
                       std::span<const double> omega, const Akkt2Params& params, const IndexSets& sets) {
  const LagrangianData d = eval_lagrangian_data(p, x, mu, omega);
  const ConeProduct& cone = p.cone();
  SymMatrix a = d.hess_l;
  a.add_scaled(1.0, sigma_term(cone, d.g, d.dg, omega, sets.ib));
  for (std::size_t j = 0; j < params.eta.size(); ++j) a.add_outer(params.eta[j], d.dh.row(j));
  for (const auto& [i, gam] : params.gamma) {
    if (gam == 0.0) continue;
    a.add_outer(gam, boundary_row(block_rows(d.dg, cone, i), cone.block(std::span<const double>(d.g), i)));
  }
  for (const auto& [i, th] : params.theta) a.add_gram(th, block_rows(d.dg, cone, i));
  a.add_identity(params.delta);
  return a;
}

std::string to_string(BoundaryRegime r) {
  switch (r) {
    case BoundaryRegime::N1: return "N1";
    case BoundaryRegime::N2: return "N2";
    case BoundaryRegime::N3: return "N3";
  }
  return "?";
}

BoundaryRegime boundary_regime(std::span<const double> gi) {
  if (gi.size() < 2 || tail_norm(gi) == 0.0)
    throw std::domain_error("boundary block with zero tail");
  if (!(gi[0] > 0.0)) throw std::domain_error("boundary block with nonpositive head");
  switch (classify(gi, 1e-10)) {
    case ConeRegion::InteriorK: return BoundaryRegime::N1;
    case ConeRegion::BoundaryPlusK: return BoundaryRegime::N2;
    case ConeRegion::Outside: return BoundaryRegime::N3;
    default: throw std::domain_error("block is not near the boundary of K");
  }
}

namespace {

struct BlockParams {
  BoundaryRegime regime;
  double gamma = 0.0;
  double phi = 0.0;
};

BlockParams block_params(std::span<const double> gi, double rho) {
  BlockParams b{boundary_regime(gi)};
  const double g0 = gi[0];
  const double gt = tail_norm(gi);
  if (b.regime != BoundaryRegime::N1) b.gamma = rho * g0 / (gt * gt * gt);
  if (b.regime == BoundaryRegime::N3) b.phi = rho * (gt - g0) * (gt - g0) / (g0 * gt);
  return b;
}

}  // namespace

Akkt2Params lemma13_params(const Problem& p, std::span<const double> x, double rho, const IndexSets& sets) {
  Akkt2Params out;
  out.eta.assign(p.p(), rho);
  for (const std::size_t i : sets.i0) out.theta.emplace_back(i, rho);
  if (sets.ib.empty()) return out;
  const Vector g = p.g(x);
  const Matrix dg = p.dg(x);
  for (const std::size_t i : sets.ib) {
    const BlockParams b = block_params(p.cone().block(std::span<const double>(g), i), rho);
    out.gamma.emplace_back(i, b.gamma);
    out.phi.emplace_back(i, b.phi);
    if (b.phi != 0.0) {
      SymMatrix gram(p.n());
      gram.add_gram(1.0, block_rows(dg, p.cone(), i));
      out.delta += b.phi * max_eigenvalue(gram);
    }
  }
  return out;
}

SymMatrix lemma13_block_matrix(std::span<const double> gi, double rho) {
  const BlockParams b = block_params(gi, rho);
  const std::size_t m = gi.size();
  const Vector neg = scaled(-1.0, gi);
  const Vector w = scaled(rho, project_block(neg));
  SymMatrix out(m);
  out.add_scaled(-rho, bsub_element(neg));
  Vector gg = tilde_g(gi);
  for (std::size_t j = 1; j < m; ++j) gg[j] = -gg[j];
  out.add_outer(b.gamma, gg);
  out.add_scaled(-w[0] / gi[0], gamma_matrix(m));
  out.add_identity(b.phi);
  return out;
}

SymMatrix lemma13_block_matrix(const Problem& p, std::span<const double> x, double rho, std::size_t i) {
  const Vector g = p.g(x);
  return lemma13_block_matrix(p.cone().block(std::span<const double>(g), i), rho);
}

SymMatrix lemma10_matrix(double beta, double xi, std::span<const double> b) {
  if (beta == 0.0) throw std::invalid_argument("lemma10_matrix: beta must be nonzero");
  const std::size_t k = b.size();
  SymMatrix out(k + 1);
  out.set(0, 0, beta);
  for (std::size_t j = 0; j < k; ++j) {
    out.set(0, j + 1, b[j]);
    for (std::size_t l = j; l < k; ++l) out.set(j + 1, l + 1, b[j] * b[l] / beta + (j == l ? xi : 0.0));
  }
  return out;
}

namespace {

Matrix critical_rows(const Problem& p, std::span<const double> y, const IndexSets& sets) {
  const Matrix dh = p.dh(y);
  const Matrix dg = p.dg(y);
  const Vector g = p.g(y);
  Matrix rows(0, p.n());
  for (std::size_t j = 0; j < dh.rows(); ++j) rows.append_row(dh.row(j));
  for (const std::size_t i : sets.i0) {
    const Matrix b = block_rows(dg, p.cone(), i);
    for (std::size_t r = 0; r < b.rows(); ++r) rows.append_row(b.row(r));
  }
  for (const std::size_t i : sets.ib)
    rows.append_row(boundary_row(block_rows(dg, p.cone(), i), p.cone().block(std::span<const double>(g), i)));
  return rows;
}

}  // namespace

WsoncReport wsonc_check(const Problem& p, std::span<const double> x, std::span<const double> mu,
                        std::span<const double> omega, double tol, double set_tol) {
  WsoncReport r;
  r.sets = index_sets(p, x, set_tol, set_tol, omega);
  r.kkt = first_order_residuals(p, x, mu, omega);
  r.basis = null_space(critical_rows(p, x, r.sets), p.n());
  const LagrangianData d = eval_lagrangian_data(p, x, mu, omega);
  SymMatrix a = d.hess_l;
  a.add_scaled(1.0, sigma_term(p.cone(), d.g, d.dg, omega, r.sets.ib));
  const std::size_t k = r.basis.nullity();
  r.reduced = SymMatrix(k);
  if (k == 0) {
    r.pass = true;
    return r;
  }
  r.reduced.add_congruence(1.0, r.basis.basis, a);
  r.min_eig = min_eigenvalue(r.reduced);
  r.pass = *r.min_eig >= -tol;
  return r;
}

RobinsonReport robinson_measure(const Problem& p, std::span<const double> x, double set_tol) {
  (void)set_tol;
  RobinsonReport r;
  const Matrix dh = p.dh(x);
  if (p.p() > 0) {
    r.rank_dh = null_space(dh, p.n()).rank;
    r.dh_full_rank = r.rank_dh == p.p();
  }
  if (!r.dh_full_rank) return r;
  if (p.cone().blocks() == 0) {
    r.holds = true;
    return r;
  }
  const ConicFeasibility c = solve_conic_feasibility(p.cone(), p.g(x), p.dg(x), dh);
  r.t = c.t;
  r.d = c.d;
  r.holds = c.t > 0.0;
  return r;
}

WcrReport wcr_probe(const Problem& p, std::span<const double> x, double radius, int samples,
                    unsigned long long seed, double set_tol) {
  if (!(radius > 0.0)) throw std::invalid_argument("wcr_probe: radius must be positive");
  const IndexSets sets = index_sets(p, x, set_tol, set_tol);
  WcrReport r;
  r.rank_at_x = null_space(critical_rows(p, x, sets), p.n()).rank;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud;
  const double n = static_cast<double>(p.n());
  for (int s = 0; s < samples; ++s) {
    Vector dir(p.n());
    for (double& v : dir) v = nd(rng);
    const double len = norm2(dir);
    const double rad = radius * std::pow(ud(rng), 1.0 / n);
    Vector y(x.begin(), x.end());
    if (len > 0.0) axpy(rad / len, dir, y);
    const std::size_t rk = null_space(critical_rows(p, y, sets), p.n()).rank;
    r.sample_ranks.push_back(rk);
    r.constant_rank = r.constant_rank && rk == r.rank_at_x;
  }
  return r;
}

CertificateRow certify(const Problem& p, std::span<const double> x, std::span<const double> mu,
                       std::span<const double> omega, double rho, double extra_delta, double set_tol,
                       std::optional<std::span<const double>> set_point) {
  CertificateRow row;
  row.rho = rho;
  row.x.assign(x.begin(), x.end());
  row.mu.assign(mu.begin(), mu.end());
  row.omega.assign(omega.begin(), omega.end());
  const FirstOrderResiduals fo = first_order_residuals(p, x, mu, omega);
  row.stationarity = fo.stationarity;
  row.r_v = fo.feasibility;
  row.akkt_comp = fo.akkt_comp;
  row.cakkt_comp = fo.cakkt_comp;
  row.sets = index_sets(p, set_point ? *set_point : x, set_tol, set_tol, omega);
  row.akkt_mult = akkt_multiplier_measure(p.cone(), p.g(x), omega, row.sets);
  try {
    row.params = lemma13_params(p, x, rho, row.sets);
    row.params.delta += extra_delta;
    const SymMatrix a = akkt2_matrix(p, x, mu, omega, row.params, row.sets);
    row.min_eig = min_eigenvalue(a);
    row.so_residual = std::max(0.0, -row.min_eig);
    if (p.has_probe()) row.probe_curvature = a.quadratic_form(p.probe(x));
  } catch (const std::domain_error& e) {
    row.min_eig = kNaN;
    row.so_residual = kNaN;
    row.note = e.what();
  }
  return row;
}

double Akkt2Certificate::recompute_min_eig(const Problem& p, std::size_t r) const {
  const CertificateRow& row = rows_.at(r);
  return min_eigenvalue(akkt2_matrix(p, row.x, row.mu, row.omega, row.params, row.sets));
}

std::string Akkt2Certificate::to_json() const {
  using nlohmann::ordered_json;
  ordered_json arr = ordered_json::array();
  auto pairs = [](const std::vector<std::pair<std::size_t, double>>& v) {
    ordered_json a = ordered_json::array();
    for (const auto& [i, val] : v) a.push_back(ordered_json{{"block", i}, {"value", val}});
    return a;
  };
  for (const CertificateRow& r : rows_) {
    ordered_json j;
    j["k"] = r.k;
    j["rho"] = r.rho;
    j["x"] = r.x;
    j["mu"] = r.mu;
    j["omega"] = r.omega;
    j["stationarity"] = r.stationarity;
    j["r_V"] = r.r_v;
    j["akkt_comp"] = r.akkt_comp;
    j["cakkt_comp"] = r.cakkt_comp;
    j["akkt_mult"] = r.akkt_mult;
    j["min_eig"] = std::isfinite(r.min_eig) ? ordered_json(r.min_eig) : ordered_json(nullptr);
    j["so_residual"] = std::isfinite(r.so_residual) ? ordered_json(r.so_residual) : ordered_json(nullptr);
    j["probe_curvature"] = r.probe_curvature ? ordered_json(*r.probe_curvature) : ordered_json(nullptr);
    j["params"] = ordered_json{{"eta", r.params.eta},
                               {"theta", pairs(r.params.theta)},
                               {"gamma", pairs(r.params.gamma)},
                               {"phi", pairs(r.params.phi)},
                               {"delta", r.params.delta}};
    j["sets"] = ordered_json{{"I0", r.sets.i0}, {"IB", r.sets.ib}, {"II", r.sets.ii}};
    j["converged"] = r.converged;
    j["local_min"] = r.local_min ? ordered_json(*r.local_min) : ordered_json(nullptr);
    j["note"] = r.note;
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

double penalty_value(const Problem& p, std::span<const double> x, std::span<const double> center, double rho) {
  const Vector dx = sub(x, center);
  const double q = dot(dx, dx);
  const Vector pg = project_cone(p.cone(), scaled(-1.0, p.g(x)));
  const Vector h = p.h(x);
  return p.f(x) + 0.25 * q * q + 0.5 * rho * (dot(pg, pg) + dot(h, h));
}

Vector penalty_grad(const Problem& p, std::span<const double> x, std::span<const double> center, double rho) {
  const Vector dx = sub(x, center);
  const double q = dot(dx, dx);
  Vector out = p.grad_f(x);
  axpy(q, dx, out);
  const Vector h = p.h(x);
  if (!h.empty()) axpy(rho, p.dh(x).multiply_transpose(h), out);
  if (p.m()) {
    const Vector pg = project_cone(p.cone(), scaled(-1.0, p.g(x)));
    axpy(-rho, p.dg(x).multiply_transpose(pg), out);
  }
  return out;
}

SymMatrix penalty_hess(const Problem& p, std::span<const double> x, std::span<const double> center, double rho) {
  const Vector dx = sub(x, center);
  const Vector g = p.g(x);
  const Vector neg = scaled(-1.0, g);
  const Vector mu = scaled(rho, p.h(x));
  const Vector omega = scaled(rho, project_cone(p.cone(), neg));
  LagrangianData d = eval_lagrangian_data(p, x, mu, omega);
  SymMatrix out = d.hess_l;
  out.add_identity(dot(dx, dx));
  out.add_outer(2.0, dx);
  if (d.dh.rows()) out.add_gram(rho, d.dh);
  for (std::size_t i = 0; i < p.cone().blocks(); ++i)
    out.add_congruence(rho, block_rows(d.dg, p.cone(), i), bsub_element(p.cone().block(std::span<const double>(neg), i)));
  return out;
}

Akkt2Certificate penalty_path(const Problem& p, std::span<const double> hint, const PenaltyPathOptions& opt) {
  if (hint.size() != p.n()) throw std::invalid_argument("penalty_path: hint has wrong length");
  const double infeas = feasibility_residual(p, hint);
  if (!(infeas <= 1e-6))
    throw std::invalid_argument("penalty_path: hint is infeasible (r_V = " + std::to_string(infeas) + ")");
  const Vector center(hint.begin(), hint.end());
  Akkt2Certificate cert;
  Vector x = center;
  for (std::size_t k = 0; k < opt.rho.size(); ++k) {
    const double rho = opt.rho[k];
    SmoothObjective obj{
        [&](std::span<const double> y) { return penalty_value(p, y, center, rho); },
        [&](std::span<const double> y) { return penalty_grad(p, y, center, rho); },
        [&](std::span<const double> y) { return penalty_hess(p, y, center, rho); },
    };
    InnerOptions io;
    io.grad_tol = k < opt.inner_tol.size() ? opt.inner_tol[k] : std::max(1e-11, 1e-14 * rho);
    io.curv_tol = io.grad_tol;
    io.max_iter = opt.max_inner;
    const InnerResult res = opt.mode == PenaltyMode::Stationary ? stationary_newton(obj, x, io)
                                                                : trust_region_newton(obj, x, io);
    x = res.x;
    const Vector mu = scaled(rho, p.h(x));
    const Vector omega = scaled(rho, project_cone(p.cone(), scaled(-1.0, p.g(x))));
    const Vector dx = sub(x, center);
    CertificateRow row = certify(p, x, mu, omega, rho, 3.0 * dot(dx, dx), opt.set_tol, std::span<const double>(center));
    row.k = static_cast<int>(k) + 1;
    row.converged = res.converged;
    row.local_min = res.min_eig >= -1e-8;
    if (!res.converged) row.note = row.note.empty() ? res.message : row.note + "; " + res.message;
    cert.append(std::move(row));
  }
  return cert;
}

}  // namespace socp
