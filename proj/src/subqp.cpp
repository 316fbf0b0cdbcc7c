#include "socp/subqp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace socp {

std::string to_string(SubQpStatus s) {
  return s == SubQpStatus::Converged ? "Converged" : "NonConvergence";
}

namespace {

struct Barrier {
  double value = 0.0;
  Vector grad;     // m
  SymMatrix hess;  // m x m, block diagonal
  bool feasible = true;
};

Barrier barrier(const ConeProduct& cone, std::span<const double> s, bool with_hess) {
  Barrier b;
  b.grad.assign(s.size(), 0.0);
  if (with_hess) b.hess = SymMatrix(s.size());
  for (std::size_t i = 0; i < cone.blocks(); ++i) {
    const auto si = cone.block(s, i);
    const std::size_t o = cone.offset(i);
    if (si.size() == 1) {
      if (!(si[0] > 0.0)) {
        b.feasible = false;
        return b;
      }
      b.value -= std::log(si[0]);
      b.grad[o] = -1.0 / si[0];
      if (with_hess) b.hess.set(o, o, 1.0 / (si[0] * si[0]));
      continue;
    }
    const double e1 = eta_min(si);
    const double e2 = eta_max(si);
    if (!(e1 > 0.0)) {
      b.feasible = false;
      return b;
    }
    const double det = e1 * e2;
    b.value -= std::log(e1) + std::log(e2);
    Vector gs(si.begin(), si.end());
    for (std::size_t j = 1; j < gs.size(); ++j) gs[j] = -gs[j];
    for (std::size_t j = 0; j < gs.size(); ++j) b.grad[o + j] = -2.0 * gs[j] / det;
    if (with_hess) {
      for (std::size_t j = 0; j < gs.size(); ++j) {
        for (std::size_t l = j; l < gs.size(); ++l) {
          double v = 4.0 * gs[j] * gs[l] / (det * det);
          if (j == l) v += (j == 0 ? -2.0 : 2.0) / det;
          b.hess.set(o + j, o + l, v);
        }
      }
    }
  }
  return b;
}

Vector slack(const SubQp& q, std::span<const double> xi, std::span<const double> chi) {
  Vector s = q.A.rows() ? q.A.multiply(xi) : Vector(q.t.size(), 0.0);
  for (std::size_t j = 0; j < s.size(); ++j) s[j] += q.rho * (chi[j] - q.t[j]);
  return s;
}

double objective(const SubQp& q, std::span<const double> xi, std::span<const double> chi) {
  return dot(q.c, xi) + 0.5 * q.M.quadratic_form(xi) + 0.5 * q.rho * dot(chi, chi);
}

}  // namespace

double subqp_kkt_residual(const SubQp& q, std::span<const double> xi, std::span<const double> chi,
                          std::span<const double> lambda) {
  Vector st = q.M.multiply(xi);
  for (std::size_t j = 0; j < st.size(); ++j) st[j] += q.c[j];
  if (q.A.rows()) axpy(-1.0, q.A.multiply_transpose(lambda), st);
  double r = norm_inf(st);
  Vector pc = sub(chi, lambda);
  r = std::max(r, q.rho * norm_inf(pc));
  const Vector s = slack(q, xi, chi);
  for (std::size_t i = 0; i < q.cone.blocks(); ++i) {
    const auto si = q.cone.block(std::span<const double>(s), i);
    const auto li = q.cone.block(lambda, i);
    r = std::max({r, -eta_min(si), -eta_min(li), std::abs(dot(si, li))});
  }
  return r;
}

SubQpSolution solve_subqp(const SubQp& q, double tol, int cap) {
  const std::size_t n = q.c.size();
  const std::size_t m = q.cone.total();
  if (q.M.order() != n) throw SubQpError("solve_subqp: M has wrong order");
  if (q.t.size() != m) throw SubQpError("solve_subqp: t has wrong length");
  if (m > 0 && (q.A.rows() != m || q.A.cols() != n)) throw SubQpError("solve_subqp: A has wrong shape");
  if (!(q.rho > 0.0)) throw SubQpError("solve_subqp: rho must be positive");
  if (n > 0) {
    try {
      cholesky(q.M);
    } catch (const NotPositiveDefinite&) {
      throw SubQpError("solve_subqp: M is not positive definite");
    }
  }

  const std::size_t nz = n + m;
  Matrix G(m, nz);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t j = 0; j < n; ++j) G(r, j) = q.A(r, j);
    G(r, n + r) = q.rho;
  }

  Vector z(nz, 0.0);
  for (std::size_t j = 0; j < m; ++j) z[n + j] = q.t[j];
  for (std::size_t i = 0; i < q.cone.blocks(); ++i) z[n + q.cone.offset(i)] += 1.0;

  auto split = [&](std::span<const double> v) {
    return std::pair{v.subspan(0, n), v.subspan(n, m)};
  };

  auto merit = [&](std::span<const double> zz, double mu) {
    const auto [xi, chi] = split(zz);
    const Barrier b = barrier(q.cone, slack(q, xi, chi), false);
    if (!b.feasible) return std::numeric_limits<double>::infinity();
    return objective(q, xi, chi) / mu + b.value;
  };

  SubQpSolution sol;
  double best = std::numeric_limits<double>::infinity();
  Vector best_z = z;
  double mu = std::max(1.0, norm_inf(q.c) + q.rho * norm_inf(q.t));
  int newton = 0;

  for (;;) {
    // centering at the current mu
    for (int inner = 0; inner < 50 && newton < cap; ++inner, ++newton) {
      const auto [xi, chi] = split(z);
      const Barrier b = barrier(q.cone, slack(q, xi, chi), true);
      Vector grad(nz, 0.0);
      const Vector mx = q.M.multiply(xi);
      for (std::size_t j = 0; j < n; ++j) grad[j] = (q.c[j] + mx[j]) / mu;
      for (std::size_t j = 0; j < m; ++j) grad[n + j] = q.rho * chi[j] / mu;
      if (m) axpy(1.0, G.multiply_transpose(b.grad), grad);

      SymMatrix hm(nz);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) hm.set(i, j, q.M(i, j) / mu);
      for (std::size_t j = 0; j < m; ++j) hm.add_to(n + j, n + j, q.rho / mu);
      if (m) hm.add_congruence(1.0, G, b.hess);

      Vector dz;
      try {
        dz = solve_spd(hm, grad);
      } catch (const NotPositiveDefinite&) {
        hm.add_identity(1e-12 * std::max(1.0, hm.max_abs()));
        try {
          dz = solve_spd(hm, grad);
        } catch (const NotPositiveDefinite&) {
          break;
        }
      }
      const double dec = std::sqrt(std::max(0.0, dot(grad, dz)));
      if (!std::isfinite(dec)) break;
      if (dec <= 1e-9) break;

      const double f0 = merit(z, mu);
      double alpha = dec > 0.25 ? 1.0 / (1.0 + dec) : 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
        Vector zt = z;
        axpy(-alpha, dz, zt);
        const double ft = merit(zt, mu);
        if (std::isfinite(ft) && ft <= f0 + 1e-12 * std::max(1.0, std::abs(f0))) {
          z = std::move(zt);
          moved = true;
          break;
        }
      }
      if (!moved || dec <= 1e-3) break;
    }

    const auto [xi, chi] = split(z);
    const double r = subqp_kkt_residual(q, xi, chi, chi);
    if (r < best) {
      best = r;
      best_z = z;
    }
    if (r <= tol) break;
    if (newton >= cap || mu < 1e-20) break;
    mu *= 0.2;
  }

  const auto [xi, chi] = split(best_z);
  sol.xi.assign(xi.begin(), xi.end());
  sol.chi.assign(chi.begin(), chi.end());
  sol.lambda = sol.chi;
  sol.kkt_residual = best;
  sol.iterations = newton;
  sol.status = best <= tol ? SubQpStatus::Converged : SubQpStatus::NonConvergence;
  return sol;
}

namespace {

double lift_value(const ConeProduct& cone, std::span<const double> g, const Matrix& G,
                  std::span<const double> d) {
  Vector y(g.begin(), g.end());
  if (G.rows()) axpy(1.0, G.multiply(d), y);
  double v = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cone.blocks(); ++i) v = std::min(v, eta_min(cone.block(std::span<const double>(y), i)));
  return v;
}

}  // namespace

ConicFeasibility solve_conic_feasibility(const ConeProduct& cone, std::span<const double> g,
                                         const Matrix& G, const Matrix& E, double tol) {
  const std::size_t n = G.cols() ? G.cols() : E.cols();
  if (g.size() != cone.total() || (cone.total() && G.rows() != cone.total()))
    throw SubQpError("solve_conic_feasibility: shape mismatch");

  ConicFeasibility out;
  out.d.assign(n, 0.0);
  out.t = lift_value(cone, g, G, out.d);
  if (cone.blocks() == 0 || n == 0) return out;

  Matrix Z;
  if (E.rows()) {
    Z = null_space(E, n).basis;
  } else {
    Z = Matrix::identity(n);
  }
  const std::size_t k = Z.cols();
  if (k == 0) return out;

  const Matrix GZ = G.multiply(Z);
  double lo = out.t;
  double hi = lo + std::sqrt(2.0) * GZ.frobenius_norm() * std::sqrt(static_cast<double>(n)) + 1e-12;

  std::vector<std::size_t> dims = cone.dims();
  for (std::size_t j = 0; j < 2 * n; ++j) dims.push_back(1);
  const ConeProduct ext(dims);

  SubQp q;
  q.c.assign(k, 0.0);
  q.M = SymMatrix::identity(k);
  for (std::size_t j = 0; j < k; ++j) q.M.set(j, j, 1e-10);
  q.rho = 1.0;
  q.A = Matrix(ext.total(), k);
  for (std::size_t r = 0; r < GZ.rows(); ++r)
    for (std::size_t j = 0; j < k; ++j) q.A(r, j) = GZ(r, j);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < k; ++j) {
      q.A(cone.total() + r, j) = -Z(r, j);
      q.A(cone.total() + n + r, j) = Z(r, j);
    }
  }
  q.cone = ext;

  for (int it = 0; it < 100 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    q.t.assign(ext.total(), -1.0);
    for (std::size_t j = 0; j < cone.total(); ++j) q.t[j] = -g[j];
    for (std::size_t i = 0; i < cone.blocks(); ++i) q.t[cone.offset(i)] += mid;
    const SubQpSolution s = solve_subqp(q, 1e-11, 500);
    ++out.subproblems;
    Vector d = Z.multiply(s.xi);
    const double over = norm_inf(d);
    if (over > 1.0) d = scaled(1.0 / over, d);
    const double val = lift_value(cone, g, G, d);
    if (val > lo) {
      lo = val;
      out.t = val;
      out.d = d;
    }
    if (!(val >= mid - 1e-8)) hi = mid;
  }
  return out;
}

}  // namespace socp
