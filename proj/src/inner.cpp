#include "socp/inner.hpp"

#include <algorithm>
#include <cmath>

namespace socp {

namespace {

double step_norm(std::span<const double> gt, std::span<const double> lam, double sigma) {
  double s = 0.0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const double d = gt[i] / (lam[i] + sigma);
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

TrustRegionStep trust_region_step(const EigenResult& eig, std::span<const double> g, double radius) {
  const std::size_t n = g.size();
  const Vector& lam = eig.values;
  const Vector gt = eig.vectors.multiply_transpose(g);
  const double gnorm = norm2(g);
  const double scale = std::max({1.0, std::abs(lam.front()), std::abs(lam.back())});
  const double lam1 = lam.front();

  Vector st(n, 0.0);
  bool hard = false;

  auto try_sigma = [&](double sigma) {
    for (std::size_t i = 0; i < n; ++i) st[i] = -gt[i] / (lam[i] + sigma);
  };

  bool done = false;
  if (lam1 > 0.0 && step_norm(gt, lam, 0.0) <= radius) {
    try_sigma(0.0);
    done = true;
  }
  if (!done) {
    const double lo = std::max(0.0, -lam1);
    const double eig_tol = 1e-12 * scale;
    double g_e = 0.0, rest = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (lam[i] - lam1 <= eig_tol) {
        g_e += gt[i] * gt[i];
      } else {
        const double d = gt[i] / (lam[i] + lo);
        rest += d * d;
      }
    }
    if (std::sqrt(g_e) <= 1e-12 * std::max(1.0, gnorm) && std::sqrt(rest) <= radius) {
      hard = true;
      for (std::size_t i = 0; i < n; ++i) st[i] = lam[i] - lam1 <= eig_tol ? 0.0 : -gt[i] / (lam[i] + lo);
      const double tau = std::sqrt(std::max(0.0, radius * radius - rest));
      st[0] = gt[0] > 0.0 ? -tau : tau;
    } else {
      double a = lo;
      double b = lo + gnorm / radius + 1.0;
      while (step_norm(gt, lam, b) > radius) b = lo + 2.0 * (b - lo);
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        if (step_norm(gt, lam, mid) > radius) a = mid;
        else b = mid;
      }
      try_sigma(b);
    }
  }

  TrustRegionStep out;
  out.hard_case = hard;
  out.step = eig.vectors.multiply(st);
  double model = 0.0;
  for (std::size_t i = 0; i < n; ++i) model += gt[i] * st[i] + 0.5 * lam[i] * st[i] * st[i];
  out.predicted = -model;
  return out;
}

InnerResult trust_region_newton(const SmoothObjective& obj, std::span<const double> x0,
                                const InnerOptions& opt) {
  InnerResult res;
  res.x.assign(x0.begin(), x0.end());
  double fx = obj.value(res.x);
  if (!std::isfinite(fx)) {
    res.message = "non-finite objective at start";
    return res;
  }
  Vector g = obj.grad(res.x);
  EigenResult eig = sym_eigen(obj.hess(res.x));
  double radius = opt.initial_radius;

  for (res.iterations = 0;; ++res.iterations) {
    res.grad_norm = norm2(g);
    res.min_eig = eig.values.empty() ? 0.0 : eig.values.front();
    if (res.grad_norm <= opt.grad_tol && res.min_eig >= -opt.curv_tol) {
      res.converged = true;
      res.message = "converged";
      return res;
    }
    if (res.iterations >= opt.max_iter) {
      res.message = "iteration cap";
      return res;
    }
    if (radius < 1e-15 * std::max(1.0, norm2(res.x))) {
      res.message = "trust region collapsed";
      return res;
    }

    const TrustRegionStep st = trust_region_step(eig, g, radius);
    const double snorm = norm2(st.step);
    const Vector xt = add(res.x, st.step);
    const double ft = obj.value(xt);
    if (!std::isfinite(ft)) {
      radius = 0.25 * snorm;
      continue;
    }
    const double actual = fx - ft;
    const double noise = 1e-15 * std::max(1.0, std::abs(fx));
    double ratio;
    if (st.predicted <= noise && std::abs(actual) <= noise) ratio = 1.0;
    else if (st.predicted <= 0.0) ratio = -1.0;
    else ratio = actual / st.predicted;

    if (ratio < 0.25) radius = 0.25 * snorm;
    else if (ratio > 0.75 && snorm >= 0.99 * radius) radius = std::min(2.0 * radius, opt.max_radius);

    if (ratio >= 1e-4) {
      res.x = xt;
      fx = ft;
      g = obj.grad(res.x);
      eig = sym_eigen(obj.hess(res.x));
    }
  }
}

InnerResult stationary_newton(const SmoothObjective& obj, std::span<const double> x0,
                              const InnerOptions& opt) {
  InnerResult res;
  res.x.assign(x0.begin(), x0.end());
  Vector g = obj.grad(res.x);
  if (!all_finite(g)) {
    res.message = "non-finite gradient at start";
    return res;
  }

  auto finish = [&](bool ok, const char* msg) {
    res.converged = ok;
    res.message = msg;
    res.grad_norm = norm2(g);
    res.min_eig = min_eigenvalue(obj.hess(res.x));
    return res;
  };

  for (res.iterations = 0;; ++res.iterations) {
    const double r = norm2(g);
    if (r <= opt.grad_tol) return finish(true, "converged");
    if (res.iterations >= opt.max_iter) return finish(false, "iteration cap");

    const SymMatrix hm = obj.hess(res.x);
    const EigenResult eig = sym_eigen(hm);
    const double big = std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
    const Vector gt = eig.vectors.multiply_transpose(g);
    Vector dt(gt.size(), 0.0);
    for (std::size_t i = 0; i < gt.size(); ++i)
      if (std::abs(eig.values[i]) > 1e-12 * big) dt[i] = -gt[i] / eig.values[i];
    const Vector newton = eig.vectors.multiply(dt);
    const Vector descent = scaled(-1.0, hm.multiply(g));

    bool moved = false;
    for (const Vector* dir : {&newton, &descent}) {
      if (norm2(*dir) == 0.0) continue;
      for (double alpha = 1.0; alpha > 1e-10; alpha *= 0.5) {
        Vector xt = res.x;
        axpy(alpha, *dir, xt);
        Vector gt2 = obj.grad(xt);
        if (all_finite(gt2) && norm2(gt2) <= (1.0 - 1e-4 * alpha) * r) {
          res.x = std::move(xt);
          g = std::move(gt2);
          moved = true;
          break;
        }
      }
      if (moved) break;
    }
    if (!moved) return finish(false, "line search failed");
  }
}

}  // namespace socp
