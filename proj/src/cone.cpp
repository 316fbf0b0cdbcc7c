#include "socp/cone.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace socp {

ConeProduct::ConeProduct(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  offsets_.reserve(dims_.size());
  for (std::size_t d : dims_) {
    if (d == 0) throw std::invalid_argument("ConeProduct: block dimension must be >= 1");
    offsets_.push_back(total_);
    total_ += d;
  }
}

BlockVector::BlockVector(ConeProduct cone, Vector values)
    : cone_(std::move(cone)), values_(std::move(values)) {
  if (values_.size() != cone_.total())
    throw std::invalid_argument("BlockVector: length " + std::to_string(values_.size()) +
                                " does not match cone total " + std::to_string(cone_.total()));
}

BlockVector::BlockVector(ConeProduct cone) : cone_(std::move(cone)), values_(cone_.total(), 0.0) {}

std::string to_string(ConeRegion r) {
  switch (r) {
    case ConeRegion::InteriorK: return "InteriorK";
    case ConeRegion::BoundaryPlusK: return "BoundaryPlusK";
    case ConeRegion::InteriorNegK: return "InteriorNegK";
    case ConeRegion::BoundaryPlusNegK: return "BoundaryPlusNegK";
    case ConeRegion::Outside: return "Outside";
    case ConeRegion::Zero: return "Zero";
  }
  return "?";
}

SpectralDecomposition spectral_decompose(std::span<const double> z,
                                         std::optional<std::span<const double>> tie_dir) {
  const std::size_t m = z.size();
  if (m < 2) throw std::invalid_argument("spectral_decompose: block dimension must be >= 2");
  const auto tail = z.subspan(1);
  const double nt = norm2(tail);

  SpectralDecomposition s;
  s.eta1 = z[0] - nt;
  s.eta2 = z[0] + nt;
  s.u1.assign(m, 0.5);
  s.u2.assign(m, 0.5);
  if (nt > 0.0) {
    for (std::size_t j = 1; j < m; ++j) {
      s.u1[j] = -0.5 * tail[j - 1] / nt;
      s.u2[j] = 0.5 * tail[j - 1] / nt;
    }
  } else {
    s.degenerate_tail = true;
    if (tie_dir) {
      if (tie_dir->size() != m - 1 || std::abs(norm2(*tie_dir) - 1.0) > 1e-10)
        throw std::invalid_argument("spectral_decompose: tie_dir must be a unit vector of length m-1");
      for (std::size_t j = 1; j < m; ++j) {
        s.u1[j] = -0.5 * (*tie_dir)[j - 1];
        s.u2[j] = 0.5 * (*tie_dir)[j - 1];
      }
    } else {
      s.u1[1] = -0.5;
      s.u2[1] = 0.5;
      for (std::size_t j = 2; j < m; ++j) s.u1[j] = s.u2[j] = 0.0;
    }
  }
  return s;
}

double eta_min(std::span<const double> z) {
  if (z.size() == 1) return z[0];
  return z[0] - norm2(z.subspan(1));
}

double eta_max(std::span<const double> z) {
  if (z.size() == 1) return z[0];
  return z[0] + norm2(z.subspan(1));
}

Vector project_block(std::span<const double> z) {
  if (z.size() == 1) return {std::max(0.0, z[0])};
  const SpectralDecomposition s = spectral_decompose(z);
  const double a = std::max(0.0, s.eta1);
  const double b = std::max(0.0, s.eta2);
  Vector p(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) p[j] = a * s.u1[j] + b * s.u2[j];
  return p;
}

Vector project_cone(const ConeProduct& cone, std::span<const double> z) {
  if (z.size() != cone.total()) throw std::invalid_argument("project_cone: length mismatch");
  Vector out(z.size());
  for (std::size_t i = 0; i < cone.blocks(); ++i) {
    const Vector p = project_block(cone.block(z, i));
    std::copy(p.begin(), p.end(), out.begin() + static_cast<std::ptrdiff_t>(cone.offset(i)));
  }
  return out;
}

BlockVector project_cone(const BlockVector& z) {
  return BlockVector(z.cone(), project_cone(z.cone(), z.values()));
}

bool in_cone(const ConeProduct& cone, std::span<const double> z, double tol) {
  for (std::size_t i = 0; i < cone.blocks(); ++i)
    if (!(eta_min(cone.block(z, i)) >= -tol)) return false;
  return true;
}

Vector jordan_product(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty())
    throw std::invalid_argument("jordan_product: blocks must have equal nonzero length");
  Vector r(x.size());
  r[0] = dot(x, y);
  for (std::size_t j = 1; j < x.size(); ++j) r[j] = x[0] * y[j] + y[0] * x[j];
  return r;
}

SymMatrix gamma_matrix(std::size_t m) {
  if (m == 0) throw std::invalid_argument("gamma_matrix: m must be >= 1");
  SymMatrix g(m);
  g.set(0, 0, 1.0);
  for (std::size_t j = 1; j < m; ++j) g.set(j, j, -1.0);
  return g;
}

Vector tilde_g(std::span<const double> v) {
  Vector out(v.begin(), v.end());
  if (!out.empty()) out[0] = norm2(v.subspan(1));
  return out;
}

SymMatrix m_matrix(double xi, std::span<const double> w) {
  if (std::abs(norm2(w) - 1.0) > 1e-10)
    throw std::invalid_argument("m_matrix: w must have unit norm");
  const std::size_t m = w.size() + 1;
  SymMatrix out(m);
  out.set(0, 0, 0.5);
  for (std::size_t j = 0; j < w.size(); ++j) {
    out.set(0, j + 1, 0.5 * w[j]);
    for (std::size_t k = j; k < w.size(); ++k) {
      double v = -xi * w[j] * w[k];
      if (j == k) v += 1.0 + xi;
      out.set(j + 1, k + 1, 0.5 * v);
    }
  }
  return out;
}

ConeRegion classify(std::span<const double> z, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("classify: tol must be positive");
  if (norm2(z) <= tol) return ConeRegion::Zero;
  if (z.size() == 1) return z[0] > 0.0 ? ConeRegion::InteriorK : ConeRegion::InteriorNegK;
  const double e1 = eta_min(z);
  const double e2 = eta_max(z);
  if (e1 > tol) return ConeRegion::InteriorK;
  if (std::abs(e1) <= tol && e2 > tol) return ConeRegion::BoundaryPlusK;
  if (e2 < -tol) return ConeRegion::InteriorNegK;
  if (std::abs(e2) <= tol && -e1 > tol) return ConeRegion::BoundaryPlusNegK;
  return ConeRegion::Outside;
}

SymMatrix bsub_element(std::span<const double> z, double tol) {
  const std::size_t m = z.size();
  switch (classify(z, tol)) {
    case ConeRegion::InteriorNegK:
      return SymMatrix(m);
    case ConeRegion::InteriorK:
    case ConeRegion::BoundaryPlusK:
    case ConeRegion::Zero:
      return SymMatrix::identity(m);
    case ConeRegion::BoundaryPlusNegK:
    case ConeRegion::Outside: {
      const auto tail = z.subspan(1);
      const double nt = norm2(tail);
      Vector w(tail.begin(), tail.end());
      for (double& v : w) v /= nt;
      const double xi = std::clamp(z[0] / nt, -1.0, 1.0);
      return m_matrix(xi, w);
    }
  }
  return SymMatrix::identity(m);
}

}  // namespace socp
