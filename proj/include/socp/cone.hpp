#pragma once

// Second-order cone geometry: spectral decomposition, projection, Jordan
// product, Gamma reflection, M(xi, w), region classification and a fixed
// B-subdifferential selection.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "socp/linalg.hpp"

namespace socp {

/// K = K_1 x ... x K_r with block dimensions m_i >= 1. r = 0 is allowed and
/// stands for "no conic constraints".
class ConeProduct {
 public:
  ConeProduct() = default;
  explicit ConeProduct(std::vector<std::size_t> dims);

  std::size_t blocks() const { return dims_.size(); }
  std::size_t dim(std::size_t i) const { return dims_[i]; }
  std::size_t offset(std::size_t i) const { return offsets_[i]; }
  std::size_t total() const { return total_; }
  const std::vector<std::size_t>& dims() const { return dims_; }

  std::span<const double> block(std::span<const double> v, std::size_t i) const {
    return v.subspan(offsets_[i], dims_[i]);
  }
  std::span<double> block(std::span<double> v, std::size_t i) const {
    return v.subspan(offsets_[i], dims_[i]);
  }

  bool operator==(const ConeProduct&) const = default;

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::size_t> offsets_;
  std::size_t total_ = 0;
};

/// Flat vector partitioned by a ConeProduct.
class BlockVector {
 public:
  BlockVector() = default;
  BlockVector(ConeProduct cone, Vector values);
  explicit BlockVector(ConeProduct cone);

  const ConeProduct& cone() const { return cone_; }
  const Vector& values() const { return values_; }
  Vector& values() { return values_; }

  std::span<const double> block(std::size_t i) const { return cone_.block(values_, i); }
  std::span<double> block(std::size_t i) { return cone_.block(std::span<double>(values_), i); }
  double head(std::size_t i) const { return values_[cone_.offset(i)]; }
  std::span<const double> tail(std::size_t i) const { return block(i).subspan(1); }

 private:
  ConeProduct cone_;
  Vector values_;
};

struct SpectralDecomposition {
  double eta1 = 0.0;
  double eta2 = 0.0;
  Vector u1;
  Vector u2;
  bool degenerate_tail = false;
};

enum class ConeRegion { InteriorK, BoundaryPlusK, InteriorNegK, BoundaryPlusNegK, Outside, Zero };

std::string to_string(ConeRegion r);

/// Throws std::invalid_argument when z.size() < 2. tie_dir must have length
/// m - 1 and unit norm when supplied.
SpectralDecomposition spectral_decompose(std::span<const double> z,
                                         std::optional<std::span<const double>> tie_dir = {});

/// eta1 = z0 - |zbar| (or z itself for m = 1).
double eta_min(std::span<const double> z);
double eta_max(std::span<const double> z);

Vector project_block(std::span<const double> z);
Vector project_cone(const ConeProduct& cone, std::span<const double> z);
BlockVector project_cone(const BlockVector& z);

/// True iff every block has eta_min >= -tol.
bool in_cone(const ConeProduct& cone, std::span<const double> z, double tol = 1e-9);

Vector jordan_product(std::span<const double> x, std::span<const double> y);
SymMatrix gamma_matrix(std::size_t m);
Vector tilde_g(std::span<const double> v);

/// 1/2 [[1, w^T], [w, (1+xi) I - xi w w^T]]. Throws unless |w| = 1 within 1e-10.
SymMatrix m_matrix(double xi, std::span<const double> w);

inline constexpr double kDefaultConeTol = 1e-10;

ConeRegion classify(std::span<const double> z, double tol = kDefaultConeTol);

/// One element of the B-subdifferential of the block projection at z.
SymMatrix bsub_element(std::span<const double> z, double tol = kDefaultConeTol);

}  // namespace socp
