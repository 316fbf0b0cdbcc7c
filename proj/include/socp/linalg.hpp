#pragma once

// Dense linear algebra for desk-scale problems: vectors, row-major matrices,
// symmetric matrices, Jacobi eigendecomposition, pivoted QR null spaces and
// Cholesky solves.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace socp {

using Vector = std::vector<double>;

/// Raised by solve_spd / cholesky when a pivot is not positive.
class NotPositiveDefinite : public std::runtime_error {
 public:
  explicit NotPositiveDefinite(const std::string& what) : std::runtime_error(what) {}
};

// ---- vector helpers --------------------------------------------------------

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
Vector scaled(double alpha, std::span<const double> x);
Vector add(std::span<const double> a, std::span<const double> b);
Vector sub(std::span<const double> a, std::span<const double> b);
bool all_finite(std::span<const double> a);

// ---- general dense matrix --------------------------------------------------

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix from_rows(const std::vector<Vector>& rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  Vector col(std::size_t j) const;

  const Vector& data() const { return data_; }

  Matrix transpose() const;
  /// Rows [first, first + count).
  Matrix row_block(std::size_t first, std::size_t count) const;
  void append_row(std::span<const double> r);

  Vector multiply(std::span<const double> x) const;            // A x
  Vector multiply_transpose(std::span<const double> y) const;  // A^T y
  Matrix multiply(const Matrix& b) const;

  double frobenius_norm() const;
  double max_abs() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vector data_;
};

// ---- symmetric matrix ------------------------------------------------------

/// Symmetric n x n matrix. Storage is full, but every mutator writes both
/// (i,j) and (j,i), so entries(i,j) == entries(j,i) holds bit-for-bit.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  static SymMatrix identity(std::size_t n);
  static SymMatrix diagonal(std::span<const double> d);
  /// Symmetrizes (A + A^T)/2; A must be square.
  static SymMatrix from_matrix(const Matrix& a);
  /// Builds from a row-major nested list; throws unless exactly symmetric.
  static SymMatrix from_rows(const std::vector<Vector>& rows);

  std::size_t order() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  void set(std::size_t i, std::size_t j, double v) {
    data_[i * n_ + j] = v;
    data_[j * n_ + i] = v;
  }
  void add_to(std::size_t i, std::size_t j, double v) {
    data_[i * n_ + j] += v;
    if (i != j) data_[j * n_ + i] += v;
  }

  /// this += alpha * v v^T
  void add_outer(double alpha, std::span<const double> v);
  /// this += alpha * A^T S A   (A is k x n, S is k x k symmetric)
  void add_congruence(double alpha, const Matrix& a, const SymMatrix& s);
  /// this += alpha * A^T A
  void add_gram(double alpha, const Matrix& a);
  /// this += alpha * other
  void add_scaled(double alpha, const SymMatrix& other);
  void add_identity(double alpha);

  Vector multiply(std::span<const double> x) const;
  double quadratic_form(std::span<const double> x) const;
  Matrix to_matrix() const;
  const Vector& data() const { return data_; }

  double frobenius_norm() const;
  double max_abs() const;

 private:
  std::size_t n_ = 0;
  Vector data_;
};

// ---- decompositions --------------------------------------------------------

struct EigenResult {
  Vector values;   ///< ascending
  Matrix vectors;  ///< column j is the unit eigenvector of values[j]
};

/// Cyclic Jacobi eigendecomposition. Throws std::invalid_argument on
/// non-finite input.
EigenResult sym_eigen(const SymMatrix& a);
double min_eigenvalue(const SymMatrix& a);
double max_eigenvalue(const SymMatrix& a);

struct NullSpaceBasis {
  std::size_t dimension = 0;  ///< ambient n
  Matrix basis;               ///< n x nullity, orthonormal columns
  std::size_t rank = 0;
  double tol_used = 0.0;      ///< absolute threshold applied to |R_kk|

  std::size_t nullity() const { return basis.cols(); }
};

/// Orthonormal basis of ker(rows) for a k x n stacked row matrix, via
/// Householder QR with column pivoting of rows^T. Pivots with
/// |R_kk| <= rel_tol * (max row norm) count as zero.
NullSpaceBasis null_space(const Matrix& rows, std::size_t n, double rel_tol = 1e-8);

/// Lower Cholesky factor L with A = L L^T. Throws NotPositiveDefinite.
Matrix cholesky(const SymMatrix& a);
Vector cholesky_solve(const Matrix& l, std::span<const double> b);
Vector solve_spd(const SymMatrix& a, std::span<const double> b);

}  // namespace socp
