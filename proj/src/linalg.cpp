#include "socp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace socp {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) {
  // Scaled accumulation keeps tiny/huge entries from under/overflowing.
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double s = 0.0;
  for (double v : a) {
    const double r = v / scale;
    s += r * r;
  }
  return scale * std::sqrt(s);
}

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Vector scaled(double alpha, std::span<const double> x) {
  Vector out(x.begin(), x.end());
  for (double& v : out) v *= alpha;
  return out;
}

Vector add(std::span<const double> a, std::span<const double> b) {
  Vector out(a.begin(), a.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

Vector sub(std::span<const double> a, std::span<const double> b) {
  Vector out(a.begin(), a.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

bool all_finite(std::span<const double> a) {
  return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

// ---- Matrix ----------------------------------------------------------------

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(const std::vector<Vector>& rows, std::size_t cols) {
  Matrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw std::invalid_argument("Matrix::from_rows: ragged rows");
    std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  }
  return m;
}

Vector Matrix::col(std::size_t j) const {
  Vector c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::row_block(std::size_t first, std::size_t count) const {
  Matrix b(count, cols_);
  std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(first * cols_), count * cols_,
              b.data_.begin());
  return b;
}

void Matrix::append_row(std::span<const double> r) {
  if (rows_ == 0 && cols_ == 0) cols_ = r.size();
  if (r.size() != cols_) throw std::invalid_argument("Matrix::append_row: width mismatch");
  data_.insert(data_.end(), r.begin(), r.end());
  ++rows_;
}

Vector Matrix::multiply(std::span<const double> x) const {
  Vector y(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) y[i] = dot(row(i), x);
  return y;
}

Vector Matrix::multiply_transpose(std::span<const double> y) const {
  Vector x(cols_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) axpy(y[i], row(i), x);
  return x;
}

Matrix Matrix::multiply(const Matrix& b) const {
  Matrix c(rows_, b.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const double a = (*this)(i, k);
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += a * b(k, j);
    }
  return c;
}

double Matrix::frobenius_norm() const { return norm2(data_); }
double Matrix::max_abs() const { return norm_inf(data_); }

// ---- SymMatrix -------------------------------------------------------------

SymMatrix SymMatrix::identity(std::size_t n) {
  SymMatrix s(n);
  for (std::size_t i = 0; i < n; ++i) s.set(i, i, 1.0);
  return s;
}

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
  SymMatrix s(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) s.set(i, i, d[i]);
  return s;
}

SymMatrix SymMatrix::from_matrix(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("SymMatrix::from_matrix: not square");
  SymMatrix s(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i; j < a.cols(); ++j) s.set(i, j, 0.5 * (a(i, j) + a(j, i)));
  return s;
}

SymMatrix SymMatrix::from_rows(const std::vector<Vector>& rows) {
  const std::size_t n = rows.size();
  SymMatrix s(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) throw std::invalid_argument("SymMatrix::from_rows: not square");
    for (std::size_t j = 0; j < n; ++j)
      if (rows[i][j] != rows[j][i]) throw std::invalid_argument("SymMatrix::from_rows: not symmetric");
    for (std::size_t j = i; j < n; ++j) s.set(i, j, rows[i][j]);
  }
  return s;
}

void SymMatrix::add_outer(double alpha, std::span<const double> v) {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i; j < n_; ++j) add_to(i, j, alpha * v[i] * v[j]);
}

void SymMatrix::add_congruence(double alpha, const Matrix& a, const SymMatrix& s) {
  // (S A) is k x n; then accumulate A^T (S A) on the upper triangle.
  const std::size_t k = a.rows();
  Matrix sa(k, n_);
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t q = 0; q < k; ++q) {
      const double w = s(r, q);
      if (w == 0.0) continue;
      axpy(w, a.row(q), sa.row(r));
    }
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i; j < n_; ++j) {
      double acc = 0.0;
      for (std::size_t r = 0; r < k; ++r) acc += a(r, i) * sa(r, j);
      add_to(i, j, alpha * acc);
    }
}

void SymMatrix::add_gram(double alpha, const Matrix& a) {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i; j < n_; ++j) {
      double acc = 0.0;
      for (std::size_t r = 0; r < a.rows(); ++r) acc += a(r, i) * a(r, j);
      add_to(i, j, alpha * acc);
    }
}

void SymMatrix::add_scaled(double alpha, const SymMatrix& other) {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i; j < n_; ++j) add_to(i, j, alpha * other(i, j));
}

void SymMatrix::add_identity(double alpha) {
  for (std::size_t i = 0; i < n_; ++i) add_to(i, i, alpha);
}

Vector SymMatrix::multiply(std::span<const double> x) const {
  Vector y(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) y[i] = dot({data_.data() + i * n_, n_}, x);
  return y;
}

double SymMatrix::quadratic_form(std::span<const double> x) const { return dot(x, multiply(x)); }

Matrix SymMatrix::to_matrix() const {
  Matrix m(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) m(i, j) = (*this)(i, j);
  return m;
}

double SymMatrix::frobenius_norm() const { return norm2(data_); }
double SymMatrix::max_abs() const { return norm_inf(data_); }

// ---- Jacobi eigendecomposition ---------------------------------------------

EigenResult sym_eigen(const SymMatrix& a_in) {
  const std::size_t n = a_in.order();
  if (!all_finite(a_in.data())) throw std::invalid_argument("sym_eigen: non-finite entries");
  Matrix a = a_in.to_matrix();
  Matrix v = Matrix::identity(n);

  const double scale = std::max(a_in.frobenius_norm(), 1e-300);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) <= 1e-17 * scale) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  EigenResult r;
  r.values.resize(n);
  r.vectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    r.values[j] = a(order[j], order[j]);
    for (std::size_t k = 0; k < n; ++k) r.vectors(k, j) = v(k, order[j]);
  }
  return r;
}

double min_eigenvalue(const SymMatrix& a) {
  if (a.order() == 0) throw std::invalid_argument("min_eigenvalue: empty matrix");
  return sym_eigen(a).values.front();
}

double max_eigenvalue(const SymMatrix& a) {
  if (a.order() == 0) throw std::invalid_argument("max_eigenvalue: empty matrix");
  return sym_eigen(a).values.back();
}

// ---- null space --------------------------------------------------------------

NullSpaceBasis null_space(const Matrix& rows, std::size_t n, double rel_tol) {
  if (rel_tol <= 0.0) throw std::invalid_argument("null_space: tolerance must be positive");
  NullSpaceBasis out;
  out.dimension = n;
  const std::size_t k = rows.rows();
  if (k == 0) {
    out.basis = Matrix::identity(n);
    return out;
  }
  if (rows.cols() != n) throw std::invalid_argument("null_space: row width mismatch");
  if (!all_finite(rows.data())) throw std::invalid_argument("null_space: non-finite entries");

  double max_row = 0.0;
  for (std::size_t i = 0; i < k; ++i) max_row = std::max(max_row, norm2(rows.row(i)));
  out.tol_used = rel_tol * max_row;

  // Householder QR with column pivoting of A = rows^T (n x k). Q accumulates
  // the reflections so that range(A) = span(Q[:, :rank]).
  Matrix a = rows.transpose();
  Matrix q = Matrix::identity(n);
  Vector colnorm(k);
  for (std::size_t j = 0; j < k; ++j) colnorm[j] = norm2(rows.row(j));

  std::size_t rank = 0;
  const std::size_t steps = std::min(n, k);
  for (std::size_t s = 0; s < steps; ++s) {
    // pivot: column with the largest remaining norm
    std::size_t piv = s;
    double best = -1.0;
    for (std::size_t j = s; j < k; ++j) {
      double acc = 0.0;
      for (std::size_t i = s; i < n; ++i) acc += a(i, j) * a(i, j);
      colnorm[j] = std::sqrt(acc);
      if (colnorm[j] > best) {
        best = colnorm[j];
        piv = j;
      }
    }
    if (best <= out.tol_used) break;
    if (piv != s)
      for (std::size_t i = 0; i < n; ++i) std::swap(a(i, s), a(i, piv));

    // reflector for a(s:n, s)
    Vector hv(n - s);
    for (std::size_t i = s; i < n; ++i) hv[i - s] = a(i, s);
    const double alpha = (hv[0] >= 0.0 ? -1.0 : 1.0) * norm2(hv);
    hv[0] -= alpha;
    const double hn = norm2(hv);
    if (hn > 0.0) {
      for (double& x : hv) x /= hn;
      for (std::size_t j = s; j < k; ++j) {
        double d = 0.0;
        for (std::size_t i = s; i < n; ++i) d += hv[i - s] * a(i, j);
        for (std::size_t i = s; i < n; ++i) a(i, j) -= 2.0 * d * hv[i - s];
      }
      // Q <- Q H
      for (std::size_t r = 0; r < n; ++r) {
        double d = 0.0;
        for (std::size_t i = s; i < n; ++i) d += q(r, i) * hv[i - s];
        for (std::size_t i = s; i < n; ++i) q(r, i) -= 2.0 * d * hv[i - s];
      }
    }
    ++rank;
  }

  out.rank = rank;
  out.basis = Matrix(n, n - rank);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = rank; j < n; ++j) out.basis(r, j - rank) = q(r, j);
  return out;
}

// ---- Cholesky ----------------------------------------------------------------

Matrix cholesky(const SymMatrix& a) {
  const std::size_t n = a.order();
  if (!all_finite(a.data())) throw NotPositiveDefinite("cholesky: non-finite entries");
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) throw NotPositiveDefinite("cholesky: non-positive pivot at " + std::to_string(j));
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

Vector cholesky_solve(const Matrix& l, std::span<const double> b) {
  const std::size_t n = l.rows();
  Vector y(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) y[i] -= l(i, k) * y[k];
    y[i] /= l(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t k = ii + 1; k < n; ++k) y[ii] -= l(k, ii) * y[k];
    y[ii] /= l(ii, ii);
  }
  return y;
}

Vector solve_spd(const SymMatrix& a, std::span<const double> b) {
  if (b.size() != a.order()) throw std::invalid_argument("solve_spd: dimension mismatch");
  const Matrix l = cholesky(a);
  Vector x = cholesky_solve(l, b);
  // one step of iterative refinement
  const Vector r = sub(b, a.multiply(x));
  const Vector dx = cholesky_solve(l, r);
  axpy(1.0, dx, x);
  return x;
}

}  // namespace socp
