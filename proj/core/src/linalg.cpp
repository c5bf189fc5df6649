#include "qbench/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "qbench/errors.hpp"

namespace qbench {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw std::invalid_argument("Matrix: data length " + std::to_string(data_.size()) +
                                " != " + std::to_string(rows_) + "x" + std::to_string(cols_));
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw std::invalid_argument("Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

void Matrix::set_column(std::size_t c, std::span<const double> values) {
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = values[r];
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Matrix Matrix::select_rows(std::span<const std::size_t> indices) const {
  Matrix out(indices.size(), cols_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto src = row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

Matrix Matrix::column_block(std::size_t first, std::size_t count) const {
  Matrix out(rows_, count);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < count; ++c) out(r, c) = (*this)(r, first + c);
  return out;
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("Matrix product: inner dimension mismatch");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("Matrix difference: shape mismatch");
  Matrix out = a;
  auto od = out.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < od.size(); ++i) od[i] -= bd[i];
  return out;
}

std::vector<double> operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw std::invalid_argument("Matrix-vector product: dimension mismatch");
  std::vector<double> out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = dot(a.row(i), x);
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double frobenius_norm(const Matrix& a) { return norm2(a.data()); }

bool canonicalize_sign(std::span<double> v) {
  if (v.empty()) return false;
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  if (v[best] >= 0.0) return false;
  for (double& x : v) x = -x;
  return true;
}

namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

void check_finite(const Matrix& a, const char* who) {
  if (!a.all_finite()) throw std::invalid_argument(std::string(who) + ": non-finite entries");
}

// Completes the columns of `q` flagged in `missing` to an orthonormal set
// by Gram-Schmidt over the standard basis.
void complete_orthonormal(Matrix& q, const std::vector<bool>& missing) {
  const std::size_t m = q.rows();
  std::vector<double> cand(m);
  for (std::size_t j = 0; j < q.cols(); ++j) {
    if (!missing[j]) continue;
    double best_norm = -1.0;
    std::vector<double> best;
    for (std::size_t e = 0; e < m; ++e) {
      std::fill(cand.begin(), cand.end(), 0.0);
      cand[e] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t k = 0; k < q.cols(); ++k) {
          if (k == j || (missing[k] && k > j)) continue;
          double proj = 0.0;
          for (std::size_t r = 0; r < m; ++r) proj += q(r, k) * cand[r];
          for (std::size_t r = 0; r < m; ++r) cand[r] -= proj * q(r, k);
        }
      }
      const double nrm = norm2(cand);
      if (nrm > best_norm + 1e-12) {
        best_norm = nrm;
        best = cand;
      }
    }
    for (double& v : best) v /= best_norm;
    q.set_column(j, best);
  }
}

struct RawSvd {
  Matrix u;
  std::vector<double> s;
  Matrix v;
};

// One-sided Jacobi for rows >= cols.
RawSvd hestenes(const Matrix& a, double tol) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  // Column-major working copy so column rotations touch contiguous memory.
  std::vector<std::vector<double>> w(n, std::vector<double>(m));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) w[j][i] = a(i, j);
  std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) v[j][j] = 1.0;

  auto rotate = [](std::vector<double>& x, std::vector<double>& y, double c, double s) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double xi = x[i];
      const double yi = y[i];
      x[i] = c * xi - s * yi;
      y[i] = s * xi + c * yi;
    }
  };

  const double tiny = std::numeric_limits<double>::min();
  bool converged = n < 2;
  int sweep = 0;
  while (!converged) {
    if (sweep++ >= kMaxJacobiSweeps) throw ConvergenceError("svd: one-sided Jacobi did not converge", sweep - 1);
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double alpha = dot(w[p], w[p]);
        const double beta = dot(w[q], w[q]);
        const double gamma = dot(w[p], w[q]);
        if (alpha <= tiny || beta <= tiny) continue;
        if (std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        rotate(w[p], w[q], c, s);
        rotate(v[p], v[q], c, s);
        rotated = true;
      }
    }
    converged = !rotated;
  }

  RawSvd out{Matrix(m, n), std::vector<double>(n), Matrix(n, n)};
  for (std::size_t j = 0; j < n; ++j) {
    out.s[j] = norm2(w[j]);
    for (std::size_t i = 0; i < m; ++i) out.u(i, j) = w[j][i];
    for (std::size_t i = 0; i < n; ++i) out.v(i, j) = v[j][i];
  }
  return out;
}

}  // namespace

EigenDecomposition eig_symmetric(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) throw std::invalid_argument("eig_symmetric: matrix is not square");
  check_finite(a, "eig_symmetric");
  const std::size_t n = a.rows();
  double max_abs = 0.0;
  for (double v : a.data()) max_abs = std::max(max_abs, std::abs(v));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(a(i, j) - a(j, i)) > 1e-10 * std::max(1.0, max_abs))
        throw std::invalid_argument("eig_symmetric: matrix is not symmetric");

  Matrix w = a;
  // Symmetrise exactly so both triangles evolve identically.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) w(i, j) = w(j, i) = 0.5 * (a(i, j) + a(j, i));
  Matrix v = Matrix::identity(n);
  const double scale = frobenius_norm(w);

  int sweep = 0;
  while (scale > 0.0 && off_diagonal_norm(w) > tol * scale) {
    if (sweep++ >= kMaxJacobiSweeps)
      throw ConvergenceError("eig_symmetric: Jacobi sweeps did not converge", sweep - 1);
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = w(p, q);
        if (apq == 0.0) continue;
        const double tau = (w(q, q) - w(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = w(k, p);
          const double akq = w(k, q);
          w(k, p) = c * akp - s * akq;
          w(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = w(p, k);
          const double aqk = w(q, k);
          w(p, k) = c * apk - s * aqk;
          w(q, k) = s * apk + c * aqk;
        }
        w(p, q) = w(q, p) = 0.0;
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
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return w(i, i) > w(j, j); });

  EigenDecomposition out{std::vector<double>(n), Matrix(n, n)};
  std::vector<double> col(n);
  for (std::size_t j = 0; j < n; ++j) {
    out.eigenvalues[j] = w(order[j], order[j]);
    for (std::size_t i = 0; i < n; ++i) col[i] = v(i, order[j]);
    const double nrm = norm2(col);
    for (double& x : col) x /= nrm;
    canonicalize_sign(col);
    out.eigenvectors.set_column(j, col);
  }
  return out;
}

SvdDecomposition svd(const Matrix& a, double tol) {
  if (a.rows() == 0 || a.cols() == 0) throw std::invalid_argument("svd: empty matrix");
  check_finite(a, "svd");
  const bool wide = a.rows() < a.cols();
  RawSvd raw = hestenes(wide ? a.transposed() : a, tol);
  // For wide input raw = svd(A^T): A = raw.v * S * raw.u^T.
  Matrix& left = wide ? raw.v : raw.u;
  Matrix& right = wide ? raw.u : raw.v;
  const std::size_t k = raw.s.size();

  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return raw.s[i] > raw.s[j]; });

  const double smax = k ? raw.s[order[0]] : 0.0;
  const double zero_cut = smax * std::numeric_limits<double>::epsilon() *
                          static_cast<double>(std::max(a.rows(), a.cols()));

  SvdDecomposition out{Matrix(a.rows(), k), std::vector<double>(k), Matrix(k, a.cols())};
  std::vector<bool> missing(k, false);
  std::vector<double> ucol(a.rows());
  std::vector<double> vcol(a.cols());
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t src = order[j];
    double sigma = raw.s[src];
    for (std::size_t i = 0; i < a.cols(); ++i) vcol[i] = right(i, src);
    for (std::size_t i = 0; i < a.rows(); ++i) ucol[i] = left(i, src);
    if (!wide) {
      // Left vectors still carry the singular value.
      if (sigma > zero_cut && sigma > 0.0) {
        for (double& x : ucol) x /= sigma;
      } else {
        missing[j] = true;
      }
    } else {
      // Right vectors (columns of the transposed problem's W) carry sigma.
      if (sigma > zero_cut && sigma > 0.0) {
        for (double& x : vcol) x /= sigma;
      } else {
        missing[j] = true;
      }
    }
    out.singular_values[j] = sigma;
    out.u.set_column(j, ucol);
    for (std::size_t i = 0; i < a.cols(); ++i) out.vt(j, i) = vcol[i];
  }

  if (std::any_of(missing.begin(), missing.end(), [](bool b) { return b; })) {
    if (!wide) {
      complete_orthonormal(out.u, missing);
    } else {
      Matrix v = out.vt.transposed();
      complete_orthonormal(v, missing);
      out.vt = v.transposed();
    }
  }

  for (std::size_t j = 0; j < k; ++j) {
    auto vrow = out.vt.row(j);
    if (canonicalize_sign(vrow))
      for (std::size_t i = 0; i < a.rows(); ++i) out.u(i, j) = -out.u(i, j);
  }
  return out;
}

namespace {

bool cholesky_factor(const Matrix& a, double shift, Matrix& l) {
  const std::size_t n = a.rows();
  l = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j) + shift;
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) return false;
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return true;
}

}  // namespace

bool cholesky_succeeds(const Matrix& a, double shift) {
  if (a.rows() != a.cols()) throw std::invalid_argument("cholesky: matrix is not square");
  Matrix l;
  return cholesky_factor(a, shift, l);
}

std::vector<double> cholesky_solve(const Matrix& a, std::span<const double> b) {
  if (a.rows() != a.cols() || a.rows() != b.size())
    throw std::invalid_argument("cholesky_solve: dimension mismatch");
  Matrix l;
  if (!cholesky_factor(a, 0.0, l)) throw std::domain_error("cholesky_solve: matrix is not positive definite");
  const std::size_t n = a.rows();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
    y[i] = s / l(i, i);
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = y[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
    x[i] = s / l(i, i);
  }
  return x;
}

}  // namespace qbench
