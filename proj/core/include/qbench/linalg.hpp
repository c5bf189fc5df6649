#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace qbench {

/// Dense real matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<double> column(std::size_t c) const;
  void set_column(std::size_t c, std::span<const double> values);

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  Matrix transposed() const;
  /// Rows picked by index, in the given order.
  Matrix select_rows(std::span<const std::size_t> indices) const;
  /// Columns [first, first + count).
  Matrix column_block(std::size_t first, std::size_t count) const;

  bool all_finite() const noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
std::vector<double> operator*(const Matrix& a, std::span<const double> x);

double frobenius_norm(const Matrix& a);
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

/// Eigenpairs of a symmetric matrix.
struct EigenDecomposition {
  std::vector<double> eigenvalues;  // non-increasing
  Matrix eigenvectors;              // column j pairs with eigenvalues[j]
};

/// Thin SVD, A = U diag(S) Vt with k = min(rows, cols).
struct SvdDecomposition {
  Matrix u;                            // rows x k, orthonormal columns
  std::vector<double> singular_values;  // k, non-negative, non-increasing
  Matrix vt;                           // k x cols, orthonormal rows
};

inline constexpr double kDefaultDecompositionTol = 1e-12;
inline constexpr int kMaxJacobiSweeps = 100;

/// Cyclic Jacobi eigensolver.
///
/// Sweeps until the off-diagonal Frobenius norm falls below
/// `tol * ||A||_F`. Each eigenvector is normalised and sign-fixed so its
/// largest-magnitude entry is positive (first such entry on ties).
/// Throws std::invalid_argument for non-square, non-finite or asymmetric
/// (beyond 1e-10, relative to the largest entry) input, and
/// ConvergenceError after kMaxJacobiSweeps sweeps.
EigenDecomposition eig_symmetric(const Matrix& a, double tol = kDefaultDecompositionTol);

/// One-sided (Hestenes) Jacobi SVD.
///
/// Right singular vectors follow the same sign convention as
/// eig_symmetric; U is adjusted to match. Zero singular values get
/// left vectors completed to an orthonormal set.
SvdDecomposition svd(const Matrix& a, double tol = kDefaultDecompositionTol);

/// Solves A x = b for symmetric positive definite A via Cholesky.
/// Throws std::domain_error when a pivot is not positive.
std::vector<double> cholesky_solve(const Matrix& a, std::span<const double> b);

/// True when the Cholesky factorisation of A + shift*I succeeds.
bool cholesky_succeeds(const Matrix& a, double shift);

/// Flips `v` so that its largest-magnitude entry is positive. Returns true
/// if the sign was flipped.
bool canonicalize_sign(std::span<double> v);

}  // namespace qbench
