#pragma once

// Dense real linear algebra for small problems (n <= 64 or so).
//
// Everything here is value-semantic and single-threaded. Decompositions are
// Jacobi-type: cyclic two-sided rotations for symmetric eigenproblems and
// one-sided (Hestenes) rotations for the SVD.

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace itreg::linalg {

using Vector = std::vector<double>;

class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  /// Row-major entries; throws InvalidInput if the size or finiteness is off.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(std::span<const double> d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  std::span<const double> entries() const { return data_; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * cols_, cols_);
  }
  Vector column(std::size_t j) const;

  DenseMatrix transpose() const;
  double frobenius_norm() const;
  double max_abs() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator*(double s, const DenseMatrix& a);

Vector multiply(const DenseMatrix& a, std::span<const double> x);
/// Aᵀx without forming the transpose.
Vector multiply_transposed(const DenseMatrix& a, std::span<const double> x);
/// AᵀA.
DenseMatrix gram(const DenseMatrix& a);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> x);
Vector axpy(double s, std::span<const double> x, std::span<const double> y);  // s*x + y
Vector subtract(std::span<const double> a, std::span<const double> b);
Vector scaled(double s, std::span<const double> x);

/// Eigenpairs of a symmetric matrix, eigenvalues descending.
struct SymEig {
  Vector eigenvalues;
  DenseMatrix eigenvectors;  // column j pairs with eigenvalues[j]
};

/// Thin singular value decomposition A = U diag(mu) Vᵀ with min(rows, cols)
/// triplets, mu non-increasing.
struct SingularSystem {
  Vector mu;
  DenseMatrix left_vectors;   // rows x k
  DenseMatrix right_vectors;  // cols x k

  std::size_t size() const { return mu.size(); }
  double mu1() const { return mu.empty() ? 0.0 : mu.front(); }
  /// U diag(mu) Vᵀ applied to x.
  Vector apply(std::span<const double> x) const;
  DenseMatrix reconstruct() const;
};

/// Cyclic Jacobi. Stops once the off-diagonal Frobenius norm drops below
/// 1e-13 * ||S||_F, or after 100 sweeps.
SymEig sym_eig(const DenseMatrix& s);

/// One-sided Jacobi SVD; accurate for small singular values of A itself
/// rather than of AᵀA.
SingularSystem singular_system(const DenseMatrix& a);

/// V diag(f(lambda)) Vᵀ.
DenseMatrix spectral_map(const SymEig& eig, const std::function<double(double)>& f);

/// S^r for symmetric PSD S and r >= 0. Eigenvalues in [-1e-12 max|lambda|, 0)
/// are clamped to zero; anything more negative is rejected.
DenseMatrix sym_matrix_power(const DenseMatrix& s, double r);
DenseMatrix sym_matrix_power(const SymEig& eig, double r);

/// Eigenvalues of a PSD decomposition with roundoff negatives clamped to 0.
/// Throws NotPositiveSemidefinite past the clamp tolerance.
Vector clamped_eigenvalues(const SymEig& eig);

class Cholesky {
 public:
  /// Throws DecompositionFailure if S is not positive definite.
  explicit Cholesky(const DenseMatrix& s);
  Vector solve(std::span<const double> b) const;

 private:
  DenseMatrix lower_;
};

Vector solve_spd(const DenseMatrix& s, std::span<const double> b);

/// Gaussian elimination with partial pivoting. Only an exactly zero pivot is
/// an error; numerically singular systems return whatever elimination gives.
Vector solve_general(const DenseMatrix& a, std::span<const double> b);

/// mu_1 / mu_min, or +infinity when mu_min is zero.
double condition_number(const DenseMatrix& a);

}  // namespace itreg::linalg
