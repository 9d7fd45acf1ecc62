#include "itreg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "itreg/errors.hpp"

namespace itreg::linalg {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kJacobiOffTol = 1e-13;
constexpr int kMaxSweeps = 100;
constexpr double kOrthogonalityTol = 1e-15;
constexpr double kClampTol = 1e-12;

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw InvalidInput(std::string(what) + ": non-finite entry");
  }
}

void require_symmetric(const DenseMatrix& s, const char* what) {
  if (!s.square()) throw InvalidInput(std::string(what) + ": matrix is not square");
  const double scale = std::max(s.max_abs(), std::numeric_limits<double>::min());
  for (std::size_t i = 0; i < s.rows(); ++i) {
    for (std::size_t j = i + 1; j < s.cols(); ++j) {
      if (std::abs(s(i, j) - s(j, i)) > kSymmetryTol * scale) {
        throw InvalidInput(std::string(what) + ": matrix is not symmetric");
      }
    }
  }
}

// Column-major scratch storage for the one-sided SVD.
using Columns = std::vector<Vector>;

// Appends unit vectors orthogonal to every column in `basis` until it holds
// `target` columns.
void complete_orthonormal(Columns& basis, std::size_t dim, std::size_t target) {
  while (basis.size() < target) {
    Vector best;
    double best_norm = -1.0;
    for (std::size_t k = 0; k < dim; ++k) {
      Vector e(dim, 0.0);
      e[k] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& b : basis) {
          const double c = dot(e, b);
          for (std::size_t i = 0; i < dim; ++i) e[i] -= c * b[i];
        }
      }
      const double nrm = norm2(e);
      if (nrm > best_norm) {
        best_norm = nrm;
        best = std::move(e);
      }
    }
    for (double& x : best) x /= best_norm;
    basis.push_back(std::move(best));
  }
}

constexpr double kRankTol = 1e-14;

SingularSystem one_sided_jacobi(const DenseMatrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  Columns w(n), v(n);
  for (std::size_t j = 0; j < n; ++j) {
    w[j] = a.column(j);
    v[j].assign(n, 0.0);
    v[j][j] = 1.0;
  }

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double alpha = dot(w[p], w[p]);
        const double beta = dot(w[q], w[q]);
        const double gamma = dot(w[p], w[q]);
        if (gamma == 0.0 || std::abs(gamma) <= kOrthogonalityTol * std::sqrt(alpha * beta)) {
          continue;
        }
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double wp = w[p][i];
          const double wq = w[q][i];
          w[p][i] = c * wp - s * wq;
          w[q][i] = s * wp + c * wq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vp = v[p][i];
          const double vq = v[q][i];
          v[p][i] = c * vp - s * vq;
          v[q][i] = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) sigma[j] = norm2(w[j]);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });

  SingularSystem out;
  out.mu.resize(n);
  Columns left;
  left.reserve(n);
  const double floor = kRankTol * sigma[order.front()];
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    out.mu[k] = sigma[j];
    // Left vectors of numerically null directions come from the completion.
    if (sigma[j] > floor) {
      Vector u = w[j];
      for (double& x : u) x /= sigma[j];
      left.push_back(std::move(u));
    }
  }
  complete_orthonormal(left, m, n);

  out.left_vectors = DenseMatrix(m, n);
  out.right_vectors = DenseMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& u = left[k];
    const auto& vv = v[order[k]];
    for (std::size_t i = 0; i < m; ++i) out.left_vectors(i, k) = u[i];
    for (std::size_t i = 0; i < n; ++i) out.right_vectors(i, k) = vv[i];
  }
  return out;
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_) throw InvalidInput("DenseMatrix: entry count != rows*cols");
  require_finite(data_, "DenseMatrix");
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw InvalidInput("DenseMatrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
  require_finite(data_, "DenseMatrix");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> d) {
  DenseMatrix out(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) out(i, i) = d[i];
  return out;
}

Vector DenseMatrix::column(std::size_t j) const {
  Vector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

double DenseMatrix::frobenius_norm() const { return norm2(data_); }

double DenseMatrix::max_abs() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw InvalidInput("matrix product: inner dimensions differ");
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw InvalidInput("matrix sum: shape mismatch");
  DenseMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) + b(i, j);
  return out;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) { return a + (-1.0) * b; }

DenseMatrix operator*(double s, const DenseMatrix& a) {
  DenseMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = s * a(i, j);
  return out;
}

Vector multiply(const DenseMatrix& a, std::span<const double> x) {
  if (x.size() != a.cols()) throw InvalidInput("matrix-vector product: dimension mismatch");
  Vector out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = dot(a.row(i), x);
  return out;
}

Vector multiply_transposed(const DenseMatrix& a, std::span<const double> x) {
  if (x.size() != a.rows()) throw InvalidInput("transposed product: dimension mismatch");
  Vector out(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double xi = x[i];
    for (std::size_t j = 0; j < a.cols(); ++j) out[j] += a(i, j) * xi;
  }
  return out;
}

DenseMatrix gram(const DenseMatrix& a) {
  const std::size_t n = a.cols();
  DenseMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.rows(); ++k) s += a(k, i) * a(k, j);
      out(i, j) = s;
      out(j, i) = s;
    }
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidInput("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> x) {
  // Scaled accumulation so that entries near 1e±200 do not overflow.
  double scale = 0.0;
  double ssq = 1.0;
  for (double v : x) {
    if (v == 0.0) continue;
    const double a = std::abs(v);
    if (scale < a) {
      ssq = 1.0 + ssq * (scale / a) * (scale / a);
      scale = a;
    } else {
      ssq += (a / scale) * (a / scale);
    }
  }
  return scale * std::sqrt(ssq);
}

Vector axpy(double s, std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidInput("axpy: length mismatch");
  Vector out(y.begin(), y.end());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] += s * x[i];
  return out;
}

Vector subtract(std::span<const double> a, std::span<const double> b) { return axpy(-1.0, b, a); }

Vector scaled(double s, std::span<const double> x) {
  Vector out(x.begin(), x.end());
  for (double& v : out) v *= s;
  return out;
}

Vector SingularSystem::apply(std::span<const double> x) const {
  Vector coeff = multiply_transposed(right_vectors, x);
  for (std::size_t j = 0; j < coeff.size(); ++j) coeff[j] *= mu[j];
  return multiply(left_vectors, coeff);
}

DenseMatrix SingularSystem::reconstruct() const {
  DenseMatrix us = left_vectors;
  for (std::size_t i = 0; i < us.rows(); ++i)
    for (std::size_t j = 0; j < us.cols(); ++j) us(i, j) *= mu[j];
  return us * right_vectors.transpose();
}

SymEig sym_eig(const DenseMatrix& s) {
  require_symmetric(s, "sym_eig");
  const std::size_t n = s.rows();
  DenseMatrix a = s;
  DenseMatrix v = DenseMatrix::identity(n);
  const double threshold = kJacobiOffTol * s.frobenius_norm();

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) off += a(i, j) * a(i, j);
    if (std::sqrt(off) <= threshold) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(1.0, theta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
  SymEig out;
  out.eigenvalues.resize(n);
  out.eigenvectors = DenseMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
  }
  return out;
}

SingularSystem singular_system(const DenseMatrix& a) {
  if (a.rows() == 0 || a.cols() == 0) throw InvalidInput("singular_system: empty matrix");
  require_finite(a.entries(), "singular_system");
  if (a.rows() >= a.cols()) return one_sided_jacobi(a);
  SingularSystem t = one_sided_jacobi(a.transpose());
  std::swap(t.left_vectors, t.right_vectors);
  return t;
}

DenseMatrix spectral_map(const SymEig& eig, const std::function<double(double)>& f) {
  const std::size_t n = eig.eigenvalues.size();
  Vector fl(n);
  for (std::size_t k = 0; k < n; ++k) fl[k] = f(eig.eigenvalues[k]);
  const DenseMatrix& v = eig.eigenvectors;
  DenseMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += v(i, k) * fl[k] * v(j, k);
      out(i, j) = s;
      out(j, i) = s;
    }
  return out;
}

Vector clamped_eigenvalues(const SymEig& eig) {
  double scale = 0.0;
  for (double l : eig.eigenvalues) scale = std::max(scale, std::abs(l));
  Vector out = eig.eigenvalues;
  for (double& l : out) {
    if (l < 0.0) {
      if (l < -kClampTol * scale) {
        throw NotPositiveSemidefinite("negative eigenvalue " + std::to_string(l) +
                                      " beyond clamp tolerance");
      }
      l = 0.0;
    }
  }
  return out;
}

DenseMatrix sym_matrix_power(const SymEig& eig, double r) {
  if (!(r >= 0.0)) throw InvalidParameter("sym_matrix_power: exponent must be >= 0");
  SymEig clamped{clamped_eigenvalues(eig), eig.eigenvectors};
  if (r == 1.0) return spectral_map(clamped, [](double l) { return l; });
  return spectral_map(clamped, [r](double l) { return l == 0.0 ? (r == 0.0 ? 1.0 : 0.0) : std::pow(l, r); });
}

DenseMatrix sym_matrix_power(const DenseMatrix& s, double r) {
  if (r == 1.0) {
    require_symmetric(s, "sym_matrix_power");
    clamped_eigenvalues(sym_eig(s));  // PSD check only
    return s;
  }
  return sym_matrix_power(sym_eig(s), r);
}

Cholesky::Cholesky(const DenseMatrix& s) : lower_(s.rows(), s.cols()) {
  if (!s.square()) throw InvalidInput("Cholesky: matrix is not square");
  const std::size_t n = s.rows();
  for (std::size_t j = 0; j < n; ++j) {
    double d = s(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= lower_(j, k) * lower_(j, k);
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw DecompositionFailure("Cholesky: matrix is not positive definite (pivot " +
                                 std::to_string(j) + ")");
    }
    const double ljj = std::sqrt(d);
    lower_(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double x = s(i, j);
      for (std::size_t k = 0; k < j; ++k) x -= lower_(i, k) * lower_(j, k);
      lower_(i, j) = x / ljj;
    }
  }
}

Vector Cholesky::solve(std::span<const double> b) const {
  const std::size_t n = lower_.rows();
  if (b.size() != n) throw InvalidInput("Cholesky::solve: dimension mismatch");
  Vector z(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) z[i] -= lower_(i, k) * z[k];
    z[i] /= lower_(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) z[i] -= lower_(k, i) * z[k];
    z[i] /= lower_(i, i);
  }
  return z;
}

Vector solve_spd(const DenseMatrix& s, std::span<const double> b) {
  require_symmetric(s, "solve_spd");
  return Cholesky(s).solve(b);
}

Vector solve_general(const DenseMatrix& a, std::span<const double> b) {
  if (!a.square()) throw InvalidInput("solve_general: matrix is not square");
  if (b.size() != a.rows()) throw InvalidInput("solve_general: dimension mismatch");
  const std::size_t n = a.rows();
  DenseMatrix m = a;
  Vector x(b.begin(), b.end());
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t i = col + 1; i < n; ++i)
      if (std::abs(m(i, col)) > std::abs(m(piv, col))) piv = i;
    if (m(piv, col) == 0.0) throw SingularMatrix("solve_general: zero pivot in column " + std::to_string(col));
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(col, j), m(piv, j));
      std::swap(x[col], x[piv]);
    }
    for (std::size_t i = col + 1; i < n; ++i) {
      const double f = m(i, col) / m(col, col);
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) m(i, j) -= f * m(col, j);
      x[i] -= f * x[col];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = i + 1; j < n; ++j) x[i] -= m(i, j) * x[j];
    x[i] /= m(i, i);
  }
  return x;
}

double condition_number(const DenseMatrix& a) {
  if (a.max_abs() == 0.0) throw InvalidInput("condition_number: zero matrix");
  const SingularSystem sys = singular_system(a);
  const double mu_min = sys.mu.back();
  if (mu_min == 0.0) return std::numeric_limits<double>::infinity();
  return sys.mu.front() / mu_min;
}

}  // namespace itreg::linalg
