#include "itreg/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "itreg/errors.hpp"
#include "itreg/random.hpp"

namespace itreg::solvers {

using filters::FilterSpec;
using linalg::SymEig;

namespace {

void require_rhs(const DenseMatrix& a, std::span<const double> y) {
  if (a.rows() == 0 || a.cols() == 0) throw InvalidInput("solver: empty operator");
  if (y.size() != a.rows()) throw InvalidInput("solver: right-hand side length does not match operator rows");
}

void require_iterations(int m) {
  if (m < 1) throw InvalidParameter("solver: m must be >= 1");
}

void require_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidParameter("solver: alpha must be positive");
}

RegularizedSolution finish(const DenseMatrix& a, std::span<const double> y, Vector x, FilterSpec spec,
                           double alpha_used) {
  RegularizedSolution out;
  out.residual_norm = linalg::norm2(linalg::subtract(linalg::multiply(a, x), y));
  out.solution_norm = linalg::norm2(x);
  out.x = std::move(x);
  out.spec = spec;
  out.alpha_used = alpha_used;
  return out;
}

double largest_gram_eigenvalue(const DenseMatrix& a) {
  return linalg::sym_eig(linalg::gram(a)).eigenvalues.front();
}

// 1 - lambda/lambda_max on the eigenvalues, exactly zero at the top.
double weight_of(double lambda, double lambda_max) {
  const double w = 1.0 - lambda / lambda_max;
  return std::abs(w) < 1e-15 ? 0.0 : std::max(w, 0.0);
}

}  // namespace

RegularizedSolution apply_filter_solver(const SingularSystem& sys, std::span<const double> y,
                                        const FilterSpec& spec) {
  const std::size_t rows = sys.left_vectors.rows();
  const std::size_t cols = sys.right_vectors.rows();
  if (sys.size() == 0) throw InvalidInput("apply_filter_solver: empty singular system");
  if (y.size() != rows) throw InvalidInput("apply_filter_solver: right-hand side length does not match");
  spec.validate();

  const double mu1 = sys.mu1();
  Vector x(cols, 0.0);
  if (mu1 > 0.0) {
    for (std::size_t j = 0; j < sys.size(); ++j) {
      const double mu = sys.mu[j];
      if (mu <= kTruncation * mu1) break;  // mu is sorted
      double coeff = 0.0;
      for (std::size_t i = 0; i < rows; ++i) coeff += sys.left_vectors(i, j) * y[i];
      coeff *= filters::filter_value(spec, mu, mu1) / mu;
      for (std::size_t i = 0; i < cols; ++i) x[i] += coeff * sys.right_vectors(i, j);
    }
  }

  RegularizedSolution out;
  out.residual_norm = linalg::norm2(linalg::subtract(sys.apply(x), y));
  out.solution_norm = linalg::norm2(x);
  out.x = std::move(x);
  out.spec = spec;
  out.alpha_used = spec.uses_alpha() ? spec.alpha : 1.0 / spec.m;
  return out;
}

RegularizedSolution iterated_tikhonov(const DenseMatrix& a, std::span<const double> y, double alpha, int m,
                                      const IterateObserver& observer) {
  require_rhs(a, y);
  require_alpha(alpha);
  require_iterations(m);
  DenseMatrix normal = linalg::gram(a);
  for (std::size_t i = 0; i < normal.rows(); ++i) normal(i, i) += alpha;
  const linalg::Cholesky chol(normal);
  const Vector aty = linalg::multiply_transposed(a, y);

  Vector x(a.cols(), 0.0);
  for (int k = 1; k <= m; ++k) {
    x = chol.solve(linalg::axpy(alpha, x, aty));
    if (observer) observer(k, x);
  }
  return finish(a, y, std::move(x), FilterSpec::iterated_tikhonov(alpha, m), alpha);
}

RegularizedSolution landweber(const DenseMatrix& a, std::span<const double> y, double step, int m,
                              const IterateObserver& observer) {
  require_rhs(a, y);
  require_iterations(m);
  if (!(step > 0.0) || !std::isfinite(step)) throw InvalidParameter("landweber: step a must be positive");
  const double mu1_sq = largest_gram_eigenvalue(a);
  if (!(step * mu1_sq < 2.0)) {
    std::ostringstream msg;
    msg << "landweber: step a=" << step << " violates a*mu1^2 < 2 (mu1^2=" << mu1_sq << ")";
    throw InvalidParameter(msg.str());
  }

  Vector x(a.cols(), 0.0);
  for (int k = 1; k <= m; ++k) {
    const Vector residual = linalg::subtract(y, linalg::multiply(a, x));
    x = linalg::axpy(step, linalg::multiply_transposed(a, residual), x);
    if (observer) observer(k, x);
  }
  return finish(a, y, std::move(x), FilterSpec::landweber(step, m), 1.0 / m);
}

RegularizedSolution new_iterated_tikhonov(const DenseMatrix& a, std::span<const double> y, double alpha, int l,
                                          double r, int m, const IterateObserver& observer,
                                          NewIterationPath path) {
  require_rhs(a, y);
  require_alpha(alpha);
  require_iterations(m);
  if (l < 0) throw InvalidParameter("new_iterated_tikhonov: l must be a non-negative integer");
  if (!(r >= 0.5) || !std::isfinite(r)) throw InvalidParameter("new_iterated_tikhonov: r must satisfy r >= 1/2");

  const FilterSpec spec = FilterSpec::iterated_fractional_weighted(alpha, l, r, m);
  const DenseMatrix gram = linalg::gram(a);
  const Vector aty = linalg::multiply_transposed(a, y);
  Vector x(a.cols(), 0.0);

  if (path == NewIterationPath::Cholesky) {
    if (r != 1.0) throw InvalidParameter("new_iterated_tikhonov: the Cholesky path needs r = 1");
    const double lambda_max = largest_gram_eigenvalue(a);
    if (!(lambda_max > 0.0)) throw InvalidInput("new_iterated_tikhonov: zero operator");
    const std::size_t n = gram.rows();
    const DenseMatrix weight = DenseMatrix::identity(n) - (1.0 / lambda_max) * gram;
    DenseMatrix weight_power = DenseMatrix::identity(n);
    for (int i = 0; i < l; ++i) weight_power = weight_power * weight;
    const DenseMatrix correction = alpha * weight_power;  // C - AᵀA
    const linalg::Cholesky chol(gram + correction);
    for (int k = 1; k <= m; ++k) {
      x = chol.solve(linalg::axpy(1.0, linalg::multiply(correction, x), aty));
      if (observer) observer(k, x);
    }
    return finish(a, y, std::move(x), spec, alpha);
  }

  // AᵀA = V diag(mu^2) Vᵀ from the SVD of A, which keeps the small
  // eigenvalues accurate. The recursion is then diagonal in V.
  const SingularSystem sys = linalg::singular_system(a);
  const double lambda_max = sys.mu1() * sys.mu1();
  if (!(lambda_max > 0.0)) throw InvalidInput("new_iterated_tikhonov: zero operator");
  const std::size_t k = sys.size();
  const std::size_t n = a.cols();
  Vector c(k), correction(k), rhs0(k, 0.0), z(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    const double lam = sys.mu[j] * sys.mu[j];
    const double shift = alpha * std::pow(weight_of(lam, lambda_max), l);
    c[j] = std::pow(lam + shift, r);
    // (lam + shift)^r - lam^r without cancellation.
    correction[j] = -c[j] * std::expm1(r * std::log1p(-shift / (lam + shift)));
    if (sys.mu[j] <= kTruncation * sys.mu1()) continue;
    double uty = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) uty += sys.left_vectors(i, j) * y[i];
    rhs0[j] = std::pow(sys.mu[j], 2.0 * r - 1.0) * uty;
  }
  for (int it = 1; it <= m; ++it) {
    for (std::size_t j = 0; j < k; ++j) z[j] = (rhs0[j] + correction[j] * z[j]) / c[j];
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = 0; i < n; ++i) x[i] += z[j] * sys.right_vectors(i, j);
    if (observer) observer(it, x);
  }
  return finish(a, y, std::move(x), spec, alpha);
}

double apriori_alpha(double delta, double e_bound, double sigma, int m) {
  if (!(delta > 0.0)) throw InvalidParameter("apriori_alpha: delta must be positive");
  if (!(e_bound > 0.0)) throw InvalidParameter("apriori_alpha: E must be positive");
  if (!(sigma >= 0.0)) throw InvalidParameter("apriori_alpha: sigma must be >= 0");
  if (m < 1) throw InvalidParameter("apriori_alpha: m must be >= 1");
  return std::pow(delta / e_bound, 2.0 * m / (1.0 + sigma));
}

double general_alpha(double delta, double e_bound, double gamma, double sigma, double c, double c_sigma) {
  for (double v : {delta, e_bound, gamma, sigma, c, c_sigma}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidParameter("general_alpha: all inputs must be positive");
  }
  const double exponent = 1.0 / (gamma * (sigma + 1.0));
  const double c_hat = std::pow(c / (sigma * c_sigma), exponent);
  return c_hat * std::pow(delta / e_bound, exponent);
}

SourceElement make_source_element(const SingularSystem& sys, double sigma, double e_bound, Vector z) {
  if (!(sigma >= 0.0)) throw InvalidParameter("make_source_element: sigma must be >= 0");
  if (!(e_bound > 0.0)) throw InvalidParameter("make_source_element: E must be positive");
  const std::size_t n = sys.right_vectors.rows();
  if (z.size() != n) throw InvalidInput("make_source_element: z has the wrong length");
  const double nz = linalg::norm2(z);
  if (!(nz > 0.0)) throw InvalidInput("make_source_element: z must be nonzero");
  for (double& v : z) v *= e_bound / nz;

  Vector x(n, 0.0);
  for (std::size_t j = 0; j < sys.size(); ++j) {
    double coeff = 0.0;
    for (std::size_t i = 0; i < n; ++i) coeff += z[i] * sys.right_vectors(i, j);
    coeff *= std::pow(sys.mu[j], sigma);
    for (std::size_t i = 0; i < n; ++i) x[i] += coeff * sys.right_vectors(i, j);
  }
  return {std::move(x), std::move(z), sigma, e_bound};
}

SourceElement make_source_element(const SingularSystem& sys, double sigma, double e_bound, std::uint64_t seed) {
  return make_source_element(sys, sigma, e_bound, standard_normal(sys.right_vectors.rows(), seed));
}

}  // namespace itreg::solvers
