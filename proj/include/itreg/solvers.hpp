#pragma once

// Regularized solutions: direct spectral filtering through a singular system,
// the three stationary iterations, a-priori parameter rules, and source
// elements x = (AᵀA)^{sigma/2} z.

#include <cstdint>
#include <functional>
#include <span>

#include "itreg/filters.hpp"
#include "itreg/linalg.hpp"

namespace itreg::solvers {

using linalg::DenseMatrix;
using linalg::SingularSystem;
using linalg::Vector;

struct RegularizedSolution {
  Vector x;
  double residual_norm = 0.0;  // ||A x - y||
  double solution_norm = 0.0;  // ||x||
  filters::FilterSpec spec;
  double alpha_used = 0.0;
};

/// Called after every iterate, k = 1..m.
using IterateObserver = std::function<void(int k, std::span<const double> x)>;

/// Singular values at or below this fraction of mu1 are dropped.
inline constexpr double kTruncation = 1e-14;

/// x = sum_j q(alpha, mu_j)/mu_j (y, u_j) v_j.
RegularizedSolution apply_filter_solver(const SingularSystem& sys, std::span<const double> y,
                                        const filters::FilterSpec& spec);

/// (alpha I + AᵀA) x^{k} = Aᵀy + alpha x^{k-1}, x^0 = 0.
RegularizedSolution iterated_tikhonov(const DenseMatrix& a, std::span<const double> y, double alpha, int m,
                                      const IterateObserver& observer = {});

/// x^k = (I - a AᵀA) x^{k-1} + a Aᵀy, x^0 = 0. Requires a * mu1^2 < 2.
RegularizedSolution landweber(const DenseMatrix& a, std::span<const double> y, double step, int m,
                              const IterateObserver& observer = {});

enum class NewIterationPath {
  Spectral,  // AᵀA diagonalized through the SVD of A, any r >= 1/2
  Cholesky,  // r = 1 only: factor C once, one triangular solve pair per step
};

/// Iterated fractional weighted Tikhonov:
///   C x^k = (AᵀA)^{r-1} Aᵀ y + (C - (AᵀA)^r) x^{k-1},  x^0 = 0,
///   C = (AᵀA + alpha (I - AᵀA/||AᵀA||)^l)^r.
RegularizedSolution new_iterated_tikhonov(const DenseMatrix& a, std::span<const double> y, double alpha, int l,
                                          double r, int m, const IterateObserver& observer = {},
                                          NewIterationPath path = NewIterationPath::Spectral);

/// (delta/E)^{2m/(1+sigma)}.
double apriori_alpha(double delta, double e_bound, double sigma, int m);

/// c_hat (delta/E)^{1/(gamma(sigma+1))} with c_hat = (c/(sigma c_sigma))^{1/(gamma(sigma+1))}.
double general_alpha(double delta, double e_bound, double gamma, double sigma, double c, double c_sigma);

struct SourceElement {
  Vector x;
  Vector z;
  double sigma = 0.0;
  double e_bound = 0.0;
};

/// z ~ N(0, I) from `seed`, rescaled so ||z|| = E; x = sum_j mu_j^sigma (z, v_j) v_j.
SourceElement make_source_element(const SingularSystem& sys, double sigma, double e_bound, std::uint64_t seed);

/// Same construction with a caller-supplied z (rescaled to ||z|| = E).
SourceElement make_source_element(const SingularSystem& sys, double sigma, double e_bound, Vector z);

}  // namespace itreg::solvers
