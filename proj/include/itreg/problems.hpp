#pragma once

// Quadrature discretizations of first-kind Fredholm equations and the noise
// model used by the experiments.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include "itreg/linalg.hpp"

namespace itreg::problems {

using linalg::DenseMatrix;
using linalg::Vector;

struct DiscreteProblem {
  std::string kind;  // "laplace" or "simpson"
  int n = 0;         // construction parameter (points, or subintervals for Simpson)
  DenseMatrix a;
  Vector y_exact;
  Vector x_exact;
  Vector nodes;
  Vector weights;
  /// scaled coordinate = scaling * function value; all ones when unused.
  Vector scaling;
  /// ||A x_exact - y_exact||, the quadrature inconsistency of the exact data.
  double consistency_residual = 0.0;

  std::size_t size() const { return x_exact.size(); }
};

struct QuadratureRule {
  Vector nodes;
  Vector weights;
};

/// n-point Gauss-Laguerre rule for int_0^inf e^{-t} f(t) dt, 1 <= n <= 64.
/// Nodes are eigenvalues of the Jacobi matrix (diagonal 2k+1, off-diagonal k),
/// polished by Newton steps on L_n in long double; weights are t / ((n+1) L_{n+1}(t))^2.
QuadratureRule gauss_laguerre(int n);

/// Laguerre polynomial L_k(t) by the three-term recurrence.
double laguerre(int k, double t);

/// int_0^inf e^{-st} x(t) dt = 2/(2s+1), exact solution x(t) = e^{-t/2},
/// collocated at Gauss-Laguerre nodes and symmetrized with D^{1/2},
/// D = diag(w_j e^{t_j}). The result is symmetric but indefinite.
DiscreteProblem laplace_problem(int n);

/// int_0^1 (1+ts) e^{ts} x(s) ds = e^t on composite Simpson nodes t_j = j/n;
/// n even, 4 <= n <= 64. The system has n+1 unknowns and x_exact = 1.
DiscreteProblem simpson_problem(int n);

DiscreteProblem make_problem(std::string_view kind, int n);

enum class ErrorMetric {
  Scaled,  // l2 in the problem's coordinates (default everywhere)
  Nodal,   // l2 of function values at the nodes
};

double solution_error(const DiscreteProblem& p, std::span<const double> x,
                      ErrorMetric metric = ErrorMetric::Scaled);

/// Scaled coordinates back to function values at the nodes.
Vector to_function_values(const DiscreteProblem& p, std::span<const double> x);

struct NoisySample {
  Vector y_delta;
  double delta = 0.0;
  std::uint64_t seed = 0;
};

/// y + delta * eta / ||eta||, eta standard normal from `seed`.
NoisySample add_noise(std::span<const double> y, double delta, std::uint64_t seed);

std::string to_json(const DiscreteProblem& p);
DiscreteProblem problem_from_json(std::string_view text);

}  // namespace itreg::problems
