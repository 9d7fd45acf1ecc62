#pragma once

// Reproductions of the numerical experiments: naive collocation blowup,
// alpha and iteration sweeps, L-curve data, the three-method comparison and
// empirical convergence rates.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "itreg/filters.hpp"
#include "itreg/linalg.hpp"
#include "itreg/problems.hpp"

namespace itreg::experiments {

using filters::FilterSpec;
using linalg::Vector;
using problems::DiscreteProblem;

inline constexpr std::uint64_t kDefaultSeed = 42;

struct SweepRecord {
  double parameter = 0.0;  // alpha, m or delta
  double error = 0.0;      // scaled l2 error against x_exact
  double residual_norm = 0.0;
  double solution_norm = 0.0;
  std::string method;
};

// ---------------------------------------------------------------------------
// Naive collocation solve

struct NaiveSolveColumn {
  int n = 0;
  Vector probe_t;    // 0, 1/4, 1/2, 3/4, 1
  Vector error;      // x(t) - x_i at the probes
  Vector solution;   // x_i at the probes
  double max_error = 0.0;  // over all nodes
  double condition = 0.0;
};

/// Unregularized Gaussian elimination on simpson_problem(n) for each n.
std::vector<NaiveSolveColumn> naive_solve_demo(std::span<const int> n_list);

// ---------------------------------------------------------------------------
// Sweeps

/// One record per alpha; a single noise realization shared across the grid.
std::vector<SweepRecord> alpha_sweep(const DiscreteProblem& problem, const FilterSpec& family,
                                     std::span<const double> alpha_grid, double delta, std::uint64_t seed);

struct IterationConfig {
  int m_max = 100;
  double alpha = 1e-3;
  double a = 0.5;
  int l = 4;
  double r = 0.8;
  double delta = 1e-4;
  std::uint64_t seed = kDefaultSeed;
};

struct IterationTrajectory {
  FilterSpec method;  // m = m_max
  std::vector<SweepRecord> records;  // parameter = m, m = 1..m_max
  /// Landweber only: true when a*mu1^2 >= 2 forced a = 0.5/mu1^2.
  bool step_rescaled = false;
};

/// Runs the literal iterations and records every iterate. `methods` may hold
/// IteratedTikhonov, Landweber and IteratedFractionalWeighted.
std::vector<IterationTrajectory> iteration_sweep(const DiscreteProblem& problem,
                                                 std::span<const filters::FilterVariant> methods,
                                                 const IterationConfig& config);

struct LCurveSeries {
  double delta = 0.0;
  std::vector<SweepRecord> records;
};

/// Tikhonov alpha sweeps for each delta, all using the same noise direction.
std::vector<LCurveSeries> lcurve_data(const DiscreteProblem& problem, std::span<const double> alpha_grid,
                                      std::span<const double> delta_list, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Three-method comparison

struct ComparisonRow {
  double delta = 0.0;
  double err_iterated_tikhonov = 0.0;
  double err_landweber = 0.0;
  double err_new_iterated = 0.0;
};

struct ComparisonConfig {
  int l = 2;
  int m = 100;
  double r = 0.8;
  double a = 0.5;
  /// One alpha per delta, matched by position.
  std::vector<double> alphas{1.0, 0.9, 1e-3, 1e-3};
};

inline const std::vector<double> kTable2Deltas{1e-4, 1e-3, 1e-2, 1e-1};

/// All three methods consume the same y_delta for a given delta.
std::vector<ComparisonRow> comparison_table(const DiscreteProblem& problem, std::span<const double> delta_list,
                                            const ComparisonConfig& config, std::uint64_t seed);

struct OptimizedComparisonRow {
  ComparisonRow errors;
  double alpha_iterated_tikhonov = 0.0;
  int m_landweber = 0;
  double alpha_new_iterated = 0.0;
};

/// Same noise as comparison_table, but each method gets its best alpha from
/// `alpha_grid` (Landweber: its best stopping index up to config.m).
std::vector<OptimizedComparisonRow> comparison_table_optimized(const DiscreteProblem& problem,
                                                               std::span<const double> delta_list,
                                                               const ComparisonConfig& config,
                                                               std::span<const double> alpha_grid,
                                                               std::uint64_t seed);

// ---------------------------------------------------------------------------
// Convergence rate

enum class AlphaRule {
  Apriori,  // (delta/E)^{2m/(1+sigma)}
  General,  // (delta/E)^{1/(gamma(sigma+1))} with gamma = 1/2 and c_hat = 1
};

struct RateConfig {
  int l = 2;
  double r = 0.8;
  int m = 1;
  double sigma = 2.0;
  double e_bound = 1.0;
  std::vector<double> deltas{1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  int seeds = 10;
  std::uint64_t seed = kDefaultSeed;
  AlphaRule rule = AlphaRule::General;
};

struct RateResult {
  double slope = 0.0;
  Vector deltas;
  Vector alphas;
  Vector median_errors;
};

/// Diagonal operator with mu_j = ratio^j, j = 0..n-1, and identity vectors.
linalg::SingularSystem synthetic_diagonal_system(std::size_t n, double ratio);

/// Fits log(median error) against log(delta) for the iterated fractional
/// weighted method on source elements with smoothness config.sigma.
RateResult rate_estimate(const linalg::SingularSystem& sys, const RateConfig& config);

double alpha_for_rule(AlphaRule rule, double delta, double e_bound, double sigma, int m);

// ---------------------------------------------------------------------------
// Output

/// "%.17g"
std::string format_real(double v);

void write_sweep_csv(std::ostream& os, std::span<const SweepRecord> records, std::uint64_t seed);
void write_comparison_csv(std::ostream& os, std::span<const ComparisonRow> rows, std::uint64_t seed);

}  // namespace itreg::experiments
