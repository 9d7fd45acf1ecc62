#include "itreg/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "itreg/errors.hpp"
#include "itreg/random.hpp"
#include "itreg/solvers.hpp"

namespace itreg::experiments {

using filters::FilterVariant;

namespace {

SweepRecord make_record(const DiscreteProblem& p, double parameter, const solvers::RegularizedSolution& s,
                        const std::string& method) {
  return {parameter, problems::solution_error(p, s.x), s.residual_norm, s.solution_norm, method};
}

SweepRecord record_iterate(const DiscreteProblem& p, std::span<const double> y, int k,
                           std::span<const double> x, const std::string& method) {
  const double residual = linalg::norm2(linalg::subtract(linalg::multiply(p.a, x), y));
  return {static_cast<double>(k), problems::solution_error(p, x), residual, linalg::norm2(x), method};
}

double median(Vector v) {
  if (v.empty()) throw InvalidInput("median of empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

void require_alpha_grid(std::span<const double> grid) {
  if (grid.empty()) throw InvalidInput("alpha grid is empty");
  for (double a : grid)
    if (!(a > 0.0)) throw InvalidParameter("alpha grid values must be positive");
}

}  // namespace

std::vector<NaiveSolveColumn> naive_solve_demo(std::span<const int> n_list) {
  if (n_list.empty()) throw InvalidInput("naive_solve_demo: empty n list");
  std::vector<NaiveSolveColumn> out;
  for (int n : n_list) {
    const DiscreteProblem p = problems::simpson_problem(n);
    const Vector x = linalg::solve_general(p.a, p.y_exact);
    NaiveSolveColumn col;
    col.n = n;
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const auto j = static_cast<std::size_t>(std::lround(t * n));
      col.probe_t.push_back(t);
      col.solution.push_back(x[j]);
      col.error.push_back(p.x_exact[j] - x[j]);
    }
    for (std::size_t j = 0; j < x.size(); ++j)
      col.max_error = std::max(col.max_error, std::abs(p.x_exact[j] - x[j]));
    col.condition = linalg::condition_number(p.a);
    out.push_back(std::move(col));
  }
  return out;
}

std::vector<SweepRecord> alpha_sweep(const DiscreteProblem& problem, const FilterSpec& family,
                                     std::span<const double> alpha_grid, double delta, std::uint64_t seed) {
  require_alpha_grid(alpha_grid);
  const auto sample = problems::add_noise(problem.y_exact, delta, seed);
  const auto sys = linalg::singular_system(problem.a);
  std::vector<SweepRecord> out;
  out.reserve(alpha_grid.size());
  for (double alpha : alpha_grid) {
    const FilterSpec spec = family.with_alpha(alpha);
    const auto sol = solvers::apply_filter_solver(sys, sample.y_delta, spec);
    out.push_back(make_record(problem, alpha, sol, spec.describe()));
  }
  return out;
}

std::vector<IterationTrajectory> iteration_sweep(const DiscreteProblem& problem,
                                                 std::span<const FilterVariant> methods,
                                                 const IterationConfig& config) {
  if (config.m_max < 1) throw InvalidParameter("iteration_sweep: m_max must be >= 1");
  const auto sample = problems::add_noise(problem.y_exact, config.delta, config.seed);
  const auto& y = sample.y_delta;
  std::vector<IterationTrajectory> out;

  for (FilterVariant v : methods) {
    IterationTrajectory traj;
    traj.records.reserve(config.m_max);
    switch (v) {
      case FilterVariant::IteratedTikhonov: {
        traj.method = FilterSpec::iterated_tikhonov(config.alpha, config.m_max);
        const std::string name = traj.method.describe();
        solvers::iterated_tikhonov(problem.a, y, config.alpha, config.m_max, [&](int k, std::span<const double> x) {
          traj.records.push_back(record_iterate(problem, y, k, x, name));
        });
        break;
      }
      case FilterVariant::Landweber: {
        double step = config.a;
        const double mu1 = linalg::singular_system(problem.a).mu1();
        if (!(step * mu1 * mu1 < 2.0)) {
          step = 0.5 / (mu1 * mu1);
          traj.step_rescaled = true;
        }
        traj.method = FilterSpec::landweber(step, config.m_max);
        const std::string name = traj.method.describe();
        solvers::landweber(problem.a, y, step, config.m_max, [&](int k, std::span<const double> x) {
          traj.records.push_back(record_iterate(problem, y, k, x, name));
        });
        break;
      }
      case FilterVariant::IteratedFractionalWeighted: {
        traj.method = FilterSpec::iterated_fractional_weighted(config.alpha, config.l, config.r, config.m_max);
        const std::string name = traj.method.describe();
        solvers::new_iterated_tikhonov(problem.a, y, config.alpha, config.l, config.r, config.m_max,
                                       [&](int k, std::span<const double> x) {
                                         traj.records.push_back(record_iterate(problem, y, k, x, name));
                                       });
        break;
      }
      default:
        throw InvalidInput("iteration_sweep: " + std::string(filters::to_string(v)) + " is not an iterative method");
    }
    out.push_back(std::move(traj));
  }
  return out;
}

std::vector<LCurveSeries> lcurve_data(const DiscreteProblem& problem, std::span<const double> alpha_grid,
                                      std::span<const double> delta_list, std::uint64_t seed) {
  if (delta_list.empty()) throw InvalidInput("lcurve_data: empty delta list");
  std::vector<LCurveSeries> out;
  for (double delta : delta_list) {
    out.push_back({delta, alpha_sweep(problem, FilterSpec::tikhonov(1.0), alpha_grid, delta, seed)});
  }
  return out;
}

std::vector<ComparisonRow> comparison_table(const DiscreteProblem& problem, std::span<const double> delta_list,
                                            const ComparisonConfig& config, std::uint64_t seed) {
  if (delta_list.empty()) throw InvalidInput("comparison_table: empty delta list");
  if (config.alphas.size() != delta_list.size())
    throw InvalidInput("comparison_table: need exactly one alpha per delta");
  std::vector<ComparisonRow> out;
  for (std::size_t i = 0; i < delta_list.size(); ++i) {
    const double delta = delta_list[i];
    const double alpha = config.alphas[i];
    const auto sample = problems::add_noise(problem.y_exact, delta, seed);
    const auto& y = sample.y_delta;
    ComparisonRow row;
    row.delta = delta;
    row.err_iterated_tikhonov =
        problems::solution_error(problem, solvers::iterated_tikhonov(problem.a, y, alpha, config.m).x);
    row.err_landweber = problems::solution_error(problem, solvers::landweber(problem.a, y, config.a, config.m).x);
    row.err_new_iterated = problems::solution_error(
        problem, solvers::new_iterated_tikhonov(problem.a, y, alpha, config.l, config.r, config.m).x);
    out.push_back(row);
  }
  return out;
}

std::vector<OptimizedComparisonRow> comparison_table_optimized(const DiscreteProblem& problem,
                                                               std::span<const double> delta_list,
                                                               const ComparisonConfig& config,
                                                               std::span<const double> alpha_grid,
                                                               std::uint64_t seed) {
  if (delta_list.empty()) throw InvalidInput("comparison_table_optimized: empty delta list");
  require_alpha_grid(alpha_grid);
  const auto sys = linalg::singular_system(problem.a);
  std::vector<OptimizedComparisonRow> out;
  for (double delta : delta_list) {
    const auto sample = problems::add_noise(problem.y_exact, delta, seed);
    const auto& y = sample.y_delta;
    OptimizedComparisonRow row;
    row.errors.delta = delta;
    row.errors.err_iterated_tikhonov = row.errors.err_new_iterated = std::numeric_limits<double>::infinity();
    for (double alpha : alpha_grid) {
      const double e_it = problems::solution_error(
          problem, solvers::apply_filter_solver(sys, y, FilterSpec::iterated_tikhonov(alpha, config.m)).x);
      if (e_it < row.errors.err_iterated_tikhonov) {
        row.errors.err_iterated_tikhonov = e_it;
        row.alpha_iterated_tikhonov = alpha;
      }
      const double e_new = problems::solution_error(
          problem, solvers::apply_filter_solver(
                       sys, y, FilterSpec::iterated_fractional_weighted(alpha, config.l, config.r, config.m))
                       .x);
      if (e_new < row.errors.err_new_iterated) {
        row.errors.err_new_iterated = e_new;
        row.alpha_new_iterated = alpha;
      }
    }
    row.errors.err_landweber = std::numeric_limits<double>::infinity();
    solvers::landweber(problem.a, y, config.a, config.m, [&](int k, std::span<const double> x) {
      const double e = problems::solution_error(problem, x);
      if (e < row.errors.err_landweber) {
        row.errors.err_landweber = e;
        row.m_landweber = k;
      }
    });
    out.push_back(row);
  }
  return out;
}

linalg::SingularSystem synthetic_diagonal_system(std::size_t n, double ratio) {
  if (n == 0) throw InvalidInput("synthetic_diagonal_system: n must be positive");
  if (!(ratio > 0.0 && ratio <= 1.0)) throw InvalidInput("synthetic_diagonal_system: ratio must lie in (0, 1]");
  linalg::SingularSystem sys;
  sys.mu.resize(n);
  for (std::size_t j = 0; j < n; ++j) sys.mu[j] = std::pow(ratio, static_cast<double>(j));
  sys.left_vectors = linalg::DenseMatrix::identity(n);
  sys.right_vectors = linalg::DenseMatrix::identity(n);
  return sys;
}

double alpha_for_rule(AlphaRule rule, double delta, double e_bound, double sigma, int m) {
  if (rule == AlphaRule::Apriori) return solvers::apriori_alpha(delta, e_bound, sigma, m);
  // c = sigma * c_sigma makes c_hat = 1.
  return solvers::general_alpha(delta, e_bound, 0.5, sigma, sigma, 1.0);
}

RateResult rate_estimate(const linalg::SingularSystem& sys, const RateConfig& config) {
  if (config.deltas.size() < 3) throw InvalidInput("rate_estimate: need at least three delta values");
  const auto [lo, hi] = std::minmax_element(config.deltas.begin(), config.deltas.end());
  if (!(*lo > 0.0)) throw InvalidParameter("rate_estimate: delta values must be positive");
  if (*hi / *lo < 1e3 * (1.0 - 1e-12)) throw InvalidInput("rate_estimate: delta values must span >= 3 decades");
  if (config.seeds < 1) throw InvalidParameter("rate_estimate: need at least one seed");

  RateResult out;
  for (double delta : config.deltas) {
    const double alpha = alpha_for_rule(config.rule, delta, config.e_bound, config.sigma, config.m);
    const FilterSpec spec = FilterSpec::iterated_fractional_weighted(alpha, config.l, config.r, config.m);
    Vector errors;
    for (int k = 0; k < config.seeds; ++k) {
      const std::uint64_t s = derive_seed(config.seed, static_cast<std::uint64_t>(k));
      const auto source = solvers::make_source_element(sys, config.sigma, config.e_bound, derive_seed(s, 0));
      const Vector y = sys.apply(source.x);
      const auto sample = problems::add_noise(y, delta, derive_seed(s, 1));
      const auto sol = solvers::apply_filter_solver(sys, sample.y_delta, spec);
      errors.push_back(linalg::norm2(linalg::subtract(sol.x, source.x)));
    }
    out.deltas.push_back(delta);
    out.alphas.push_back(alpha);
    out.median_errors.push_back(median(errors));
  }
  Vector lx, ly;
  for (std::size_t i = 0; i < out.deltas.size(); ++i) {
    lx.push_back(std::log(out.deltas[i]));
    ly.push_back(std::log(out.median_errors[i]));
  }
  out.slope = filters::least_squares_slope(lx, ly);
  return out;
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_sweep_csv(std::ostream& os, std::span<const SweepRecord> records, std::uint64_t seed) {
  os << "# seed=" << seed << '\n';
  os << "param,error,residual_norm,solution_norm,method\n";
  for (const auto& r : records) {
    os << format_real(r.parameter) << ',' << format_real(r.error) << ',' << format_real(r.residual_norm) << ','
       << format_real(r.solution_norm) << ',' << r.method << '\n';
  }
}

void write_comparison_csv(std::ostream& os, std::span<const ComparisonRow> rows, std::uint64_t seed) {
  os << "# seed=" << seed << '\n';
  os << "delta,err_iterated_tikhonov,err_landweber,err_new_iterated\n";
  for (const auto& r : rows) {
    os << format_real(r.delta) << ',' << format_real(r.err_iterated_tikhonov) << ','
       << format_real(r.err_landweber) << ',' << format_real(r.err_new_iterated) << '\n';
  }
}

}  // namespace itreg::experiments
