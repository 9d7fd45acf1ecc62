#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "itreg/errors.hpp"
#include "itreg/experiments.hpp"
#include "itreg/random.hpp"
#include "itreg/solvers.hpp"

using namespace itreg;
using namespace itreg::experiments;
using filters::FilterVariant;

namespace {

const std::vector<double> kGrid{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10};

std::size_t argmin_error(const std::vector<SweepRecord>& r) {
  return std::min_element(r.begin(), r.end(), [](auto& a, auto& b) { return a.error < b.error; }) - r.begin();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
}

const DiscreteProblem& laplace32() {
  static const DiscreteProblem p = problems::laplace_problem(32);
  return p;
}

}  // namespace

TEST(NaiveSolveDemo, Blowup) {
  const std::vector<int> ns{4, 8, 16, 32};
  const auto cols = naive_solve_demo(ns);
  ASSERT_EQ(cols.size(), 4u);
  for (const auto& c : cols) {
    ASSERT_EQ(c.probe_t.size(), 5u);
    EXPECT_EQ(c.probe_t.front(), 0.0);
    EXPECT_EQ(c.probe_t.back(), 1.0);
    for (std::size_t i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(c.error[i], 1.0 - c.solution[i]);
  }
  EXPECT_GE(cols[3].max_error, 1.0);
  EXPECT_GT(cols[3].condition, 1e12);
  for (std::size_t i = 0; i + 1 < cols.size(); ++i) EXPECT_LT(cols[i].condition, cols[i + 1].condition);
  bool decreasing = true;
  for (std::size_t i = 0; i + 1 < cols.size(); ++i) decreasing = decreasing && cols[i + 1].max_error < cols[i].max_error;
  EXPECT_FALSE(decreasing);
  // n = 4: frozen regression value of max |1 - x_i|.
  EXPECT_NEAR(cols[0].max_error, 0.22701, 1e-4);
}

TEST(NaiveSolveDemo, Errors) {
  EXPECT_THROW(naive_solve_demo(std::vector<int>{5}), InvalidInput);
  EXPECT_THROW(naive_solve_demo(std::vector<int>{}), InvalidInput);
}

TEST(AlphaSweep, CardinalityOrderAndDeterminism) {
  const auto r = alpha_sweep(laplace32(), filters::FilterSpec::tikhonov(1.0), kGrid, 1e-3, 42);
  ASSERT_EQ(r.size(), 10u);
  for (std::size_t i = 0; i < r.size(); ++i) {
    EXPECT_EQ(r[i].parameter, kGrid[i]);
    EXPECT_TRUE(std::isfinite(r[i].error));
    EXPECT_GE(r[i].error, 0.0);
    EXPECT_EQ(r[i].method, filters::FilterSpec::tikhonov(kGrid[i]).describe());
  }
  const auto again = alpha_sweep(laplace32(), filters::FilterSpec::tikhonov(1.0), kGrid, 1e-3, 42);
  for (std::size_t i = 0; i < r.size(); ++i) {
    EXPECT_EQ(again[i].error, r[i].error);
    EXPECT_EQ(again[i].residual_norm, r[i].residual_norm);
  }
}

TEST(AlphaSweep, DiscretizationGapWithoutNoise) {
  const auto p16 = problems::laplace_problem(16);
  const auto r16 = alpha_sweep(p16, filters::FilterSpec::tikhonov(1.0), kGrid, 0.0, 42);
  const auto r32 = alpha_sweep(laplace32(), filters::FilterSpec::tikhonov(1.0), kGrid, 0.0, 42);
  double best_ratio = 0.0;
  for (std::size_t i = 0; i < kGrid.size(); ++i) {
    if (kGrid[i] >= 1e-4) continue;
    const double hi = std::max(r16[i].error, r32[i].error);
    const double lo = std::min(r16[i].error, r32[i].error);
    best_ratio = std::max(best_ratio, hi / lo);
  }
  EXPECT_GT(best_ratio, 2.0);
}

TEST(AlphaSweep, InteriorMinimumWithNoise) {
  const auto r = alpha_sweep(laplace32(), filters::FilterSpec::tikhonov(1.0), kGrid, 1e-3, 42);
  const auto k = argmin_error(r);
  EXPECT_GT(k, 0u);
  EXPECT_LT(k, kGrid.size() - 1);
}

TEST(AlphaSweep, Errors) {
  EXPECT_THROW(alpha_sweep(laplace32(), filters::FilterSpec::tikhonov(1.0), std::vector<double>{}, 1e-3, 1),
               InvalidInput);
  EXPECT_THROW(alpha_sweep(laplace32(), filters::FilterSpec::tikhonov(1.0), kGrid, -1.0, 1), InvalidParameter);
  EXPECT_THROW(alpha_sweep(laplace32(), filters::FilterSpec::tikhonov(1.0), std::vector<double>{0.0}, 1e-3, 1),
               InvalidParameter);
}

TEST(IterationSweep, FirstRecordMatchesSingleStep) {
  IterationConfig cfg;
  cfg.m_max = 5;
  const std::vector<FilterVariant> methods{FilterVariant::IteratedTikhonov, FilterVariant::Landweber,
                                           FilterVariant::IteratedFractionalWeighted};
  const auto traj = iteration_sweep(laplace32(), methods, cfg);
  ASSERT_EQ(traj.size(), 3u);
  const auto y = problems::add_noise(laplace32().y_exact, cfg.delta, cfg.seed).y_delta;
  const auto& a = laplace32().a;
  const double e_it = problems::solution_error(laplace32(), solvers::iterated_tikhonov(a, y, cfg.alpha, 1).x);
  const double e_lw = problems::solution_error(laplace32(), solvers::landweber(a, y, cfg.a, 1).x);
  const double e_new = problems::solution_error(
      laplace32(), solvers::new_iterated_tikhonov(a, y, cfg.alpha, cfg.l, cfg.r, 1).x);
  EXPECT_NEAR(traj[0].records[0].error, e_it, 1e-12);
  EXPECT_NEAR(traj[1].records[0].error, e_lw, 1e-12);
  EXPECT_NEAR(traj[2].records[0].error, e_new, 1e-12);
  for (const auto& t : traj) {
    ASSERT_EQ(t.records.size(), 5u);
    for (int k = 0; k < 5; ++k) EXPECT_EQ(t.records[k].parameter, k + 1);
  }
  EXPECT_FALSE(traj[1].step_rescaled);
}

TEST(IterationSweep, LandweberSemiconvergence) {
  IterationConfig cfg;
  cfg.m_max = 3000;
  cfg.delta = 1e-2;
  const std::vector<FilterVariant> methods{FilterVariant::Landweber};
  const auto t = iteration_sweep(laplace32(), methods, cfg);
  const auto k = argmin_error(t[0].records);
  EXPECT_GT(k, 0u);
  EXPECT_LT(k, 2999u);
}

TEST(IterationSweep, RescalesInvalidStep) {
  IterationConfig cfg;
  cfg.m_max = 3;
  cfg.a = 5.0;
  const std::vector<FilterVariant> methods{FilterVariant::Landweber};
  const auto t = iteration_sweep(laplace32(), methods, cfg);
  EXPECT_TRUE(t[0].step_rescaled);
  const double mu1 = linalg::singular_system(laplace32().a).mu1();
  EXPECT_NEAR(t[0].method.a, 0.5 / (mu1 * mu1), 1e-15);
}

TEST(IterationSweep, Errors) {
  IterationConfig cfg;
  const std::vector<FilterVariant> bad{FilterVariant::Tikhonov};
  EXPECT_THROW(iteration_sweep(laplace32(), bad, cfg), InvalidInput);
  cfg.m_max = 0;
  const std::vector<FilterVariant> ok{FilterVariant::Landweber};
  EXPECT_THROW(iteration_sweep(laplace32(), ok, cfg), InvalidParameter);
}

TEST(LCurve, MonotoneNorms) {
  const std::vector<double> deltas{1e-1, 1e-2, 1e-3, 1e-4};
  const auto series = lcurve_data(laplace32(), kGrid, deltas, 42);
  ASSERT_EQ(series.size(), 4u);
  for (const auto& s : series) {
    ASSERT_EQ(s.records.size(), kGrid.size());
    for (std::size_t i = 0; i + 1 < s.records.size(); ++i) {
      // Alpha decreases along the grid.
      EXPECT_LE(s.records[i + 1].residual_norm, s.records[i].residual_norm * (1 + 1e-12)) << s.delta << " " << i;
      EXPECT_GE(s.records[i + 1].solution_norm, s.records[i].solution_norm * (1 - 1e-12)) << s.delta << " " << i;
    }
  }
}

TEST(LCurve, SmallerNoiseSmallerMedianError) {
  const std::vector<double> deltas{1e-1, 1e-2, 1e-3, 1e-4};
  std::vector<std::vector<std::vector<double>>> errs(deltas.size(), std::vector<std::vector<double>>(kGrid.size()));
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto series = lcurve_data(laplace32(), kGrid, deltas, derive_seed(42, s));
    for (std::size_t d = 0; d < deltas.size(); ++d)
      for (std::size_t i = 0; i < kGrid.size(); ++i) errs[d][i].push_back(series[d].records[i].error);
  }
  for (std::size_t i = 0; i < kGrid.size(); ++i)
    for (std::size_t d = 0; d + 1 < deltas.size(); ++d)
      EXPECT_GE(median(errs[d][i]), median(errs[d + 1][i])) << "alpha=" << kGrid[i] << " delta=" << deltas[d];
}

TEST(LCurve, NoiseFreeResidualFrozen) {
  // The exact data carry the quadrature inconsistency, so the residual floor
  // is about 0.072 rather than zero.
  const std::vector<double> zero{0.0};
  const auto series = lcurve_data(laplace32(), kGrid, zero, 42);
  EXPECT_NEAR(series[0].records.back().residual_norm, 0.0724, 5e-4);
  EXPECT_LE(series[0].records.back().residual_norm, laplace32().consistency_residual);
}

TEST(ComparisonTable, ShapeAndSharedNoise) {
  ComparisonConfig cfg;
  const auto rows = comparison_table(laplace32(), kTable2Deltas, cfg, kDefaultSeed);
  ASSERT_EQ(rows.size(), 4u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].delta, kTable2Deltas[i]);
    // Recompute every method on one explicitly shared sample.
    const auto y = problems::add_noise(laplace32().y_exact, rows[i].delta, kDefaultSeed).y_delta;
    const auto& a = laplace32().a;
    EXPECT_EQ(rows[i].err_iterated_tikhonov,
              problems::solution_error(laplace32(), solvers::iterated_tikhonov(a, y, cfg.alphas[i], cfg.m).x));
    EXPECT_EQ(rows[i].err_landweber,
              problems::solution_error(laplace32(), solvers::landweber(a, y, cfg.a, cfg.m).x));
    EXPECT_EQ(rows[i].err_new_iterated,
              problems::solution_error(laplace32(),
                                       solvers::new_iterated_tikhonov(a, y, cfg.alphas[i], cfg.l, cfg.r, cfg.m).x));
  }
}

TEST(ComparisonTable, FrozenDefaultRun) {
  // Regression values for the default configuration and seed.
  const auto rows = comparison_table(laplace32(), kTable2Deltas, ComparisonConfig{}, kDefaultSeed);
  EXPECT_NEAR(rows[0].err_landweber, 0.08226, 1e-4);
  EXPECT_NEAR(rows[2].err_iterated_tikhonov, 1.7563, 1e-3);
  EXPECT_NEAR(rows[2].err_new_iterated, 2.6138, 1e-3);
}

TEST(ComparisonTable, NewMethodIsLessRegularizedAtEqualParameters) {
  // For r < 1 the inner fractional filter dominates the Tikhonov one, so
  // at identical (alpha, m) the new method filters less.
  for (double mu : {1e-6, 1e-3, 0.1, 0.9})
    for (double alpha : {1e-3, 0.9}) {
      const double q_new = filters::filter_value(filters::FilterSpec::iterated_fractional_weighted(alpha, 2, 0.8, 100), mu, 1.0);
      const double q_it = filters::filter_value(filters::FilterSpec::iterated_tikhonov(alpha, 100), mu, 1.0);
      EXPECT_GE(q_new, q_it - 1e-15);
    }
}

TEST(ComparisonTable, Errors) {
  ComparisonConfig cfg;
  cfg.alphas = {1.0};
  EXPECT_THROW(comparison_table(laplace32(), kTable2Deltas, cfg, 1), InvalidInput);
  EXPECT_THROW(comparison_table(laplace32(), std::vector<double>{}, ComparisonConfig{}, 1), InvalidInput);
}

TEST(ComparisonTableOptimized, BestParametersNoWorseThanDefaults) {
  const auto rows = comparison_table_optimized(laplace32(), kTable2Deltas, ComparisonConfig{}, kGrid, kDefaultSeed);
  const auto plain = comparison_table(laplace32(), kTable2Deltas, ComparisonConfig{}, kDefaultSeed);
  ASSERT_EQ(rows.size(), 4u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_LE(rows[i].errors.err_landweber, plain[i].err_landweber + 1e-15);
    EXPECT_GE(rows[i].m_landweber, 1);
    EXPECT_LE(rows[i].m_landweber, 100);
    EXPECT_NE(std::find(kGrid.begin(), kGrid.end(), rows[i].alpha_new_iterated), kGrid.end());
    EXPECT_NE(std::find(kGrid.begin(), kGrid.end(), rows[i].alpha_iterated_tikhonov), kGrid.end());
  }
}

TEST(RateEstimate, MatchesTheoreticalExponent) {
  const auto sys = synthetic_diagonal_system(64, 0.8);
  for (int m : {1, 2}) {
    RateConfig cfg;
    cfg.m = m;
    cfg.sigma = 2.0 * m;
    const auto res = rate_estimate(sys, cfg);
    EXPECT_NEAR(res.slope, 2.0 * m / (2.0 * m + 1.0), 0.15) << m;
    ASSERT_EQ(res.median_errors.size(), 5u);
    for (std::size_t i = 0; i + 1 < res.deltas.size(); ++i) EXPECT_GT(res.median_errors[i], res.median_errors[i + 1]);
  }
}

TEST(RateEstimate, AlphaRules) {
  EXPECT_NEAR(alpha_for_rule(AlphaRule::Apriori, 1e-4, 1.0, 4.0, 2), std::pow(1e-4, 0.8), 1e-18);
  EXPECT_NEAR(alpha_for_rule(AlphaRule::General, 1e-4, 1.0, 4.0, 2), std::pow(1e-4, 0.4), 1e-16);
  // Both coincide for m = 1.
  EXPECT_NEAR(alpha_for_rule(AlphaRule::Apriori, 1e-3, 1.0, 2.0, 1), alpha_for_rule(AlphaRule::General, 1e-3, 1.0, 2.0, 1),
              1e-16);
}

TEST(RateEstimate, Errors) {
  const auto sys = synthetic_diagonal_system(16, 0.8);
  RateConfig cfg;
  cfg.deltas = {1e-2, 1e-3};
  EXPECT_THROW(rate_estimate(sys, cfg), InvalidInput);
  cfg.deltas = {1e-2, 1e-3, 1e-4};
  EXPECT_THROW(rate_estimate(sys, cfg), InvalidInput);
  cfg.deltas = {1e-2, 1e-3, 1e-4, 1e-5};
  EXPECT_NO_THROW(rate_estimate(sys, cfg));
  EXPECT_THROW(synthetic_diagonal_system(0, 0.5), InvalidInput);
  EXPECT_THROW(synthetic_diagonal_system(4, 1.5), InvalidInput);
}

TEST(Output, SweepCsv) {
  const auto r = alpha_sweep(laplace32(), filters::FilterSpec::tikhonov(1.0), kGrid, 1e-3, 7);
  std::ostringstream os;
  write_sweep_csv(os, r, 7);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# seed=7");
  std::getline(in, line);
  EXPECT_EQ(line, "param,error,residual_norm,solution_norm,method");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    const auto first = line.substr(0, line.find(','));
    EXPECT_EQ(std::stod(first), kGrid[rows - 1]);
  }
  EXPECT_EQ(rows, 10);
  EXPECT_EQ(format_real(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(format_real(r[3].error)), r[3].error);
}

TEST(Output, ComparisonCsv) {
  const auto rows = comparison_table(laplace32(), kTable2Deltas, ComparisonConfig{}, kDefaultSeed);
  std::ostringstream os;
  write_comparison_csv(os, rows, kDefaultSeed);
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("# seed=42\ndelta,err_iterated_tikhonov,err_landweber,err_new_iterated\n", 0), 0u);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 6);
}
