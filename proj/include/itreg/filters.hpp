#pragma once

// Spectral filter functions q(alpha, mu) of filter-based regularization and
// grid-based checks of the regularizing-filter and order-optimality
// conditions.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace itreg::filters {

enum class FilterVariant {
  Tikhonov,
  Landweber,
  IteratedTikhonov,
  WeightedII,
  FractionalTikhonov,
  FractionalWeighted,
  IteratedFractionalWeighted,
};

std::string_view to_string(FilterVariant v);
/// Accepts the names produced by to_string; throws InvalidInput otherwise.
FilterVariant parse_variant(std::string_view name);

/// A method family plus its parameters. Fields a variant does not use are
/// ignored by it.
struct FilterSpec {
  FilterVariant variant = FilterVariant::Tikhonov;
  double alpha = 1.0;  // regularization parameter; unused by Landweber
  int l = 0;           // weight exponent
  double r = 1.0;      // fractional power, >= 1/2
  int m = 1;           // iteration count
  double a = 0.5;      // Landweber step

  static FilterSpec tikhonov(double alpha);
  static FilterSpec landweber(double a, int m);
  static FilterSpec iterated_tikhonov(double alpha, int m);
  static FilterSpec weighted_ii(double alpha, int l);
  static FilterSpec fractional_tikhonov(double alpha, double r);
  static FilterSpec fractional_weighted(double alpha, int l, double r);
  static FilterSpec iterated_fractional_weighted(double alpha, int l, double r, int m);

  /// Throws InvalidParameter when a field the variant uses is out of range.
  void validate() const;
  FilterSpec with_alpha(double new_alpha) const;
  FilterSpec with_iterations(int new_m) const;
  /// Short label such as "iterated_fractional_weighted(alpha=0.001;l=2;r=0.8;m=100)".
  std::string describe() const;

  bool uses_alpha() const { return variant != FilterVariant::Landweber; }
};

/// q(alpha, mu) for 0 < mu <= mu1. Landweber additionally requires
/// a * mu1^2 < 2.
double filter_value(const FilterSpec& spec, double mu, double mu1);

/// Landweber filter with a real-valued iteration count, so that the
/// alpha = 1/m identification can be used in the condition checks.
double landweber_value(double a, double mu, double iterations);

/// ((x+1)^r - x^r) / (x+1)^(r-1); monotone between f(0) = 1 and r.
double fractional_ratio(double x, double r);

/// min{1,r}(1 - q_l) <= 1 - q_l^r <= max{1,r}(1 - q_l), with 1e-12 slack.
bool sandwich_check(int l, double r, double alpha, double mu, double mu1);

struct FilterConditionReport {
  std::vector<double> alpha_grid;
  std::vector<double> c_alpha;            // sup_mu |q/mu| for each alpha
  double q_bound = 0.0;                   // sup over both grids of |q|
  bool limit_check = false;               // q(1e-12, mu) > 0.95 on the grid
  double gamma_fit = 0.0;                 // slope of log c(alpha) vs -log alpha
  double sigma = 0.0;                     // 0 when no order check was run
  std::vector<double> qualification_sup;  // sup_mu (1-q) mu^sigma for each alpha
  double qualification_exponent = 0.0;    // slope of log qualification_sup vs log alpha
};

inline constexpr double kLimitAlpha = 1e-12;
inline constexpr double kLimitTolerance = 0.05;

/// Regularizing-filter conditions on grids. mu1 is the largest grid value.
FilterConditionReport check_filter_conditions(const FilterSpec& spec,
                                              std::span<const double> mu_grid,
                                              std::span<const double> alpha_grid);

/// As above, plus the qualification supremum for smoothness sigma.
FilterConditionReport check_order_conditions(const FilterSpec& spec, double sigma,
                                             std::span<const double> mu_grid,
                                             std::span<const double> alpha_grid);

/// `count` log-spaced points in [mu_min, mu1] plus sqrt(alpha) for every alpha
/// in range (where Tikhonov-type extrema sit), sorted, duplicates removed.
std::vector<double> make_mu_grid(double mu_min, double mu1, std::size_t count,
                                 std::span<const double> alpha_grid);

/// Unweighted least-squares slope of y against x.
double least_squares_slope(std::span<const double> x, std::span<const double> y);

}  // namespace itreg::filters
