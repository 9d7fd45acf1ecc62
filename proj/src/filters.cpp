#include "itreg/filters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "itreg/errors.hpp"

namespace itreg::filters {

namespace {

constexpr double kWeightCutoff = 1e-15;
constexpr double kSandwichSlack = 1e-12;

// 1 - (mu/mu1)^2, exactly zero at the top of the spectrum.
double spectral_weight(double mu, double mu1) {
  const double ratio = mu / mu1;
  const double w = (1.0 - ratio) * (1.0 + ratio);
  return std::abs(w) < kWeightCutoff ? 0.0 : std::max(w, 0.0);
}

double fractional_weighted(double alpha, int l, double r, double mu, double mu1) {
  const double mu2 = mu * mu;
  const double penalty = alpha * std::pow(spectral_weight(mu, mu1), l);
  if (penalty == 0.0) return 1.0;
  const double base = mu2 / (mu2 + penalty);
  return r == 1.0 ? base : std::pow(base, r);
}

// 1 - (1 - q)^m without cancellation for small q.
double iterate_filter(double q, double m) {
  if (q >= 1.0) return 1.0;
  return -std::expm1(m * std::log1p(-q));
}

void check_mu(double mu, double mu1) {
  if (!(mu1 > 0.0) || !std::isfinite(mu1)) throw InvalidParameter("filter: mu1 must be positive");
  if (!(mu > 0.0) || mu > mu1) throw InvalidParameter("filter: mu must lie in (0, mu1]");
}

void check_landweber_step(double a, double mu1) {
  if (!(a * mu1 * mu1 < 2.0)) {
    std::ostringstream msg;
    msg << "filter: Landweber step a=" << a << " violates a*mu1^2 < 2 (mu1=" << mu1 << ")";
    throw InvalidParameter(msg.str());
  }
}

// Value used by the condition checks, where Landweber's alpha stands for 1/m.
double grid_value(const FilterSpec& spec, double alpha, double mu, double mu1) {
  if (spec.variant == FilterVariant::Landweber) {
    return landweber_value(spec.a, mu, std::max(1.0, std::round(1.0 / alpha)));
  }
  return filter_value(spec.with_alpha(alpha), mu, mu1);
}

void require_grids(std::span<const double> mu_grid, std::span<const double> alpha_grid) {
  if (mu_grid.empty()) throw InvalidInput("filter check: empty mu grid");
  if (alpha_grid.empty()) throw InvalidInput("filter check: empty alpha grid");
  for (double mu : mu_grid)
    if (!(mu > 0.0) || !std::isfinite(mu)) throw InvalidInput("filter check: mu grid must be positive");
  for (double a : alpha_grid)
    if (!(a > 0.0) || !std::isfinite(a)) throw InvalidInput("filter check: alpha grid must be positive");
}

double log_slope(std::span<const double> xs, std::span<const double> ys, bool negate_x) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(ys[i] > 0.0) || !std::isfinite(ys[i])) continue;
    lx.push_back(negate_x ? -std::log(xs[i]) : std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  if (lx.size() < 2) return 0.0;
  return least_squares_slope(lx, ly);
}

}  // namespace

std::string_view to_string(FilterVariant v) {
  switch (v) {
    case FilterVariant::Tikhonov: return "tikhonov";
    case FilterVariant::Landweber: return "landweber";
    case FilterVariant::IteratedTikhonov: return "iterated_tikhonov";
    case FilterVariant::WeightedII: return "weighted_ii";
    case FilterVariant::FractionalTikhonov: return "fractional_tikhonov";
    case FilterVariant::FractionalWeighted: return "fractional_weighted";
    case FilterVariant::IteratedFractionalWeighted: return "iterated_fractional_weighted";
  }
  return "unknown";
}

FilterVariant parse_variant(std::string_view name) {
  for (auto v : {FilterVariant::Tikhonov, FilterVariant::Landweber, FilterVariant::IteratedTikhonov,
                 FilterVariant::WeightedII, FilterVariant::FractionalTikhonov,
                 FilterVariant::FractionalWeighted, FilterVariant::IteratedFractionalWeighted}) {
    if (to_string(v) == name) return v;
  }
  throw InvalidInput("unknown filter variant '" + std::string(name) + "'");
}

FilterSpec FilterSpec::tikhonov(double alpha) {
  return {.variant = FilterVariant::Tikhonov, .alpha = alpha};
}
FilterSpec FilterSpec::landweber(double a, int m) {
  return {.variant = FilterVariant::Landweber, .m = m, .a = a};
}
FilterSpec FilterSpec::iterated_tikhonov(double alpha, int m) {
  return {.variant = FilterVariant::IteratedTikhonov, .alpha = alpha, .m = m};
}
FilterSpec FilterSpec::weighted_ii(double alpha, int l) {
  return {.variant = FilterVariant::WeightedII, .alpha = alpha, .l = l};
}
FilterSpec FilterSpec::fractional_tikhonov(double alpha, double r) {
  return {.variant = FilterVariant::FractionalTikhonov, .alpha = alpha, .r = r};
}
FilterSpec FilterSpec::fractional_weighted(double alpha, int l, double r) {
  return {.variant = FilterVariant::FractionalWeighted, .alpha = alpha, .l = l, .r = r};
}
FilterSpec FilterSpec::iterated_fractional_weighted(double alpha, int l, double r, int m) {
  return {.variant = FilterVariant::IteratedFractionalWeighted, .alpha = alpha, .l = l, .r = r, .m = m};
}

void FilterSpec::validate() const {
  const bool needs_l = variant == FilterVariant::WeightedII || variant == FilterVariant::FractionalWeighted ||
                       variant == FilterVariant::IteratedFractionalWeighted;
  const bool needs_r = variant == FilterVariant::FractionalTikhonov ||
                       variant == FilterVariant::FractionalWeighted ||
                       variant == FilterVariant::IteratedFractionalWeighted;
  const bool needs_m = variant == FilterVariant::Landweber || variant == FilterVariant::IteratedTikhonov ||
                       variant == FilterVariant::IteratedFractionalWeighted;
  if (uses_alpha() && !(alpha > 0.0 && std::isfinite(alpha)))
    throw InvalidParameter("alpha must be positive");
  if (needs_l && l < 0) throw InvalidParameter("l must be a non-negative integer");
  if (needs_r && !(r >= 0.5 && std::isfinite(r))) throw InvalidParameter("r must satisfy r >= 1/2");
  if (needs_m && m < 1) throw InvalidParameter("m must be >= 1");
  if (variant == FilterVariant::Landweber && !(a > 0.0 && std::isfinite(a)))
    throw InvalidParameter("Landweber step a must be positive");
}

FilterSpec FilterSpec::with_alpha(double new_alpha) const {
  FilterSpec out = *this;
  out.alpha = new_alpha;
  return out;
}

FilterSpec FilterSpec::with_iterations(int new_m) const {
  FilterSpec out = *this;
  out.m = new_m;
  return out;
}

std::string FilterSpec::describe() const {
  std::ostringstream os;
  os << to_string(variant) << '(';
  switch (variant) {
    case FilterVariant::Tikhonov: os << "alpha=" << alpha; break;
    case FilterVariant::Landweber: os << "a=" << a << ";m=" << m; break;
    case FilterVariant::IteratedTikhonov: os << "alpha=" << alpha << ";m=" << m; break;
    case FilterVariant::WeightedII: os << "alpha=" << alpha << ";l=" << l; break;
    case FilterVariant::FractionalTikhonov: os << "alpha=" << alpha << ";r=" << r; break;
    case FilterVariant::FractionalWeighted: os << "alpha=" << alpha << ";l=" << l << ";r=" << r; break;
    case FilterVariant::IteratedFractionalWeighted:
      os << "alpha=" << alpha << ";l=" << l << ";r=" << r << ";m=" << m;
      break;
  }
  os << ')';
  return os.str();
}

double landweber_value(double a, double mu, double iterations) {
  const double base = 1.0 - a * mu * mu;
  if (base > 0.0) return -std::expm1(iterations * std::log1p(-a * mu * mu));
  // |base| < 1 under the step condition, so the power is a damped oscillation.
  return 1.0 - std::pow(base, iterations);
}

double filter_value(const FilterSpec& spec, double mu, double mu1) {
  spec.validate();
  check_mu(mu, mu1);
  const double mu2 = mu * mu;
  switch (spec.variant) {
    case FilterVariant::Tikhonov:
      return mu2 / (spec.alpha + mu2);
    case FilterVariant::Landweber:
      check_landweber_step(spec.a, mu1);
      return landweber_value(spec.a, mu, spec.m);
    case FilterVariant::IteratedTikhonov:
      // 1 - (alpha / (alpha + mu^2))^m
      return -std::expm1(-spec.m * std::log1p(mu2 / spec.alpha));
    case FilterVariant::WeightedII:
      return fractional_weighted(spec.alpha, spec.l, 1.0, mu, mu1);
    case FilterVariant::FractionalTikhonov: {
      const double base = mu2 / (spec.alpha + mu2);
      return spec.r == 1.0 ? base : std::pow(base, spec.r);
    }
    case FilterVariant::FractionalWeighted:
      return fractional_weighted(spec.alpha, spec.l, spec.r, mu, mu1);
    case FilterVariant::IteratedFractionalWeighted:
      return iterate_filter(fractional_weighted(spec.alpha, spec.l, spec.r, mu, mu1), spec.m);
  }
  throw InvalidParameter("filter: unknown variant");
}

double fractional_ratio(double x, double r) {
  // (x+1) * (1 - (x/(x+1))^r), which stays accurate as x grows.
  const double xp1 = x + 1.0;
  return -xp1 * std::expm1(r * std::log1p(-1.0 / xp1));
}

bool sandwich_check(int l, double r, double alpha, double mu, double mu1) {
  const double one_minus_q1 = 1.0 - fractional_weighted(alpha, l, 1.0, mu, mu1);
  const double one_minus_qr = 1.0 - fractional_weighted(alpha, l, r, mu, mu1);
  const double lower = std::min(1.0, r) * one_minus_q1;
  const double upper = std::max(1.0, r) * one_minus_q1;
  return lower <= one_minus_qr + kSandwichSlack && one_minus_qr <= upper + kSandwichSlack;
}

FilterConditionReport check_filter_conditions(const FilterSpec& spec, std::span<const double> mu_grid,
                                              std::span<const double> alpha_grid) {
  require_grids(mu_grid, alpha_grid);
  spec.validate();
  const double mu1 = *std::max_element(mu_grid.begin(), mu_grid.end());
  if (spec.variant == FilterVariant::Landweber) check_landweber_step(spec.a, mu1);

  FilterConditionReport report;
  report.alpha_grid.assign(alpha_grid.begin(), alpha_grid.end());
  for (double alpha : alpha_grid) {
    double c = 0.0;
    for (double mu : mu_grid) {
      const double q = grid_value(spec, alpha, mu, mu1);
      c = std::max(c, std::abs(q / mu));
      report.q_bound = std::max(report.q_bound, std::abs(q));
    }
    report.c_alpha.push_back(c);
  }
  report.limit_check = std::all_of(mu_grid.begin(), mu_grid.end(), [&](double mu) {
    return grid_value(spec, kLimitAlpha, mu, mu1) > 1.0 - kLimitTolerance;
  });
  report.gamma_fit = log_slope(alpha_grid, report.c_alpha, /*negate_x=*/true);
  return report;
}

FilterConditionReport check_order_conditions(const FilterSpec& spec, double sigma,
                                             std::span<const double> mu_grid,
                                             std::span<const double> alpha_grid) {
  if (!(sigma > 0.0)) throw InvalidParameter("order check: sigma must be positive");
  FilterConditionReport report = check_filter_conditions(spec, mu_grid, alpha_grid);
  const double mu1 = *std::max_element(mu_grid.begin(), mu_grid.end());
  report.sigma = sigma;
  for (double alpha : alpha_grid) {
    double sup = 0.0;
    for (double mu : mu_grid) {
      const double q = grid_value(spec, alpha, mu, mu1);
      sup = std::max(sup, std::abs((1.0 - q) * std::pow(mu, sigma)));
    }
    report.qualification_sup.push_back(sup);
  }
  report.qualification_exponent = log_slope(alpha_grid, report.qualification_sup, /*negate_x=*/false);
  return report;
}

std::vector<double> make_mu_grid(double mu_min, double mu1, std::size_t count,
                                 std::span<const double> alpha_grid) {
  if (!(mu_min > 0.0) || !(mu1 >= mu_min)) throw InvalidInput("make_mu_grid: need 0 < mu_min <= mu1");
  if (count < 2) throw InvalidInput("make_mu_grid: need at least two points");
  std::vector<double> grid;
  grid.reserve(count + alpha_grid.size());
  const double lo = std::log(mu_min);
  const double hi = std::log(mu1);
  for (std::size_t i = 0; i < count; ++i) {
    grid.push_back(std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1)));
  }
  grid.back() = mu1;
  for (double alpha : alpha_grid) {
    const double s = std::sqrt(alpha);
    if (s >= mu_min && s <= mu1) grid.push_back(s);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidInput("least_squares_slope: need >= 2 paired points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidInput("least_squares_slope: degenerate abscissae");
  return sxy / sxx;
}

}  // namespace itreg::filters
