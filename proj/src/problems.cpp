#include "itreg/problems.hpp"

#include <cmath>
#include <string>

#include "itreg/errors.hpp"
#include "itreg/random.hpp"
#include "json.hpp"

namespace itreg::problems {

namespace {

constexpr int kMaxPoints = 64;

// L_n(t) and L_{n-1}(t) together, in extended precision.
std::pair<long double, long double> laguerre_pair(int n, long double t) {
  long double prev = 1.0L;  // L_0
  if (n == 0) return {prev, 0.0L};
  long double cur = 1.0L - t;  // L_1
  for (int k = 1; k < n; ++k) {
    const long double next = ((2.0L * k + 1.0L - t) * cur - k * prev) / (k + 1.0L);
    prev = cur;
    cur = next;
  }
  return {cur, prev};
}

Vector residual_of(const DenseMatrix& a, std::span<const double> x, std::span<const double> y) {
  return linalg::subtract(linalg::multiply(a, x), y);
}

}  // namespace

double laguerre(int k, double t) {
  if (k < 0) throw InvalidInput("laguerre: negative degree");
  return static_cast<double>(laguerre_pair(k, t).first);
}

QuadratureRule gauss_laguerre(int n) {
  if (n < 1 || n > kMaxPoints) throw InvalidInput("gauss_laguerre: n must lie in [1, 64]");
  DenseMatrix jacobi(n, n);
  for (int k = 0; k < n; ++k) {
    jacobi(k, k) = 2.0 * k + 1.0;
    if (k + 1 < n) {
      jacobi(k, k + 1) = k + 1.0;
      jacobi(k + 1, k) = k + 1.0;
    }
  }
  const linalg::SymEig eig = linalg::sym_eig(jacobi);

  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    long double t = eig.eigenvalues[n - 1 - i];  // ascending
    for (int iter = 0; iter < 6; ++iter) {
      const auto [ln, lnm1] = laguerre_pair(n, t);
      const long double deriv = n * (ln - lnm1) / t;
      if (deriv == 0.0L) break;
      const long double step = ln / deriv;
      t -= step;
      if (std::abs(step) <= 1e-19L * t) break;
    }
    const long double next = laguerre_pair(n + 1, t).first;
    rule.nodes[i] = static_cast<double>(t);
    rule.weights[i] = static_cast<double>(t / ((n + 1.0L) * (n + 1.0L) * next * next));
  }
  return rule;
}

DiscreteProblem laplace_problem(int n) {
  if (n < 1 || n > kMaxPoints) throw InvalidInput("laplace_problem: n must lie in [1, 64]");
  const QuadratureRule rule = gauss_laguerre(n);
  DiscreteProblem p;
  p.kind = "laplace";
  p.n = n;
  p.nodes = rule.nodes;
  p.weights = rule.weights;
  p.scaling.resize(n);
  for (int j = 0; j < n; ++j) p.scaling[j] = std::sqrt(rule.weights[j] * std::exp(rule.nodes[j]));

  p.a = DenseMatrix(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      p.a(i, j) = p.scaling[i] * std::exp(-p.nodes[i] * p.nodes[j]) * p.scaling[j];
      p.a(j, i) = p.a(i, j);
    }

  p.x_exact.resize(n);
  p.y_exact.resize(n);
  for (int j = 0; j < n; ++j) {
    const double t = p.nodes[j];
    p.x_exact[j] = p.scaling[j] * std::exp(-0.5 * t);
    p.y_exact[j] = p.scaling[j] * 2.0 / (2.0 * t + 1.0);
  }
  p.consistency_residual = linalg::norm2(residual_of(p.a, p.x_exact, p.y_exact));
  return p;
}

DiscreteProblem simpson_problem(int n) {
  if (n % 2 != 0) throw InvalidInput("simpson_problem: n must be even");
  if (n < 4 || n > kMaxPoints) throw InvalidInput("simpson_problem: n must lie in [4, 64]");
  const int size = n + 1;
  const double h = 1.0 / n;
  DiscreteProblem p;
  p.kind = "simpson";
  p.n = n;
  p.nodes.resize(size);
  p.weights.resize(size);
  for (int j = 0; j <= n; ++j) {
    p.nodes[j] = static_cast<double>(j) / n;
    const double c = (j == 0 || j == n) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    p.weights[j] = c * h / 3.0;
  }
  p.a = DenseMatrix(size, size);
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j) {
      const double st = p.nodes[i] * p.nodes[j];
      p.a(i, j) = p.weights[j] * (1.0 + st) * std::exp(st);
    }
  p.x_exact.assign(size, 1.0);
  p.scaling.assign(size, 1.0);
  p.y_exact.resize(size);
  for (int i = 0; i < size; ++i) p.y_exact[i] = std::exp(p.nodes[i]);
  p.consistency_residual = linalg::norm2(residual_of(p.a, p.x_exact, p.y_exact));
  return p;
}

DiscreteProblem make_problem(std::string_view kind, int n) {
  if (kind == "laplace") return laplace_problem(n);
  if (kind == "simpson") return simpson_problem(n);
  throw InvalidInput("unknown problem kind '" + std::string(kind) + "'");
}

Vector to_function_values(const DiscreteProblem& p, std::span<const double> x) {
  if (x.size() != p.scaling.size()) throw InvalidInput("to_function_values: length mismatch");
  Vector out(x.begin(), x.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] /= p.scaling[i];
  return out;
}

double solution_error(const DiscreteProblem& p, std::span<const double> x, ErrorMetric metric) {
  if (x.size() != p.x_exact.size()) throw InvalidInput("solution_error: length mismatch");
  if (metric == ErrorMetric::Scaled) return linalg::norm2(linalg::subtract(x, p.x_exact));
  return linalg::norm2(linalg::subtract(to_function_values(p, x), to_function_values(p, p.x_exact)));
}

NoisySample add_noise(std::span<const double> y, double delta, std::uint64_t seed) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw InvalidParameter("add_noise: delta must be >= 0");
  NoisySample out{Vector(y.begin(), y.end()), delta, seed};
  if (delta == 0.0 || y.empty()) return out;
  const Vector eta = standard_normal(y.size(), seed);
  const double scale = delta / linalg::norm2(eta);
  for (std::size_t i = 0; i < y.size(); ++i) out.y_delta[i] += scale * eta[i];
  return out;
}

std::string to_json(const DiscreteProblem& p) {
  nlohmann::json matrix = nlohmann::json::array();
  for (std::size_t i = 0; i < p.a.rows(); ++i) {
    const auto row = p.a.row(i);
    matrix.push_back(std::vector<double>(row.begin(), row.end()));
  }
  nlohmann::json doc = {
      {"n", p.n},
      {"kind", p.kind},
      {"matrix", matrix},
      {"nodes", p.nodes},
      {"weights", p.weights},
      {"x_exact", p.x_exact},
      {"y_exact", p.y_exact},
      {"scaling", p.scaling},
  };
  return doc.dump();
}

DiscreteProblem problem_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("problem JSON: ") + e.what());
  }
  try {
    DiscreteProblem p;
    p.n = doc.at("n").get<int>();
    p.kind = doc.at("kind").get<std::string>();
    const auto rows = doc.at("matrix").get<std::vector<std::vector<double>>>();
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    std::vector<double> entries;
    for (const auto& r : rows) {
      if (r.size() != cols) throw InvalidInput("problem JSON: ragged matrix");
      entries.insert(entries.end(), r.begin(), r.end());
    }
    p.a = DenseMatrix(rows.size(), cols, std::move(entries));
    p.nodes = doc.at("nodes").get<Vector>();
    p.weights = doc.at("weights").get<Vector>();
    p.x_exact = doc.at("x_exact").get<Vector>();
    p.y_exact = doc.at("y_exact").get<Vector>();
    p.scaling = doc.at("scaling").get<Vector>();
    if (p.x_exact.size() != cols || p.y_exact.size() != rows.size() || p.scaling.size() != cols) {
      throw InvalidInput("problem JSON: vector lengths do not match the matrix");
    }
    p.consistency_residual = linalg::norm2(residual_of(p.a, p.x_exact, p.y_exact));
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("problem JSON: ") + e.what());
  }
}

}  // namespace itreg::problems
