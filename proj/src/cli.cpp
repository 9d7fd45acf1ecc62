#include "itreg/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "itreg/experiments.hpp"
#include "itreg/filters.hpp"
#include "itreg/problems.hpp"
#include "json.hpp"

namespace itreg::cli {

using nlohmann::json;
namespace ex = itreg::experiments;
using filters::FilterSpec;
using filters::FilterVariant;

namespace {

enum class Kind { Text, Real, Int, U64, Bool, RealList, IntList, TextList };

struct Field {
  const char* name;
  Kind kind;
  std::function<void(RunConfig&, const json&)> set;
};

template <class T>
std::vector<T> as_list(const json& v) {
  return v.is_array() ? v.get<std::vector<T>>() : std::vector<T>{v.get<T>()};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table{
      {"experiment", Kind::Text, [](RunConfig& c, const json& v) { c.experiment = v.get<std::string>(); }},
      {"problem", Kind::Text, [](RunConfig& c, const json& v) { c.problem = v.get<std::string>(); }},
      {"n", Kind::IntList, [](RunConfig& c, const json& v) { c.n = as_list<int>(v); }},
      {"method", Kind::Text, [](RunConfig& c, const json& v) { c.method = v.get<std::string>(); }},
      {"methods", Kind::TextList, [](RunConfig& c, const json& v) { c.methods = as_list<std::string>(v); }},
      {"alpha", Kind::Real, [](RunConfig& c, const json& v) { c.alpha = v.get<double>(); }},
      {"alpha_grid", Kind::RealList, [](RunConfig& c, const json& v) { c.alpha_grid = as_list<double>(v); }},
      {"alpha_list", Kind::RealList, [](RunConfig& c, const json& v) { c.alpha_list = as_list<double>(v); }},
      {"l", Kind::Int, [](RunConfig& c, const json& v) { c.l = v.get<int>(); }},
      {"r", Kind::Real, [](RunConfig& c, const json& v) { c.r = v.get<double>(); }},
      {"m", Kind::Int, [](RunConfig& c, const json& v) { c.m = v.get<int>(); }},
      {"a", Kind::Real, [](RunConfig& c, const json& v) { c.a = v.get<double>(); }},
      {"sigma", Kind::Real, [](RunConfig& c, const json& v) { c.sigma = v.get<double>(); }},
      {"E", Kind::Real, [](RunConfig& c, const json& v) { c.E = v.get<double>(); }},
      {"delta", Kind::Real, [](RunConfig& c, const json& v) { c.delta = v.get<double>(); }},
      {"delta_list", Kind::RealList, [](RunConfig& c, const json& v) { c.delta_list = as_list<double>(v); }},
      {"seeds", Kind::Int, [](RunConfig& c, const json& v) { c.seeds = v.get<int>(); }},
      {"optimized", Kind::Bool, [](RunConfig& c, const json& v) { c.optimized = v.get<bool>(); }},
      {"seed", Kind::U64, [](RunConfig& c, const json& v) { c.seed = v.get<std::uint64_t>(); }},
      {"out", Kind::Text, [](RunConfig& c, const json& v) { c.out = v.get<std::string>(); }},
      {"format", Kind::Text,
       [](RunConfig& c, const json& v) {
         const auto s = v.get<std::string>();
         if (s == "csv") c.format = OutputFormat::Csv;
         else if (s == "json") c.format = OutputFormat::Json;
         else throw std::invalid_argument("must be csv or json");
       }},
  };
  return table;
}

const Field* find_field(std::string_view name) {
  for (const auto& f : fields())
    if (name == f.name) return &f;
  return nullptr;
}

bool scalar_matches(Kind kind, const json& v) {
  switch (kind) {
    case Kind::Text:
    case Kind::TextList:
      return v.is_string();
    case Kind::Real:
    case Kind::RealList:
      return v.is_number();
    case Kind::Int:
    case Kind::IntList:
      return v.is_number_integer();
    case Kind::U64:
      return v.is_number_unsigned();
    case Kind::Bool:
      return v.is_boolean();
  }
  return false;
}

bool is_list(Kind k) { return k == Kind::RealList || k == Kind::IntList || k == Kind::TextList; }

void apply(RunConfig& c, const Field& f, const json& v, std::vector<std::string>& errors) {
  bool ok = v.is_array() ? is_list(f.kind) && !v.empty() &&
                               std::all_of(v.begin(), v.end(), [&](const json& e) { return scalar_matches(f.kind, e); })
                         : scalar_matches(f.kind, v);
  if (!ok) {
    errors.push_back(std::string(f.name) + ": wrong type");
    return;
  }
  try {
    f.set(c, v);
  } catch (const std::exception& e) {
    errors.push_back(std::string(f.name) + ": " + e.what());
  }
}

std::optional<json> parse_token(Kind kind, const std::string& s) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  switch (kind) {
    case Kind::Text:
    case Kind::TextList:
      return s.empty() ? std::nullopt : std::optional<json>(s);
    case Kind::Real:
    case Kind::RealList: {
      double v = 0.0;
      auto [p, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || p != last || !std::isfinite(v)) return std::nullopt;
      return json(v);
    }
    case Kind::Int:
    case Kind::IntList: {
      int v = 0;
      auto [p, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || p != last) return std::nullopt;
      return json(v);
    }
    case Kind::U64: {
      std::uint64_t v = 0;
      auto [p, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || p != last) return std::nullopt;
      return json(v);
    }
    case Kind::Bool:
      return std::nullopt;
  }
  return std::nullopt;
}

std::optional<json> parse_flag_value(Kind kind, const std::string& raw) {
  if (!is_list(kind)) return parse_token(kind, raw);
  json arr = json::array();
  std::stringstream ss(raw);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    auto v = parse_token(kind, tok);
    if (!v) return std::nullopt;
    arr.push_back(*v);
  }
  if (arr.empty() || (!raw.empty() && raw.back() == ',')) return std::nullopt;
  return arr;
}

std::string show(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

bool is_iterative(FilterVariant v) {
  return v == FilterVariant::IteratedTikhonov || v == FilterVariant::Landweber ||
         v == FilterVariant::IteratedFractionalWeighted;
}

std::string header(std::uint64_t seed) { return "# seed=" + std::to_string(seed) + "\n"; }

json records_json(std::span<const ex::SweepRecord> records) {
  json arr = json::array();
  for (const auto& r : records)
    arr.push_back({{"param", r.parameter},
                   {"error", r.error},
                   {"residual_norm", r.residual_norm},
                   {"solution_norm", r.solution_norm},
                   {"method", r.method}});
  return arr;
}

std::string sweep_output(const RunConfig& c, std::span<const ex::SweepRecord> records) {
  if (c.format == OutputFormat::Json) {
    return json{{"experiment", c.experiment}, {"seed", c.seed}, {"records", records_json(records)}}.dump(2) + "\n";
  }
  std::ostringstream os;
  ex::write_sweep_csv(os, records, c.seed);
  return os.str();
}

const ex::SweepRecord& best_record(std::span<const ex::SweepRecord> records) {
  return *std::min_element(records.begin(), records.end(),
                           [](const auto& x, const auto& y) { return x.error < y.error; });
}

FilterSpec family_spec(const RunConfig& c, FilterVariant v) {
  FilterSpec s;
  s.variant = v;
  s.alpha = c.alpha;
  s.l = resolved_l(c);
  s.r = c.r;
  s.m = resolved_m(c);
  s.a = c.a;
  return s;
}

problems::DiscreteProblem build_problem(const RunConfig& c) {
  return problems::make_problem(c.problem, resolved_n(c).front());
}

RunResult run_demo_table1(const RunConfig& c) {
  const auto n = resolved_n(c);
  const auto cols = ex::naive_solve_demo(n);
  RunResult out;
  if (c.format == OutputFormat::Json) {
    json arr = json::array();
    for (const auto& col : cols)
      arr.push_back({{"n", col.n},
                     {"t", col.probe_t},
                     {"error", col.error},
                     {"solution", col.solution},
                     {"max_error", col.max_error},
                     {"condition", col.condition}});
    out.content = json{{"experiment", c.experiment}, {"seed", c.seed}, {"columns", arr}}.dump(2) + "\n";
  } else {
    std::ostringstream os;
    os << header(c.seed) << 't';
    for (const auto& col : cols) os << ",err_n" << col.n << ",x_n" << col.n;
    os << '\n';
    for (std::size_t i = 0; i < cols.front().probe_t.size(); ++i) {
      os << ex::format_real(cols.front().probe_t[i]);
      for (const auto& col : cols) os << ',' << ex::format_real(col.error[i]) << ',' << ex::format_real(col.solution[i]);
      os << '\n';
    }
    os << "max_error";
    for (const auto& col : cols) os << ',' << ex::format_real(col.max_error) << ',';
    os << "\ncondition";
    for (const auto& col : cols) os << ',' << ex::format_real(col.condition) << ',';
    os << '\n';
    out.content = os.str();
  }
  const auto worst = std::max_element(cols.begin(), cols.end(),
                                      [](const auto& x, const auto& y) { return x.max_error < y.max_error; });
  const auto best = std::min_element(cols.begin(), cols.end(),
                                     [](const auto& x, const auto& y) { return x.max_error < y.max_error; });
  out.summary = "demo-table1: min max-error " + show(best->max_error) + " at n=" + std::to_string(best->n) +
                ", largest " + show(worst->max_error) + " at n=" + std::to_string(worst->n);
  return out;
}

RunResult run_sweep_alpha(const RunConfig& c) {
  const auto p = build_problem(c);
  const auto records =
      ex::alpha_sweep(p, family_spec(c, filters::parse_variant(c.method)), c.alpha_grid, c.delta, c.seed);
  const auto& best = best_record(records);
  return {sweep_output(c, records), "sweep-alpha: min error " + show(best.error) + " at alpha=" + show(best.parameter),
          {}};
}

RunResult run_sweep_iterations(const RunConfig& c) {
  const auto p = build_problem(c);
  std::vector<FilterVariant> methods;
  for (const auto& name : c.methods) methods.push_back(filters::parse_variant(name));
  ex::IterationConfig ic;
  ic.m_max = resolved_m(c);
  ic.alpha = c.alpha;
  ic.a = c.a;
  ic.l = resolved_l(c);
  ic.r = c.r;
  ic.delta = c.delta;
  ic.seed = c.seed;
  const auto trajectories = ex::iteration_sweep(p, methods, ic);

  RunResult out;
  std::vector<ex::SweepRecord> all;
  std::string summary = "sweep-iterations:";
  for (const auto& t : trajectories) {
    all.insert(all.end(), t.records.begin(), t.records.end());
    const auto& best = best_record(t.records);
    summary += " " + std::string(filters::to_string(t.method.variant)) + " min error " + show(best.error) +
               " at m=" + show(best.parameter) + ";";
    if (t.step_rescaled) out.notes.push_back("landweber step rescaled to a=" + ex::format_real(t.method.a));
  }
  summary.pop_back();
  out.content = sweep_output(c, all);
  out.summary = summary;
  return out;
}

RunResult run_lcurve(const RunConfig& c) {
  const auto p = build_problem(c);
  const auto series = ex::lcurve_data(p, c.alpha_grid, resolved_delta_list(c), c.seed);
  std::vector<ex::SweepRecord> all;
  for (const auto& s : series)
    for (auto r : s.records) {
      r.method = "tikhonov(delta=" + ex::format_real(s.delta) + ")";
      all.push_back(std::move(r));
    }
  const auto& best = best_record(all);
  return {sweep_output(c, all),
          "lcurve: min error " + show(best.error) + " at alpha=" + show(best.parameter) + " (" + best.method + ")",
          {}};
}

RunResult run_compare(const RunConfig& c) {
  const auto p = build_problem(c);
  const auto deltas = resolved_delta_list(c);
  ex::ComparisonConfig cc;
  cc.l = resolved_l(c);
  cc.m = resolved_m(c);
  cc.r = c.r;
  cc.a = c.a;
  cc.alphas = c.alpha_list;

  std::vector<ex::ComparisonRow> rows;
  std::vector<ex::OptimizedComparisonRow> opt;
  if (c.optimized) {
    opt = ex::comparison_table_optimized(p, deltas, cc, c.alpha_grid, c.seed);
    for (const auto& o : opt) rows.push_back(o.errors);
  } else {
    rows = ex::comparison_table(p, deltas, cc, c.seed);
  }

  RunResult out;
  if (c.format == OutputFormat::Json) {
    json arr = json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      json row{{"delta", rows[i].delta},
               {"err_iterated_tikhonov", rows[i].err_iterated_tikhonov},
               {"err_landweber", rows[i].err_landweber},
               {"err_new_iterated", rows[i].err_new_iterated}};
      if (c.optimized) {
        row["alpha_iterated_tikhonov"] = opt[i].alpha_iterated_tikhonov;
        row["m_landweber"] = opt[i].m_landweber;
        row["alpha_new_iterated"] = opt[i].alpha_new_iterated;
      }
      arr.push_back(row);
    }
    out.content = json{{"experiment", c.experiment}, {"seed", c.seed}, {"rows", arr}}.dump(2) + "\n";
  } else if (c.optimized) {
    std::ostringstream os;
    os << header(c.seed)
       << "delta,err_iterated_tikhonov,err_landweber,err_new_iterated,alpha_iterated_tikhonov,m_landweber,"
          "alpha_new_iterated\n";
    for (const auto& o : opt) {
      const auto& r = o.errors;
      os << ex::format_real(r.delta) << ',' << ex::format_real(r.err_iterated_tikhonov) << ','
         << ex::format_real(r.err_landweber) << ',' << ex::format_real(r.err_new_iterated) << ','
         << ex::format_real(o.alpha_iterated_tikhonov) << ',' << o.m_landweber << ','
         << ex::format_real(o.alpha_new_iterated) << '\n';
    }
    out.content = os.str();
  } else {
    std::ostringstream os;
    ex::write_comparison_csv(os, rows, c.seed);
    out.content = os.str();
  }

  double best = std::numeric_limits<double>::infinity();
  std::string where;
  for (const auto& r : rows) {
    const std::pair<double, const char*> cand[] = {{r.err_iterated_tikhonov, "iterated_tikhonov"},
                                                   {r.err_landweber, "landweber"},
                                                   {r.err_new_iterated, "new_iterated"}};
    for (const auto& [e, name] : cand)
      if (e < best) {
        best = e;
        where = std::string(name) + " at delta=" + show(r.delta);
      }
  }
  out.summary = "compare-table2: min error " + show(best) + " (" + where + ")";
  return out;
}

RunResult run_rate(const RunConfig& c) {
  const auto sys = ex::synthetic_diagonal_system(static_cast<std::size_t>(resolved_n(c).front()), 0.8);
  ex::RateConfig rc;
  rc.l = resolved_l(c);
  rc.r = c.r;
  rc.m = resolved_m(c);
  rc.sigma = resolved_sigma(c);
  rc.e_bound = c.E;
  rc.deltas = resolved_delta_list(c);
  rc.seeds = c.seeds;
  rc.seed = c.seed;
  const auto res = ex::rate_estimate(sys, rc);

  RunResult out;
  if (c.format == OutputFormat::Json) {
    out.content = json{{"experiment", c.experiment},
                       {"seed", c.seed},
                       {"slope", res.slope},
                       {"delta", res.deltas},
                       {"alpha", res.alphas},
                       {"median_error", res.median_errors}}
                      .dump(2) +
                  "\n";
  } else {
    std::ostringstream os;
    os << header(c.seed) << "# slope=" << ex::format_real(res.slope) << "\ndelta,alpha,median_error\n";
    for (std::size_t i = 0; i < res.deltas.size(); ++i)
      os << ex::format_real(res.deltas[i]) << ',' << ex::format_real(res.alphas[i]) << ','
         << ex::format_real(res.median_errors[i]) << '\n';
    out.content = os.str();
  }
  const auto best = std::min_element(res.median_errors.begin(), res.median_errors.end()) - res.median_errors.begin();
  const double target = 2.0 * rc.m / (2.0 * rc.m + 1.0);
  out.summary = "rate: slope " + show(res.slope) + " (target " + show(target) + "), min error " +
                show(res.median_errors[best]) + " at delta=" + show(res.deltas[best]);
  return out;
}

RunResult run_check_filters(const RunConfig& c) {
  const FilterSpec spec = family_spec(c, filters::parse_variant(c.method));
  const double mu1 = spec.variant == FilterVariant::Landweber ? std::min(1.0, 1.0 / std::sqrt(spec.a)) : 1.0;
  const auto grid = filters::make_mu_grid(1e-5 * mu1, mu1, 400, c.alpha_grid);
  const auto rep = filters::check_order_conditions(spec, resolved_sigma(c), grid, c.alpha_grid);

  RunResult out;
  if (c.format == OutputFormat::Json) {
    out.content = json{{"experiment", c.experiment},
                       {"seed", c.seed},
                       {"method", spec.describe()},
                       {"alpha", rep.alpha_grid},
                       {"c_alpha", rep.c_alpha},
                       {"qualification_sup", rep.qualification_sup},
                       {"q_bound", rep.q_bound},
                       {"limit_check", rep.limit_check},
                       {"gamma_fit", rep.gamma_fit},
                       {"sigma", rep.sigma},
                       {"qualification_exponent", rep.qualification_exponent}}
                      .dump(2) +
                  "\n";
  } else {
    std::ostringstream os;
    os << header(c.seed) << "# method=" << spec.describe() << "\n# q_bound=" << ex::format_real(rep.q_bound)
       << "\n# limit_check=" << (rep.limit_check ? "true" : "false") << "\n# gamma_fit=" << ex::format_real(rep.gamma_fit)
       << "\n# sigma=" << ex::format_real(rep.sigma)
       << "\n# qualification_exponent=" << ex::format_real(rep.qualification_exponent)
       << "\nalpha,c_alpha,qualification_sup\n";
    for (std::size_t i = 0; i < rep.alpha_grid.size(); ++i)
      os << ex::format_real(rep.alpha_grid[i]) << ',' << ex::format_real(rep.c_alpha[i]) << ','
         << ex::format_real(rep.qualification_sup[i]) << '\n';
    out.content = os.str();
  }
  out.summary = "check-filters: q_bound " + show(rep.q_bound) + ", limit_check " +
                (rep.limit_check ? "true" : "false") + ", gamma_fit " + show(rep.gamma_fit) +
                ", qualification exponent " + show(rep.qualification_exponent);
  return out;
}

}  // namespace

std::vector<int> resolved_n(const RunConfig& c) {
  if (!c.n.empty()) return c.n;
  if (c.experiment == "demo-table1") return {4, 8, 16, 32};
  if (c.experiment == "rate") return {64};
  return {32};
}

int resolved_l(const RunConfig& c) { return c.l.value_or(c.experiment == "compare-table2" || c.experiment == "rate" ? 2 : 4); }

int resolved_m(const RunConfig& c) {
  if (c.m) return *c.m;
  return (c.experiment == "sweep-iterations" || c.experiment == "compare-table2") ? 100 : 1;
}

double resolved_sigma(const RunConfig& c) { return c.sigma.value_or(2.0 * resolved_m(c)); }

std::vector<double> resolved_delta_list(const RunConfig& c) {
  if (c.delta_list) return *c.delta_list;
  if (c.experiment == "rate") return {1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  if (c.experiment == "compare-table2") return ex::kTable2Deltas;
  return {1e-1, 1e-2, 1e-3, 1e-4};
}

namespace {

std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> problems)
    : InvalidInput("invalid configuration: " + join(problems, "; ")), problems_(std::move(problems)) {}

std::vector<std::string> validate(const RunConfig& c) {
  std::vector<std::string> e;
  const auto& x = c.experiment;
  if (x.empty()) e.push_back("experiment: missing (one of " + join(kExperiments, ", ") + ")");
  else if (!contains(kExperiments, x)) e.push_back("experiment: unknown '" + x + "'");

  if (c.problem != "laplace" && c.problem != "simpson") e.push_back("problem: must be laplace or simpson");

  const auto n = resolved_n(c);
  if (x != "demo-table1" && n.size() != 1) e.push_back("n: expects a single value for " + x);
  for (int v : n) {
    if (x == "demo-table1" || (x != "rate" && c.problem == "simpson")) {
      if (v % 2 != 0 || v < 4 || v > 64) e.push_back("n: " + std::to_string(v) + " must be even and in [4, 64]");
    } else if (x == "rate") {
      if (v < 3 || v > 1000) e.push_back("n: " + std::to_string(v) + " must lie in [3, 1000]");
    } else if (v < 1 || v > 64) {
      e.push_back("n: " + std::to_string(v) + " must lie in [1, 64]");
    }
  }

  try {
    filters::parse_variant(c.method);
  } catch (const InvalidInput&) {
    e.push_back("method: unknown '" + c.method + "'");
  }
  if (x == "sweep-iterations") {
    if (c.methods.empty()) e.push_back("methods: empty");
    for (const auto& name : c.methods) {
      try {
        if (!is_iterative(filters::parse_variant(name))) e.push_back("methods: '" + name + "' is not iterative");
      } catch (const InvalidInput&) {
        e.push_back("methods: unknown '" + name + "'");
      }
    }
  }

  if (!(c.alpha > 0.0)) e.push_back("alpha: must be positive");
  if (c.alpha_grid.empty()) e.push_back("alpha_grid: empty");
  for (double v : c.alpha_grid)
    if (!(v > 0.0)) {
      e.push_back("alpha_grid: values must be positive");
      break;
    }
  for (double v : c.alpha_list)
    if (!(v > 0.0)) {
      e.push_back("alpha_list: values must be positive");
      break;
    }
  if (resolved_l(c) < 0) e.push_back("l: must be >= 0");
  if (!(c.r >= 0.5)) e.push_back("r: must satisfy r >= 1/2");
  if (resolved_m(c) < 1) e.push_back("m: must be >= 1");
  if (!(c.a > 0.0)) e.push_back("a: must be positive");
  if (!(resolved_sigma(c) > 0.0)) e.push_back("sigma: must be positive");
  if (!(c.E > 0.0)) e.push_back("E: must be positive");
  if (!(c.delta >= 0.0)) e.push_back("delta: must be >= 0");
  if (c.seeds < 1) e.push_back("seeds: must be >= 1");

  const auto deltas = resolved_delta_list(c);
  if (deltas.empty()) e.push_back("delta_list: empty");
  for (double v : deltas)
    if (!(v >= 0.0) || (x == "rate" && !(v > 0.0))) {
      e.push_back(x == "rate" ? "delta_list: values must be positive" : "delta_list: values must be >= 0");
      break;
    }
  if (x == "compare-table2" && !c.optimized && c.alpha_list.size() != deltas.size())
    e.push_back("alpha_list: needs one value per delta_list entry");
  if (x == "rate" && !deltas.empty()) {
    if (deltas.size() < 3) e.push_back("delta_list: rate needs at least three values");
    const auto [lo, hi] = std::minmax_element(deltas.begin(), deltas.end());
    if (*lo > 0.0 && *hi / *lo < 1e3 * (1.0 - 1e-12)) e.push_back("delta_list: rate needs a span of >= 3 decades");
  }
  return e;
}

RunConfig config_from_json(std::string_view text, RunConfig base) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& ex) {
    throw ValidationError({std::string("config: malformed JSON: ") + ex.what()});
  }
  if (!doc.is_object()) throw ValidationError({"config: top level must be an object"});
  std::vector<std::string> errors;
  for (const auto& [key, value] : doc.items()) {
    const Field* f = find_field(key);
    if (!f) {
      errors.push_back(key + ": unknown key");
      continue;
    }
    apply(base, *f, value, errors);
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));
  return base;
}

RunConfig parse_config(std::span<const std::string> args) {
  CLI::App app{"Filter-based and iterated Tikhonov regularization experiments", "itreg"};
  app.allow_windows_style_options(false);
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::map<std::string, std::string> raw;
  bool optimized = false;
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; flags override its values");
  for (const auto& f : fields()) {
    const std::string name = f.name;
    if (name == "experiment") continue;
    if (f.kind == Kind::Bool) {
      app.add_flag("--" + name, optimized);
    } else {
      raw[name];
      app.add_option("--" + name, raw[name]);
    }
  }
  for (const auto& x : kExperiments) app.add_subcommand(x);

  std::vector<std::string> argv(args.rbegin(), args.rend());
  app.parse(argv);

  RunConfig c;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw ValidationError({"config: cannot read '" + config_path + "'"});
    std::ostringstream text;
    text << in.rdbuf();
    c = config_from_json(text.str(), c);
  }
  for (const auto* sub : app.get_subcommands()) c.experiment = sub->get_name();

  std::vector<std::string> errors;
  for (const auto& f : fields()) {
    const std::string name = f.name;
    if (name == "experiment") continue;
    const auto* opt = app.get_option("--" + name);
    if (opt->count() == 0) continue;
    if (f.kind == Kind::Bool) {
      c.optimized = optimized;
      continue;
    }
    const auto value = parse_flag_value(f.kind, raw[name]);
    if (!value) {
      errors.push_back(name + ": malformed value '" + raw[name] + "'");
      continue;
    }
    apply(c, f, *value, errors);
  }
  for (auto& p : validate(c)) errors.push_back(std::move(p));
  if (!errors.empty()) throw ValidationError(std::move(errors));
  return c;
}

RunResult run(const RunConfig& c) {
  if (auto problems = validate(c); !problems.empty()) throw ValidationError(std::move(problems));
  if (c.experiment == "demo-table1") return run_demo_table1(c);
  if (c.experiment == "sweep-alpha") return run_sweep_alpha(c);
  if (c.experiment == "sweep-iterations") return run_sweep_iterations(c);
  if (c.experiment == "lcurve") return run_lcurve(c);
  if (c.experiment == "compare-table2") return run_compare(c);
  if (c.experiment == "rate") return run_rate(c);
  return run_check_filters(c);
}

int main_entry(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = parse_config(args);
  } catch (const CLI::CallForHelp&) {
    out << "usage: itreg <experiment> [--flag value ...]\n  experiments: " << join(kExperiments, ", ")
        << "\n  flags: --config";
    for (const auto& f : fields())
      if (std::string(f.name) != "experiment") out << " --" << f.name;
    out << "\n  lists are comma-separated, e.g. --alpha_grid 1e-1,1e-2\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    for (const auto& p : e.problems()) err << "error: " << p << '\n';
    return 2;
  }

  RunResult result;
  try {
    result = run(config);
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 1;
  } catch (const ValidationError& e) {
    for (const auto& p : e.problems()) err << "error: " << p << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  for (const auto& note : result.notes) err << "note: " << note << '\n';
  if (config.out.empty()) {
    out << result.content;
  } else {
    std::ofstream file(config.out, std::ios::binary);
    if (!file || !(file << result.content)) {
      err << "error: out: cannot write '" << config.out << "'\n";
      return 2;
    }
  }
  out << result.summary << '\n';
  return 0;
}

}  // namespace itreg::cli
