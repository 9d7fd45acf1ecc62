#pragma once

// Command-line frontend: config parsing, validation and experiment dispatch.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "itreg/errors.hpp"

namespace itreg::cli {

enum class OutputFormat { Csv, Json };

inline const std::vector<std::string> kExperiments{
    "demo-table1", "sweep-alpha", "sweep-iterations", "lcurve", "compare-table2", "rate", "check-filters",
};

/// Field names double as JSON config keys and long flag names.
/// Unset optionals take per-experiment defaults (see resolved_*).
struct RunConfig {
  std::string experiment;
  std::string problem = "laplace";
  std::vector<int> n;  // list for demo-table1, a single value elsewhere
  std::string method = "tikhonov";
  std::vector<std::string> methods{"iterated_tikhonov", "landweber", "iterated_fractional_weighted"};
  double alpha = 1e-3;
  std::vector<double> alpha_grid{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10};
  std::vector<double> alpha_list{1.0, 0.9, 1e-3, 1e-3};  // compare-table2, one per delta
  std::optional<int> l;
  double r = 0.8;
  std::optional<int> m;
  double a = 0.5;
  std::optional<double> sigma;
  double E = 1.0;
  double delta = 1e-4;
  std::optional<std::vector<double>> delta_list;
  int seeds = 10;
  bool optimized = false;
  std::uint64_t seed = 42;
  std::string out;  // empty: standard output
  OutputFormat format = OutputFormat::Csv;
};

std::vector<int> resolved_n(const RunConfig& c);
int resolved_l(const RunConfig& c);
int resolved_m(const RunConfig& c);
double resolved_sigma(const RunConfig& c);
std::vector<double> resolved_delta_list(const RunConfig& c);

/// Carries every problem found, each prefixed by the offending field.
class ValidationError : public InvalidInput {
 public:
  explicit ValidationError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Empty when the config is valid.
std::vector<std::string> validate(const RunConfig& c);

/// Uses --config <file.json> when present; flags override file values.
/// Throws ValidationError on unknown flags/keys or bad values.
RunConfig parse_config(std::span<const std::string> args);

/// JSON config text, strict on keys.
RunConfig config_from_json(std::string_view text, RunConfig base = {});

struct RunResult {
  std::string content;  // the output file body
  std::string summary;  // one line
  std::vector<std::string> notes;
};

/// Validates, then runs the experiment. Nothing is written here.
RunResult run(const RunConfig& c);

/// Whole program: parse, run, write. Returns the process exit code
/// (0 ok, 2 validation failure, 1 numerical failure).
int main_entry(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace itreg::cli
