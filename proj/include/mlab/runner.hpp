#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mlab/grid.hpp"
#include "mlab/nls.hpp"

namespace mlab {

struct GridSpec {
  int dim = 1;
  std::size_t points = 128;
  double length = 20.0;
};

struct WeightSpec {
  double epsilon = 1.0;
  std::vector<double> epsilon_list;
  std::vector<double> center;
};

struct MixtureSpec {
  std::vector<double> weights;
  std::vector<InitialData> orbitals;
};

struct GPSpec {
  std::vector<int> k_values{1, 2};
  std::vector<double> alpha_values{0.0, 1.0};
  double xi = 0.5;
  int k_max = 10;
  std::size_t tensor_points = 16;
};

/// One run of one evaluation suite.
struct Scenario {
  std::string name;
  std::string suite;
  std::string description;
  std::vector<GridSpec> grids;
  NLSParams equation;
  std::optional<InitialData> initial;
  std::optional<MixtureSpec> mixture;
  SolverConfig solver;
  std::optional<double> horizon;
  std::vector<double> dt_list;
  WeightSpec weight;
  std::vector<std::string> observers;
  std::map<std::string, double> tolerances;
  std::size_t samples = 10;
  std::uint64_t seed = 0;
  GPSpec gp;
  std::string output_dir;
  int line = 0;             // 1-based line of the scenario in its source
  std::string config_hash;  // FNV-1a of the normalized scenario text
};

/// Parses a YAML document: either one scenario mapping or {scenarios: [...]}.
/// A scenario may start from a built-in with `base: <name>`. Unknown keys,
/// bad types and inconsistent values throw ConfigError naming the key path
/// and the line.
std::vector<Scenario> parse_config(const std::string& text, const std::string& source = "<config>");
std::vector<Scenario> load_config_file(const std::string& path);

// ---------------------------------------------------------------------------
// Built-in catalogue.

struct BuiltinInfo {
  std::string name;
  std::string summary;
  std::string details;
};
const std::vector<BuiltinInfo>& builtin_catalog();
Scenario builtin_scenario(const std::string& name);
/// The YAML text a built-in is parsed from.
const std::string& builtin_yaml(const std::string& name);
/// Known suites and the criteria each reports, with default tolerances.
const std::map<std::string, std::map<std::string, double>>& suite_criteria();

// ---------------------------------------------------------------------------
// Results.

struct Criterion {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;  // value <= tolerance and finite
  int group = 0;      // numbered acceptance group, 0 = none
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

enum class Status { pass, fail, numerical_abort, error };

struct ScenarioResult {
  std::string scenario;
  std::string suite;
  std::vector<Criterion> criteria;
  std::vector<std::string> warnings;
  Table table;
  Status status = Status::fail;
  std::string error;
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;
  std::string config_hash;
  bool pass() const noexcept { return status == Status::pass; }
};

struct RunOptions {
  std::string out_dir;  // empty: no files
  unsigned threads = 1;
  std::optional<std::uint64_t> seed;
  bool strict = false;
};

struct RunSummary {
  std::vector<ScenarioResult> results;
  bool pass() const noexcept;
  int exit_code() const noexcept;  // 0 pass, 1 criterion failure, 2 contract error, 3 numerical abort
};

/// Runs one scenario. Criterion failures, numerical aborts and contract
/// errors raised while building the scenario's state are all caught and
/// reported in the status.
ScenarioResult run_scenario(const Scenario& scenario, const RunOptions& options = {});

/// Runs every scenario (in parallel when threads > 1) and writes
/// <out>/<name>.csv, <out>/<name>.json and <out>/summary.json.
RunSummary run_scenarios(const std::vector<Scenario>& scenarios, const RunOptions& options);

// Output formatting.
std::string format_double(double v);  // "%.16e"
std::string to_csv(const Table& table);
std::string to_json(const ScenarioResult& result);
std::string summary_json(const RunSummary& summary);

/// Output directory precedence: flag, then MLAB_OUT_DIR, then the fallback.
std::string resolve_out_dir(const std::string& flag, const std::string& fallback);

}  // namespace mlab
