#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include "mlab/errors.hpp"
#include "mlab/runner.hpp"
#include "runner_internal.hpp"

namespace mlab {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += ',';
    out += table.header[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

namespace {

const char* status_name(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::numerical_abort: return "numerical_abort";
    case Status::error: return "error";
  }
  return "error";
}

nlohmann::ordered_json number(double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr); }

nlohmann::ordered_json result_json(const ScenarioResult& r) {
  nlohmann::ordered_json crit = nlohmann::ordered_json::array();
  for (const auto& c : r.criteria)
    crit.push_back({{"name", c.name}, {"value", number(c.value)}, {"tolerance", c.tolerance}, {"pass", c.pass},
                    {"group", c.group}});
  nlohmann::ordered_json j{{"scenario", r.scenario},
                   {"suite", r.suite},
                   {"criteria", crit},
                   {"pass", r.pass()},
                   {"status", status_name(r.status)},
                   {"warnings", r.warnings},
                   {"seed", r.seed},
                   {"config_hash", r.config_hash},
                   {"wall_seconds", r.wall_seconds}};
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(path.string() + ": cannot write");
  out << text;
}

}  // namespace

std::string to_json(const ScenarioResult& result) { return result_json(result).dump(2) + "\n"; }

std::string summary_json(const RunSummary& summary) {
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const auto& r : summary.results) list.push_back(result_json(r));
  return nlohmann::ordered_json{{"scenarios", list}, {"pass", summary.pass()}, {"exit_code", summary.exit_code()}}.dump(2) + "\n";
}

bool RunSummary::pass() const noexcept {
  for (const auto& r : results)
    if (!r.pass()) return false;
  return true;
}

int RunSummary::exit_code() const noexcept {
  bool error = false, abort = false, fail = false;
  for (const auto& r : results) {
    error |= r.status == Status::error;
    abort |= r.status == Status::numerical_abort;
    fail |= r.status == Status::fail;
  }
  return error ? 2 : abort ? 3 : fail ? 1 : 0;
}

std::string resolve_out_dir(const std::string& flag, const std::string& fallback) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("MLAB_OUT_DIR"); env && *env) return env;
  return fallback;
}

ScenarioResult run_scenario(const Scenario& scenario, const RunOptions& options) {
  ScenarioResult r;
  r.scenario = scenario.name;
  r.suite = scenario.suite;
  r.seed = options.seed.value_or(scenario.seed);
  r.config_hash = scenario.config_hash;
  const auto start = std::chrono::steady_clock::now();
  try {
    SuiteContext ctx{scenario, r.seed, r};
    evaluate_suite(ctx);
    bool ok = true;
    for (const auto& c : r.criteria) ok &= c.pass;
    if (options.strict && !r.warnings.empty()) ok = false;
    r.status = ok ? Status::pass : Status::fail;
  } catch (const NumericalAbort& e) {
    r.status = Status::numerical_abort;
    r.error = e.what();
  } catch (const std::exception& e) {
    r.status = Status::error;
    r.error = e.what();
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

RunSummary run_scenarios(const std::vector<Scenario>& scenarios, const RunOptions& options) {
  RunSummary summary;
  summary.results.resize(scenarios.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) summary.results[i] = run_scenario(scenarios[i], options);
  };
  const std::size_t n = std::min<std::size_t>(std::max(1u, options.threads), scenarios.size());
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  if (!options.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(options.out_dir);
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
      const auto& r = summary.results[i];
      const std::string dir = scenarios[i].output_dir.empty() ? options.out_dir : scenarios[i].output_dir;
      fs::create_directories(dir);
      write_file(fs::path(dir) / (r.scenario + ".csv"), to_csv(r.table));
      write_file(fs::path(dir) / (r.scenario + ".json"), to_json(r));
    }
    write_file(fs::path(options.out_dir) / "summary.json", summary_json(summary));
  }
  return summary;
}

}  // namespace mlab
