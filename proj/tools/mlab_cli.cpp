#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>

#include "mlab/errors.hpp"
#include "mlab/runner.hpp"

namespace {

std::vector<mlab::Scenario> resolve(const std::string& what) {
  if (what == "all") {
    std::vector<mlab::Scenario> v;
    for (const auto& b : mlab::builtin_catalog()) v.push_back(mlab::builtin_scenario(b.name));
    return v;
  }
  if (std::filesystem::exists(what)) return mlab::load_config_file(what);
  for (const auto& b : mlab::builtin_catalog())
    if (b.name == what) return {mlab::builtin_scenario(what)};
  throw mlab::ConfigError(what + ": no such file or built-in scenario");
}

void print_result(const mlab::ScenarioResult& r) {
  static const char* names[] = {"PASS", "FAIL", "ABORT", "ERROR"};
  std::printf("[%s] %s (%s, %.2f s)\n", names[static_cast<int>(r.status)], r.scenario.c_str(), r.suite.c_str(),
              r.wall_seconds);
  for (const auto& c : r.criteria)
    std::printf("    %-4s %-44s %.6e <= %.3e\n", c.pass ? "ok" : "FAIL", c.name.c_str(), c.value, c.tolerance);
  for (const auto& w : r.warnings) std::printf("    warning: %s\n", w.c_str());
  if (!r.error.empty()) std::printf("    error: %s\n", r.error.c_str());
}

int explain(const std::string& name) {
  for (const auto& b : mlab::builtin_catalog()) {
    if (b.name != name) continue;
    const auto s = mlab::builtin_scenario(name);
    std::printf("%s\n  %s\n\n%s\n\nsuite: %s\ncriteria (default tolerance):\n", b.name.c_str(),
                b.summary.c_str(), b.details.c_str(), s.suite.c_str());
    for (const auto& [key, tol] : mlab::suite_criteria().at(s.suite)) std::printf("  %-28s %.3e\n", key.c_str(), tol);
    std::printf("\nconfiguration:\n%s", mlab::builtin_yaml(name).c_str());
    return 0;
  }
  std::fprintf(stderr, "unknown built-in scenario '%s'\n", name.c_str());
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Morawetz identity laboratory: NLS and GP hierarchy checks"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a YAML config, a built-in scenario, or 'all'");
  std::string target, out;
  unsigned threads = 1;
  std::uint64_t seed = 0;
  bool strict = false;
  run->add_option("config", target, "YAML file, built-in name, or 'all'")->required();
  run->add_option("--out", out, "Output directory (default: $MLAB_OUT_DIR, then ./mlab-out)");
  run->add_option("--threads", threads, "Scenarios run in parallel")->check(CLI::PositiveNumber);
  auto* seed_opt = run->add_option("--seed", seed, "Override every scenario seed");
  run->add_flag("--strict", strict, "Treat warnings as failures");

  app.add_subcommand("list", "List the built-in scenarios");
  auto* ex = app.add_subcommand("explain", "Describe a built-in scenario");
  std::string name;
  ex->add_option("scenario", name, "Built-in scenario name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (app.got_subcommand("list")) {
    for (const auto& b : mlab::builtin_catalog()) std::printf("%-28s %s\n", b.name.c_str(), b.summary.c_str());
    return 0;
  }
  if (app.got_subcommand("explain")) return explain(name);

  std::vector<mlab::Scenario> scenarios;
  try {
    scenarios = resolve(target);
  } catch (const mlab::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }
  mlab::RunOptions opts;
  opts.out_dir = mlab::resolve_out_dir(out, "mlab-out");
  opts.threads = threads;
  if (*seed_opt) opts.seed = seed;
  opts.strict = strict;
  mlab::RunSummary summary;
  try {
    summary = mlab::run_scenarios(scenarios, opts);
  } catch (const mlab::ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  }
  for (const auto& r : summary.results) print_result(r);
  std::printf("%zu scenario(s), %s; results in %s\n", summary.results.size(), summary.pass() ? "all pass" : "FAILED",
              opts.out_dir.c_str());
  return summary.exit_code();
}
