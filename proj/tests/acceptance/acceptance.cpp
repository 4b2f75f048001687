// Runs every built-in scenario and folds the criteria into the twelve
// numbered acceptance checks. One line per check; exit 1 if any fails.
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <thread>

#include "mlab/runner.hpp"

namespace {

const char* kTitles[13] = {
    "",
    "conservation of mass, energy, momentum",
    "local conservation laws, dt slope",
    "one-particle Morawetz identity",
    "interaction Morawetz decomposition and direct-sum oracle",
    "positivity of III+IV and current sandwich",
    "1D identity, delta limit and monotonicity",
    "inequality ledger and sup bound audit",
    "GP admissibility, hierarchy residual, negative controls",
    "GP continuity with exact diagonal cancellation",
    "GP Morawetz identities and the A4 column",
    "factorized GP versus NLS cross-check",
    "marginal norms and the H_xi oracle",
};

struct Group {
  bool pass = true;
  int count = 0;
  double worst = 0.0;  // largest value/tolerance seen
  std::string worst_name;
  std::string note;
};

}  // namespace

int main() {
  std::vector<mlab::Scenario> scenarios;
  for (const auto& b : mlab::builtin_catalog()) scenarios.push_back(mlab::builtin_scenario(b.name));
  mlab::RunOptions opts;
  opts.threads = std::max(1u, std::thread::hardware_concurrency());
  const auto summary = mlab::run_scenarios(scenarios, opts);

  std::map<int, Group> groups;
  for (const auto& r : summary.results) {
    if (r.status == mlab::Status::error || r.status == mlab::Status::numerical_abort) {
      std::printf("scenario %s did not complete: %s\n", r.scenario.c_str(), r.error.c_str());
    }
    for (const auto& c : r.criteria) {
      auto& g = groups[c.group];
      ++g.count;
      g.pass &= c.pass;
      const double ratio = c.tolerance > 0.0 ? c.value / c.tolerance : (c.value > 0.0 ? INFINITY : 0.0);
      if (!std::isfinite(c.value) || ratio >= g.worst || g.worst_name.empty()) {
        g.worst = std::isfinite(c.value) ? ratio : INFINITY;
        g.worst_name = r.scenario + ":" + c.name;
        g.note = mlab::format_double(c.value) + " <= " + mlab::format_double(c.tolerance);
      }
    }
    if (r.status != mlab::Status::pass && r.status != mlab::Status::fail) {
      for (const auto& c : r.criteria) groups[c.group].pass = false;
    }
  }

  bool all = summary.exit_code() == 0;
  for (int k = 1; k <= 12; ++k) {
    auto it = groups.find(k);
    const bool ok = it != groups.end() && it->second.count > 0 && it->second.pass;
    all &= ok;
    if (it == groups.end()) {
      std::printf("[FAIL] %2d %s: no criteria evaluated\n", k, kTitles[k]);
      continue;
    }
    std::printf("[%s] %2d %s: %d checks, worst %s (%s)\n", ok ? "PASS" : "FAIL", k, kTitles[k], it->second.count,
                it->second.worst_name.c_str(), it->second.note.c_str());
  }
  std::printf("%s\n", all ? "acceptance: all criteria pass" : "acceptance: FAILED");
  return all ? 0 : 1;
}
