#pragma once

#include <set>
#include <string>
#include <vector>

#include "mlab/gp.hpp"
#include "mlab/runner.hpp"
#include "mlab/weight.hpp"

namespace mlab {

std::vector<Scenario> parse_scenarios(const std::string& text, const std::string& source, bool allow_base);
const std::set<std::string>& suite_observers(const std::string& suite);

/// Per-run context handed to the suite evaluators.
struct SuiteContext {
  const Scenario& scenario;
  std::uint64_t seed;
  ScenarioResult& result;

  double tolerance(const std::string& key) const;
  /// Appends a criterion; `key` selects the tolerance, `suffix` labels the instance.
  void report(const std::string& key, double value, int group, const std::string& suffix = "");
  void warn(const std::string& message) { result.warnings.push_back(message); }
};

void evaluate_suite(SuiteContext& ctx);

// Builders shared by the suites. Vector fields of the initial data are
// truncated or zero-padded to the grid dimension.
GridPtr build_grid(const GridSpec& spec);
InitialData fit_to_dim(InitialData d, int dim);
ComplexField build_field(const InitialData& d, const GridPtr& grid);
/// The mixture, or the initial data as a rank-one state; orbitals are scaled to unit mass.
MixtureState build_mixture(const Scenario& s, const GridPtr& grid);
Vec3 weight_center(const Scenario& s, int dim);

}  // namespace mlab
