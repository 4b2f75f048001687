#include <map>

#include "mlab/errors.hpp"
#include "mlab/runner.hpp"
#include "runner_internal.hpp"

namespace mlab {
namespace {

struct Builtin {
  BuiltinInfo info;
  std::string yaml;
};

// The rank-three mixture used by the GP Morawetz scenarios, written for 2D.
// On a 1D grid only the first component of each vector is used.
constexpr const char* kRank3 = R"(
mixture:
  weights: [0.4, 0.35, 0.25]
  orbitals:
    - {width: 1.0, center: [-0.6, 0.3], velocity: [0.7853981633974483, 0.0], chirp: 0.2}
    - {width: 0.9, center: [0.7, 0.0], velocity: [0.0, -0.7853981633974483], chirp: -0.15}
    - {width: 0.95, center: [0.0, -0.5], velocity: [-0.39269908169872414, 0.39269908169872414], chirp: 0.1}
)";

// Narrow 1D mixture for the explicit-tensor and hierarchy scenarios.
constexpr const char* kRank3Small = R"(
mixture:
  weights: [0.5, 0.3, 0.2]
  orbitals:
    - {width: 0.8, center: [-0.3]}
    - {width: 0.85, center: [0.3], velocity: [0.8975979010256552]}
    - {width: 0.9, center: [0.0], velocity: [-0.4487989505128276]}
)";

std::vector<Builtin> make_catalog() {
  std::vector<Builtin> b;
  auto add = [&](std::string name, std::string summary, std::string details, std::string yaml) {
    b.push_back({{name, std::move(summary), std::move(details)}, "name: " + name + "\n" + yaml});
  };

  add("nls-conservation-1d", "Mass, energy and momentum drift over 1000 Strang steps in 1D.",
      "Defocusing cubic Gaussian with a small boost. Relative mass and energy drift and the\n"
      "absolute momentum drift are the maxima over all observer times.",
      R"(suite: conservation
grid: {dim: 1, points: 256, length: 64.0}
equation: {lambda: 1.0, exponent: 3.0}
initial: {kind: gaussian, amplitude: 1.0, width: 4.0, velocity: [0.1963495408493621]}
solver: {dt: 1.0e-3, steps: 1000, horizon: 1.0, method: strang, observer_stride: 10}
weight: {epsilon: 0.5}
observers: [mass, energy, momentum, boundary_ratio, morawetz_action]
)");

  add("nls-conservation-2d", "Mass, energy and momentum drift over 1000 Strang steps in 2D.",
      "Defocusing cubic Gaussian of amplitude 0.5 on a 64 x 64 grid.",
      R"(suite: conservation
grid: {dim: 2, points: 64, length: 40.0}
equation: {lambda: 1.0, exponent: 3.0}
initial: {kind: gaussian, amplitude: 0.5, width: 2.5, velocity: [0.15707963267948966, -0.15707963267948966]}
solver: {dt: 1.0e-3, steps: 1000, horizon: 1.0, method: strang, observer_stride: 10}
weight: {epsilon: 0.5}
observers: [mass, energy, momentum, boundary_ratio, morawetz_action, interaction_action]
)");

  add("nls-local-laws", "Continuity and momentum residuals along the exact soliton.",
      "Samples the exact focusing soliton at t0 - dt, t0, t0 + dt with t0 = dt * steps of the solver\n"
      "block, for every dt in dt_list. Residuals at the finest dt and observed order |slope - 2|.",
      R"(suite: local-laws
grid: {dim: 1, points: 256, length: 40.0}
equation: {lambda: -1.0, exponent: 3.0}
initial: {kind: soliton_1d_cubic, eta: 1.0, velocity: [0.6283185307179586]}
solver: {dt: 1.0e-3, steps: 300, dt_list: [4.0e-3, 2.0e-3, 1.0e-3]}
)");

  add("nls-morawetz-identity", "Finite-difference check of the one-particle and interaction identities.",
      "Two steps from the initial data at each dt. The centred difference of M_y is compared with\n"
      "the closed-form rate, and the interaction action with I + II + III + IV at the finest dt.",
      R"(suite: morawetz-identity
grids:
  - {dim: 1, points: 256, length: 25.6}
  - {dim: 2, points: 64, length: 12.8}
equation: {lambda: 1.0, exponent: 3.0}
initial: {kind: gaussian, amplitude: 1.0, width: 0.8, velocity: [0.5, 0.25]}
solver: {dt: 1.0e-3, steps: 2, dt_list: [4.0e-3, 2.0e-3, 1.0e-3]}
weight: {epsilon: 0.5, center: [0.3, -0.2]}
)");

  add("nls-interaction-positivity", "III + IV >= 0 and the two-point current sandwich on random fields.",
      "For every grid and every epsilon: `samples` band-limited random fields with a Gaussian\n"
      "envelope. Also compares the FFT correlation path with the direct double sum on sample 0.",
      R"(suite: interaction-positivity
grids:
  - {dim: 1, points: 32, length: 12.0}
  - {dim: 2, points: 16, length: 8.0}
equation: {lambda: 1.0, exponent: 3.0}
initial: {kind: random_h1, max_wavenumber: 1.5, envelope_width: 1.2, mass: 1.0}
weight: {epsilon_list: [0.1, 0.5, 1.0]}
samples: 100
seed: 100
)");

  add("nls-1d-delta-extrapolation", "1D identity for smoothed weights and its epsilon -> 0 limit.",
      "Evolves a boosted defocusing Gaussian, checks the smooth-weight identity for each epsilon,\n"
      "extrapolates c + a eps^2 ln eps + b eps^2 and compares with the delta-weight right side.",
      R"(suite: delta-extrapolation
grid: {dim: 1, points: 1024, length: 20.48}
equation: {lambda: 1.0, exponent: 3.0}
initial: {kind: gaussian, amplitude: 1.0, width: 1.0, velocity: [1.227184630308513]}
solver: {dt: 1.0e-3, steps: 200, observer_stride: 1}
weight: {epsilon_list: [0.4, 0.2, 0.1]}
samples: 50
)");

  add("nls-theorem21-audit-1d", "Space-time smoothing inequality and the sup |M_y| bound on a 1D random corpus.",
      "`samples` defocusing random H^1 runs. Reports max(lhs / rhs) - 1 for the inequality and\n"
      "max(sup |M_y| / (mass^(3/2) sup ||grad u||^(1/2))) - 1 for the sup bound.",
      R"(suite: inequality-audit
grid: {dim: 1, points: 256, length: 40.0}
equation: {lambda: 1.0, exponent: 3.0}
initial: {kind: random_h1, max_wavenumber: 2.0, envelope_width: 2.0, mass: 1.0}
solver: {dt: 1.0e-3, steps: 1000, observer_stride: 20}
weight: {epsilon: 0.5}
samples: 10
seed: 7
)");

  add("nls-theorem21-audit-2d", "Space-time smoothing inequality and the sup |M_y| bound on a 2D random corpus.",
      "Same audit as the 1D scenario on a 64 x 64 grid.",
      R"(suite: inequality-audit
grid: {dim: 2, points: 64, length: 24.0}
equation: {lambda: 1.0, exponent: 3.0}
initial: {kind: random_h1, max_wavenumber: 1.5, envelope_width: 1.5, mass: 1.0}
solver: {dt: 1.0e-3, steps: 1000, observer_stride: 20}
weight: {epsilon: 0.5}
samples: 10
seed: 11
)");

  add("gp-admissibility", "Admissibility, hermiticity and trace of explicit marginals, and the H^alpha norms.",
      "Builds gamma^(1..3) of a rank-three mixture, checks partial traces, hermiticity and the\n"
      "trace, and that a perturbed gamma^(2) is flagged. Norms use the first orbital alone.",
      std::string(R"(suite: gp-admissibility
grid: {dim: 1, points: 16, length: 10.0}
gp: {k_values: [1, 2], alpha_values: [0.0, 0.5, 1.0, 2.0], xi: 0.5, k_max: 10}
)") + kRank3Small);

  add("gp-hierarchy-residual", "Hierarchy residual of an evolved mixture, order in dt and a wrong-coupling control.",
      "Evolves each orbital by the cubic NLS and evaluates the k-th hierarchy equation with a\n"
      "centred difference. The control uses the negated coupling.",
      std::string(R"(suite: gp-hierarchy-residual
grid: {dim: 1, points: 32, length: 14.0}
equation: {lambda: 1.0}
solver: {dt: 1.0e-3, steps: 2, dealias: false, dt_list: [2.0e-3, 1.0e-3]}
gp: {k_values: [1, 2]}
)") + kRank3Small);

  add("gp-continuity", "GP continuity law: exact cancellation of the interaction part and kinetic order.",
      "Interaction contribution relative to ||d_t rho|| + 2 ||div P||, maximised over dt, and the\n"
      "observed order of the kinetic residual.",
      std::string(R"(suite: gp-continuity
grid: {dim: 1, points: 64, length: 14.0}
equation: {lambda: 1.0}
solver: {dt: 1.0e-3, steps: 2, dealias: false, dt_list: [4.0e-3, 2.0e-3, 1.0e-3]}
)") + kRank3Small);

  add("gp-morawetz-1p", "One-particle GP Morawetz identity on rank-one and rank-three mixtures.",
      "Centred difference of M_a against T1 + T2 + T3 at dt = 1e-3 on both grids; order in dt on 1D.",
      std::string(R"(suite: gp-morawetz-1p
grids:
  - {dim: 1, points: 128, length: 25.6}
  - {dim: 2, points: 64, length: 16.0}
equation: {lambda: 1.0}
solver: {dt: 1.0e-3, steps: 2, dealias: true, dt_list: [2.0e-3, 1.0e-3]}
weight: {epsilon: 1.0, center: [0.1, -0.2]}
)") + kRank3);

  add("gp-morawetz-interaction", "Interaction GP Morawetz identity, raw and closed forms, with the A4 column.",
      "Centred difference of the interaction action against theta1 + ... + theta4 and against\n"
      "(A1 + A2 + A3 + A4) / 2 on rank-one and rank-three mixtures.",
      std::string(R"(suite: gp-morawetz-interaction
grid: {dim: 1, points: 128, length: 25.6}
equation: {lambda: 1.0}
solver: {dt: 1.0e-3, steps: 2, dealias: true}
weight: {epsilon: 1.0}
)") + kRank3);

  add("gp-a4", "Cancellation of A4 across weights, dimensions and signs of the coupling.",
      "A4 relative to |A1| + |A2| + |A3| for every epsilon, both signs of lambda and every grid.\n"
      "On 1D grids with N <= 16 the raw terms are also rebuilt from explicit tensors.",
      std::string(R"(suite: gp-a4
grids:
  - {dim: 1, points: 128, length: 25.6}
  - {dim: 2, points: 64, length: 16.0}
  - {dim: 1, points: 16, length: 8.0}
equation: {lambda: 1.0}
weight: {epsilon_list: [0.5, 1.0, 2.0]}
)") + kRank3);

  add("gp-reduction", "Collapse of the interaction identity to the one-particle identity for a(x, y) = a(x).",
      "Term-by-term differences between the collapsed interaction terms and T1, T2, T3 relative to\n"
      "the one-particle scale, and the agreement of the two actions.",
      std::string(R"(suite: gp-reduction
grids:
  - {dim: 1, points: 128, length: 25.6}
  - {dim: 2, points: 64, length: 16.0}
equation: {lambda: 1.0}
weight: {epsilon: 1.0, center: [0.3, -0.2]}
)") + kRank3);

  add("gp-nls-crosscheck", "GP-side terms against NLS-side terms on shared pure-state trajectories.",
      "Evolves one orbital and compares, at each observer time, the GP densities, actions and rate\n"
      "terms of the pure state with their NLS counterparts, including the raw-term mapping table.",
      R"(suite: gp-nls-crosscheck
grids:
  - {dim: 1, points: 128, length: 25.6}
  - {dim: 2, points: 64, length: 16.0}
equation: {lambda: 1.0}
initial: {kind: gaussian, width: 1.0, center: [0.3, 0.0], velocity: [0.7853981633974483, -0.39269908169872414], chirp: -0.25}
solver: {dt: 1.0e-3, steps: 200, observer_stride: 50}
weight: {epsilon: 1.0, center: [0.2, -0.1]}
observers: [gp_morawetz_1p, gp_morawetz_int, gp_a4_check, gp_reduction_check]
)");
  return b;
}

const std::vector<Builtin>& catalog() {
  static const std::vector<Builtin> c = make_catalog();
  return c;
}

}  // namespace

const std::vector<BuiltinInfo>& builtin_catalog() {
  static const std::vector<BuiltinInfo> infos = [] {
    std::vector<BuiltinInfo> v;
    for (const auto& b : catalog()) v.push_back(b.info);
    return v;
  }();
  return infos;
}

const std::string& builtin_yaml(const std::string& name) {
  for (const auto& b : catalog())
    if (b.info.name == name) return b.yaml;
  throw ConfigError("unknown built-in scenario '" + name + "'");
}

Scenario builtin_scenario(const std::string& name) {
  auto v = parse_scenarios(builtin_yaml(name), "builtin:" + name, false);
  return v.front();
}

const std::map<std::string, std::map<std::string, double>>& suite_criteria() {
  static const std::map<std::string, std::map<std::string, double>> m{
      {"conservation", {{"mass_drift", 1e-8}, {"energy_drift", 1e-8}, {"momentum_drift", 1e-10}}},
      {"local-laws",
       {{"continuity_residual", 1e-5},
        {"momentum_residual", 1e-5},
        {"continuity_slope_error", 0.1},
        {"momentum_slope_error", 0.1}}},
      {"morawetz-identity",
       {{"one_particle_residual", 1e-4}, {"one_particle_slope_error", 0.1}, {"interaction_residual", 1e-4}}},
      {"interaction-positivity",
       {{"direct_sum_mismatch", 1e-10},
        {"positivity_violation", 1e-10},
        {"current_lower_violation", 1e-12},
        {"current_upper_violation", 1e-9}}},
      {"delta-extrapolation", {{"identity_residual", 1e-4}, {"delta_gap", 0.02}, {"monotonicity_violation", 1e-8}}},
      {"inequality-audit", {{"ledger_excess", 1e-6}, {"remark_excess", 1e-6}}},
      {"gp-admissibility",
       {{"admissibility_residual", 1e-12},
        {"hermiticity_residual", 1e-12},
        {"trace_error", 1e-12},
        {"perturbed_control", 1e-3},
        {"norm_factorized_error", 1e-10},
        {"h_xi_oracle_error", 1e-12}}},
      {"gp-hierarchy-residual", {{"slope_error", 0.3}, {"mismatched_lambda_control", 1e-3}}},
      {"gp-continuity", {{"interaction_contribution", 1e-13}, {"kinetic_slope_error", 0.1}}},
      {"gp-morawetz-1p", {{"identity_residual", 1e-4}, {"slope_error", 0.3}}},
      {"gp-morawetz-interaction", {{"identity_residual", 1e-4}, {"raw_residual", 1e-4}, {"a4_relative", 1e-10}}},
      {"gp-a4", {{"a4_relative", 1e-10}, {"explicit_mismatch", 1e-12}}},
      {"gp-reduction", {{"theorem_delta", 1e-10}, {"raw_delta", 1e-10}, {"action_mismatch", 1e-12}}},
      {"gp-nls-crosscheck", {{"term_mismatch", 1e-9}, {"mapping_mismatch", 1e-9}, {"density_mismatch", 1e-9}}},
  };
  return m;
}

const std::set<std::string>& suite_observers(const std::string& suite) {
  static const std::set<std::string> nls{"mass", "energy", "momentum", "boundary_ratio", "morawetz_action",
                                         "interaction_action"};
  static const std::set<std::string> gp{"gp_morawetz_1p", "gp_morawetz_int", "gp_a4_check", "gp_reduction_check"};
  static const std::set<std::string> none;
  if (suite == "conservation") return nls;
  if (suite == "gp-nls-crosscheck") return gp;
  return none;
}

}  // namespace mlab
