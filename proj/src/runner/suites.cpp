#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <sstream>

#include "mlab/conservation.hpp"
#include "mlab/errors.hpp"
#include "mlab/gp_morawetz.hpp"
#include "mlab/morawetz.hpp"
#include "mlab/spectral.hpp"
#include "runner_internal.hpp"

namespace mlab {

// ---------------------------------------------------------------------------
// Builders.

GridPtr build_grid(const GridSpec& spec) { return make_grid(spec.dim, spec.points, spec.length); }

InitialData fit_to_dim(InitialData d, int dim) {
  auto fit = [dim](std::vector<double>& v) {
    if (!v.empty()) v.resize(static_cast<std::size_t>(dim), 0.0);
  };
  fit(d.center);
  fit(d.velocity);
  return d;
}

ComplexField build_field(const InitialData& d, const GridPtr& grid) {
  return make_initial_data(fit_to_dim(d, grid->dim), grid);
}

namespace {

ComplexField unit_mass(ComplexField u) {
  const double n = l2_norm(u);
  if (n == 0.0) throw ContractError("orbital has zero mass");
  u *= 1.0 / n;
  return u;
}

}  // namespace

MixtureState build_mixture(const Scenario& s, const GridPtr& grid) {
  if (s.mixture) {
    std::vector<ComplexField> orbitals;
    for (const auto& o : s.mixture->orbitals) orbitals.push_back(unit_mass(build_field(o, grid)));
    double total = 0.0;
    for (double w : s.mixture->weights) total += w;
    std::vector<double> weights;
    for (double w : s.mixture->weights) weights.push_back(w / total);
    return MixtureState(std::move(weights), std::move(orbitals));
  }
  if (s.initial) return MixtureState({1.0}, {unit_mass(build_field(*s.initial, grid))});
  throw ConfigError(s.name + ": suite '" + s.suite + "' needs a mixture or initial data");
}

Vec3 weight_center(const Scenario& s, int dim) {
  Vec3 c{};
  for (int a = 0; a < dim && a < static_cast<int>(s.weight.center.size()); ++a) c[a] = s.weight.center[a];
  return c;
}

double SuiteContext::tolerance(const std::string& key) const {
  if (auto it = scenario.tolerances.find(key); it != scenario.tolerances.end()) return it->second;
  const auto& defaults = suite_criteria().at(scenario.suite);
  if (auto it = defaults.find(key); it != defaults.end()) return it->second;
  throw std::logic_error("suite " + scenario.suite + " reports undeclared criterion " + key);
}

void SuiteContext::report(const std::string& key, double value, int group, const std::string& suffix) {
  Criterion c;
  c.name = suffix.empty() ? key : key + "_" + suffix;
  c.value = value;
  c.tolerance = tolerance(key);
  c.pass = std::isfinite(value) && value <= c.tolerance;
  c.group = group;
  result.criteria.push_back(std::move(c));
}

namespace {

// ---------------------------------------------------------------------------
// Shared helpers.

const InitialData& need_initial(const Scenario& s) {
  if (!s.initial) throw ConfigError(s.name + ": suite '" + s.suite + "' needs an initial block");
  return *s.initial;
}

void need_cubic(const Scenario& s) {
  if (s.equation.exponent != 3.0) throw ConfigError(s.name + ": GP suites use the cubic equation (exponent 3)");
}

std::vector<double> dt_values(const Scenario& s, std::size_t at_least) {
  std::vector<double> v = s.dt_list.empty() ? std::vector<double>{s.solver.dt} : s.dt_list;
  if (v.size() < at_least)
    throw ConfigError(s.name + ": solver.dt_list needs at least " + std::to_string(at_least) + " entries");
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

std::vector<double> epsilon_values(const Scenario& s) {
  return s.weight.epsilon_list.empty() ? std::vector<double>{s.weight.epsilon} : s.weight.epsilon_list;
}

/// Label for grid i: "1d", or "1d_n16" when several grids share a dimension.
std::string grid_tag(const Scenario& s, std::size_t i) {
  const auto& g = s.grids[i];
  const auto same = std::count_if(s.grids.begin(), s.grids.end(), [&](const GridSpec& o) { return o.dim == g.dim; });
  std::string tag = std::to_string(g.dim) + "d";
  if (same > 1) tag += "_n" + std::to_string(g.points);
  return tag;
}

std::string join(const std::string& a, const std::string& b) { return a.empty() ? b : b.empty() ? a : a + "_" + b; }

SolverConfig consecutive(const Scenario& s, double dt, long steps) {
  SolverConfig c = s.solver;
  c.dt = dt;
  c.steps = steps;
  c.observer_stride = 1;
  c.keep_snapshots = true;
  return c;
}

/// Observed order between the coarsest and finest step, as |order - 2|.
double order_error(const std::vector<double>& r, const std::vector<double>& dt) {
  const double order = std::log(r.front() / r.back()) / std::log(dt.front() / dt.back());
  return std::abs(order - 2.0);
}

double rel_to(double a, double b, double scale) { return std::abs(a - b) / std::max(scale, 1e-300); }

double max_abs_diff(const ComplexField& a, const ComplexField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// ---------------------------------------------------------------------------
// conservation

struct NLSObserverSet {
  std::vector<std::string> names;
  std::vector<std::string> columns;
  NLSParams params;
  Weight weight;
  Vec3 center;
  std::unique_ptr<InteractionEvaluator> interaction;

  NLSObserverSet(const Scenario& s, const GridPtr& g)
      : names(s.observers), params(s.equation), weight(Weight::abs_smoothed(g->dim, s.weight.epsilon)),
        center(weight_center(s, g->dim)) {
    if (names.empty()) names = {"mass", "energy", "momentum", "boundary_ratio"};
    static const char* axes[] = {"x", "y", "z"};
    for (const auto& n : names) {
      if (n == "momentum")
        for (int a = 0; a < g->dim; ++a) columns.push_back(std::string("momentum_") + axes[a]);
      else
        columns.push_back(n);
      if (n == "interaction_action") interaction = std::make_unique<InteractionEvaluator>(g, weight);
    }
  }

  void row(const ComplexField& u, std::vector<double>& out) const {
    for (const auto& n : names) {
      if (n == "mass") out.push_back(mass(u));
      else if (n == "energy") out.push_back(energy(u, params));
      else if (n == "momentum") for (double p : momentum(u)) out.push_back(p);
      else if (n == "boundary_ratio") out.push_back(boundary_ratio(u));
      else if (n == "morawetz_action") out.push_back(morawetz_action(u, center, weight));
      else if (n == "interaction_action") out.push_back(interaction->action(u));
    }
  }
};

void conservation_suite(SuiteContext& ctx) {
  const Scenario& s = ctx.scenario;
  const InitialData& init = need_initial(s);
  auto& table = ctx.result.table;
  for (std::size_t gi = 0; gi < s.grids.size(); ++gi) {
    auto g = build_grid(s.grids[gi]);
    InitialData d = init;
    d.seed += ctx.seed;
    const auto u0 = build_field(d, g);
    SolverConfig cfg = s.solver;
    cfg.keep_snapshots = true;
    const auto res = evolve(u0, s.equation, cfg);
    const NLSObserverSet obs(s, g);
    if (gi == 0) {
      table.header = {"grid", "t"};
      table.header.insert(table.header.end(), obs.columns.begin(), obs.columns.end());
    } else if (table.header.size() != obs.columns.size() + 2) {
      throw ConfigError(s.name + ": all grids of a conservation scenario must share a dimension");
    }
    const auto& snaps = res.trajectory.snapshots;
    const double m0 = mass(snaps.front()), e0 = energy(snaps.front(), s.equation);
    const auto p0 = momentum(snaps.front());
    double dm = 0, de = 0, dp = 0;
    for (std::size_t i = 0; i < snaps.size(); ++i) {
      const auto& u = snaps[i];
      dm = std::max(dm, std::abs(mass(u) - m0) / m0);
      de = std::max(de, std::abs(energy(u, s.equation) - e0) / std::abs(e0));
      const auto p = momentum(u);
      for (std::size_t a = 0; a < p.size(); ++a) dp = std::max(dp, std::abs(p[a] - p0[a]));
      std::vector<double> row{static_cast<double>(gi), res.trajectory.times[i]};
      obs.row(u, row);
      table.rows.push_back(std::move(row));
    }
    const std::string tag = s.grids.size() > 1 ? grid_tag(s, gi) : "";
    ctx.report("mass_drift", dm, 1, tag);
    ctx.report("energy_drift", de, 1, tag);
    ctx.report("momentum_drift", dp, 1, tag);
    if (res.max_boundary_ratio > 1e-6) {
      std::ostringstream os;
      os << "grid " << gi << ": solution reaches the box boundary (max ratio " << res.max_boundary_ratio << ")";
      ctx.warn(os.str());
    }
  }
}

// ---------------------------------------------------------------------------
// local-laws

void local_laws_suite(SuiteContext& ctx) {
  const Scenario& s = ctx.scenario;
  const InitialData& init = need_initial(s);
  const auto dts = dt_values(s, 2);
  const double t0 = s.solver.dt * static_cast<double>(s.solver.steps);
  auto& table = ctx.result.table;
  table.header = {"grid", "dt", "continuity_residual", "momentum_residual"};
  for (std::size_t gi = 0; gi < s.grids.size(); ++gi) {
    auto g = build_grid(s.grids[gi]);
    std::vector<double> rc, rm;
    for (double dt : dts) {
      ComplexField a, b, c;
      if (init.kind == InitialData::Kind::soliton_1d_cubic) {
        if (g->dim != 1 || s.equation.lambda != -1.0 || s.equation.exponent != 3.0)
          throw ConfigError(s.name + ": the exact soliton needs a 1D grid, lambda = -1 and exponent 3");
        const double x0 = init.center.empty() ? 0.0 : init.center[0];
        const double v = init.velocity.empty() ? 0.0 : init.velocity[0];
        if (t0 < dt) throw ConfigError(s.name + ": dt * steps must be at least the largest dt");
        a = soliton_exact(g, init.eta, x0, v, t0 - dt);
        b = soliton_exact(g, init.eta, x0, v, t0);
        c = soliton_exact(g, init.eta, x0, v, t0 + dt);
      } else {
        const long n = std::max(1L, std::lround(t0 / dt));
        ComplexField start = build_field(init, g);
        if (n > 1) {
          SolverConfig cfg = consecutive(s, dt, n - 1);
          cfg.observer_stride = n - 1;
          start = evolve(start, s.equation, cfg).trajectory.snapshots.back();
        }
        const auto tr = evolve(start, s.equation, consecutive(s, dt, 2)).trajectory;
        a = tr.snapshots[0];
        b = tr.snapshots[1];
        c = tr.snapshots[2];
      }
      rc.push_back(continuity_residual(a, c, b, dt));
      rm.push_back(momentum_residual(a, c, b, dt, s.equation));
      table.rows.push_back({static_cast<double>(gi), dt, rc.back(), rm.back()});
    }
    const std::string tag = s.grids.size() > 1 ? grid_tag(s, gi) : "";
    ctx.report("continuity_residual", rc.back(), 2, tag);
    ctx.report("momentum_residual", rm.back(), 2, tag);
    ctx.report("continuity_slope_error", order_error(rc, dts), 2, tag);
    ctx.report("momentum_slope_error", order_error(rm, dts), 2, tag);
  }
}

// ---------------------------------------------------------------------------
// morawetz-identity

void morawetz_identity_suite(SuiteContext& ctx) {
  const Scenario& s = ctx.scenario;
  const InitialData& init = need_initial(s);
  const auto dts = dt_values(s, 2);
  auto& table = ctx.result.table;
  table.header = {"grid", "dt", "fd_one_particle", "rhs_one_particle", "residual_one_particle",
                  "fd_interaction", "rhs_interaction", "residual_interaction"};
  for (std::size_t gi = 0; gi < s.grids.size(); ++gi) {
    auto g = build_grid(s.grids[gi]);
    const auto u0 = build_field(init, g);
    const Weight w = Weight::abs_smoothed(g->dim, s.weight.epsilon);
    const Vec3 y = weight_center(s, g->dim);
    const InteractionEvaluator ev(g, w);
    std::vector<double> r1, r2;
    for (double dt : dts) {
      const auto tr = evolve(u0, s.equation, consecutive(s, dt, 2)).trajectory;
      const auto& sn = tr.snapshots;
      const double fd1 = (morawetz_action(sn[2], y, w) - morawetz_action(sn[0], y, w)) / (2 * dt);
      const auto one = dt_morawetz_rhs(sn[1], y, w, s.equation);
      r1.push_back(rel_to(fd1, one.total(), one.scale()));
      const double fd2 = (ev.action(sn[2]) - ev.action(sn[0])) / (2 * dt);
      const auto two = ev.terms(sn[1], s.equation);
      r2.push_back(rel_to(fd2, two.sum(), two.scale()));
      table.rows.push_back({static_cast<double>(gi), dt, fd1, one.total(), r1.back(), fd2, two.sum(), r2.back()});
    }
    const std::string tag = s.grids.size() > 1 ? grid_tag(s, gi) : "";
    ctx.report("one_particle_residual", r1.back(), 3, tag);
    ctx.report("one_particle_slope_error", order_error(r1, dts), 3, tag);
    ctx.report("interaction_residual", r2.back(), 4, tag);
  }
}

// ---------------------------------------------------------------------------
// interaction-positivity

void interaction_positivity_suite(SuiteContext& ctx) {
  const Scenario& s = ctx.scenario;
  const InitialData& init = need_initial(s);
  if (s.samples == 0) throw ConfigError(s.name + ": samples must be positive");
  auto& table = ctx.result.table;
  table.header = {"grid", "epsilon", "sample", "III_plus_IV", "current_form", "scale"};
  for (std::size_t gi = 0; gi < s.grids.size(); ++gi) {
    auto g = build_grid(s.grids[gi]);
    const std::string tag = s.grids.size() > 1 ? grid_tag(s, gi) : "";
    double pos = 0, lower = 0, upper = 0, direct = 0;
    bool have_direct = false;
    const bool direct_ok = std::pow(static_cast<double>(g->size()), 2) <= 1 << 20;
    for (double eps : epsilon_values(s)) {
      const Weight w = Weight::abs_smoothed(g->dim, eps);
      const InteractionEvaluator ev(g, w);
      for (std::size_t k = 0; k < s.samples; ++k) {
        InitialData d = init;
        d.seed += ctx.seed + k;
        const auto u = build_field(d, g);
        const auto t = ev.terms(u, s.equation);
        const double scale = t.scale();
        const double q = t.III + t.IV;
        const auto J = two_point_current_bound(u, w);
        pos = std::max(pos, std::max(0.0, -q) / scale);
        lower = std::max(lower, std::max(0.0, -J.value) / scale);
        upper = std::max(upper, std::max(0.0, J.value - q) / scale);
        table.rows.push_back({static_cast<double>(gi), eps, static_cast<double>(k), q, J.value, scale});
        if (k == 0 && direct_ok) {
          const auto b = interaction_rhs_terms_direct(u, w, s.equation);
          const double m = std::max({std::abs(t.I - b.I), std::abs(t.II - b.II), std::abs(t.III - b.III),
                                     std::abs(t.IV - b.IV)}) / b.scale();
          const double a0 = interaction_action_direct(u, w);
          direct = std::max({direct, m, rel_to(ev.action(u), a0, std::abs(a0))});
          have_direct = true;
        }
      }
    }
    if (have_direct)
      ctx.report("direct_sum_mismatch", direct, 4, tag);
    else
      ctx.warn("grid " + std::to_string(gi) + ": too large for the direct double sum, check skipped");
    ctx.report("positivity_violation", pos, 5, tag);
    ctx.report("current_lower_violation", lower, 5, tag);
    ctx.report("current_upper_violation", upper, 5, tag);
  }
}

// ---------------------------------------------------------------------------
// delta-extrapolation

void delta_extrapolation_suite(SuiteContext& ctx) {
  const Scenario& s = ctx.scenario;
  const InitialData& init = need_initial(s);
  const auto eps = epsilon_values(s);
  if (eps.size() != 3) throw ConfigError(s.name + ": weight.epsilon_list needs exactly three entries");
  if (s.equation.lambda <= 0.0) ctx.warn("monotonicity of M_eps is only expected for lambda > 0");
  auto& table = ctx.result.table;
  table.header = {"grid", "t"};
  for (double e : eps) {
    std::ostringstream os;
    os << e;
    table.header.push_back("fd_eps_" + os.str());
    table.header.push_back("rhs_eps_" + os.str());
  }
  table.header.insert(table.header.end(), {"extrapolated", "delta_limit"});
  for (std::size_t gi = 0; gi < s.grids.size(); ++gi) {
    auto g = build_grid(s.grids[gi]);
    if (g->dim != 1) throw ConfigError(s.name + ": delta-extrapolation runs on 1D grids only");
    SolverConfig cfg = s.solver;
    cfg.observer_stride = 1;
    cfg.keep_snapshots = true;
    const auto tr = evolve(build_field(init, g), s.equation, cfg).trajectory;
    const auto rep = identity_1d(tr, cfg.dt, s.equation, eps, std::max<std::size_t>(1, s.samples));
    for (std::size_t p = 0; p < rep.probe_times.size(); ++p) {
      std::vector<double> row{static_cast<double>(gi), rep.probe_times[p]};
      for (std::size_t i = 0; i < eps.size(); ++i) {
        row.push_back(rep.fd[i][p]);
        row.push_back(rep.rhs[i][p]);
      }
      row.push_back(rep.extrapolated[p]);
      row.push_back(rep.delta_limit[p]);
      table.rows.push_back(std::move(row));
    }
    const std::string tag = s.grids.size() > 1 ? grid_tag(s, gi) : "";
    ctx.report("identity_residual", *std::max_element(rep.max_identity_residual.begin(), rep.max_identity_residual.end()), 6, tag);
    ctx.report("delta_gap", rep.max_gap, 6, tag);
    const double worst = *std::min_element(rep.worst_decrease.begin(), rep.worst_decrease.end());
    ctx.report("monotonicity_violation", std::max(0.0, -worst), 6, tag);
  }
}

// ---------------------------------------------------------------------------
// inequality-audit

void inequality_audit_suite(SuiteContext& ctx) {
  const Scenario& s = ctx.scenario;
  const InitialData& init = need_initial(s);
  if (s.equation.lambda <= 0.0) throw ConfigError(s.name + ": the inequality audit is for defocusing data (lambda > 0)");
  if (s.samples == 0) throw ConfigError(s.name + ": samples must be positive");
  auto& table = ctx.result.table;
  table.header = {"grid", "sample", "lhs_smoothing", "lhs_potential", "rhs_bound", "sup_action", "remark_bound",
                  "schwarz_bound", "mass", "sup_gradient"};
  for (std::size_t gi = 0; gi < s.grids.size(); ++gi) {
    auto g = build_grid(s.grids[gi]);
    const Weight w = Weight::abs_smoothed(g->dim, s.weight.epsilon);
    double ledger = -1.0, remark = -1.0;
    for (std::size_t k = 0; k < s.samples; ++k) {
      InitialData d = init;
      d.seed += ctx.seed + k;
      SolverConfig cfg = s.solver;
      cfg.keep_snapshots = true;
      const auto tr = evolve(build_field(d, g), s.equation, cfg).trajectory;
      const auto led = theorem_audit(tr, s.equation, w);
      const double lx = led.rhs_bound > 0.0 ? led.lhs() / led.rhs_bound - 1.0 : (led.lhs() > 0.0 ? INFINITY : -1.0);
      const double rx = led.remark_bound > 0.0 ? led.sup_action / led.remark_bound - 1.0 : -1.0;
      ledger = std::max(ledger, lx);
      remark = std::max(remark, rx);
      if (!led.schwarz_pass) ctx.warn("sample " + std::to_string(k) + ": Cauchy-Schwarz bound on sup |M_y| violated");
      table.rows.push_back({static_cast<double>(gi), static_cast<double>(k), led.lhs_smoothing, led.lhs_potential,
                            led.rhs_bound, led.sup_action, led.remark_bound, led.schwarz_bound, led.mass0,
                            led.sup_gradient});
    }
    const std::string tag = s.grids.size() > 1 ? grid_tag(s, gi) : "";
    ctx.report("ledger_excess", ledger, 7, tag);
    ctx.report("remark_excess", remark, 7, tag);
  }
}

// ---------------------------------------------------------------------------
// gp-admissibility

void gp_admissibility_suite(SuiteContext& ctx) {
  const Scenario& s = ctx.scenario;
  auto& table = ctx.result.table;
  table.header = {"grid", "k", "alpha", "tensor_norm", "mixture_norm", "oracle"};
  for (std::size_t gi = 0; gi < s.grids.size(); ++gi) {
    auto g = build_grid(s.grids[gi]);
    if (g->dim != 1) throw ConfigError(s.name + ": explicit marginals need a 1D grid");
    const std::string tag = s.grids.size() > 1 ? grid_tag(s, gi) : "";
    const auto st = build_mixture(s, g);
    const std::size_t n = g->points_per_axis;
    const auto g1 = marginal(st, 1), g2 = marginal(st, 2), g3 = marginal(st, 3);
    const double adm = std::max(max_abs_diff(partial_trace(g2).values, g1.values),
                                max_abs_diff(partial_trace(g3).values, g2.values));
    const double herm = std::max({g1.hermiticity_residual(), g2.hermiticity_residual(), g3.hermiticity_residual()});
    const double tr = std::max({std::abs(g1.trace() - 1.0), std::abs(g2.trace() - 1.0), std::abs(g3.trace() - 1.0)});
    // a unit-trace delta placed in the traced slot of gamma^(2)
    auto bad = g2;
    const double delta = 1e-4;
    const std::size_t j = n / 4;
    for (std::size_t x = 0; x < n; ++x) bad.values[(x * n + j) * n * n + (x * n + j)] += delta / g->spacing;
    const double perturbed = max_abs_diff(partial_trace(bad).values, g1.values);
    ctx.report("admissibility_residual", adm, 8, tag);
    ctx.report("hermiticity_residual", herm, 8, tag);
    ctx.report("trace_error", tr, 8, tag);
    ctx.report("perturbed_control", adm / perturbed, 8, tag);

    const MixtureState pure({1.0}, {st.orbitals.front()});
    double norm_err = 0.0, xi_err = 0.0;
    for (double alpha : s.gp.alpha_values) {
      const double c = std::pow(l2_norm(bessel_potential(pure.orbitals[0], alpha)), 2);
      for (int k : s.gp.k_values) {
        const double oracle = std::pow(c, k);
        const double a = h_alpha_norm(marginal(pure, k), alpha);
        const double b = h_alpha_norm(pure, k, alpha);
        norm_err = std::max({norm_err, rel_to(a, oracle, oracle), rel_to(b, oracle, oracle)});
        table.rows.push_back({static_cast<double>(gi), static_cast<double>(k), alpha, a, b, oracle});
        // the mixture closed form against the explicit tensor
        const double ma = h_alpha_norm(marginal(st, k), alpha), mb = h_alpha_norm(st, k, alpha);
        norm_err = std::max(norm_err, rel_to(ma, mb, mb));
      }
      const auto hx = h_xi_norm(pure, s.gp.k_max, s.gp.xi, alpha);
      double oracle = 0.0;
      for (int k = 1; k <= s.gp.k_max; ++k) oracle += std::pow(s.gp.xi * c, k);
      xi_err = std::max(xi_err, rel_to(hx.partial, oracle, oracle));
    }
    ctx.report("norm_factorized_error", norm_err, 12, tag);
    ctx.report("h_xi_oracle_error", xi_err, 12, tag);
  }
}

// ---------------------------------------------------------------------------
// gp-hierarchy-residual

void gp_hierarchy_suite(SuiteContext& ctx) {
  const Scenario& s = ctx.scenario;
  need_cubic(s);
  if (s.equation.lambda == 0.0) throw ConfigError(s.name + ": the wrong-coupling control needs lambda != 0");
  const auto dts = dt_values(s, 2);
  auto& table = ctx.result.table;
  table.header = {"grid", "k", "dt", "residual", "negated_lambda_residual"};
  for (std::size_t gi = 0; gi < s.grids.size(); ++gi) {
    auto g = build_grid(s.grids[gi]);
    const std::string tag = s.grids.size() > 1 ? grid_tag(s, gi) : "";
    const auto st = build_mixture(s, g);
    std::vector<MixtureTrajectory> trs;
    for (double dt : dts) trs.push_back(evolve_mixture(st, s.equation.lambda, consecutive(s, dt, 2)));
    double control = 0.0;
    for (int k : s.gp.k_values) {
      std::vector<double> r;
      double wrong = 0.0;
      for (std::size_t i = 0; i < dts.size(); ++i) {
        const auto& x = trs[i].states;
        r.push_back(hierarchy_residual(x[0], x[1], x[2], k, dts[i], s.equation.lambda));
        wrong = hierarchy_residual(x[0], x[1], x[2], k, dts[i], -s.equation.lambda);
        table.rows.push_back({static_cast<double>(gi), static_cast<double>(k), dts[i], r.back(), wrong});
      }
      ctx.report("slope_error", order_error(r, dts), 8, join(tag, "k" + std::to_string(k)));
      control = std::max(control, r.back() / wrong);
    }
    ctx.report("mismatched_lambda_control", control, 8, tag);
  }
}

// ---------------------------------------------------------------------------
// gp-continuity

void gp_continuity_suite(SuiteContext& ctx) {
  const Scenario& s = ctx.scenario;
  need_cubic(s);
  const auto dts = dt_values(s, 2);
  auto& table = ctx.result.table;
  table.header = {"grid", "dt", "kinetic_residual", "interaction_contribution", "scale"};
  for (std::size_t gi = 0; gi < s.grids.size(); ++gi) {
    auto g = build_grid(s.grids[gi]);
    const std::string tag = s.grids.size() > 1 ? grid_tag(s, gi) : "";
    const auto st = build_mixture(s, g);
    std::vector<double> kin;
    double inter = 0.0;
    for (double dt : dts) {
      const auto x = evolve_mixture(st, s.equation.lambda, consecutive(s, dt, 2)).states;
      const auto c = gp_continuity_check(x[0], x[1], x[2], dt, s.equation.lambda);
      kin.push_back(c.kinetic_residual);
      inter = std::max(inter, c.interaction_contribution / c.scale);
      table.rows.push_back({static_cast<double>(gi), dt, c.kinetic_residual, c.interaction_contribution, c.scale});
    }
    ctx.report("interaction_contribution", inter, 9, tag);
    ctx.report("kinetic_slope_error", order_error(kin, dts), 9, tag);
  }
}

// ---------------------------------------------------------------------------
// gp-morawetz-1p and gp-morawetz-interaction

std::vector<std::pair<std::string, MixtureState>> rank_cases(const MixtureState& st) {
  std::vector<std::pair<std::string, MixtureState>> v;
  v.emplace_back("rank1", MixtureState({1.0}, {st.orbitals.front()}));
  if (st.size() > 1) v.emplace_back("rank" + std::to_string(st.size()), st);
  return v;
}

void gp_one_particle_suite(SuiteContext& ctx) {
  const Scenario& s = ctx.scenario;
  need_cubic(s);
  const auto dts = dt_values(s, 1);
  const double lambda = s.equation.lambda;
  auto& table = ctx.result.table;
  table.header = {"grid", "rank", "dt", "fd", "T1", "T2", "T3", "residual"};
  for (std::size_t gi = 0; gi < s.grids.size(); ++gi) {
    auto g = build_grid(s.grids[gi]);
    const std::string tag = s.grids.size() > 1 ? grid_tag(s, gi) : "";
    const Weight w = Weight::abs_smoothed(g->dim, s.weight.epsilon);
    const Vec3 c = weight_center(s, g->dim);
    for (const auto& [label, st] : rank_cases(build_mixture(s, g))) {
      std::vector<double> r;
      for (double dt : dts) {
        const auto x = evolve_mixture(st, lambda, consecutive(s, dt, 2)).states;
        const double fd = (gp_one_particle_action(x[2], w, c) - gp_one_particle_action(x[0], w, c)) / (2 * dt);
        const auto t = gp_one_particle_rhs(x[1], w, lambda, c);
        r.push_back(rel_to(fd, t.total(), t.scale()));
        table.rows.push_back({static_cast<double>(gi), static_cast<double>(st.size()), dt, fd, t.T1, t.T2, t.T3, r.back()});
      }
      ctx.report("identity_residual", r.back(), 10, join(tag, label));
      if (dts.size() > 1 && g->dim == 1) ctx.report("slope_error", order_error(r, dts), 10, join(tag, label));
    }
  }
}

void gp_interaction_suite(SuiteContext& ctx) {
  const Scenario& s = ctx.scenario;
  need_cubic(s);
  const auto dts = dt_values(s, 1);
  const double lambda = s.equation.lambda;
  auto& table = ctx.result.table;
  table.header = {"grid", "rank", "dt", "fd", "theorem_rate", "raw_rate", "A1", "A2", "A3", "A4",
                  "theorem_residual", "raw_residual"};
  for (std::size_t gi = 0; gi < s.grids.size(); ++gi) {
    auto g = build_grid(s.grids[gi]);
    const std::string tag = s.grids.size() > 1 ? grid_tag(s, gi) : "";
    const GPMorawetzEvaluator ev(g, GPWeight::displacement(Weight::abs_smoothed(g->dim, s.weight.epsilon)));
    for (const auto& [label, st] : rank_cases(build_mixture(s, g))) {
      double th = 0, raw = 0, a4 = 0;
      for (double dt : dts) {
        const auto x = evolve_mixture(st, lambda, consecutive(s, dt, 2)).states;
        const double fd = (ev.action(x[2]) - ev.action(x[0])) / (2 * dt);
        const auto t = ev.rhs(x[1], lambda);
        th = rel_to(fd, t.theorem_rate(), t.theorem_scale());
        raw = rel_to(fd, t.raw_rate(), 0.5 * t.raw_scale());
        a4 = std::max(a4, std::abs(t.A4) / (std::abs(t.A1) + std::abs(t.A2) + std::abs(t.A3)));
        table.rows.push_back({static_cast<double>(gi), static_cast<double>(st.size()), dt, fd, t.theorem_rate(),
                              t.raw_rate(), t.A1, t.A2, t.A3, t.A4, th, raw});
      }
      ctx.report("identity_residual", th, 10, join(tag, label));
      ctx.report("raw_residual", raw, 10, join(tag, label));
      ctx.report("a4_relative", a4, 10, join(tag, label));
    }
  }
}

// ---------------------------------------------------------------------------
// gp-a4

void gp_a4_suite(SuiteContext& ctx) {
  const Scenario& s = ctx.scenario;
  need_cubic(s);
  auto& table = ctx.result.table;
  table.header = {"grid", "epsilon", "lambda", "A1", "A2", "A3", "A4", "a4_relative"};
  bool any_explicit = false;
  for (std::size_t gi = 0; gi < s.grids.size(); ++gi) {
    auto g = build_grid(s.grids[gi]);
    const std::string tag = s.grids.size() > 1 ? grid_tag(s, gi) : "";
    const auto st = build_mixture(s, g);
    const bool explicit_ok = g->dim == 1 && std::pow(static_cast<double>(g->points_per_axis), 6) <= kTensorEntryLimit;
    double a4 = 0.0, mismatch = 0.0;
    for (double eps : epsilon_values(s)) {
      const Weight w = Weight::abs_smoothed(g->dim, eps);
      for (double lambda : {s.equation.lambda, -s.equation.lambda}) {
        const auto t = gp_interaction_rhs(st, GPWeight::displacement(w), lambda);
        const double denom = std::abs(t.A1) + std::abs(t.A2) + std::abs(t.A3);
        a4 = std::max(a4, std::abs(t.A4) / denom);
        table.rows.push_back({static_cast<double>(gi), eps, lambda, t.A1, t.A2, t.A3, t.A4, std::abs(t.A4) / denom});
        if (explicit_ok) {
          const auto e = gp_interaction_rhs_explicit(st, w, lambda);
          const double sc = t.raw_scale();
          mismatch = std::max({mismatch, std::abs(e.A1 - t.A1) / sc, std::abs(e.A2 - t.A2) / sc,
                               std::abs(e.A3 - t.A3) / sc});
          a4 = std::max(a4, std::abs(e.A4) / denom);
        }
      }
    }
    ctx.report("a4_relative", a4, 10, tag);
    if (explicit_ok) {
      ctx.report("explicit_mismatch", mismatch, 10, tag);
      any_explicit = true;
    }
  }
  if (!any_explicit) ctx.warn("no 1D grid small enough for the explicit tensor check");
}

// ---------------------------------------------------------------------------
// gp-reduction

void gp_reduction_suite(SuiteContext& ctx) {
  const Scenario& s = ctx.scenario;
  need_cubic(s);
  auto& table = ctx.result.table;
  table.header = {"grid", "term", "theorem_delta", "raw_delta", "scale"};
  for (std::size_t gi = 0; gi < s.grids.size(); ++gi) {
    auto g = build_grid(s.grids[gi]);
    const std::string tag = s.grids.size() > 1 ? grid_tag(s, gi) : "";
    const auto st = build_mixture(s, g);
    const Weight w = Weight::abs_smoothed(g->dim, s.weight.epsilon);
    const Vec3 c = weight_center(s, g->dim);
    const auto r = reduction_consistency(st, w, s.equation.lambda, c);
    const double sc = r.one_particle.scale();
    for (std::size_t i = 0; i < 4; ++i)
      table.rows.push_back({static_cast<double>(gi), static_cast<double>(i + 1), r.theorem_delta[i], r.raw_delta[i], sc});
    ctx.report("theorem_delta", r.max_theorem_delta() / sc, 10, tag);
    ctx.report("raw_delta", r.max_raw_delta() / sc, 10, tag);
    const double a = gp_interaction_action(st, GPWeight::x_only(w, c));
    const double b = gp_one_particle_action(st, w, c);
    ctx.report("action_mismatch", rel_to(a, b, std::abs(b)), 10, tag);
  }
}

// ---------------------------------------------------------------------------
// gp-nls-crosscheck

double nls_term(const InteractionTerms& t, const std::string& name) {
  if (name == "I") return t.I;
  if (name == "II") return t.II;
  if (name == "III") return t.III;
  if (name == "IV") return t.IV;
  throw std::logic_error("unknown NLS term " + name);
}

/// Sum of the NLS terms listed as "I + III"; "-" is the empty sum.
double nls_sum(const InteractionTerms& t, std::string_view list) {
  if (list == "-") return 0.0;
  double v = 0.0;
  std::istringstream in{std::string(list)};
  std::string tok;
  while (in >> tok)
    if (tok != "+") v += nls_term(t, tok);
  return v;
}

void gp_crosscheck_suite(SuiteContext& ctx) {
  const Scenario& s = ctx.scenario;
  need_cubic(s);
  const InitialData& init = need_initial(s);
  const double lambda = s.equation.lambda;
  std::vector<std::string> names = s.observers;
  if (names.empty()) names = {"gp_morawetz_1p", "gp_morawetz_int", "gp_a4_check", "gp_reduction_check"};
  auto& table = ctx.result.table;
  table.header = {"grid", "t"};
  for (const auto& n : names) {
    if (n == "gp_morawetz_1p") table.header.insert(table.header.end(), {"gp_action_1p", "nls_action_1p", "gp_rate_1p", "nls_rate_1p"});
    if (n == "gp_morawetz_int") table.header.insert(table.header.end(), {"gp_action_int", "nls_action_int", "gp_theorem_rate_int", "gp_raw_rate_int", "nls_rate_int"});
    if (n == "gp_a4_check") table.header.push_back("a4_relative");
    if (n == "gp_reduction_check") table.header.insert(table.header.end(), {"reduction_theorem_delta", "reduction_raw_delta"});
  }
  for (std::size_t gi = 0; gi < s.grids.size(); ++gi) {
    auto g = build_grid(s.grids[gi]);
    const std::string tag = s.grids.size() > 1 ? grid_tag(s, gi) : "";
    const Weight w = Weight::abs_smoothed(g->dim, s.weight.epsilon);
    const Vec3 c = weight_center(s, g->dim);
    const GPMorawetzEvaluator gev(g, GPWeight::displacement(w));
    const InteractionEvaluator nev(g, w);
    ComplexField u0 = build_field(init, g);
    u0 *= 1.0 / l2_norm(u0);
    SolverConfig cfg = s.solver;
    cfg.keep_snapshots = true;
    const auto tr = evolve(u0, s.equation, cfg).trajectory;
    double terms = 0, mapping = 0, dens = 0, literal = 0;
    for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
      const auto& u = tr.snapshots[i];
      const MixtureState pure({1.0}, {u}, false);

      const auto gd = gp_density_and_momentum(pure);
      const auto nd = density_fields(u, false);
      const double rho_max = nd.rho.max_abs();
      dens = std::max(dens, max_abs_diff(gd.rho, nd.rho) / rho_max);
      double p_max = 0.0, p_diff = 0.0;
      for (int a = 0; a < g->dim; ++a) {
        p_max = std::max(p_max, nd.p[a].max_abs());
        p_diff = std::max(p_diff, max_abs_diff(gd.P[a], nd.p[a]));
      }
      dens = std::max(dens, p_diff / std::max(p_max, rho_max));

      const double gp_a1 = gp_one_particle_action(pure, w, c), nls_a1 = morawetz_action(u, c, w);
      const auto g1 = gp_one_particle_rhs(pure, w, lambda, c);
      const auto n1 = dt_morawetz_rhs(u, c, w, s.equation);
      const double s1 = n1.scale();
      terms = std::max({terms, rel_to(gp_a1, nls_a1, std::abs(nls_a1)), rel_to(g1.T1_chain, n1.smoothing, s1),
                        rel_to(g1.T2, n1.potential, s1), rel_to(g1.T3, n1.hessian, s1)});
      literal = std::max(literal, rel_to(g1.T1, g1.T1_chain, s1));

      const double gp_a2 = gev.action(pure), nls_a2 = nev.action(u);
      const auto g2 = gev.rhs(pure, lambda);
      const auto n2 = nev.terms(u, s.equation);
      const double s2 = n2.scale();
      terms = std::max({terms, rel_to(gp_a2, nls_a2, std::abs(nls_a2)), rel_to(g2.theta1, n2.I, s2),
                        rel_to(g2.theta2, n2.II, s2), rel_to(g2.theta3, n2.III, s2), rel_to(g2.theta4, n2.IV, s2)});
      const double raw[4] = {g2.A1, g2.A2, g2.A3, g2.A4};
      for (std::size_t m = 0; m < kTermMapping.size(); ++m)
        mapping = std::max(mapping, rel_to(raw[m], kTermMapping[m].factor * nls_sum(n2, kTermMapping[m].nls_pure_state), s2));
      mapping = std::max(mapping, rel_to(g2.raw_rate(), n2.sum(), s2));

      std::vector<double> row{static_cast<double>(gi), tr.times[i]};
      for (const auto& n : names) {
        if (n == "gp_morawetz_1p") row.insert(row.end(), {gp_a1, nls_a1, g1.chain_total(), n1.total()});
        if (n == "gp_morawetz_int") row.insert(row.end(), {gp_a2, nls_a2, g2.theorem_rate(), g2.raw_rate(), n2.sum()});
        if (n == "gp_a4_check") row.push_back(std::abs(g2.A4) / (std::abs(g2.A1) + std::abs(g2.A2) + std::abs(g2.A3)));
        if (n == "gp_reduction_check") {
          const auto r = reduction_consistency(pure, w, lambda, c);
          row.insert(row.end(), {r.max_theorem_delta() / r.one_particle.scale(), r.max_raw_delta() / r.one_particle.scale()});
        }
      }
      table.rows.push_back(std::move(row));
    }
    ctx.report("term_mismatch", terms, 11, tag);
    ctx.report("mapping_mismatch", mapping, 11, tag);
    ctx.report("density_mismatch", dens, 11, tag);
    if (literal > 1e-9) {
      std::ostringstream os;
      os << "grid " << gi << ": literal T1 differs from its integrated-by-parts form by " << literal << " of the scale";
      ctx.warn(os.str());
    }
  }
}

}  // namespace

void evaluate_suite(SuiteContext& ctx) {
  static const std::map<std::string, void (*)(SuiteContext&)> table{
      {"conservation", conservation_suite},
      {"local-laws", local_laws_suite},
      {"morawetz-identity", morawetz_identity_suite},
      {"interaction-positivity", interaction_positivity_suite},
      {"delta-extrapolation", delta_extrapolation_suite},
      {"inequality-audit", inequality_audit_suite},
      {"gp-admissibility", gp_admissibility_suite},
      {"gp-hierarchy-residual", gp_hierarchy_suite},
      {"gp-continuity", gp_continuity_suite},
      {"gp-morawetz-1p", gp_one_particle_suite},
      {"gp-morawetz-interaction", gp_interaction_suite},
      {"gp-a4", gp_a4_suite},
      {"gp-reduction", gp_reduction_suite},
      {"gp-nls-crosscheck", gp_crosscheck_suite},
  };
  const auto it = table.find(ctx.scenario.suite);
  if (it == table.end()) throw ConfigError("unknown suite '" + ctx.scenario.suite + "'");
  it->second(ctx);
}

}  // namespace mlab
