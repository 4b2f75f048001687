#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>

#include "mlab/errors.hpp"
#include "mlab/gp_morawetz.hpp"
#include "mlab/morawetz.hpp"
#include "mlab/spectral.hpp"

using namespace mlab;

namespace {

// Gaussian with a boost and a chirp exp(i beta |x - c|^2), unit mass.
ComplexField unit_gaussian(const GridPtr& g, double w, std::vector<double> v = {}, std::vector<double> c = {},
                           double beta = 0.0) {
  InitialData d;
  d.width = w;
  d.velocity = v;
  d.center = c;
  ComplexField u = make_initial_data(d, g);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Vec3 x = g->position(i);
    double r2 = 0;
    for (int a = 0; a < g->dim; ++a) r2 += std::pow(x[a] - (c.empty() ? 0.0 : c[a]), 2);
    u[i] *= std::polar(1.0, beta * r2);
  }
  u *= 1.0 / l2_norm(u);
  return u;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// lattice wavenumber q * 2 pi / L
double kq(const GridPtr& g, int q) { return q * 2 * std::numbers::pi / g->box_length; }

MixtureState rank3_1d(const GridPtr& g) {
  return MixtureState({0.5, 0.3, 0.2},
                      {unit_gaussian(g, 1.0, {kq(g, 2)}, {-0.8}, 0.3), unit_gaussian(g, 0.9, {-kq(g, 3)}, {1.0}, -0.2),
                       unit_gaussian(g, 1.1, {kq(g, 1)}, {0.2}, 0.1)});
}

MixtureState rank3_2d(const GridPtr& g) {
  return MixtureState({0.4, 0.35, 0.25},
                      {unit_gaussian(g, 1.0, {kq(g, 2), 0.0}, {-0.6, 0.3}, 0.2),
                       unit_gaussian(g, 0.9, {0.0, -kq(g, 2)}, {0.7, 0.0}, -0.15),
                       unit_gaussian(g, 0.95, {-kq(g, 1), kq(g, 1)}, {0.0, -0.5}, 0.1)});
}

}  // namespace

SolverConfig consecutive(double dt, long steps) {
  SolverConfig c;
  c.dt = dt;
  c.steps = steps;
  c.observer_stride = 1;
  return c;
}

TEST_CASE("one-particle GP action") {
  auto g = make_grid(1, 128, 25.6);
  const auto w = Weight::abs_smoothed(1, 1.0);
  CHECK(std::abs(gp_one_particle_action(MixtureState({1.0}, {unit_gaussian(g, 1.0)}), w)) <= 1e-15);
  CHECK(gp_one_particle_action(MixtureState(), w) == 0.0);
  auto u = unit_gaussian(g, 1.0, {kq(g, 3)}, {0.4}, 0.25);
  const double nls = morawetz_action(u, {0.5, 0, 0}, w);
  CHECK(std::abs(gp_one_particle_action(MixtureState({1.0}, {u}), w, {0.5, 0, 0}) - nls) <= 1e-12 * std::abs(nls));
}

TEST_CASE("one-particle GP rhs") {
  const NLSParams cubic{1.0, 3.0};
  SUBCASE("pure state against the NLS identity") {
    for (int dim : {1, 2}) {
      auto g = dim == 1 ? make_grid(1, 128, 25.6) : make_grid(2, 64, 16.0);
      const auto w = Weight::abs_smoothed(dim, 1.0);
      auto u = dim == 1 ? unit_gaussian(g, 1.0, {kq(g, 3)}, {0.4}, 0.25) : unit_gaussian(g, 1.0, {kq(g, 2), -kq(g, 1)}, {0.3, 0.0}, 0.25);
      const Vec3 c{0.2, -0.1, 0.0};
      const auto gp = gp_one_particle_rhs(MixtureState({1.0}, {u}), w, 1.0, c);
      const auto nls = dt_morawetz_rhs(u, c, w, cubic);
      CHECK(std::abs(gp.chain_total() - nls.total()) <= 1e-10 * nls.scale());
      CHECK(std::abs(gp.T2 - nls.potential) <= 1e-12 * nls.scale());
      CHECK(std::abs(gp.T3 - nls.hessian) <= 1e-12 * nls.scale());
      MESSAGE("dim " << dim << " T1 literal vs by parts " << rel(gp.T1, gp.T1_chain));
      CHECK(std::abs(gp.T1 - gp.T1_chain) <= 1e-8 * nls.scale());
    }
  }
  SUBCASE("contracts") {
    auto g = make_grid(1, 64, 16.0);
    const auto z = gp_one_particle_rhs(MixtureState(), Weight::abs_smoothed(1, 1.0), 1.0);
    CHECK(z.T1 == 0.0);
    CHECK(z.T2 == 0.0);
    CHECK(z.T3 == 0.0);
    CHECK_THROWS_AS(gp_one_particle_rhs(MixtureState({1.0}, {unit_gaussian(g, 1.0)}), Weight::abs_smoothed(1, 0.0), 1.0),
                    ContractError);
    CHECK_THROWS_AS(gp_interaction_rhs(MixtureState({1.0}, {unit_gaussian(g, 1.0)}),
                                       GPWeight::displacement(Weight::abs_smoothed(1, 0.0)), 1.0),
                    ContractError);
  }
}

TEST_CASE("interaction GP action") {
  auto g = make_grid(1, 32, 12.0);
  const auto w = Weight::abs_smoothed(1, 1.0);
  const auto dw = GPWeight::displacement(w);
  CHECK(std::abs(gp_interaction_action(MixtureState({0.5, 0.5}, {unit_gaussian(g, 1.0), unit_gaussian(g, 0.8, {}, {1.0})}), dw)) <= 1e-15);
  auto u = unit_gaussian(g, 1.0, {kq(g, 1)}, {0.4}, 0.25);
  const double nls = interaction_action(u, w);
  CHECK(std::abs(gp_interaction_action(MixtureState({1.0}, {u}), dw) - nls) <= 1e-11 * std::abs(nls));

  // mixture double sum
  const auto st = rank3_1d(g);
  double direct = 0;
  for (std::size_t m = 0; m < st.size(); ++m) {
    const auto d = pointwise_densities(st.orbitals[m]);
    for (std::size_t x = 0; x < 32; ++x)
      for (std::size_t y = 0; y < 32; ++y)
        direct += st.weights[m] * symmetrized_eval(w.gradient_kernel(0), displacement(g->position(x), g->position(y), *g), *g) *
                  d.p[0][x] * d.rho[y];
  }
  direct *= g->spacing * g->spacing;
  CHECK(std::abs(gp_interaction_action(st, dw) - direct) <= 1e-11 * std::abs(direct));
}

TEST_CASE("interaction GP rhs") {
  const NLSParams cubic{1.0, 3.0};
  SUBCASE("pure state against the NLS terms") {
    for (int dim : {1, 2}) {
      auto g = dim == 1 ? make_grid(1, 128, 25.6) : make_grid(2, 64, 16.0);
      const auto w = Weight::abs_smoothed(dim, 1.0);
      auto u = dim == 1 ? unit_gaussian(g, 1.0, {kq(g, 3)}, {0.4}, 0.25) : unit_gaussian(g, 1.0, {kq(g, 2), -kq(g, 1)}, {0.3, 0.0}, 0.25);
      const auto gp = gp_interaction_rhs(MixtureState({1.0}, {u}), GPWeight::displacement(w), 1.0);
      const auto nls = interaction_rhs_terms(u, w, cubic);
      const double s = nls.scale();
      CHECK(std::abs(gp.theta1 - nls.I) <= 1e-9 * s);
      CHECK(std::abs(gp.theta2 - nls.II) <= 1e-9 * s);
      CHECK(std::abs(gp.theta3 - nls.III) <= 1e-9 * s);
      CHECK(std::abs(gp.theta4 - nls.IV) <= 1e-9 * s);
      // raw terms through the mapping table
      CHECK(std::abs(gp.A1 - 2 * (nls.I + nls.III)) <= 1e-9 * s);
      CHECK(std::abs(gp.A2 - 2 * nls.IV) <= 1e-9 * s);
      CHECK(std::abs(gp.A3 - 2 * nls.II) <= 1e-9 * s);
      CHECK(std::abs(gp.A4) <= 1e-10 * s);
      CHECK(std::abs(gp.raw_rate() - nls.sum()) <= 1e-9 * s);
    }
  }
  SUBCASE("explicit tensors") {
    auto g = make_grid(1, 16, 8.0);
    const auto w = Weight::abs_smoothed(1, 1.0);
    for (double lambda : {1.0, -1.0}) {
      const auto st = rank3_1d(g);
      const auto ex = gp_interaction_rhs_explicit(st, w, lambda);
      const auto mx = gp_interaction_rhs(st, GPWeight::displacement(w), lambda);
      const double s = mx.raw_scale();
      CHECK(std::abs(ex.A1 - mx.A1) <= 1e-12 * s);
      CHECK(std::abs(ex.A2 - mx.A2) <= 1e-12 * s);
      CHECK(std::abs(ex.A3 - mx.A3) <= 1e-12 * s);
      CHECK(std::abs(ex.A4) <= 1e-10 * s);
      CHECK(std::abs(mx.A4) <= 1e-10 * s);
    }
    CHECK_THROWS_AS(gp_interaction_rhs_explicit(rank3_1d(make_grid(1, 32, 12.0)), w, 1.0), ContractError);
  }
  SUBCASE("A4 cancellation on mixtures") {
    auto g1 = make_grid(1, 128, 25.6);
    auto g2 = make_grid(2, 64, 16.0);
    for (double eps : {0.5, 1.0, 2.0}) {
      const auto a = gp_interaction_rhs(rank3_1d(g1), GPWeight::displacement(Weight::abs_smoothed(1, eps)), 1.0);
      CHECK(std::abs(a.A4) <= 1e-10 * (std::abs(a.A1) + std::abs(a.A2) + std::abs(a.A3)));
      const auto b = gp_interaction_rhs(rank3_2d(g2), GPWeight::displacement(Weight::abs_smoothed(2, eps)), -1.0);
      CHECK(std::abs(b.A4) <= 1e-10 * (std::abs(b.A1) + std::abs(b.A2) + std::abs(b.A3)));
    }
  }
  SUBCASE("closed form against raw terms on mixtures") {
    auto g = make_grid(2, 64, 16.0);
    const auto t = gp_interaction_rhs(rank3_2d(g), GPWeight::displacement(Weight::abs_smoothed(2, 1.0)), 1.0);
    CHECK(std::abs(t.A1 - 2 * (t.theta1 + t.theta3)) <= 1e-9 * t.raw_scale());
    CHECK(std::abs(t.A2 - 2 * t.theta4) <= 1e-9 * t.raw_scale());
    CHECK(std::abs(t.A3 - 2 * t.theta2) <= 1e-9 * t.raw_scale());
  }
  SUBCASE("affine in the weights") {
    auto g = make_grid(1, 128, 25.6);
    const auto st = rank3_1d(g);
    const auto dw = GPWeight::displacement(Weight::abs_smoothed(1, 1.0));
    const auto base = gp_interaction_rhs(st, dw, 1.0);
    auto doubled = st.weights;
    doubled[1] *= 2;
    const auto twice = gp_interaction_rhs(MixtureState(doubled, st.orbitals, false), dw, 1.0);
    const auto single = gp_interaction_rhs(MixtureState({st.weights[1]}, {st.orbitals[1]}, false), dw, 1.0);
    const double s = base.raw_scale();
    CHECK(std::abs(twice.A1 - base.A1 - single.A1) <= 1e-12 * s);
    CHECK(std::abs(twice.A2 - base.A2 - single.A2) <= 1e-12 * s);
    CHECK(std::abs(twice.A3 - base.A3 - single.A3) <= 1e-12 * s);
  }
}

namespace {

struct IdentityErrors {
  double one_particle = 0, interaction_theorem = 0, interaction_raw = 0;
};

IdentityErrors identity_errors(const MixtureState& st, const Weight& w, double lambda, double dt) {
  const auto tr = evolve_mixture(st, lambda, consecutive(dt, 2));
  const auto& now = tr.states[1];
  const GPMorawetzEvaluator ev(now.grid(), GPWeight::displacement(w));
  IdentityErrors e;
  const Vec3 c{0.1, -0.2, 0.0};
  const double fd1 = (gp_one_particle_action(tr.states[2], w, c) - gp_one_particle_action(tr.states[0], w, c)) / (2 * dt);
  const auto one = gp_one_particle_rhs(now, w, lambda, c);
  e.one_particle = std::abs(fd1 - one.total()) / one.scale();
  const double fd2 = (ev.action(tr.states[2]) - ev.action(tr.states[0])) / (2 * dt);
  const auto two = ev.rhs(now, lambda);
  e.interaction_theorem = std::abs(fd2 - two.theorem_rate()) / two.theorem_scale();
  e.interaction_raw = std::abs(fd2 - two.raw_rate()) / (0.5 * two.raw_scale());
  return e;
}

}  // namespace

TEST_CASE("GP Morawetz identities along evolved mixtures") {
  struct Case {
    std::string name;
    MixtureState state;
    int dim;
    double lambda;
  };
  auto g1 = make_grid(1, 128, 25.6);
  auto g2 = make_grid(2, 64, 16.0);
  const auto r3 = rank3_1d(g1);
  const auto r3b = rank3_2d(g2);
  std::vector<Case> cases{
      {"1D rank 1", MixtureState({1.0}, {r3.orbitals[0]}), 1, 1.0},
      {"1D rank 3", r3, 1, 1.0},
      {"1D rank 3 focusing", r3, 1, -1.0},
      {"2D rank 1", MixtureState({1.0}, {r3b.orbitals[0]}), 2, 1.0},
      {"2D rank 3", r3b, 2, 1.0},
  };
  for (const auto& c : cases) {
    const auto w = Weight::abs_smoothed(c.dim, 1.0);
    const auto e1 = identity_errors(c.state, w, c.lambda, 1e-3);
    MESSAGE(c.name << ": " << e1.one_particle << " " << e1.interaction_theorem << " " << e1.interaction_raw);
    CHECK(e1.one_particle <= 1e-4);
    CHECK(e1.interaction_theorem <= 1e-4);
    CHECK(e1.interaction_raw <= 1e-4);
    if (c.dim == 1) {
      const auto e2 = identity_errors(c.state, w, c.lambda, 2e-3);
      const double slope = std::log2(e2.interaction_theorem / e1.interaction_theorem);
      MESSAGE("  slope " << slope << " one-particle " << std::log2(e2.one_particle / e1.one_particle));
      CHECK(slope == doctest::Approx(2.0).epsilon(0.15));
      CHECK(std::log2(e2.one_particle / e1.one_particle) == doctest::Approx(2.0).epsilon(0.15));
    }
  }
}

TEST_CASE("reduction to the one-particle identity") {
  auto g1 = make_grid(1, 128, 25.6);
  auto g2 = make_grid(2, 64, 16.0);
  for (const auto& [st, dim] : {std::pair{rank3_1d(g1), 1}, std::pair{rank3_2d(g2), 2}}) {
    const auto w = Weight::abs_smoothed(dim, 1.0);
    const auto r = reduction_consistency(st, w, 1.0, {0.3, -0.2, 0.0});
    const double s = r.one_particle.scale();
    CHECK(r.max_theorem_delta() <= 1e-10 * s);
    CHECK(r.max_raw_delta() <= 1e-10 * s);
    CHECK(r.collapsed.theta4 == 0.0);
    CHECK(std::abs(r.collapsed.A2) <= 1e-14 * s);
    CHECK(std::abs(r.collapsed.A1 - 2 * (r.one_particle.T1_chain + r.one_particle.T3)) <= 1e-10 * s);
    CHECK(std::abs(r.collapsed.A3 - 2 * r.one_particle.T2) <= 1e-10 * s);
    // the x-only interaction action is the one-particle action
    const double a = gp_interaction_action(st, GPWeight::x_only(w, {0.3, -0.2, 0.0}));
    CHECK(std::abs(a - gp_one_particle_action(st, w, {0.3, -0.2, 0.0})) <= 1e-12 * std::abs(a));
  }
  const auto z = reduction_consistency(MixtureState(), Weight::abs_smoothed(1, 1.0), 1.0);
  CHECK(z.max_theorem_delta() == 0.0);
  CHECK(z.max_raw_delta() == 0.0);
}

TEST_CASE("term mapping table") {
  CHECK(kTermMapping[0].raw == "A1");
  CHECK(kTermMapping[3].factor == 0.0);
  double sum = 0;
  for (const auto& m : kTermMapping) sum += m.factor;
  CHECK(sum == 6.0);
}
