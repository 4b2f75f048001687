#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mlab/conservation.hpp"
#include "mlab/errors.hpp"
#include "mlab/gp.hpp"
#include "mlab/spectral.hpp"

using namespace mlab;

namespace {

ComplexField unit_gaussian(const GridPtr& g, double w, std::vector<double> v = {}, std::vector<double> c = {}) {
  InitialData d;
  d.width = w;
  d.velocity = std::move(v);
  d.center = std::move(c);
  ComplexField u = make_initial_data(d, g);
  u *= 1.0 / l2_norm(u);
  return u;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_abs(const std::vector<cplx>& a) {
  double m = 0;
  for (const auto& v : a) m = std::max(m, std::abs(v));
  return m;
}

MixtureState rank3(const GridPtr& g) {
  const double kq = 2 * std::numbers::pi / g->box_length;
  return MixtureState({0.5, 0.3, 0.2},
                      {unit_gaussian(g, 0.8, {0.0}, {-0.3}), unit_gaussian(g, 0.85, {2 * kq}, {0.3}),
                       unit_gaussian(g, 0.9, {-kq}, {0.0})});
}

SolverConfig consecutive(double dt, long steps) {
  SolverConfig c;
  c.dt = dt;
  c.steps = steps;
  c.observer_stride = 1;
  c.dealias = false;
  return c;
}

}  // namespace

TEST_CASE("mixture contracts") {
  auto g = make_grid(1, 32, 12.0);
  auto phi = unit_gaussian(g, 1.0);
  CHECK_NOTHROW(MixtureState({1.0}, {phi}));
  CHECK_THROWS_AS(MixtureState({0.6, 0.6}, {phi, phi}), ContractError);
  CHECK_THROWS_AS(MixtureState({-0.5, 1.5}, {phi, phi}), ContractError);
  CHECK_THROWS_AS(MixtureState({1.0}, {2.0 * phi}), ContractError);
  CHECK_THROWS_AS(marginal(MixtureState({1.0}, {phi}), 4), ContractError);
  auto big = make_grid(1, 128, 12.0);
  CHECK_THROWS_AS(marginal(MixtureState({1.0}, {unit_gaussian(big, 1.0)}), 3), ContractError);
  CHECK_THROWS_AS(marginal(MixtureState({1.0}, {unit_gaussian(make_grid(2, 16, 8.0), 1.0)}), 1), ContractError);
}

TEST_CASE("marginals") {
  auto g = make_grid(1, 32, 12.0);
  const double h = g->spacing;
  SUBCASE("single orbital") {
    auto phi = unit_gaussian(g, 1.0, {2 * std::numbers::pi / 12.0});
    const auto t = marginal(MixtureState({1.0}, {phi}), 1);
    CHECK(std::abs(t.trace() - 1.0) <= 1e-10);
    CHECK(std::abs(t.values[5 * 32 + 9] - phi[5] * std::conj(phi[9])) == 0.0);
  }
  SUBCASE("two orthogonal orbitals") {
    auto a = unit_gaussian(g, 1.0);
    ComplexField b(g);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = g->coordinate(i) * a[i];
    b *= 1.0 / l2_norm(b);
    CHECK(std::abs(inner(a, b)) < 1e-14);
    const auto t = marginal(MixtureState({0.5, 0.5}, {a, b}), 1);
    CHECK(std::abs(t.trace() - 1.0) <= 1e-10);
    // Gamma^2 = Gamma / 2 with trace 1: spectrum {1/2, 1/2, 0, ...}
    const std::size_t n = 32;
    double worst = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        cplx s{};
        for (std::size_t l = 0; l < n; ++l) s += t.values[i * n + l] * t.values[l * n + j] * h;
        worst = std::max(worst, std::abs(s - 0.5 * t.values[i * n + j]));
      }
    CHECK(worst <= 1e-12 * max_abs(t.values));
  }
  SUBCASE("hermiticity and bosonic symmetry") {
    const auto st = rank3(g);
    for (int k = 1; k <= 2; ++k) {
      const auto t = marginal(st, k);
      CHECK(t.hermiticity_residual() <= 1e-14);
      CHECK(t.symmetry_residual() <= 1e-15);
    }
  }
}

TEST_CASE("admissibility") {
  auto g = make_grid(1, 16, 10.0);
  const auto st = rank3(g);
  const auto g1 = marginal(st, 1), g2 = marginal(st, 2), g3 = marginal(st, 3);
  CHECK(max_diff(partial_trace(g2).values, g1.values) <= 1e-12);
  CHECK(max_diff(partial_trace(g3).values, g2.values) <= 1e-12);
  CHECK(std::abs(g2.trace() - g1.trace()) <= 1e-12);
  CHECK(std::abs(g3.trace() - g2.trace()) <= 1e-12);

  // negative control: a perturbation with unit-norm delta in the traced slot
  auto bad = g2;
  const double delta = 1e-4;
  for (std::size_t x = 0; x < 16; ++x) bad.values[(x * 16 + 3) * 256 + (x * 16 + 3)] += delta / g->spacing;
  double mismatch = 0;
  const auto pt = partial_trace(bad);
  for (std::size_t i = 0; i < pt.values.size(); ++i) mismatch = std::max(mismatch, std::abs(pt.values[i] - g1.values[i]));
  CHECK(mismatch > 1e-6);
  CHECK(mismatch == doctest::Approx(delta).epsilon(1e-6));
}

TEST_CASE("contraction operators") {
  auto g = make_grid(1, 16, 10.0);
  SUBCASE("single orbital closed form") {
    auto phi = unit_gaussian(g, 1.0, {2 * std::numbers::pi / 10.0});
    const MixtureState st({1.0}, {phi});
    const auto bp = contract_B(st, 1, 1, +1);
    const auto bm = contract_B(st, 1, 1, -1);
    for (std::size_t x = 0; x < 16; ++x)
      for (std::size_t y = 0; y < 16; ++y) {
        const cplx base = phi[x] * std::conj(phi[y]);
        CHECK(std::abs(bp.values[x * 16 + y] - std::norm(phi[x]) * base) <= 1e-15);
        CHECK(std::abs(bm.values[x * 16 + y] - std::norm(phi[y]) * base) <= 1e-15);
      }
    CHECK_THROWS_AS(contract_B(st, 1, 2, +1), ContractError);
  }
  SUBCASE("mixture path against the explicit tensor") {
    const auto st = rank3(g);
    for (int k = 1; k <= 2; ++k) {
      const auto big = marginal(st, k + 1);
      for (int j = 1; j <= k; ++j)
        for (int s : {+1, -1}) {
          const auto a = contract_B(st, k, j, s);
          const auto b = contract_B(big, j, s);
          CHECK(max_diff(a.values, b.values) <= 1e-12 * max_abs(b.values));
        }
      // B- gamma is the hermitean adjoint of B+ gamma, so B+ - B- is anti-hermitean
      const std::size_t half = k == 1 ? 16 : 256;
      const auto bp = contract_B(st, k, 1, +1), bm = contract_B(st, k, 1, -1);
      double adj = 0, anti = 0, diag = 0;
      for (std::size_t x = 0; x < half; ++x)
        for (std::size_t y = 0; y < half; ++y) {
          adj = std::max(adj, std::abs(bm.values[x * half + y] - std::conj(bp.values[y * half + x])));
          const cplx d1 = bp.values[x * half + y] - bm.values[x * half + y];
          const cplx d2 = bp.values[y * half + x] - bm.values[y * half + x];
          anti = std::max(anti, std::abs(d1 + std::conj(d2)));
        }
      for (std::size_t x = 0; x < half; ++x) diag = std::max(diag, std::abs(bp.values[x * half + x] - bm.values[x * half + x]));
      CHECK(adj <= 1e-12 * max_abs(bp.values));
      CHECK(anti <= 1e-12 * max_abs(bp.values));
      if (k == 1) CHECK(diag <= 1e-15 * max_abs(bp.values));
    }
  }
}

TEST_CASE("hierarchy residual") {
  SUBCASE("exact soliton samples, k = 1") {
    auto g = make_grid(1, 128, 32.0);
    const double dt = 1e-3;
    auto at = [&](double t) {
      auto u = soliton_exact(g, 1.0, 0.0, 0.0, t);
      u *= 1.0 / l2_norm(u);  // |u| is time independent
      return MixtureState({1.0}, {u});
    };
    // a unit-mass soliton solves the cubic equation with coupling -4
    const double r = hierarchy_residual(at(-dt), at(0), at(dt), 1, dt, -4.0);
    MESSAGE("soliton residual " << r);
    CHECK(r <= 1e-4);
    CHECK(hierarchy_residual(at(-dt), at(0), at(dt), 1, dt, 4.0) > 1.0);
  }
  SUBCASE("convergence along evolved mixtures") {
    auto g = make_grid(1, 32, 14.0);
    const auto st = rank3(g);
    for (int k = 1; k <= 2; ++k) {
      std::vector<double> r;
      for (double dt : {2e-3, 1e-3}) {
        const auto tr = evolve_mixture(st, 1.0, consecutive(dt, 2));
        r.push_back(hierarchy_residual(tr.states[0], tr.states[1], tr.states[2], k, dt, 1.0));
      }
      MESSAGE("k=" << k << " ratio " << r[0] / r[1] << " residual " << r[1]);
      CHECK(r[0] / r[1] == doctest::Approx(4.0).epsilon(0.3 / 4));
      const auto tr = evolve_mixture(st, 1.0, consecutive(1e-3, 2));
      const double wrong = hierarchy_residual(tr.states[0], tr.states[1], tr.states[2], k, 1e-3, -1.0);
      CHECK(wrong > 1e3 * r[1]);

      // triangle inequality across the mixture terms
      double bound = 0;
      for (std::size_t m = 0; m < 3; ++m) {
        auto pick = [&](const MixtureState& s) { return MixtureState({1.0}, {s.orbitals[m]}); };
        bound += st.weights[m] * hierarchy_residual(pick(tr.states[0]), pick(tr.states[1]), pick(tr.states[2]), k, 1e-3, 1.0);
      }
      CHECK(hierarchy_residual(tr.states[0], tr.states[1], tr.states[2], k, 1e-3, 1.0) <= bound + 1e-12);
    }
  }
}

TEST_CASE("norms") {
  auto g = make_grid(1, 16, 10.0);
  auto phi = unit_gaussian(g, 1.0, {2 * std::numbers::pi / 10.0});
  const MixtureState pure({1.0}, {phi});
  CHECK(h_alpha_norm(marginal(pure, 1), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  for (double alpha : {0.5, 1.0, 2.0}) {
    const double orb = std::pow(l2_norm(bessel_potential(phi, alpha)), 2);
    for (int k = 1; k <= 2; ++k) {
      CHECK(std::abs(h_alpha_norm(marginal(pure, k), alpha) - std::pow(orb, k)) <= 1e-10 * std::pow(orb, k));
      CHECK(std::abs(h_alpha_norm(pure, k, alpha) - std::pow(orb, k)) <= 1e-10 * std::pow(orb, k));
    }
  }
  const auto st = rank3(g);
  for (double alpha : {0.0, 1.0})
    for (int k = 1; k <= 2; ++k) {
      const double a = h_alpha_norm(marginal(st, k), alpha), b = h_alpha_norm(st, k, alpha);
      CHECK(std::abs(a - b) <= 1e-10 * b);
    }
  ComplexField z(g);
  MarginalTensor zero(1, g);
  CHECK(h_alpha_norm(zero, 1.0) == 0.0);

  const auto hx = h_xi_norm(pure, 10, 0.5, 0.0);
  double oracle = 0;
  for (int k = 1; k <= 10; ++k) oracle += std::pow(0.5, k);
  CHECK(std::abs(hx.partial - oracle) <= 1e-12);
  CHECK(oracle == doctest::Approx(0.999023).epsilon(1e-6));
  CHECK(hx.tail_bound == doctest::Approx(9.765625e-4).epsilon(1e-9));
  CHECK(!hx.divergent);
  const double c = std::pow(l2_norm(bessel_potential(phi, 1.0)), 2);
  CHECK(h_xi_norm(pure, 5, 1.0 / c, 1.0).divergent);
  CHECK(!h_xi_norm(pure, 5, 0.99 / c, 1.0).divergent);
  CHECK(h_xi_norm(MixtureState(), 5, 0.5, 0.0).partial == 0.0);
}

TEST_CASE("GP density and momentum") {
  auto g = make_grid(1, 64, 16.0);
  const double v = 2 * 2 * std::numbers::pi / 16.0;
  auto real_orb = unit_gaussian(g, 1.0);
  CHECK(gp_density_and_momentum(MixtureState({1.0}, {real_orb})).P[0].max_abs() <= 1e-15);

  auto phi = unit_gaussian(g, 1.0, {v}, {0.5});
  const MixtureState pure({1.0}, {phi});
  const auto mix = gp_density_and_momentum(pure);
  const auto ten = gp_density_and_momentum(marginal(pure, 1));
  const auto nls = density_fields(phi, false);
  double dr = 0, dp = 0, dt = 0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    dr = std::max(dr, std::abs(mix.rho[i] - nls.rho[i]));
    dp = std::max(dp, std::abs(mix.P[0][i] - nls.p[0][i]));
    dt = std::max(dt, std::abs(mix.P[0][i] - ten.P[0][i]) + std::abs(mix.rho[i] - ten.rho[i]));
  }
  CHECK(dr <= 1e-12);
  CHECK(dp <= 1e-12);
  CHECK(dt <= 1e-12);

  const MixtureState pm({0.5, 0.5}, {unit_gaussian(g, 1.0, {v}), unit_gaussian(g, 1.0, {-v})});
  CHECK(std::abs(integrate(gp_density_and_momentum(pm).P[0])) <= 1e-13);
}

TEST_CASE("GP continuity") {
  auto g = make_grid(1, 64, 14.0);
  const auto st = rank3(g);
  std::vector<double> kin;
  for (double dt : {4e-3, 2e-3, 1e-3}) {
    const auto tr = evolve_mixture(st, 1.0, consecutive(dt, 2));
    const auto c = gp_continuity_check(tr.states[0], tr.states[1], tr.states[2], dt, 1.0);
    CHECK(c.interaction_contribution <= 1e-13 * c.scale);
    kin.push_back(c.kinetic_residual);
    MESSAGE("dt " << dt << " kinetic " << c.kinetic_residual << " scale " << c.scale);
  }
  CHECK(std::log2(kin[0] / kin[2]) / 2 == doctest::Approx(2.0).epsilon(0.05));

  auto g2 = make_grid(2, 64, 14.0);
  const MixtureState st2({0.5, 0.5}, {unit_gaussian(g2, 1.0, {0.5, 0.0}), unit_gaussian(g2, 0.9, {0.0, -0.5})});
  const auto tr2 = evolve_mixture(st2, -1.0, consecutive(1e-3, 2));
  const auto c2 = gp_continuity_check(tr2.states[0], tr2.states[1], tr2.states[2], 1e-3, -1.0);
  CHECK(c2.interaction_contribution <= 1e-13 * c2.scale);

  const MixtureState zero;
  const auto cz = gp_continuity_check(zero, zero, zero, 1e-3, 1.0);
  CHECK(cz.kinetic_residual == 0.0);
  CHECK(cz.interaction_contribution == 0.0);
}
