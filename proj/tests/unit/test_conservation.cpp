#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mlab/conservation.hpp"
#include "mlab/errors.hpp"
#include "mlab/spectral.hpp"

using namespace mlab;

namespace {

ComplexField gaussian(const GridPtr& g, double A, double w, std::vector<double> v = {}) {
  InitialData d;
  d.amplitude = A;
  d.width = w;
  d.velocity = std::move(v);
  return make_initial_data(d, g);
}

// carrier on the wavenumber lattice so the boosted soliton stays periodic
constexpr double kBoost = 4.0 * 2.0 * std::numbers::pi / 40.0;

}  // namespace

TEST_CASE("global functionals") {
  auto g = make_grid(1, 256, 40.0);
  ComplexField zero(g);
  CHECK(mass(zero) == 0.0);
  CHECK(energy(zero, {1.0, 3.0}) == 0.0);
  CHECK(momentum(zero)[0] == 0.0);

  auto u = gaussian(g, 1.0, 1.0);
  CHECK(std::abs(mass(u) - 1.77245385) < 1e-8);
  const double e_exact = std::sqrt(std::numbers::pi) / 4 + std::sqrt(std::numbers::pi / 2) / 4;
  CHECK(std::abs(energy(u, {1.0, 3.0}) - e_exact) < 1e-10);
  CHECK(std::abs(energy(u, {1.0, 3.0}) - 0.756442) < 1e-5);

  InitialData s;
  s.kind = InitialData::Kind::soliton_1d_cubic;
  CHECK(std::abs(mass(make_initial_data(s, g)) - 4.0) < 1e-8);

  CHECK(std::abs(momentum(u)[0]) < 1e-15);
  auto boosted = gaussian(g, 1.0, 1.0, {0.8});
  CHECK(std::abs(momentum(boosted)[0] - 0.8 * mass(boosted)) < 1e-8);

  auto gp = make_grid(1, 64, 2 * std::numbers::pi);
  ComplexField mode(gp);
  for (std::size_t i = 0; i < mode.size(); ++i) mode[i] = std::polar(1.0, 3.0 * gp->coordinate(i));
  CHECK(energy(mode, {0.0, 3.0}) == doctest::Approx(0.5 * 9.0 * 2 * std::numbers::pi).epsilon(1e-13));
}

TEST_CASE("2D momentum of a boosted gaussian") {
  auto g = make_grid(2, 64, 24.0);
  auto u = gaussian(g, 1.0, 1.5, {0.5, -0.25});
  const auto p = momentum(u);
  CHECK(std::abs(p[0] - 0.5 * mass(u)) < 1e-8);
  CHECK(std::abs(p[1] + 0.25 * mass(u)) < 1e-8);
}

TEST_CASE("density field invariants") {
  auto g = make_grid(2, 32, 16.0);
  InitialData r;
  r.kind = InitialData::Kind::random_h1;
  r.seed = 5;
  r.envelope_width = 2.0;
  r.max_wavenumber = 1.0;
  auto u = make_initial_data(r, g);
  const auto d = density_fields(u, false);
  double smax = 0;
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) smax = std::max(smax, d.stress(j, k).max_abs());
  for (std::size_t i = 0; i < u.size(); ++i) {
    CHECK(d.rho[i].real() >= -1e-14);
    CHECK(std::abs(d.stress(0, 1)[i] - d.stress(1, 0)[i]) <= 1e-12 * smax);
    const double p2 = std::norm(d.p[0][i]) + std::norm(d.p[1][i]);
    const double trace = d.stress(0, 0)[i].real() + d.stress(1, 1)[i].real();
    CHECK(p2 <= d.rho[i].real() * trace / 2 + 1e-10);
  }
  const VectorField grad = gradient(u);
  const double gsq = std::pow(l2_norm(grad[0]), 2) + std::pow(l2_norm(grad[1]), 2);
  const double trace_int = integrate(d.stress(0, 0)).real() + integrate(d.stress(1, 1)).real();
  CHECK(std::abs(trace_int - 2 * gsq) <= 1e-12 * 2 * gsq);
}

TEST_CASE("local laws on a free mode and zero") {
  auto g = make_grid(1, 64, 2 * std::numbers::pi);
  const double k = 2.0, dt = 1e-3;
  auto mode = [&](double t) {
    ComplexField u(g);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::polar(1.0, k * g->coordinate(i) - k * k * t);
    return u;
  };
  CHECK(continuity_residual(mode(-dt), mode(dt), mode(0), dt) <= 1e-12);
  // the time difference divides rounding noise by dt, so measure against the stress scale
  const double stress_scale = l2_norm(density_fields(mode(0)).stress(0, 0));
  CHECK(momentum_residual(mode(-dt), mode(dt), mode(0), dt, {0.0, 3.0}) <= 1e-12 * stress_scale);
  ComplexField z(g);
  CHECK(continuity_residual(z, z, z, dt) == 0.0);
  CHECK(momentum_residual(z, z, z, dt, {1.0, 3.0}) == 0.0);
}

TEST_CASE("local laws along the exact soliton converge at order two") {
  auto g = make_grid(1, 256, 40.0);
  const NLSParams foc{-1.0, 3.0};
  auto at = [&](double t) { return soliton_exact(g, 1.0, 0.0, kBoost, t); };
  std::vector<double> rc, rm;
  for (double dt : {4e-3, 2e-3, 1e-3}) {
    rc.push_back(continuity_residual(at(0.3 - dt), at(0.3 + dt), at(0.3), dt));
    rm.push_back(momentum_residual(at(0.3 - dt), at(0.3 + dt), at(0.3), dt, foc));
  }
  CHECK(rc[2] <= 1e-5);
  CHECK(rm[2] <= 1e-5);
  CHECK(std::log2(rc[0] / rc[2]) / 2 == doctest::Approx(2.0).epsilon(0.05));
  CHECK(std::log2(rm[0] / rm[2]) / 2 == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("divergence integrates to the mass derivative") {
  auto g = make_grid(1, 256, 40.0);
  auto u = soliton_exact(g, 1.0, 0.0, kBoost, 0.0);
  const auto d = density_fields(u);
  CHECK(std::abs(integrate(divergence(d.p))) <= 1e-12);
}

TEST_CASE("global conservation over 1000 strang steps") {
  auto g = make_grid(1, 256, 40.0);
  const NLSParams def{1.0, 3.0};
  SolverConfig cfg;
  cfg.steps = 1000;
  cfg.observer_stride = 100;
  cfg.keep_snapshots = true;
  auto u0 = gaussian(g, 1.0, 2.0, {0.0});
  const auto res = evolve(u0, def, cfg);
  const auto& first = res.trajectory.snapshots.front();
  const double m0 = mass(first), e0 = energy(first, def), p0 = momentum(first)[0];
  for (const auto& s : res.trajectory.snapshots) {
    CHECK(std::abs(mass(s) - m0) <= 1e-8 * m0);
    CHECK(std::abs(momentum(s)[0] - p0) <= 1e-10);
    CHECK(std::abs(energy(s, def) - e0) <= 1e-6 * e0);
  }
}
