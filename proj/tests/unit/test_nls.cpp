#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mlab/errors.hpp"
#include "mlab/nls.hpp"
#include "mlab/spectral.hpp"

using namespace mlab;

namespace {

double mass_of(const ComplexField& u) { return std::pow(l2_norm(u), 2); }

double max_diff(const ComplexField& a, const ComplexField& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

ComplexField gaussian(const GridPtr& g, double A, double w, std::vector<double> v = {}) {
  InitialData d;
  d.amplitude = A;
  d.width = w;
  d.velocity = std::move(v);
  return make_initial_data(d, g);
}

ComplexField soliton(const GridPtr& g, double eta = 1.0) {
  InitialData d;
  d.kind = InitialData::Kind::soliton_1d_cubic;
  d.eta = eta;
  return make_initial_data(d, g);
}

ComplexField final_state(const ComplexField& u0, const NLSParams& p, double dt, long steps, Method m) {
  SolverConfig cfg;
  cfg.dt = dt;
  cfg.steps = steps;
  cfg.method = m;
  cfg.observer_stride = steps;
  cfg.check_decay = false;
  return evolve(u0, p, cfg).trajectory.snapshots.back();
}

}  // namespace

TEST_CASE("free eigenmode has the right sign") {
  auto g = make_grid(1, 32, 2 * std::numbers::pi);
  const double k = 3.0;
  ComplexField u(g);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::polar(1.0, k * g->coordinate(i));
  const double dt = 0.01;
  const NLSParams free{0.0, 3.0};
  auto s = step_strang(u, free, dt);
  auto r = step_rk4_spectral(u, free, dt);
  CHECK(max_diff(s, std::polar(1.0, -k * k * dt) * u) < 1e-13);
  CHECK(max_diff(r, s) < std::pow(k * k * dt, 5));
  CHECK(step_strang(ComplexField(g), {1.0, 3.0}, dt).max_abs() == 0.0);
  CHECK(step_rk4_spectral(ComplexField(g), {1.0, 3.0}, dt).max_abs() == 0.0);
}

TEST_CASE("initial data masses") {
  auto g = make_grid(1, 256, 40.0);
  CHECK(std::abs(mass_of(gaussian(g, 1, 1)) - 1.77245385) < 1e-8);
  CHECK(std::abs(mass_of(soliton(g)) - 4.0) < 1e-8);

  InitialData r;
  r.kind = InitialData::Kind::random_h1;
  r.seed = 42;
  r.mass = 2.0;
  r.envelope_width = 2.0;
  r.max_wavenumber = 2.0;
  auto a = make_initial_data(r, g);
  auto b = make_initial_data(r, g);
  CHECK(a.values == b.values);
  CHECK(mass_of(a) == doctest::Approx(2.0).epsilon(1e-12));
  r.seed = 43;
  CHECK(make_initial_data(r, g).values != a.values);

  auto g2 = make_grid(2, 16, 10.0);
  InitialData s;
  s.kind = InitialData::Kind::soliton_1d_cubic;
  CHECK_THROWS_AS(make_initial_data(s, g2), ContractError);
  InitialData c;
  c.center = {0.0};
  CHECK_THROWS_AS(make_initial_data(c, g2), ContractError);
}

TEST_CASE("strang preserves mass per step") {
  auto g = make_grid(1, 256, 40.0);
  auto u = dealias(gaussian(g, 1.3, 1.0, {0.7}));
  const double m0 = mass_of(u);
  for (int s = 0; s < 20; ++s) {
    u = step_strang(u, {1.0, 3.0}, 1e-3);
    CHECK(std::abs(mass_of(u) - m0) <= 1e-12 * m0);
  }
}

TEST_CASE("soliton accuracy and order") {
  auto g = make_grid(1, 256, 40.0);
  const NLSParams foc{-1.0, 3.0};
  auto u0 = soliton(g);
  auto exact = soliton_exact(g, 1.0, 0.0, 0.0, 1.0);
  auto u = final_state(u0, foc, 1e-3, 1000, Method::strang);
  CHECK(max_diff(u, exact) <= 1e-6);

  std::vector<double> errs;
  for (double dt : {4e-3, 2e-3, 1e-3}) {
    auto v = final_state(u0, foc, dt, std::lround(1.0 / dt), Method::strang);
    errs.push_back(l2_norm(v - exact));
  }
  const double slope = std::log2(errs[0] / errs[2]) / 2.0;
  CHECK(slope == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("strang vs rk4") {
  auto g = make_grid(1, 256, 40.0);
  const NLSParams def{1.0, 3.0};
  auto u0 = dealias(gaussian(g, 1.0, 1.0, {0.5}));
  auto s1 = step_strang(u0, def, 1e-3);
  auto r1 = step_rk4_spectral(u0, def, 1e-3);
  CHECK(max_diff(s1, r1) <= 1e-8);

  auto s = final_state(u0, def, 1e-3, 1000, Method::strang);
  auto r = final_state(u0, def, 1e-3, 1000, Method::rk4_spectral);
  CHECK(l2_norm(s - r) <= 1e-6);
}

TEST_CASE("gauge covariance") {
  auto g = make_grid(1, 128, 30.0);
  const NLSParams def{1.0, 3.0};
  auto u0 = dealias(gaussian(g, 1.0, 1.5, {0.3}));
  const cplx phase = std::polar(1.0, 0.7);
  auto a = final_state(phase * u0, def, 1e-3, 50, Method::strang);
  auto b = phase * final_state(u0, def, 1e-3, 50, Method::strang);
  CHECK(max_diff(a, b) <= 1e-14 * a.max_abs() * 10);
}

TEST_CASE("residual probe") {
  auto g = make_grid(1, 256, 40.0);
  const NLSParams foc{-1.0, 3.0};
  // boosts must put the carrier v/2 on the wavenumber lattice to stay periodic
  for (double v : {0.0, 4.0 * 2.0 * std::numbers::pi / 40.0}) {
    auto res = [&](double dt) {
      return nls_residual(soliton_exact(g, 1.0, 0.0, v, 0.3 - dt), soliton_exact(g, 1.0, 0.0, v, 0.3),
                          soliton_exact(g, 1.0, 0.0, v, 0.3 + dt), foc, dt);
    };
    CHECK(res(1e-3) <= 1e-5);
    CHECK(res(2e-3) / res(1e-3) == doctest::Approx(4.0).epsilon(0.3 / 4.0));
  }
  ComplexField z(g);
  CHECK(nls_residual(z, z, z, foc, 1e-3) == 0.0);
}

TEST_CASE("non-integer p and guards") {
  auto g = make_grid(1, 128, 30.0);
  auto u0 = gaussian(g, 1.0, 1.5);
  u0[0] = 0.0;
  auto u = step_strang(u0, {1.0, 2.5}, 1e-3);
  for (const auto& v : u.values) CHECK(std::isfinite(std::abs(v)));
  CHECK_THROWS_AS(NLSParams({1.0, 0.5}).validate(), ContractError);

  SolverConfig cfg;
  cfg.steps = 10;
  cfg.observer_stride = 3;
  CHECK_THROWS_AS(cfg.validate(), ContractError);

  auto g2 = make_grid(1, 64, 6.0);
  auto wide = gaussian(g2, 1.0, 2.0);
  cfg.observer_stride = 1;
  CHECK_THROWS_AS(evolve(wide, {1.0, 3.0}, cfg), ContractError);

  ComplexField bad(g2);
  for (auto& v : bad.values) v = 0.0;
  bad[32] = 1.0;
  cfg.check_decay = false;
  cfg.blowup_factor = 1e-3;
  CHECK_THROWS_AS(evolve(bad, {1.0, 3.0}, cfg), NumericalAbort);
}
