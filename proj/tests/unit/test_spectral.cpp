#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mlab/errors.hpp"
#include "mlab/spectral.hpp"

using namespace mlab;

namespace {

ComplexField random_field(const GridPtr& g, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  ComplexField f(g);
  for (auto& v : f.values) v = {n01(rng), n01(rng)};
  return f;
}

ComplexField from_fn(const GridPtr& g, const std::function<cplx(const Vec3&)>& fn) {
  ComplexField f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = fn(g->position(i));
  return f;
}

double max_diff(const ComplexField& a, const ComplexField& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

ComplexField remove_mean(ComplexField f) {
  cplx mean{};
  for (const auto& v : f.values) mean += v;
  mean /= static_cast<double>(f.size());
  for (auto& v : f.values) v -= mean;
  return f;
}

}  // namespace

TEST_CASE("make_grid") {
  auto g = make_grid(1, 16, 2 * std::numbers::pi);
  CHECK(g->spacing == doctest::Approx(2 * std::numbers::pi / 16));
  CHECK(g->wavenumbers[1] == doctest::Approx(1.0));
  CHECK(g->wavenumbers[8] == doctest::Approx(-8.0));
  CHECK(g->wavenumbers[15] == doctest::Approx(-1.0));

  auto g2 = make_grid(2, 32, 40.0);
  CHECK(g2->size() == 1024);
  CHECK(g2->spacing == doctest::Approx(1.25));

  CHECK_THROWS_AS(make_grid(1, 12, 10.0), ContractError);
  CHECK_THROWS_AS(make_grid(4, 16, 10.0), ContractError);
  CHECK_THROWS_AS(make_grid(0, 16, 10.0), ContractError);
  CHECK_THROWS_AS(make_grid(1, 16, -1.0), ContractError);
  CHECK_THROWS_AS(make_grid(1, 4, 1.0), ContractError);
}

TEST_CASE("transform basics") {
  auto g = make_grid(1, 32, 10.0);
  ComplexField one(g);
  for (auto& v : one.values) v = 1.0;
  auto hat = transform(one, Direction::forward);
  CHECK(hat.space == Space::frequency);
  CHECK(std::abs(hat[0] - cplx(32.0)) < 1e-12);
  for (std::size_t i = 1; i < hat.size(); ++i) CHECK(std::abs(hat[i]) < 1e-12);

  const double k = 2 * std::numbers::pi / g->box_length;
  auto mode = from_fn(g, [k](const Vec3& x) { return std::polar(1.0, k * x[0]); });
  auto mh = transform(mode, Direction::forward);
  for (std::size_t i = 0; i < mh.size(); ++i) {
    if (i == 1)
      CHECK(std::abs(mh[i]) == doctest::Approx(32.0));
    else
      CHECK(std::abs(mh[i]) < 1e-11);
  }

  CHECK_THROWS_AS(transform(hat, Direction::forward), ContractError);
  CHECK_THROWS_AS(transform(one, Direction::inverse), ContractError);
}

TEST_CASE("round trip and Parseval on random fields") {
  std::mt19937_64 rng(7);
  for (int dim = 1; dim <= 3; ++dim) {
    auto g = make_grid(dim, dim == 3 ? 8 : 16, 5.0);
    const int reps = dim == 1 ? 1000 : 50;
    for (int r = 0; r < reps; ++r) {
      auto f = random_field(g, rng);
      auto hat = transform(f, Direction::forward);
      auto back = transform(hat, Direction::inverse);
      CHECK(max_diff(back, f) <= 1e-13 * f.max_abs() * 10);
      const double pos = integrate(pointwise(real_part(f), real_part(f))).real() +
                         [&] {
                           double s = 0;
                           for (const auto& v : f.values) s += v.imag() * v.imag();
                           return s * g->cell_volume();
                         }();
      CHECK(std::abs(pos - spectral_norm_sq(hat)) <= 1e-12 * pos);
    }
  }
}

TEST_CASE("multipliers") {
  auto g = make_grid(1, 64, 2 * std::numbers::pi * 3);
  const double base = 2 * std::numbers::pi / g->box_length;

  SUBCASE("D^2 on a pure mode") {
    const double kk = 5 * base;
    auto f = from_fn(g, [kk](const Vec3& x) { return std::polar(1.0, kk * x[0]); });
    auto d2 = fractional_derivative(f, 2.0);
    CHECK(max_diff(d2, kk * kk * f) < 1e-11);
  }
  SUBCASE("Laplacian kills constants") {
    ComplexField c(g);
    for (auto& v : c.values) v = 3.0;
    CHECK(laplacian(c).max_abs() < 1e-12);
  }
  SUBCASE("D^1/2 on sin") {
    auto f = from_fn(g, [base](const Vec3& x) { return cplx(std::sin(base * x[0])); });
    auto d = fractional_derivative(f, 0.5);
    CHECK(max_diff(d, std::sqrt(base) * f) < 1e-12);
  }
  SUBCASE("alpha = 0 is the identity, alpha = 2 is -lap on mean-zero fields") {
    std::mt19937_64 rng(3);
    auto f = remove_mean(random_field(g, rng));
    CHECK(max_diff(fractional_derivative(f, 0.0), f) == 0.0);
    auto lap = laplacian(f);
    auto d2 = fractional_derivative(f, 2.0);
    CHECK(max_diff(d2, cplx(-1.0) * lap) <= 1e-12 * lap.max_abs());
    auto back = fractional_derivative(fractional_derivative(f, -1.0), 1.0);
    CHECK(max_diff(back, f) <= 1e-10 * f.max_abs());
  }
  SUBCASE("composition") {
    std::mt19937_64 rng(4);
    auto f = random_field(g, rng);
    Symbol s1 = [](const Vec3& xi) { return cplx(1.0 + xi[0] * xi[0], 0.0); };
    Symbol s2 = [](const Vec3& xi) { return cplx(0.0, xi[0]); };
    auto a = apply_multiplier(apply_multiplier(f, s1), s2);
    auto b = apply_multiplier(f, [&](const Vec3& xi) { return s1(xi) * s2(xi); });
    CHECK(max_diff(a, b) <= 1e-12 * b.max_abs());
  }
  SUBCASE("real even stays real even") {
    auto f = from_fn(g, [](const Vec3& x) { return cplx(std::exp(-x[0] * x[0]) + 0.3 * std::cos(x[0])); });
    auto d = fractional_derivative(f, 0.7);
    CHECK(d.max_abs_imag() <= 1e-12 * d.max_abs());
    const std::size_t n = g->points_per_axis;
    for (std::size_t i = 1; i < n / 2; ++i) CHECK(std::abs(d[n / 2 + i] - d[n / 2 - i]) <= 1e-12 * d.max_abs());
  }
  SUBCASE("non-finite symbol is rejected") {
    ComplexField f(g);
    CHECK_THROWS_AS(apply_multiplier(f, [](const Vec3& xi) { return cplx(1.0 / std::abs(xi[0]), 0.0); }),
                    ContractError);
    CHECK_THROWS_AS(fractional_derivative(f, 3.5), ContractError);
  }
}

TEST_CASE("derivatives keep real fields real") {
  auto g = make_grid(2, 16, 8.0);
  std::mt19937_64 rng(11);
  auto f = real_part(random_field(g, rng));
  auto grad = gradient(f);
  for (int a = 0; a < 2; ++a) CHECK(grad[a].max_abs_imag() <= 1e-13 * grad[a].max_abs());
}

TEST_CASE("integrate") {
  auto g = make_grid(1, 64, 7.0);
  ComplexField c(g);
  for (auto& v : c.values) v = 2.5;
  CHECK(integrate(c).real() == doctest::Approx(2.5 * 7.0).epsilon(1e-14));
  auto s = from_fn(g, [](const Vec3& x) { return cplx(std::sin(2 * std::numbers::pi * x[0] / 7.0)); });
  CHECK(std::abs(integrate(s)) < 1e-13);

  auto g2 = make_grid(1, 256, 40.0);
  auto gauss = from_fn(g2, [](const Vec3& x) { return cplx(std::exp(-x[0] * x[0])); });
  CHECK(std::abs(integrate(gauss).real() - 1.77245385) < 1e-8);
  CHECK(std::abs(integrate(gauss).real() - std::sqrt(std::numbers::pi)) < 1e-13);
}

TEST_CASE("dealias") {
  auto g = make_grid(1, 16, 16.0);
  CHECK(dealias_keeps(*g, 5));   // 3*5 = 15 < 16
  CHECK(!dealias_keeps(*g, 6));  // 18 >= 16
  CHECK(dealias_keeps(*g, 11));  // mode -5
  CHECK(!dealias_keeps(*g, 10)); // mode -6
}

TEST_CASE("kernel tabulation keeps parity") {
  auto g = make_grid(1, 16, 8.0);
  auto table = tabulate_kernel(g, [](const Vec3& d) { return d[0]; });
  CHECK(table[8].real() == 0.0);  // Nyquist offset averaged over +-L/2
  for (std::size_t i = 1; i < 16; ++i) CHECK(table[i].real() == doctest::Approx(-table[16 - i].real()));
}

namespace {

ComplexField riesz_direct(const ComplexField& rho, double eps) {
  const Grid& g = *rho.grid;
  ComplexField out(rho.grid);
  for (std::size_t i = 0; i < rho.size(); ++i) {
    double s = 0;
    const Vec3 x = g.position(i);
    for (std::size_t j = 0; j < rho.size(); ++j) {
      const Vec3 d = displacement(x, g.position(j), g);
      const double kval = symmetrized_eval(
          [eps](const Vec3& e) { return 1.0 / std::sqrt(e[0] * e[0] + e[1] * e[1] + e[2] * e[2] + eps * eps); }, d, g);
      s += kval * rho[j].real();
    }
    out[i] = s * g.cell_volume();
  }
  return out;
}

}  // namespace

TEST_CASE("riesz potential") {
  CHECK_THROWS_AS(riesz_potential(ComplexField(make_grid(1, 16, 4.0)), 0.1), ContractError);

  SUBCASE("zero density") {
    auto g = make_grid(2, 16, 4.0);
    CHECK(riesz_potential(ComplexField(g), 0.0).max_abs() == 0.0);
  }
  SUBCASE("direct double sum, 2D N=32 and 3D N=16") {
    for (int dim : {2, 3}) {
      auto g = make_grid(dim, dim == 2 ? 32 : 16, 6.0);
      auto rho = from_fn(g, [](const Vec3& x) {
        return cplx(std::exp(-((x[0] - 0.4) * (x[0] - 0.4) + x[1] * x[1] + x[2] * x[2])) * (1.0 + 0.3 * x[1]) *
                    (1.0 + 0.3 * x[1]));
      });
      auto fast = riesz_potential(rho, 0.3);
      auto slow = riesz_direct(rho, 0.3);
      CHECK(max_diff(fast, slow) <= 1e-10 * slow.max_abs());
      CHECK(fast.max_abs_imag() <= 1e-11 * fast.max_abs());
    }
  }
  SUBCASE("far field of a compact bump in 3D") {
    auto g = make_grid(3, 64, 16.0);
    const double w = 2 * g->spacing;
    auto rho = from_fn(g, [w](const Vec3& x) {
      return cplx(std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (2 * w * w)));
    });
    const double m = integrate(rho).real();
    auto pot = riesz_potential(rho, 0.0);
    const double r = g->box_length / 4;
    const std::size_t n = g->points_per_axis;
    const std::size_t idx = g->flatten({n / 2 + n / 4, n / 2, n / 2});
    CHECK(std::abs(pot[idx].real() - m / r) <= 0.02 * m / r);
  }
  SUBCASE("swap symmetry of two bumps") {
    auto g = make_grid(2, 32, 8.0);
    auto rho = from_fn(g, [](const Vec3& x) {
      return cplx(std::exp(-((x[0] - 1) * (x[0] - 1) + x[1] * x[1])) + std::exp(-((x[0] + 1) * (x[0] + 1) + x[1] * x[1])));
    });
    auto pot = riesz_potential(rho, 0.0);
    const std::size_t n = 32;
    double worst = 0;
    for (std::size_t i = 1; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        worst = std::max(worst, std::abs(pot[g->flatten({i, j, 0})] - pot[g->flatten({n - i, j, 0})]));
    CHECK(worst <= 1e-12 * pot.max_abs());
  }
}
