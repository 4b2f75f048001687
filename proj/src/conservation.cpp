#include "mlab/conservation.hpp"

#include <cmath>

#include "mlab/errors.hpp"
#include "mlab/spectral.hpp"

namespace mlab {
namespace {

ComplexField filtered(ComplexField f, bool on) { return on ? dealias(f) : f; }

ComplexField modulus_power(const ComplexField& u, double power) {
  ComplexField out(u.grid);
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = std::pow(std::norm(u[i]), 0.5 * power);
  return out;
}

double sq_norm(const ComplexField& f) { return std::pow(l2_norm(f), 2); }

}  // namespace

double mass(const ComplexField& u) { return sq_norm(u); }

double energy(const ComplexField& u, const NLSParams& params) {
  params.validate();
  const VectorField g = gradient(u);
  double kinetic = 0.0;
  for (int a = 0; a < g.dim(); ++a) kinetic += sq_norm(g[a]);
  const double potential = integrate(modulus_power(u, params.exponent + 1.0)).real();
  return 0.5 * kinetic + params.lambda / (params.exponent + 1.0) * potential;
}

std::vector<double> momentum(const ComplexField& u) {
  const VectorField g = gradient(u);
  std::vector<double> out;
  for (int a = 0; a < g.dim(); ++a) out.push_back(inner(u, g[a]).imag());
  return out;
}

DensityFields density_fields(const ComplexField& u, bool dealias_products) {
  if (u.space != Space::position) throw ContractError("density_fields expects a position-space field");
  const int n = u.grid->dim;
  const VectorField g = gradient(u);
  DensityFields out;
  ComplexField rho(u.grid);
  for (std::size_t i = 0; i < u.size(); ++i) rho[i] = std::norm(u[i]);
  out.rho = real_part(filtered(std::move(rho), dealias_products));
  for (int j = 0; j < n; ++j) {
    ComplexField pj(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) pj[i] = (std::conj(u[i]) * g[j][i]).imag();
    out.p.components.push_back(real_part(filtered(std::move(pj), dealias_products)));
  }
  out.sigma.assign(static_cast<std::size_t>(n), std::vector<ComplexField>(static_cast<std::size_t>(n)));
  for (int j = 0; j < n; ++j)
    for (int k = j; k < n; ++k) {
      ComplexField s(u.grid);
      for (std::size_t i = 0; i < u.size(); ++i) s[i] = 2.0 * (g[j][i] * std::conj(g[k][i])).real();
      s = real_part(filtered(std::move(s), dealias_products));
      out.sigma[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] = s;
      out.sigma[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = std::move(s);
    }
  return out;
}

double continuity_residual(const ComplexField& u_prev, const ComplexField& u_next, const ComplexField& u_now,
                           double dt) {
  require_same_grid(u_prev, u_now);
  require_same_grid(u_next, u_now);
  if (!(dt > 0.0)) throw ContractError("continuity_residual needs dt > 0");
  const DensityFields a = density_fields(u_prev);
  const DensityFields b = density_fields(u_next);
  const DensityFields c = density_fields(u_now);
  ComplexField r = divergence(c.p);
  r *= 2.0;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += (b.rho[i] - a.rho[i]) / (2.0 * dt);
  return l2_norm(r);
}

double momentum_residual(const ComplexField& u_prev, const ComplexField& u_next, const ComplexField& u_now, double dt,
                         const NLSParams& params) {
  require_same_grid(u_prev, u_now);
  require_same_grid(u_next, u_now);
  if (!(dt > 0.0)) throw ContractError("momentum_residual needs dt > 0");
  params.validate();
  const int n = u_now.grid->dim;
  const DensityFields a = density_fields(u_prev);
  const DensityFields b = density_fields(u_next);
  const DensityFields c = density_fields(u_now);

  ComplexField scalar = laplacian(c.rho);
  scalar *= -0.5;
  const ComplexField pot = dealias(modulus_power(u_now, params.exponent + 1.0));
  for (std::size_t i = 0; i < scalar.size(); ++i) scalar[i] += params.potential_coefficient() * pot[i];

  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    ComplexField r = partial_derivative(scalar, j);
    for (int k = 0; k < n; ++k) r += partial_derivative(c.stress(j, k), k);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += (b.p[j][i] - a.p[j][i]) / (2.0 * dt);
    total += sq_norm(r);
  }
  return std::sqrt(total);
}

}  // namespace mlab
