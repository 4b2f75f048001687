#pragma once

#include <vector>

#include "mlab/field.hpp"
#include "mlab/nls.hpp"

namespace mlab {

double mass(const ComplexField& u);
/// 1/2 int |grad u|^2 + lambda/(p+1) int |u|^(p+1)
double energy(const ComplexField& u, const NLSParams& params);
/// Im int conj(u) grad u, one entry per axis.
std::vector<double> momentum(const ComplexField& u);

/// rho = |u|^2, p_k = Im(conj(u) d_k u), sigma_jk = 2 Re(d_j u conj(d_k u)),
/// all stored as real-valued fields.
struct DensityFields {
  ComplexField rho;
  VectorField p;
  std::vector<std::vector<ComplexField>> sigma;

  const ComplexField& stress(int j, int k) const { return sigma[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]; }
};

/// Densities from spectral gradients of u. With dealias set, each product is
/// passed through the 2/3 filter.
DensityFields density_fields(const ComplexField& u, bool dealias_products = true);

/// || (rho_next - rho_prev) / (2 dt) + 2 div p(u_now) ||_L2
double continuity_residual(const ComplexField& u_prev, const ComplexField& u_next, const ComplexField& u_now, double dt);

/// || d_t p_j + d_j(-1/2 lap rho + lambda (p-1)/(p+1) |u|^(p+1)) + d_k sigma_jk ||_L2,
/// summed over j in quadrature, with a centered time difference.
double momentum_residual(const ComplexField& u_prev, const ComplexField& u_next, const ComplexField& u_now, double dt,
                         const NLSParams& params);

}  // namespace mlab
