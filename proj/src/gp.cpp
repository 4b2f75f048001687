#include "mlab/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mlab/errors.hpp"
#include "mlab/spectral.hpp"

namespace mlab {
namespace {

std::size_t ipow(std::size_t base, std::size_t e) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= base;
  return r;
}

void require_tensor_grid(const Grid& g, int k) {
  if (g.dim != 1) throw ContractError("explicit marginal tensors are one-dimensional");
  if (k < 1 || k > 3) throw ContractError("explicit marginal tensors support k = 1, 2, 3");
  const std::size_t n = g.points_per_axis;
  // N^(2k) <= 2^24 without overflow
  std::size_t entries = 1;
  for (int s = 0; s < 2 * k; ++s) {
    entries *= n;
    if (entries > kTensorEntryLimit)
      throw ContractError("marginal tensor with N = " + std::to_string(n) + ", k = " + std::to_string(k) +
                          " exceeds the 2^24 entry limit");
  }
}

// out += coef * f_0 (x) f_1 (x) ... (x) f_{s-1}, last factor fastest.
void accumulate_outer(std::vector<cplx>& out, const std::vector<const std::vector<cplx>*>& factors, cplx coef) {
  std::vector<cplx> cur{coef};
  for (const auto* f : factors) {
    std::vector<cplx> next(cur.size() * f->size());
    std::size_t idx = 0;
    for (const cplx& c : cur)
      for (const cplx& v : *f) next[idx++] = c * v;
    cur = std::move(next);
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += cur[i];
}

std::vector<cplx> conj_of(const std::vector<cplx>& v) {
  std::vector<cplx> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::conj(v[i]);
  return out;
}

std::vector<cplx> times_density(const std::vector<cplx>& v) {
  std::vector<cplx> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::norm(v[i]) * v[i];
  return out;
}

// Applies a 1D multiplier table along one slot.
MarginalTensor apply_slot_multiplier(const MarginalTensor& gamma, std::size_t slot, const std::vector<cplx>& table) {
  if (slot >= gamma.slots()) throw ContractError("tensor slot out of range");
  const std::size_t n = gamma.points();
  const std::size_t stride = gamma.stride(slot);
  const std::size_t block = stride * n;
  MarginalTensor out(gamma.k, gamma.grid);
  ComplexField line(gamma.grid);
  for (std::size_t outer = 0; outer < gamma.values.size(); outer += block)
    for (std::size_t inner = 0; inner < stride; ++inner) {
      const std::size_t base = outer + inner;
      for (std::size_t i = 0; i < n; ++i) line[i] = gamma.values[base + i * stride];
      const ComplexField res = apply_multiplier(line, table);
      for (std::size_t i = 0; i < n; ++i) out.values[base + i * stride] = res[i];
    }
  return out;
}

std::vector<cplx> laplacian_table(const Grid& g) {
  return tabulate_symbol(g, [](const Vec3& xi) { return cplx(-xi[0] * xi[0], 0.0); });
}

std::vector<cplx> derivative_table(const Grid& g) {
  std::vector<cplx> t(g.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = g.is_nyquist(i) ? cplx{} : cplx{0.0, g.wavenumbers[i]};
  return t;
}

void require_compatible(const MixtureState& a, const MixtureState& b) {
  if (a.size() != b.size()) throw ContractError("mixture snapshots differ in the number of terms");
  for (std::size_t m = 0; m < a.size(); ++m)
    if (a.weights[m] != b.weights[m]) throw ContractError("mixture snapshots differ in their weights");
  if (!a.empty() && !a.grid()->same_shape(*b.grid())) throw ContractError("mixture snapshots live on different grids");
}

double tensor_l2(const std::vector<cplx>& v, const Grid& g, int k) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s * std::pow(g.spacing, 2 * k));
}

}  // namespace

MixtureState::MixtureState(std::vector<double> w, std::vector<ComplexField> phi, bool normalized)
    : weights(std::move(w)), orbitals(std::move(phi)) {
  if (weights.size() != orbitals.size()) throw ContractError("mixture needs one weight per orbital");
  double total = 0.0;
  for (std::size_t m = 0; m < weights.size(); ++m) {
    if (!(weights[m] > 0.0)) throw ContractError("mixture weights must be positive");
    total += weights[m];
    if (orbitals[m].space != Space::position) throw ContractError("orbitals must be position-space fields");
    if (!orbitals[m].grid->same_shape(*orbitals.front().grid)) throw ContractError("orbitals must share one grid");
    if (normalized) {
      const double mass = std::pow(l2_norm(orbitals[m]), 2);
      if (std::abs(mass - 1.0) > 1e-10)
        throw ContractError("orbital " + std::to_string(m) + " has mass " + std::to_string(mass) + ", expected 1");
    }
  }
  if (normalized && !weights.empty() && std::abs(total - 1.0) > 1e-12)
    throw ContractError("mixture weights must sum to 1");
}

const GridPtr& MixtureState::grid() const {
  if (orbitals.empty()) throw ContractError("empty mixture has no grid");
  return orbitals.front().grid;
}

MarginalTensor::MarginalTensor(int k_, GridPtr g) : k(k_), grid(std::move(g)) {
  require_tensor_grid(*grid, k);
  values.assign(ipow(grid->points_per_axis, 2 * static_cast<std::size_t>(k)), cplx{});
}

std::size_t MarginalTensor::stride(std::size_t slot) const noexcept { return ipow(points(), slots() - 1 - slot); }

cplx MarginalTensor::trace() const {
  const std::size_t n = points();
  const std::size_t half = ipow(n, static_cast<std::size_t>(k));
  cplx s{};
  for (std::size_t x = 0; x < half; ++x) s += values[x * half + x];
  return s * std::pow(grid->spacing, k);
}

double MarginalTensor::hermiticity_residual() const {
  const std::size_t half = ipow(points(), static_cast<std::size_t>(k));
  double worst = 0.0;
  for (std::size_t x = 0; x < half; ++x)
    for (std::size_t xp = 0; xp < half; ++xp)
      worst = std::max(worst, std::abs(values[x * half + xp] - std::conj(values[xp * half + x])));
  return worst;
}

double MarginalTensor::symmetry_residual() const {
  const std::size_t n = points();
  const std::size_t ns = slots();
  double worst = 0.0;
  std::vector<std::size_t> digit(ns);
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b)
      for (std::size_t i = 0; i < values.size(); ++i) {
        std::size_t r = i;
        for (std::size_t s = ns; s-- > 0;) {
          digit[s] = r % n;
          r /= n;
        }
        std::swap(digit[a], digit[b]);
        std::swap(digit[k + a], digit[k + b]);
        std::size_t j = 0;
        for (std::size_t s = 0; s < ns; ++s) j = j * n + digit[s];
        worst = std::max(worst, std::abs(values[i] - values[j]));
      }
  return worst;
}

double MarginalTensor::norm() const { return tensor_l2(values, *grid, k); }

MarginalTensor marginal(const MixtureState& state, int k) {
  const GridPtr& g = state.grid();
  MarginalTensor out(k, g);
  for (std::size_t m = 0; m < state.size(); ++m) {
    const std::vector<cplx>& phi = state.orbitals[m].values;
    const std::vector<cplx> phib = conj_of(phi);
    std::vector<const std::vector<cplx>*> f;
    for (int j = 0; j < k; ++j) f.push_back(&phi);
    for (int j = 0; j < k; ++j) f.push_back(&phib);
    accumulate_outer(out.values, f, state.weights[m]);
  }
  return out;
}

MarginalTensor partial_trace(const MarginalTensor& gamma) {
  if (gamma.k < 2) throw ContractError("partial_trace needs k + 1 >= 2");
  const int k = gamma.k - 1;
  MarginalTensor out(k, gamma.grid);
  const std::size_t n = gamma.points();
  const std::size_t half = ipow(n, static_cast<std::size_t>(k));  // index range of (x_1..x_k)
  const std::size_t big_half = half * n;
  for (std::size_t x = 0; x < half; ++x)
    for (std::size_t xp = 0; xp < half; ++xp) {
      cplx s{};
      for (std::size_t y = 0; y < n; ++y) s += gamma.values[(x * n + y) * big_half + (xp * n + y)];
      out.values[x * half + xp] = s * gamma.grid->spacing;
    }
  return out;
}

MarginalTensor contract_B(const MarginalTensor& gamma, int j, int sign) {
  const int k = gamma.k - 1;
  if (k < 1) throw ContractError("contract_B needs a tensor with k + 1 >= 2");
  if (j < 1 || j > k) throw ContractError("contract_B index j must satisfy 1 <= j <= k");
  if (sign != 1 && sign != -1) throw ContractError("contract_B sign must be +1 or -1");
  MarginalTensor out(k, gamma.grid);
  const std::size_t n = gamma.points();
  const std::size_t ns = out.slots();
  std::vector<std::size_t> digit(ns);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    std::size_t r = i;
    for (std::size_t s = ns; s-- > 0;) {
      digit[s] = r % n;
      r /= n;
    }
    const std::size_t y = sign > 0 ? digit[static_cast<std::size_t>(j - 1)] : digit[static_cast<std::size_t>(k + j - 1)];
    std::size_t big = 0;
    for (int s = 0; s < k; ++s) big = big * n + digit[s];
    big = big * n + y;
    for (int s = 0; s < k; ++s) big = big * n + digit[k + s];
    big = big * n + y;
    out.values[i] = gamma.values[big];
  }
  return out;
}

MarginalTensor contract_B(const MixtureState& state, int k, int j, int sign) {
  if (j < 1 || j > k) throw ContractError("contract_B index j must satisfy 1 <= j <= k");
  if (sign != 1 && sign != -1) throw ContractError("contract_B sign must be +1 or -1");
  MarginalTensor out(k, state.grid());
  for (std::size_t m = 0; m < state.size(); ++m) {
    const std::vector<cplx>& phi = state.orbitals[m].values;
    const std::vector<cplx> phib = conj_of(phi);
    const std::vector<cplx> dphi = times_density(phi);
    const std::vector<cplx> dphib = conj_of(dphi);
    std::vector<const std::vector<cplx>*> f;
    for (int s = 1; s <= k; ++s) f.push_back(sign > 0 && s == j ? &dphi : &phi);
    for (int s = 1; s <= k; ++s) f.push_back(sign < 0 && s == j ? &dphib : &phib);
    accumulate_outer(out.values, f, state.weights[m]);
  }
  return out;
}

MarginalTensor interaction_term(const MixtureState& state, int k, double lambda) {
  MarginalTensor out(k, state.grid());
  for (int j = 1; j <= k; ++j) {
    const MarginalTensor plus = contract_B(state, k, j, +1);
    const MarginalTensor minus = contract_B(state, k, j, -1);
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += lambda * (plus.values[i] - minus.values[i]);
  }
  return out;
}

MarginalTensor slot_laplacian(const MarginalTensor& gamma, std::size_t slot) {
  return apply_slot_multiplier(gamma, slot, laplacian_table(*gamma.grid));
}

MarginalTensor slot_derivative(const MarginalTensor& gamma, std::size_t slot) {
  return apply_slot_multiplier(gamma, slot, derivative_table(*gamma.grid));
}

MixtureTrajectory evolve_mixture(const MixtureState& state, double lambda, const SolverConfig& config) {
  MixtureTrajectory out;
  if (state.empty()) return out;
  std::vector<Trajectory> per;
  for (const auto& phi : state.orbitals) per.push_back(evolve(phi, {lambda, 3.0}, config).trajectory);
  out.times = per.front().times;
  for (std::size_t t = 0; t < out.times.size(); ++t) {
    MixtureState s;
    s.weights = state.weights;
    for (const auto& tr : per) s.orbitals.push_back(tr.snapshots[t]);
    out.states.push_back(std::move(s));
  }
  return out;
}

double hierarchy_residual(const MixtureState& prev, const MixtureState& now, const MixtureState& next, int k,
                          double dt, double lambda) {
  require_compatible(prev, now);
  require_compatible(next, now);
  if (!(dt > 0.0)) throw ContractError("hierarchy_residual needs dt > 0");
  if (now.empty()) return 0.0;
  const MarginalTensor gp = marginal(prev, k);
  const MarginalTensor gn = marginal(next, k);
  const MarginalTensor g0 = marginal(now, k);
  MarginalTensor r = interaction_term(now, k, lambda);
  const cplx idt{0.0, 1.0 / (2.0 * dt)};
  for (std::size_t i = 0; i < r.values.size(); ++i) r.values[i] = idt * (gn.values[i] - gp.values[i]) - r.values[i];
  for (int j = 0; j < k; ++j) {
    const MarginalTensor lx = slot_laplacian(g0, static_cast<std::size_t>(j));
    const MarginalTensor lxp = slot_laplacian(g0, static_cast<std::size_t>(k + j));
    for (std::size_t i = 0; i < r.values.size(); ++i) r.values[i] += lx.values[i] - lxp.values[i];
  }
  return r.norm();
}

double h_alpha_norm(const MarginalTensor& gamma, double alpha) {
  const auto table = tabulate_symbol(*gamma.grid, [alpha](const Vec3& xi) {
    return cplx(std::pow(1.0 + xi[0] * xi[0], 0.5 * alpha), 0.0);
  });
  MarginalTensor cur = gamma;
  if (alpha != 0.0)
    for (std::size_t s = 0; s < gamma.slots(); ++s) cur = apply_slot_multiplier(cur, s, table);
  return cur.norm();
}

double h_alpha_norm(const MixtureState& state, int k, double alpha) {
  if (k < 1) throw ContractError("h_alpha_norm needs k >= 1");
  std::vector<ComplexField> psi;
  for (const auto& phi : state.orbitals) psi.push_back(alpha == 0.0 ? phi : bessel_potential(phi, alpha));
  double s = 0.0;
  for (std::size_t m = 0; m < psi.size(); ++m)
    for (std::size_t q = 0; q < psi.size(); ++q)
      s += state.weights[m] * state.weights[q] * std::pow(std::norm(inner(psi[m], psi[q])), k);
  return std::sqrt(s);
}

HXiNorm h_xi_norm(const MixtureState& state, int k_max, double xi, double alpha) {
  if (k_max < 1) throw ContractError("h_xi_norm needs k_max >= 1");
  if (!(xi > 0.0)) throw ContractError("h_xi_norm needs xi > 0");
  HXiNorm out;
  if (state.empty()) return out;
  for (const auto& phi : state.orbitals) {
    const ComplexField psi = alpha == 0.0 ? phi : bessel_potential(phi, alpha);
    out.orbital_bound = std::max(out.orbital_bound, std::pow(l2_norm(psi), 2));
  }
  double xk = 1.0;
  for (int k = 1; k <= k_max; ++k) {
    xk *= xi;
    out.terms.push_back(h_alpha_norm(state, k, alpha));
    out.partial += xk * out.terms.back();
  }
  const double q = xi * out.orbital_bound;
  out.divergent = q >= 1.0;
  out.tail_bound = out.divergent ? std::numeric_limits<double>::infinity() : std::pow(q, k_max + 1) / (1.0 - q);
  return out;
}

GPDensities gp_density_and_momentum(const MarginalTensor& gamma1) {
  if (gamma1.k != 1) throw ContractError("gp_density_and_momentum expects gamma^(1)");
  const std::size_t n = gamma1.points();
  const auto d = derivative_table(*gamma1.grid);
  const MarginalTensor dx = apply_slot_multiplier(gamma1, 0, d);
  const MarginalTensor dxp = apply_slot_multiplier(gamma1, 1, d);
  GPDensities out;
  out.rho = ComplexField(gamma1.grid);
  ComplexField P(gamma1.grid);
  const cplx half_over_i{0.0, -0.5};
  for (std::size_t x = 0; x < n; ++x) {
    out.rho[x] = gamma1.values[x * n + x];
    P[x] = half_over_i * (dx.values[x * n + x] - dxp.values[x * n + x]);
  }
  out.P.components.push_back(std::move(P));
  return out;
}

GPDensities gp_density_and_momentum(const MixtureState& state) {
  GPDensities out;
  const GridPtr& g = state.grid();
  out.rho = ComplexField(g);
  for (int a = 0; a < g->dim; ++a) out.P.components.emplace_back(g);
  for (std::size_t m = 0; m < state.size(); ++m) {
    const ComplexField& phi = state.orbitals[m];
    const VectorField grad = gradient(phi);
    const double w = state.weights[m];
    for (std::size_t i = 0; i < phi.size(); ++i) {
      out.rho[i] += w * std::norm(phi[i]);
      for (int a = 0; a < g->dim; ++a) out.P[a][i] += w * (std::conj(phi[i]) * grad[a][i]).imag();
    }
  }
  return out;
}

ContinuityCheck gp_continuity_check(const MixtureState& prev, const MixtureState& now, const MixtureState& next,
                                    double dt, double lambda) {
  require_compatible(prev, now);
  require_compatible(next, now);
  if (!(dt > 0.0)) throw ContractError("gp_continuity_check needs dt > 0");
  ContinuityCheck out;
  if (now.empty()) return out;
  const GPDensities a = gp_density_and_momentum(prev);
  const GPDensities b = gp_density_and_momentum(next);
  const GPDensities c = gp_density_and_momentum(now);
  ComplexField dtrho(now.grid());
  for (std::size_t i = 0; i < dtrho.size(); ++i) dtrho[i] = (b.rho[i] - a.rho[i]) / (2.0 * dt);
  ComplexField div = divergence(c.P);
  div *= 2.0;
  out.kinetic_residual = l2_norm(dtrho + div);
  out.scale = l2_norm(dtrho) + l2_norm(div);

  // lambda (B+_1 - B-_1) gamma^(2) restricted to x' = x
  ComplexField diag(now.grid());
  const std::size_t n = now.grid()->points_per_axis;
  if (now.grid()->dim == 1 && n * n <= kTensorEntryLimit) {
    const MarginalTensor plus = contract_B(now, 1, 1, +1);
    const MarginalTensor minus = contract_B(now, 1, 1, -1);
    for (std::size_t x = 0; x < n; ++x) diag[x] = lambda * (plus.values[x * n + x] - minus.values[x * n + x]);
  } else {
    for (std::size_t m = 0; m < now.size(); ++m) {
      const ComplexField& phi = now.orbitals[m];
      for (std::size_t i = 0; i < phi.size(); ++i) {
        const cplx dphi = std::norm(phi[i]) * phi[i];
        const cplx plus = dphi * std::conj(phi[i]);
        const cplx minus = phi[i] * std::conj(dphi);
        diag[i] += now.weights[m] * lambda * (plus - minus);
      }
    }
  }
  out.interaction_contribution = l2_norm(diag);
  return out;
}

}  // namespace mlab
