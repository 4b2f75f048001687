#include "mlab/gp_morawetz.hpp"

#include <algorithm>
#include <cmath>

#include "mlab/errors.hpp"
#include "mlab/morawetz.hpp"
#include "mlab/spectral.hpp"

namespace mlab {
namespace {

ComplexField as_field(const GridPtr& g, const std::vector<double>& v) {
  ComplexField f(g);
  for (std::size_t i = 0; i < v.size(); ++i) f[i] = v[i];
  return f;
}

double dot_real(const std::vector<double>& a, const ComplexField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i].real();
  return s;
}

void require_weight(const Weight& w, const MixtureState& state) {
  if (!state.empty() && w.dim() != state.grid()->dim) throw ContractError("weight dimension does not match the grid");
}

std::vector<double> sample(const GridPtr& grid, const KernelFn& kernel, const Vec3& center) {
  const Grid& g = *grid;
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = symmetrized_eval(kernel, displacement(g.position(i), center, g), g);
  return out;
}

// Orbital quantities shared by the terms.
struct OrbitalData {
  PointwiseDensities d;
  ComplexField rho;
  ComplexField lap_rho;
  ComplexField lap_im;  // Im(conj(phi) lap phi), the (lap_y - lap_y') diagonal over 2i
  std::vector<ComplexField> p;
  std::vector<std::vector<double>> F;    // [(d_x - d_x')(lap_x - lap_x') phi phi'] on the diagonal
  std::vector<std::vector<double>> G;    // [(d_x - d_x')(B+ - B-) phi phi'] on the diagonal, without lambda
  ComplexField D;                        // (B+ - B-) diagonal in the y particle
  double mass = 0.0;
};

OrbitalData orbital_data(const ComplexField& phi) {
  const GridPtr& grid = phi.grid;
  const int n = grid->dim;
  OrbitalData o;
  o.d = pointwise_densities(phi);
  o.rho = as_field(grid, o.d.rho);
  o.lap_rho = laplacian(o.rho);
  for (int j = 0; j < n; ++j) o.p.push_back(as_field(grid, o.d.p[j]));
  o.mass = integrate(o.rho).real();

  const VectorField grad = gradient(phi);
  const ComplexField lap = laplacian(phi);
  const VectorField grad_lap = gradient(lap);
  ComplexField rho_phi(grid);
  for (std::size_t i = 0; i < phi.size(); ++i) rho_phi[i] = o.d.rho[i] * phi[i];
  const VectorField grad_rho_phi = gradient(rho_phi);

  o.F.assign(n, std::vector<double>(phi.size()));
  o.G.assign(n, std::vector<double>(phi.size()));
  o.D = ComplexField(grid);
  o.lap_im = ComplexField(grid);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const cplx c = std::conj(phi[i]);
    for (int j = 0; j < n; ++j) {
      o.F[j][i] = 2.0 * (c * grad_lap[j][i]).real() - 2.0 * (grad[j][i] * std::conj(lap[i])).real();
      o.G[j][i] = 2.0 * (c * grad_rho_phi[j][i]).real() - o.d.rho[i] * o.d.grad_rho[j][i];
    }
    o.D[i] = rho_phi[i] * c - phi[i] * std::conj(rho_phi[i]);
    o.lap_im[i] = (c * lap[i]).imag();
  }
  return o;
}

}  // namespace

double GPOneParticleTerms::scale() const noexcept { return std::abs(T1) + std::abs(T2) + std::abs(T3); }
double GPInteractionTerms::raw_scale() const noexcept {
  return std::abs(A1) + std::abs(A2) + std::abs(A3) + std::abs(A4);
}
double GPInteractionTerms::theorem_scale() const noexcept {
  return std::abs(theta1) + std::abs(theta2) + std::abs(theta3) + std::abs(theta4);
}

double gp_one_particle_action(const MixtureState& state, const Weight& weight, const Vec3& center) {
  if (state.empty()) return 0.0;
  require_weight(weight, state);
  const GPDensities dens = gp_density_and_momentum(state);
  const GridPtr& grid = state.grid();
  double s = 0.0;
  for (int j = 0; j < grid->dim; ++j) {
    const auto ga = sample(grid, weight.gradient_kernel(j), center);
    s += dot_real(ga, dens.P[j]);
  }
  return s * grid->cell_volume();
}

GPOneParticleTerms gp_one_particle_rhs(const MixtureState& state, const Weight& weight, double lambda,
                                       const Vec3& center) {
  if (!weight.smooth()) throw ContractError("the GP one-particle identity needs a smoothed weight (eps > 0)");
  GPOneParticleTerms t;
  if (state.empty()) return t;
  require_weight(weight, state);
  const GridPtr& grid = state.grid();
  const int n = grid->dim;
  const auto bilap = sample(grid, weight.bilaplacian_kernel(), center);
  const auto lap = sample(grid, weight.laplacian_kernel(), center);
  std::vector<std::vector<std::vector<double>>> hess(n, std::vector<std::vector<double>>(n));
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) hess[j][l] = sample(grid, weight.hessian_kernel(j, l), center);

  for (std::size_t m = 0; m < state.size(); ++m) {
    const double w = state.weights[m];
    const ComplexField& phi = state.orbitals[m];
    const VectorField grad = gradient(phi);
    ComplexField rho(grid);
    for (std::size_t i = 0; i < phi.size(); ++i) rho[i] = std::norm(phi[i]);
    const ComplexField lap_rho = laplacian(rho);
    for (std::size_t i = 0; i < phi.size(); ++i) {
      const double r = rho[i].real();
      t.T1 += w * -0.5 * bilap[i] * r;
      t.T1_chain += w * -0.5 * lap[i] * lap_rho[i].real();
      t.T2 += w * 0.5 * lambda * lap[i] * r * r;
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) t.T3 += w * 2.0 * hess[j][l][i] * (grad[l][i] * std::conj(grad[j][i])).real();
    }
  }
  const double h = grid->cell_volume();
  t.T1 *= h;
  t.T1_chain *= h;
  t.T2 *= h;
  t.T3 *= h;
  return t;
}

// ---------------------------------------------------------------------------

struct GPMorawetzEvaluator::Kernels {
  // displacement form
  std::vector<std::unique_ptr<ConvolutionKernel>> grad;
  std::vector<std::vector<std::shared_ptr<ConvolutionKernel>>> hess;
  std::unique_ptr<ConvolutionKernel> lap;
  // x-only form: samples at x - c
  std::vector<std::vector<double>> grad_x;
  std::vector<std::vector<std::vector<double>>> hess_x;
  std::vector<double> lap_x;
};

GPMorawetzEvaluator::GPMorawetzEvaluator(GridPtr grid, GPWeight weight)
    : grid_(std::move(grid)), weight_(std::move(weight)), k_(std::make_unique<Kernels>()) {
  const Weight& w = weight_.weight;
  const int n = grid_->dim;
  if (w.dim() != n) throw ContractError("weight dimension does not match the grid");
  if (weight_.form == GPWeight::Form::displacement) {
    for (int j = 0; j < n; ++j) k_->grad.push_back(std::make_unique<ConvolutionKernel>(grid_, w.gradient_kernel(j)));
    if (w.smooth()) {
      k_->hess.assign(n, std::vector<std::shared_ptr<ConvolutionKernel>>(n));
      for (int j = 0; j < n; ++j)
        for (int l = j; l < n; ++l) {
          k_->hess[j][l] = std::make_shared<ConvolutionKernel>(grid_, w.hessian_kernel(j, l));
          k_->hess[l][j] = k_->hess[j][l];
        }
      k_->lap = std::make_unique<ConvolutionKernel>(grid_, w.laplacian_kernel());
    }
  } else {
    for (int j = 0; j < n; ++j) k_->grad_x.push_back(sample(grid_, w.gradient_kernel(j), weight_.center));
    if (w.smooth()) {
      k_->hess_x.assign(n, std::vector<std::vector<double>>(n));
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) k_->hess_x[j][l] = sample(grid_, w.hessian_kernel(j, l), weight_.center);
      k_->lap_x = sample(grid_, w.laplacian_kernel(), weight_.center);
    }
  }
}

GPMorawetzEvaluator::~GPMorawetzEvaluator() = default;
GPMorawetzEvaluator::GPMorawetzEvaluator(GPMorawetzEvaluator&&) noexcept = default;
GPMorawetzEvaluator& GPMorawetzEvaluator::operator=(GPMorawetzEvaluator&&) noexcept = default;

namespace {

// (K * f)(x) = int K(x, y) f(y) dy for either weight form.
struct YIntegral {
  const GridPtr& grid;
  bool x_only;

  ComplexField apply(const ConvolutionKernel* conv, const std::vector<double>* table, const ComplexField& f) const {
    if (!x_only) return conv->apply(f);
    const cplx total = integrate(f);
    ComplexField out(grid);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (*table)[i] * total;
    return out;
  }
};

}  // namespace

double GPMorawetzEvaluator::action(const MixtureState& state) const {
  if (state.empty()) return 0.0;
  if (!state.grid()->same_shape(*grid_)) throw ContractError("mixture grid does not match the evaluator grid");
  const bool xo = weight_.form == GPWeight::Form::x_only;
  const YIntegral Y{grid_, xo};
  double s = 0.0;
  for (std::size_t m = 0; m < state.size(); ++m) {
    const PointwiseDensities d = pointwise_densities(state.orbitals[m]);
    const ComplexField rho = as_field(grid_, d.rho);
    for (int j = 0; j < grid_->dim; ++j) {
      const ComplexField c = Y.apply(xo ? nullptr : k_->grad[j].get(), xo ? &k_->grad_x[j] : nullptr, rho);
      s += state.weights[m] * dot_real(d.p[j], c);
    }
  }
  return s * grid_->cell_volume();
}

GPInteractionTerms GPMorawetzEvaluator::rhs(const MixtureState& state, double lambda) const {
  if (!weight_.weight.smooth()) throw ContractError("the GP interaction identity needs a smoothed weight (eps > 0)");
  GPInteractionTerms t;
  if (state.empty()) return t;
  if (!state.grid()->same_shape(*grid_)) throw ContractError("mixture grid does not match the evaluator grid");
  const int n = grid_->dim;
  const bool xo = weight_.form == GPWeight::Form::x_only;
  const YIntegral Y{grid_, xo};
  auto grad = [&](int j, const ComplexField& f) {
    return Y.apply(xo ? nullptr : k_->grad[j].get(), xo ? &k_->grad_x[j] : nullptr, f);
  };
  auto hess = [&](int j, int l, const ComplexField& f) {
    return Y.apply(xo ? nullptr : k_->hess[j][l].get(), xo ? &k_->hess_x[j][l] : nullptr, f);
  };
  auto lap = [&](const ComplexField& f) { return Y.apply(xo ? nullptr : k_->lap.get(), xo ? &k_->lap_x : nullptr, f); };

  for (std::size_t m = 0; m < state.size(); ++m) {
    const double w = state.weights[m];
    const OrbitalData o = orbital_data(state.orbitals[m]);
    const ComplexField lap_conv = lap(o.rho);
    for (std::size_t i = 0; i < o.rho.size(); ++i) {
      const double r = o.d.rho[i];
      t.theta1 += w * -0.5 * o.lap_rho[i].real() * lap_conv[i].real();
      t.theta2 += w * 0.5 * lambda * r * r * lap_conv[i].real();
    }
    for (int j = 0; j < n; ++j) {
      const ComplexField gc = grad(j, o.rho);
      t.A1 += w * dot_real(o.F[j], gc);
      t.A3 += w * -lambda * dot_real(o.G[j], gc);
      t.A2 += w * -4.0 * dot_real(o.d.p[j], grad(j, o.lap_im));
      // -2 i lambda int P_j (grad_j a * D)
      const ComplexField dc = grad(j, o.D);
      for (std::size_t i = 0; i < dc.size(); ++i) t.A4 += w * (cplx(0.0, -2.0 * lambda) * o.d.p[j][i] * dc[i]).real();
      for (int l = 0; l < n; ++l) {
        t.theta3 += w * 2.0 * dot_real(o.d.R[j][l], hess(j, l, o.rho));
        // d_xj d_yl a = -hess_jl for a displaced weight, zero for a(x)
        if (!xo) t.theta4 += w * -2.0 * dot_real(o.d.p[j], hess(j, l, o.p[l]));
      }
    }
  }
  const double h = grid_->cell_volume();
  t.A1 *= h;
  t.A2 *= h;
  t.A3 *= h;
  t.A4 *= h;
  t.theta1 *= h;
  t.theta2 *= h;
  t.theta3 *= h;
  t.theta4 *= h;
  return t;
}

double gp_interaction_action(const MixtureState& state, const GPWeight& weight) {
  if (state.empty()) return 0.0;
  return GPMorawetzEvaluator(state.grid(), weight).action(state);
}

GPInteractionTerms gp_interaction_rhs(const MixtureState& state, const GPWeight& weight, double lambda) {
  if (state.empty()) {
    if (!weight.weight.smooth()) throw ContractError("the GP interaction identity needs a smoothed weight (eps > 0)");
    return {};
  }
  return GPMorawetzEvaluator(state.grid(), weight).rhs(state, lambda);
}

// ---------------------------------------------------------------------------

namespace {

MarginalTensor difference(const MarginalTensor& a, const MarginalTensor& b) {
  MarginalTensor out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] -= b.values[i];
  return out;
}

// h^2 sum_{x,y} a'(x - y) T(x, y; x, y) for a two-particle tensor T.
double diagonal_pairing(const MarginalTensor& T, const Weight& weight) {
  const Grid& g = *T.grid;
  const std::size_t n = T.points();
  const KernelFn ga = weight.gradient_kernel(0);
  cplx s{};
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      const double k = symmetrized_eval(ga, displacement(g.position(x), g.position(y), g), g);
      s += k * T.values[((x * n + y) * n + x) * n + y];
    }
  return s.real() * g.spacing * g.spacing;
}

}  // namespace

ExplicitInteractionTerms gp_interaction_rhs_explicit(const MixtureState& state, const Weight& weight, double lambda) {
  ExplicitInteractionTerms t;
  if (state.empty()) return t;
  if (state.grid()->dim != 1 || weight.dim() != 1) throw ContractError("explicit GP interaction terms are 1D only");
  const MarginalTensor g2 = marginal(state, 2);
  const MarginalTensor g3 = marginal(state, 3);
  // slots: 0 = x, 1 = y, 2 = x', 3 = y'
  auto dx_minus_dxp = [](const MarginalTensor& T) { return difference(slot_derivative(T, 0), slot_derivative(T, 2)); };

  t.A1 = diagonal_pairing(dx_minus_dxp(difference(slot_laplacian(g2, 0), slot_laplacian(g2, 2))), weight);
  t.A2 = diagonal_pairing(dx_minus_dxp(difference(slot_laplacian(g2, 1), slot_laplacian(g2, 3))), weight);
  t.A3 = -lambda * diagonal_pairing(dx_minus_dxp(difference(contract_B(g3, 1, +1), contract_B(g3, 1, -1))), weight);
  t.A4 = -lambda * diagonal_pairing(dx_minus_dxp(difference(contract_B(g3, 2, +1), contract_B(g3, 2, -1))), weight);
  return t;
}

// ---------------------------------------------------------------------------

double ReductionReport::max_theorem_delta() const noexcept {
  double m = 0.0;
  for (double d : theorem_delta) m = std::max(m, std::abs(d));
  return m;
}

double ReductionReport::max_raw_delta() const noexcept {
  double m = 0.0;
  for (double d : raw_delta) m = std::max(m, std::abs(d));
  return m;
}

ReductionReport reduction_consistency(const MixtureState& state, const Weight& weight, double lambda,
                                      const Vec3& center) {
  ReductionReport r;
  r.one_particle = gp_one_particle_rhs(state, weight, lambda, center);
  r.collapsed = gp_interaction_rhs(state, GPWeight::x_only(weight, center), lambda);
  const auto& c = r.collapsed;
  const auto& o = r.one_particle;
  r.theorem_delta = {c.theta1 - o.T1_chain, c.theta2 - o.T2, c.theta3 - o.T3, c.theta4};
  r.raw_delta = {c.A1 - 2.0 * (o.T1_chain + o.T3), c.A2, c.A3 - 2.0 * o.T2, c.A4};
  return r;
}

}  // namespace mlab
