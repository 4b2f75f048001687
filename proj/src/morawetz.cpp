#include "mlab/morawetz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mlab/errors.hpp"

namespace mlab {
namespace {

void require_weight_grid(const Weight& w, const Grid& g) {
  if (w.dim() != g.dim) throw ContractError("weight dimension does not match the grid");
}

ComplexField as_field(const GridPtr& g, const std::vector<double>& v) {
  ComplexField f(g);
  for (std::size_t i = 0; i < v.size(); ++i) f[i] = v[i];
  return f;
}

double sum_product(const std::vector<double>& a, const ComplexField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i].real();
  return s;
}

std::vector<double> potential_density(const ComplexField& u, const NLSParams& params) {
  std::vector<double> g(u.size());
  const double c = params.potential_coefficient();
  for (std::size_t i = 0; i < u.size(); ++i) g[i] = c * std::pow(std::norm(u[i]), 0.5 * (params.exponent + 1.0));
  return g;
}

std::vector<double> real_values(const ComplexField& f) {
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i].real();
  return out;
}

}  // namespace

PointwiseDensities pointwise_densities(const ComplexField& u) {
  if (u.space != Space::position) throw ContractError("pointwise_densities expects a position-space field");
  const int n = u.grid->dim;
  const std::size_t size = u.size();
  const VectorField g = gradient(u);
  PointwiseDensities d;
  d.rho.resize(size);
  d.p.assign(n, std::vector<double>(size));
  d.grad_rho.assign(n, std::vector<double>(size));
  d.R.assign(n, std::vector<std::vector<double>>(n, std::vector<double>(size)));
  for (std::size_t i = 0; i < size; ++i) {
    d.rho[i] = std::norm(u[i]);
    for (int j = 0; j < n; ++j) {
      const cplx w = std::conj(u[i]) * g[j][i];
      d.p[j][i] = w.imag();
      d.grad_rho[j][i] = 2.0 * w.real();
      for (int k = 0; k < n; ++k) d.R[j][k][i] = (std::conj(g[j][i]) * g[k][i]).real();
    }
  }
  return d;
}

double morawetz_action(const ComplexField& u, const Vec3& center, const Weight& weight) {
  const Grid& g = *u.grid;
  require_weight_grid(weight, g);
  const PointwiseDensities d = pointwise_densities(u);
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Vec3 disp = displacement(g.position(i), center, g);
    for (int j = 0; j < g.dim; ++j) s += symmetrized_eval(weight.gradient_kernel(j), disp, g) * d.p[j][i];
  }
  return s * g.cell_volume();
}

ComplexField morawetz_action_all_centers(const ComplexField& u, const Weight& weight) {
  const Grid& g = *u.grid;
  require_weight_grid(weight, g);
  const PointwiseDensities d = pointwise_densities(u);
  ComplexField out(u.grid);
  for (int j = 0; j < g.dim; ++j) {
    // M_y = h^n sum_x grad a(x - y) p(x) is a convolution with the reflected gradient.
    const ConvolutionKernel k(u.grid, [&weight, j](const Vec3& disp) {
      return weight.gradient(Vec3{-disp[0], -disp[1], -disp[2]})[j];
    });
    out += k.apply(as_field(u.grid, d.p[j]));
  }
  return real_part(out);
}

double OneParticleRhs::scale() const noexcept { return std::abs(smoothing) + std::abs(potential) + std::abs(hessian); }

OneParticleRhs dt_morawetz_rhs(const ComplexField& u, const Vec3& center, const Weight& weight,
                               const NLSParams& params) {
  const Grid& g = *u.grid;
  require_weight_grid(weight, g);
  params.validate();
  if (!weight.smooth())
    throw ContractError("dt_morawetz_rhs needs a smoothed weight (eps > 0); the Laplacian of |x| is singular");
  const PointwiseDensities d = pointwise_densities(u);
  const auto lap_rho = real_values(laplacian(as_field(u.grid, d.rho)));
  const auto G = potential_density(u, params);
  OneParticleRhs r;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Vec3 disp = displacement(g.position(i), center, g);
    const double la = symmetrized_eval(weight.laplacian_kernel(), disp, g);
    r.smoothing += la * (-0.5 * lap_rho[i]);
    r.potential += la * G[i];
    for (int j = 0; j < g.dim; ++j)
      for (int k = 0; k < g.dim; ++k) r.hessian += 2.0 * symmetrized_eval(weight.hessian_kernel(j, k), disp, g) * d.R[j][k][i];
  }
  const double h = g.cell_volume();
  r.smoothing *= h;
  r.potential *= h;
  r.hessian *= h;
  return r;
}

double InteractionTerms::scale() const noexcept { return std::abs(I) + std::abs(II) + std::abs(III) + std::abs(IV); }

InteractionEvaluator::InteractionEvaluator(GridPtr grid, Weight weight) : grid_(std::move(grid)), weight_(std::move(weight)) {
  const int n = grid_->dim;
  require_weight_grid(weight_, *grid_);
  for (int j = 0; j < n; ++j) grad_.emplace_back(grid_, weight_.gradient_kernel(j));
  hess_.assign(n, std::vector<std::shared_ptr<ConvolutionKernel>>(n));
  if (weight_.smooth()) {
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        hess_[j][k] = std::make_shared<ConvolutionKernel>(grid_, weight_.hessian_kernel(j, k));
        hess_[k][j] = hess_[j][k];
      }
    lap_ = std::make_unique<ConvolutionKernel>(grid_, weight_.laplacian_kernel());
  }
}

double InteractionEvaluator::action(const ComplexField& u) const {
  if (!u.grid->same_shape(*grid_)) throw ContractError("field grid does not match the evaluator grid");
  const PointwiseDensities d = pointwise_densities(u);
  const ComplexField rho = as_field(u.grid, d.rho);
  double s = 0.0;
  for (int k = 0; k < grid_->dim; ++k) s += sum_product(d.p[k], grad_[k].apply(rho));
  return s * grid_->cell_volume();
}

InteractionTerms InteractionEvaluator::terms(const ComplexField& u, const NLSParams& params) const {
  if (!u.grid->same_shape(*grid_)) throw ContractError("field grid does not match the evaluator grid");
  if (!lap_) throw ContractError("interaction terms need a smoothed weight (eps > 0)");
  params.validate();
  const int n = grid_->dim;
  const PointwiseDensities d = pointwise_densities(u);
  const ComplexField rho = as_field(u.grid, d.rho);
  const auto lap_rho = real_values(laplacian(rho));
  const auto G = potential_density(u, params);
  const ComplexField lap_conv = lap_->apply(rho);

  InteractionTerms t;
  for (std::size_t i = 0; i < u.size(); ++i) {
    t.I += -0.5 * lap_rho[i] * lap_conv[i].real();
    t.II += G[i] * lap_conv[i].real();
  }
  std::vector<ComplexField> p_fields;
  for (int j = 0; j < n; ++j) p_fields.push_back(as_field(u.grid, d.p[j]));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      t.III += 2.0 * sum_product(d.R[j][k], hess_[j][k]->apply(rho));
      t.IV += -2.0 * sum_product(d.p[k], hess_[j][k]->apply(p_fields[j]));
    }
  const double h = grid_->cell_volume();
  t.I *= h;
  t.II *= h;
  t.III *= h;
  t.IV *= h;
  return t;
}

double interaction_action(const ComplexField& u, const Weight& weight) {
  return InteractionEvaluator(u.grid, weight).action(u);
}

InteractionTerms interaction_rhs_terms(const ComplexField& u, const Weight& weight, const NLSParams& params) {
  return InteractionEvaluator(u.grid, weight).terms(u, params);
}

double interaction_action_direct(const ComplexField& u, const Weight& weight) {
  const Grid& g = *u.grid;
  require_weight_grid(weight, g);
  const PointwiseDensities d = pointwise_densities(u);
  double s = 0.0;
  for (std::size_t x = 0; x < u.size(); ++x)
    for (std::size_t y = 0; y < u.size(); ++y) {
      const Vec3 disp = displacement(g.position(x), g.position(y), g);
      for (int k = 0; k < g.dim; ++k) s += d.rho[y] * symmetrized_eval(weight.gradient_kernel(k), disp, g) * d.p[k][x];
    }
  return s * g.cell_volume() * g.cell_volume();
}

InteractionTerms interaction_rhs_terms_direct(const ComplexField& u, const Weight& weight, const NLSParams& params) {
  const Grid& g = *u.grid;
  require_weight_grid(weight, g);
  if (!weight.smooth()) throw ContractError("interaction terms need a smoothed weight (eps > 0)");
  const int n = g.dim;
  const PointwiseDensities d = pointwise_densities(u);
  const auto lap_rho = real_values(laplacian(as_field(u.grid, d.rho)));
  const auto G = potential_density(u, params);
  InteractionTerms t;
  for (std::size_t x = 0; x < u.size(); ++x)
    for (std::size_t y = 0; y < u.size(); ++y) {
      const Vec3 disp = displacement(g.position(x), g.position(y), g);
      const double la = symmetrized_eval(weight.laplacian_kernel(), disp, g);
      t.I += d.rho[y] * la * (-0.5 * lap_rho[x]);
      t.II += d.rho[y] * la * G[x];
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          const double hjk = symmetrized_eval(weight.hessian_kernel(j, k), disp, g);
          t.III += 2.0 * d.rho[y] * hjk * d.R[j][k][x];
          t.IV += -2.0 * hjk * d.p[j][y] * d.p[k][x];
        }
    }
  const double h2 = g.cell_volume() * g.cell_volume();
  t.I *= h2;
  t.II *= h2;
  t.III *= h2;
  t.IV *= h2;
  return t;
}

CurrentBound two_point_current_bound(const ComplexField& u, const Weight& weight, double floor_ratio) {
  const Grid& g = *u.grid;
  require_weight_grid(weight, g);
  if (!weight.smooth()) throw ContractError("two_point_current_bound needs a smoothed weight (eps > 0)");
  if (!(floor_ratio > 0.0)) throw ContractError("density floor ratio must be positive");
  const int n = g.dim;
  const PointwiseDensities d = pointwise_densities(u);
  CurrentBound out;
  const double rho_max = d.rho.empty() ? 0.0 : *std::max_element(d.rho.begin(), d.rho.end());
  if (rho_max == 0.0) return out;
  out.floor = floor_ratio * rho_max;

  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (d.rho[i] >= out.floor)
      kept.push_back(i);
    else
      out.excluded_mass += d.rho[i];
  }
  out.excluded_mass *= g.cell_volume();

  std::vector<std::vector<ComplexField>> table(n, std::vector<ComplexField>(n));
  for (int j = 0; j < n; ++j)
    for (int k = j; k < n; ++k) table[j][k] = tabulate_kernel(u.grid, weight.hessian_kernel(j, k));

  const std::size_t N = g.points_per_axis;
  double s = 0.0;
  for (std::size_t x : kept) {
    const Index3 ix = g.unflatten(x);
    for (std::size_t y : kept) {
      const Index3 iy = g.unflatten(y);
      Index3 diff{0, 0, 0};
      for (int a = 0; a < n; ++a) diff[a] = (ix[a] + N - iy[a]) % N;
      const std::size_t slot = g.flatten(diff);
      const double ryx = std::sqrt(d.rho[y] / d.rho[x]);
      double J[3];
      for (int a = 0; a < n; ++a) J[a] = ryx * d.p[a][x] - d.p[a][y] / ryx;
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) s += table[std::min(j, k)][std::max(j, k)][slot].real() * J[j] * J[k];
    }
  }
  out.value = s * g.cell_volume() * g.cell_volume();
  return out;
}

double delta_limit_rhs_1d(const ComplexField& u, const NLSParams& params) {
  if (u.grid->dim != 1) throw ContractError("delta_limit_rhs_1d requires a 1D grid");
  params.validate();
  const PointwiseDensities d = pointwise_densities(u);
  const double c = params.potential_coefficient();
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    s += 2.0 * d.grad_rho[0][i] * d.grad_rho[0][i] + 2.0 * c * std::pow(d.rho[i], 0.5 * (params.exponent + 3.0));
  return s * u.grid->cell_volume();
}

EpsilonFit extrapolate_epsilon(const std::vector<double>& eps, const std::vector<double>& values) {
  if (eps.size() != 3 || values.size() != 3) throw ContractError("epsilon extrapolation needs exactly three points");
  double A[3][4];
  for (int r = 0; r < 3; ++r) {
    if (!(eps[r] > 0.0)) throw ContractError("extrapolation epsilons must be positive");
    A[r][0] = 1.0;
    A[r][1] = eps[r] * eps[r] * std::log(eps[r]);
    A[r][2] = eps[r] * eps[r];
    A[r][3] = values[r];
  }
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
    if (std::abs(A[piv][c]) < 1e-300) throw ContractError("extrapolation epsilons must be distinct");
    for (int k = 0; k < 4; ++k) std::swap(A[c][k], A[piv][k]);
    for (int r = 0; r < 3; ++r) {
      if (r == c) continue;
      const double f = A[r][c] / A[c][c];
      for (int k = c; k < 4; ++k) A[r][k] -= f * A[c][k];
    }
  }
  return {A[0][3] / A[0][0], A[1][3] / A[1][1], A[2][3] / A[2][2]};
}

Identity1dReport identity_1d(const Trajectory& trajectory, double dt, const NLSParams& params,
                             const std::vector<double>& epsilons, std::size_t probe_stride) {
  const auto& snaps = trajectory.snapshots;
  if (snaps.size() < 3) throw ContractError("identity_1d needs at least three consecutive snapshots");
  if (snaps.front().grid->dim != 1) throw ContractError("identity_1d requires a 1D trajectory");
  if (!(dt > 0.0)) throw ContractError("identity_1d needs dt > 0");
  if (epsilons.empty()) throw ContractError("identity_1d needs at least one epsilon");
  if (probe_stride == 0) probe_stride = 1;
  params.validate();

  Identity1dReport rep;
  rep.epsilons = epsilons;
  std::vector<std::size_t> probes;
  for (std::size_t i = 1; i + 1 < snaps.size(); i += probe_stride) probes.push_back(i);
  for (std::size_t i : probes) rep.probe_times.push_back(trajectory.times.empty() ? dt * i : trajectory.times[i]);

  const GridPtr grid = snaps.front().grid;
  for (double eps : epsilons) {
    const InteractionEvaluator ev(grid, Weight::abs_smoothed(1, eps));
    std::vector<double> M;
    M.reserve(snaps.size());
    for (const auto& s : snaps) M.push_back(ev.action(s));
    std::vector<double> fd, rhs;
    double scale = 0.0, worst = 0.0;
    for (std::size_t i : probes) {
      const InteractionTerms t = ev.terms(snaps[i], params);
      fd.push_back((M[i + 1] - M[i - 1]) / (2.0 * dt));
      rhs.push_back(t.sum());
      scale = std::max(scale, t.scale());
    }
    for (std::size_t q = 0; q < fd.size(); ++q) worst = std::max(worst, std::abs(fd[q] - rhs[q]));
    rep.max_identity_residual.push_back(scale > 0.0 ? worst / scale : worst);

    double mscale = 0.0, dec = 0.0;
    for (double m : M) mscale = std::max(mscale, std::abs(m));
    for (std::size_t i = 0; i + 1 < M.size(); ++i) dec = std::min(dec, M[i + 1] - M[i]);
    rep.worst_decrease.push_back(mscale > 0.0 ? dec / mscale : dec);

    rep.fd.push_back(std::move(fd));
    rep.rhs.push_back(std::move(rhs));
    rep.action.push_back(std::move(M));
  }

  for (std::size_t q = 0; q < probes.size(); ++q) {
    const double delta = delta_limit_rhs_1d(snaps[probes[q]], params);
    rep.delta_limit.push_back(delta);
    if (epsilons.size() == 3) {
      const EpsilonFit fit = extrapolate_epsilon(epsilons, {rep.rhs[0][q], rep.rhs[1][q], rep.rhs[2][q]});
      rep.extrapolated.push_back(fit.limit);
      const double gap = std::abs(fit.limit - delta);
      rep.max_gap = std::max(rep.max_gap, delta != 0.0 ? gap / std::abs(delta) : gap);
    }
  }
  return rep;
}

AuditLedger theorem_audit(const Trajectory& trajectory, const NLSParams& params, const Weight& weight,
                          std::size_t lattice_stride) {
  const auto& snaps = trajectory.snapshots;
  if (snaps.empty()) throw ContractError("theorem_audit needs at least one snapshot");
  if (snaps.size() != trajectory.times.size()) throw ContractError("trajectory times and snapshots differ in length");
  if (weight.kind() != Weight::Kind::abs_smoothed) throw ContractError("theorem_audit uses the smoothed-modulus weight");
  params.validate();
  const GridPtr grid = snaps.front().grid;
  const Grid& g = *grid;
  require_weight_grid(weight, g);
  if (lattice_stride == 0) lattice_stride = 1;

  AuditLedger led;
  led.dim = g.dim;
  led.applicable = params.lambda >= 0.0;
  led.mass0 = std::pow(l2_norm(snaps.front()), 2);

  std::unique_ptr<ConvolutionKernel> riesz;
  if (g.dim >= 2) {
    const double eps = weight.epsilon();
    const double diag = eps > 0.0 ? 1.0 / eps : riesz_cell_average(g.dim, g.spacing);
    riesz = std::make_unique<ConvolutionKernel>(grid, [eps, diag](const Vec3& d) {
      const double r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
      return r2 == 0.0 ? diag : 1.0 / std::sqrt(r2 + eps * eps);
    });
  }

  const double c = params.potential_coefficient();
  std::vector<double> smooth_t, pot_t, l4_t;
  for (const auto& u : snaps) {
    const PointwiseDensities d = pointwise_densities(u);
    double sm = 0.0, po = 0.0, l4 = 0.0;
    if (g.dim == 1) {
      for (std::size_t i = 0; i < u.size(); ++i) {
        sm += d.grad_rho[0][i] * d.grad_rho[0][i];
        po += c * std::pow(d.rho[i], 0.5 * (params.exponent + 3.0));
      }
    } else {
      const ComplexField rho = as_field(grid, d.rho);
      const ComplexField conv = riesz->apply(rho);
      const auto lap_rho = real_values(laplacian(rho));
      const auto G = potential_density(u, params);
      const double n1 = g.dim - 1.0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        sm += 0.5 * n1 * (-lap_rho[i]) * conv[i].real();
        po += n1 * G[i] * conv[i].real();
      }
    }
    for (std::size_t i = 0; i < u.size(); ++i) l4 += d.rho[i] * d.rho[i];
    smooth_t.push_back(sm * g.cell_volume());
    pot_t.push_back(po * g.cell_volume());
    l4_t.push_back(l4 * g.cell_volume());

    const ComplexField My = morawetz_action_all_centers(u, weight);
    for (std::size_t i = 0; i < My.size(); ++i) {
      const Index3 idx = g.unflatten(i);
      bool on_lattice = true;
      for (int a = 0; a < g.dim; ++a) on_lattice = on_lattice && idx[a] % lattice_stride == 0;
      if (on_lattice) led.sup_action = std::max(led.sup_action, std::abs(My[i].real()));
    }
    const VectorField grad = gradient(u);
    double gn = 0.0;
    for (int a = 0; a < grad.dim(); ++a) gn += std::pow(l2_norm(grad[a]), 2);
    led.sup_gradient = std::max(led.sup_gradient, std::sqrt(gn));
  }

  auto trapezoid = [&](const std::vector<double>& f) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < f.size(); ++i)
      s += 0.5 * (f[i] + f[i + 1]) * (trajectory.times[i + 1] - trajectory.times[i]);
    return s;
  };
  led.lhs_smoothing = trapezoid(smooth_t);
  led.lhs_potential = trapezoid(pot_t);
  if (g.dim == 3) led.l4_spacetime = trapezoid(l4_t);

  led.rhs_bound = led.mass0 * led.sup_action;
  led.margin = led.rhs_bound - led.lhs();
  led.pass = led.applicable && led.lhs() <= led.rhs_bound * (1.0 + 1e-6);
  led.remark_bound = std::pow(led.mass0, 1.5) * std::sqrt(led.sup_gradient);
  led.remark_pass = led.sup_action <= led.remark_bound * (1.0 + 1e-6);
  led.schwarz_bound = std::sqrt(led.mass0) * led.sup_gradient;
  led.schwarz_pass = led.sup_action <= led.schwarz_bound * (1.0 + 1e-6);
  return led;
}

}  // namespace mlab
