#include "mlab/nls.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "mlab/errors.hpp"
#include "mlab/spectral.hpp"

namespace mlab {

void NLSParams::validate() const {
  if (!std::isfinite(lambda)) throw ContractError("lambda must be finite");
  if (!(exponent >= 1.0) || !std::isfinite(exponent)) throw ContractError("nonlinearity exponent p must be >= 1");
}

double NLSParams::nonlinearity(double modulus_sq) const noexcept {
  if (exponent == 3.0) return lambda * modulus_sq;
  if (exponent == 1.0) return lambda;
  return lambda * std::pow(modulus_sq, 0.5 * (exponent - 1.0));
}

void SolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ContractError("dt must be positive");
  if (steps < 1) throw ContractError("steps must be positive");
  if (observer_stride < 1) throw ContractError("observer_stride must be positive");
  if (steps % observer_stride != 0) throw ContractError("observer_stride must divide steps");
}

Propagator::Propagator(GridPtr grid, NLSParams params, double dt, Method method, bool dealias)
    : grid_(std::move(grid)), params_(params), dt_(dt), method_(method) {
  params_.validate();
  const Grid& g = *grid_;
  const std::size_t n = g.size();
  half_kinetic_.resize(n);
  half_kinetic_masked_.resize(n);
  mask_.resize(n);
  neg_k2_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 xi = g.wavevector(i);
    const double k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    neg_k2_[i] = -k2;
    half_kinetic_[i] = std::polar(1.0, -0.5 * k2 * dt);
    mask_[i] = (!dealias || dealias_keeps(g, i)) ? 1.0 : 0.0;
    half_kinetic_masked_[i] = half_kinetic_[i] * mask_[i];
  }
}

void Propagator::step(std::vector<cplx>& u) const {
  if (method_ == Method::strang)
    strang(u);
  else
    rk4(u);
}

void Propagator::strang(std::vector<cplx>& u) const {
  ComplexField f(grid_, std::move(u));
  ComplexField hat = transform(f, Direction::forward);
  for (std::size_t i = 0; i < hat.size(); ++i) hat[i] *= half_kinetic_[i];
  f = transform(hat, Direction::inverse);
  for (auto& v : f.values) v *= std::polar(1.0, -params_.nonlinearity(std::norm(v)) * dt_);
  hat = transform(f, Direction::forward);
  for (std::size_t i = 0; i < hat.size(); ++i) hat[i] *= half_kinetic_masked_[i];
  u = std::move(transform(hat, Direction::inverse).values);
}

void Propagator::rhs(const std::vector<cplx>& u, std::vector<cplx>& out) const {
  const ComplexField f(grid_, u);
  ComplexField nl(grid_);
  for (std::size_t i = 0; i < u.size(); ++i) nl[i] = params_.nonlinearity(std::norm(u[i])) * u[i];
  const ComplexField uh = transform(f, Direction::forward);
  ComplexField nh = transform(nl, Direction::forward);
  for (std::size_t i = 0; i < nh.size(); ++i) nh[i] = cplx{0.0, 1.0} * (neg_k2_[i] * uh[i] - mask_[i] * nh[i]);
  out = std::move(transform(nh, Direction::inverse).values);
}

void Propagator::rk4(std::vector<cplx>& u) const {
  const std::size_t n = u.size();
  std::vector<cplx> k1, k2, k3, k4, tmp(n);
  rhs(u, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * dt_ * k1[i];
  rhs(tmp, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * dt_ * k2[i];
  rhs(tmp, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + dt_ * k3[i];
  rhs(tmp, k4);
  for (std::size_t i = 0; i < n; ++i) u[i] += dt_ / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

ComplexField step_strang(const ComplexField& u, const NLSParams& params, double dt, bool dealias) {
  if (u.space != Space::position) throw ContractError("step_strang expects a position-space field");
  const Propagator prop(u.grid, params, dt, Method::strang, dealias);
  ComplexField out = u;
  prop.step(out.values);
  return out;
}

ComplexField step_rk4_spectral(const ComplexField& u, const NLSParams& params, double dt, bool dealias) {
  if (u.space != Space::position) throw ContractError("step_rk4_spectral expects a position-space field");
  const Propagator prop(u.grid, params, dt, Method::rk4_spectral, dealias);
  ComplexField out = u;
  prop.step(out.values);
  return out;
}

double boundary_ratio(const ComplexField& u) {
  const Grid& g = *u.grid;
  const double peak = u.max_abs();
  if (peak == 0.0) return 0.0;
  double edge = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Index3 idx = g.unflatten(i);
    bool face = false;
    for (int a = 0; a < g.dim; ++a) face = face || idx[a] == 0;
    if (face) edge = std::max(edge, std::abs(u[i]));
  }
  return edge / peak;
}

EvolveResult evolve(const ComplexField& u0, const NLSParams& params, const SolverConfig& config,
                    std::span<const Observer> observers) {
  params.validate();
  config.validate();
  if (u0.space != Space::position) throw ContractError("evolve expects position-space initial data");

  ComplexField u = config.dealias ? dealias(u0) : u0;
  EvolveResult result;
  result.max_boundary_ratio = boundary_ratio(u);
  if (config.check_decay && result.max_boundary_ratio > config.decay_tolerance) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e > %.3e", result.max_boundary_ratio, config.decay_tolerance);
    throw ContractError(std::string("initial data does not decay at the box boundary (ratio ") + buf + ")");
  }

  const double initial_peak = u.max_abs();
  const Propagator prop(u.grid, params, config.dt, config.method, config.dealias);

  auto record = [&](double t) {
    result.observer_times.push_back(t);
    if (config.keep_snapshots) {
      result.trajectory.times.push_back(t);
      result.trajectory.snapshots.push_back(u);
    }
    for (const auto& obs : observers) result.series[obs.name].push_back(obs.fn(u, t));
    const double ratio = boundary_ratio(u);
    result.max_boundary_ratio = std::max(result.max_boundary_ratio, ratio);
    if (config.check_decay && ratio > config.decay_tolerance) result.decay_ok = false;
  };

  record(0.0);
  for (long s = 1; s <= config.steps; ++s) {
    prop.step(u.values);
    const double t = static_cast<double>(s) * config.dt;
    double peak = 0.0;
    for (const auto& v : u.values) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw NumericalAbort("non-finite field values", s, t);
      peak = std::max(peak, std::abs(v));
    }
    if (initial_peak > 0.0 && peak > config.blowup_factor * initial_peak)
      throw NumericalAbort("blow-up guard: max|u| exceeded " + std::to_string(config.blowup_factor) + " x initial", s,
                           t);
    if (s % config.observer_stride == 0) record(t);
  }
  return result;
}

double nls_residual(const ComplexField& u_prev, const ComplexField& u_now, const ComplexField& u_next,
                    const NLSParams& params, double dt) {
  require_same_grid(u_prev, u_now);
  require_same_grid(u_now, u_next);
  ComplexField r = laplacian(u_now);
  const cplx i_over = cplx{0.0, 1.0} / (2.0 * dt);
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] += i_over * (u_next[i] - u_prev[i]) - params.nonlinearity(std::norm(u_now[i])) * u_now[i];
  return l2_norm(r);
}

namespace {

std::vector<double> padded(const std::vector<double>& v, int dim, const char* what) {
  if (v.empty()) return std::vector<double>(3, 0.0);
  if (static_cast<int>(v.size()) != dim)
    throw ContractError(std::string(what) + " has " + std::to_string(v.size()) + " components on a " +
                        std::to_string(dim) + "D grid");
  std::vector<double> out(3, 0.0);
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

ComplexField random_h1(const InitialData& spec, const GridPtr& grid) {
  const Grid& g = *grid;
  if (!(spec.mass > 0.0)) throw ContractError("random_h1 needs a positive mass");
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * 3.14159265358979323846);
  ComplexField hat(grid, Space::frequency);
  for (std::size_t i = 0; i < hat.size(); ++i) {
    const Vec3 xi = g.wavevector(i);
    bool keep = dealias_keeps(g, i);
    if (spec.max_wavenumber > 0.0)
      for (int a = 0; a < g.dim; ++a) keep = keep && std::abs(xi[a]) <= spec.max_wavenumber;
    const double theta = phase(rng);  // drawn for every slot so the stream does not depend on the band
    if (!keep) continue;
    const double k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    hat[i] = std::polar(std::pow(1.0 + k2, -0.5 * spec.decay_rate), theta);
  }
  ComplexField u = transform(hat, Direction::inverse);
  if (spec.envelope_width > 0.0) {
    const double w2 = spec.envelope_width * spec.envelope_width;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const Vec3 x = g.position(i);
      u[i] *= std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (2.0 * w2));
    }
  }
  const double m = std::pow(l2_norm(u), 2);
  if (m == 0.0) throw ContractError("random_h1 produced an empty field (band too narrow)");
  u *= std::sqrt(spec.mass / m);
  return u;
}

}  // namespace

ComplexField make_initial_data(const InitialData& spec, const GridPtr& grid) {
  const Grid& g = *grid;
  switch (spec.kind) {
    case InitialData::Kind::gaussian: {
      if (!(spec.width > 0.0)) throw ContractError("gaussian width must be positive");
      const auto x0 = padded(spec.center, g.dim, "gaussian center");
      const auto v = padded(spec.velocity, g.dim, "gaussian velocity");
      ComplexField u(grid);
      const double w2 = spec.width * spec.width;
      for (std::size_t i = 0; i < u.size(); ++i) {
        const Vec3 x = g.position(i);
        double r2 = 0.0, phase = 0.0;
        for (int a = 0; a < g.dim; ++a) {
          r2 += (x[a] - x0[a]) * (x[a] - x0[a]);
          phase += v[a] * x[a];
        }
        u[i] = spec.amplitude * std::exp(-r2 / (2.0 * w2)) * std::polar(1.0, phase + spec.chirp * r2);
      }
      return u;
    }
    case InitialData::Kind::soliton_1d_cubic: {
      if (g.dim != 1) throw ContractError("soliton_1d_cubic requires a 1D grid");
      const auto x0 = padded(spec.center, 1, "soliton center");
      const auto v = padded(spec.velocity, 1, "soliton velocity");
      return soliton_exact(grid, spec.eta, x0[0], v[0], 0.0);
    }
    case InitialData::Kind::random_h1:
      return random_h1(spec, grid);
  }
  throw ContractError("unknown initial data kind");
}

ComplexField soliton_exact(const GridPtr& grid, double eta, double x0, double velocity, double t) {
  const Grid& g = *grid;
  if (g.dim != 1) throw ContractError("soliton_exact requires a 1D grid");
  if (!(eta > 0.0)) throw ContractError("soliton eta must be positive");
  ComplexField u(grid);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = g.coordinate(i);
    const double amp = std::sqrt(2.0) * eta / std::cosh(eta * (x - x0 - velocity * t));
    u[i] = amp * std::polar(1.0, 0.5 * velocity * x + (eta * eta - 0.25 * velocity * velocity) * t);
  }
  return u;
}

std::string to_string(Method m) { return m == Method::strang ? "strang" : "rk4_spectral"; }

Method method_from_string(const std::string& s) {
  if (s == "strang") return Method::strang;
  if (s == "rk4_spectral") return Method::rk4_spectral;
  throw ContractError("unknown solver method '" + s + "'");
}

std::string to_string(InitialData::Kind k) {
  switch (k) {
    case InitialData::Kind::gaussian:
      return "gaussian";
    case InitialData::Kind::soliton_1d_cubic:
      return "soliton_1d_cubic";
    case InitialData::Kind::random_h1:
      return "random_h1";
  }
  return "?";
}

InitialData::Kind initial_kind_from_string(const std::string& s) {
  if (s == "gaussian") return InitialData::Kind::gaussian;
  if (s == "soliton_1d_cubic") return InitialData::Kind::soliton_1d_cubic;
  if (s == "random_h1") return InitialData::Kind::random_h1;
  throw ContractError("unknown initial data kind '" + s + "'");
}

}  // namespace mlab
