#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mlab/field.hpp"

namespace mlab {

/// Power-type NLS  i u_t + lap u = lambda |u|^(p-1) u.
struct NLSParams {
  double lambda = 1.0;
  double exponent = 3.0;  // p >= 1

  void validate() const;
  /// lambda (p - 1) / (p + 1), the coefficient of |u|^(p+1) in the stress.
  double potential_coefficient() const noexcept { return lambda * (exponent - 1.0) / (exponent + 1.0); }
  /// lambda |u|^(p-1) evaluated from |u|^2, with limit 0 at zeros of u for p > 1.
  double nonlinearity(double modulus_sq) const noexcept;
};

enum class Method { strang, rk4_spectral };

struct SolverConfig {
  double dt = 1e-3;
  long steps = 1;
  Method method = Method::strang;
  bool dealias = true;
  long observer_stride = 1;
  bool keep_snapshots = true;
  bool check_decay = true;
  double decay_tolerance = 1e-10;
  double blowup_factor = 1e6;

  void validate() const;
  double horizon() const noexcept { return dt * static_cast<double>(steps); }
};

struct Trajectory {
  std::vector<double> times;
  std::vector<ComplexField> snapshots;
};

/// A named functional evaluated on snapshots; returns one value per column.
struct Observer {
  std::string name;
  std::vector<std::string> columns;
  std::function<std::vector<double>(const ComplexField& u, double t)> fn;
};

struct EvolveResult {
  Trajectory trajectory;
  std::vector<double> observer_times;
  std::map<std::string, std::vector<std::vector<double>>> series;
  double max_boundary_ratio = 0.0;
  bool decay_ok = true;
};

/// Reusable time stepper with precomputed propagator tables.
///
/// Sign conventions follow u_t = i lap u - i lambda |u|^(p-1) u: the kinetic
/// propagator is exp(-i |xi|^2 t) and the nonlinear phase exp(-i lambda |u|^(p-1) t).
class Propagator {
 public:
  Propagator(GridPtr grid, NLSParams params, double dt, Method method, bool dealias);

  void step(std::vector<cplx>& u) const;
  const GridPtr& grid() const noexcept { return grid_; }

 private:
  void strang(std::vector<cplx>& u) const;
  void rk4(std::vector<cplx>& u) const;
  void rhs(const std::vector<cplx>& u, std::vector<cplx>& out) const;

  GridPtr grid_;
  NLSParams params_;
  double dt_;
  Method method_;
  std::vector<cplx> half_kinetic_;
  std::vector<cplx> half_kinetic_masked_;
  std::vector<double> mask_;
  std::vector<double> neg_k2_;
};

ComplexField step_strang(const ComplexField& u, const NLSParams& params, double dt, bool dealias = true);
ComplexField step_rk4_spectral(const ComplexField& u, const NLSParams& params, double dt, bool dealias = true);

/// Runs the configured stepper from u0, calling each observer at t = 0 and
/// every observer_stride steps. Throws NumericalAbort on non-finite values or
/// when max|u| exceeds blowup_factor times its initial value, and
/// ContractError when u0 violates the boundary-decay requirement.
EvolveResult evolve(const ComplexField& u0, const NLSParams& params, const SolverConfig& config,
                    std::span<const Observer> observers = {});

/// L^2 norm of i (u_next - u_prev) / (2 dt) + lap u_now - lambda |u_now|^(p-1) u_now.
double nls_residual(const ComplexField& u_prev, const ComplexField& u_now, const ComplexField& u_next,
                    const NLSParams& params, double dt);

/// max |u| on the box faces (index 0 along any axis) divided by max |u|.
double boundary_ratio(const ComplexField& u);

// ---------------------------------------------------------------------------
// Initial data.

struct InitialData {
  enum class Kind { gaussian, soliton_1d_cubic, random_h1 };
  Kind kind = Kind::gaussian;

  // gaussian: A exp(-|x - x0|^2 / (2 w^2)) exp(i v.x + i chirp |x - x0|^2)
  double amplitude = 1.0;
  double width = 1.0;
  double chirp = 0.0;
  std::vector<double> center;    // empty = origin
  std::vector<double> velocity;  // empty = 0

  // soliton_1d_cubic: sqrt(2) eta sech(eta (x - x0)) exp(i v x / 2); uses center/velocity[0]
  double eta = 1.0;

  // random_h1: coefficients (1 + |xi|^2)^(-s/2) with random phases, optionally
  // band-limited to |xi_j| <= max_wavenumber and shaped by a Gaussian envelope.
  std::uint64_t seed = 0;
  double decay_rate = 2.0;
  double mass = 1.0;
  double envelope_width = 0.0;  // 0 = no envelope
  double max_wavenumber = 0.0;  // 0 = dealiasing cut only
};

ComplexField make_initial_data(const InitialData& spec, const GridPtr& grid);

/// Exact focusing-cubic (lambda = -1, p = 3) soliton at time t:
/// sqrt(2) eta sech(eta (x - x0 - v t)) exp(i (v x / 2 + (eta^2 - v^2 / 4) t)).
ComplexField soliton_exact(const GridPtr& grid, double eta, double x0, double velocity, double t);

std::string to_string(Method m);
Method method_from_string(const std::string& s);
std::string to_string(InitialData::Kind k);
InitialData::Kind initial_kind_from_string(const std::string& s);

}  // namespace mlab
