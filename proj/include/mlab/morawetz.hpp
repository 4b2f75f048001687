#pragma once

#include <memory>
#include <vector>

#include "mlab/field.hpp"
#include "mlab/nls.hpp"
#include "mlab/spectral.hpp"
#include "mlab/weight.hpp"

namespace mlab {

/// Pointwise quadratic densities of u, computed without dealiasing so the
/// algebraic identity rho * R_jk = 1/4 d_j rho d_k rho + p_j p_k holds on the grid.
///   rho = |u|^2, p_j = Im(conj(u) d_j u), grad_rho_j = 2 Re(conj(u) d_j u),
///   R_jk = Re(conj(d_j u) d_k u)
struct PointwiseDensities {
  std::vector<double> rho;
  std::vector<std::vector<double>> p;
  std::vector<std::vector<double>> grad_rho;
  std::vector<std::vector<std::vector<double>>> R;
};
PointwiseDensities pointwise_densities(const ComplexField& u);

// ---------------------------------------------------------------------------
// One-particle action M_y = int grad a(x - y) . p(x) dx.

double morawetz_action(const ComplexField& u, const Vec3& center, const Weight& weight);

/// M_y for every grid point y at once, by one correlation per axis.
ComplexField morawetz_action_all_centers(const ComplexField& u, const Weight& weight);

/// d/dt M_y = int lap a (-1/2 lap rho) + int lap a G + 2 int hess a : Re(grad conj(u) (x) grad u),
/// G = lambda (p-1)/(p+1) |u|^(p+1).
struct OneParticleRhs {
  double smoothing = 0.0;
  double potential = 0.0;
  double hessian = 0.0;
  double total() const noexcept { return smoothing + potential + hessian; }
  double scale() const noexcept;
};
OneParticleRhs dt_morawetz_rhs(const ComplexField& u, const Vec3& center, const Weight& weight, const NLSParams& params);

// ---------------------------------------------------------------------------
// Interaction action M = int rho(y) M_y dy and its four-term derivative.

struct InteractionTerms {
  double I = 0.0;    // int int rho(y) lap a(x-y) (-1/2 lap rho)(x)
  double II = 0.0;   // int int rho(y) lap a(x-y) G(x)
  double III = 0.0;  // 2 int int rho(y) a_jk(x-y) R_jk(x)
  double IV = 0.0;   // -2 int int a_jk(x-y) p_j(y) p_k(x)
  double sum() const noexcept { return I + II + III + IV; }
  double scale() const noexcept;
};

/// Periodic correlation kernels of one displacement weight on one grid,
/// tabulated and transformed once.
class InteractionEvaluator {
 public:
  InteractionEvaluator(GridPtr grid, Weight weight);

  double action(const ComplexField& u) const;
  InteractionTerms terms(const ComplexField& u, const NLSParams& params) const;
  const Weight& weight() const noexcept { return weight_; }

 private:
  GridPtr grid_;
  Weight weight_;
  std::vector<ConvolutionKernel> grad_;
  std::vector<std::vector<std::shared_ptr<ConvolutionKernel>>> hess_;
  std::unique_ptr<ConvolutionKernel> lap_;
};

double interaction_action(const ComplexField& u, const Weight& weight);
InteractionTerms interaction_rhs_terms(const ComplexField& u, const Weight& weight, const NLSParams& params);

// O(N^(2n)) double sums for small grids.
double interaction_action_direct(const ComplexField& u, const Weight& weight);
InteractionTerms interaction_rhs_terms_direct(const ComplexField& u, const Weight& weight, const NLSParams& params);

/// int int a_jk(x - y) J_j J_k over pairs with rho(x), rho(y) >= floor,
/// J(x, y) = sqrt(rho(y)/rho(x)) p(x) - sqrt(rho(x)/rho(y)) p(y).
struct CurrentBound {
  double value = 0.0;
  double floor = 0.0;
  double excluded_mass = 0.0;  // int of rho over points below the floor
};
CurrentBound two_point_current_bound(const ComplexField& u, const Weight& weight, double floor_ratio = 1e-8);

// ---------------------------------------------------------------------------
// One-dimensional identity and its delta-weight limit.

/// 2 int (d_x rho)^2 + 2 lambda (p-1)/(p+1) int |u|^(p+3)
double delta_limit_rhs_1d(const ComplexField& u, const NLSParams& params);

struct EpsilonFit {
  double limit = 0.0;  // c in c + a eps^2 ln eps + b eps^2
  double log_coefficient = 0.0;
  double square_coefficient = 0.0;
};
/// Exact fit through three (eps, value) pairs.
EpsilonFit extrapolate_epsilon(const std::vector<double>& eps, const std::vector<double>& values);

struct Identity1dReport {
  std::vector<double> epsilons;
  std::vector<double> probe_times;
  // [eps][probe]
  std::vector<std::vector<double>> fd;
  std::vector<std::vector<double>> rhs;
  std::vector<std::vector<double>> action;  // M_eps at every snapshot
  std::vector<double> max_identity_residual;  // per eps, relative to max |rhs terms|
  std::vector<double> worst_decrease;         // per eps, min over steps of dM, relative to max |M|
  std::vector<double> extrapolated;           // per probe
  std::vector<double> delta_limit;            // per probe
  double max_gap = 0.0;                       // max relative |extrapolated - delta_limit|
};

/// Snapshots must be consecutive with spacing dt. Probes every probe_stride
/// interior snapshots. With three epsilons the delta limit is extrapolated.
Identity1dReport identity_1d(const Trajectory& trajectory, double dt, const NLSParams& params,
                             const std::vector<double>& epsilons, std::size_t probe_stride = 1);

// ---------------------------------------------------------------------------
// Inequality audit of the space-time smoothing estimate.

struct AuditLedger {
  bool applicable = true;  // false for focusing (lambda < 0)
  int dim = 1;
  double lhs_smoothing = 0.0;
  double lhs_potential = 0.0;
  double rhs_bound = 0.0;       // mass(u0) * sup_{t, y} |M_y(t)|
  double margin = 0.0;          // rhs_bound - lhs
  bool pass = false;            // lhs <= rhs_bound (1 + 1e-6)
  double mass0 = 0.0;
  double sup_action = 0.0;      // sup |M_y| over times and lattice centres
  double sup_gradient = 0.0;    // sup_t ||grad u||_L2
  double remark_bound = 0.0;    // mass^(3/2) sup ||grad u||^(1/2)
  bool remark_pass = false;
  double schwarz_bound = 0.0;   // mass^(1/2) sup ||grad u||, always >= sup |M_y|
  bool schwarz_pass = false;
  double l4_spacetime = 0.0;    // ||u||_{L^4 L^4}^4, reported in 3D only
  double lhs() const noexcept { return lhs_smoothing + lhs_potential; }
};

/// Time integrals by the trapezoid rule over the trajectory's snapshot times.
AuditLedger theorem_audit(const Trajectory& trajectory, const NLSParams& params, const Weight& weight,
                          std::size_t lattice_stride = 4);

}  // namespace mlab
