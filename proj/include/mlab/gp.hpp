#pragma once

#include <vector>

#include "mlab/field.hpp"
#include "mlab/nls.hpp"

namespace mlab {

/// Convex combination sum_m w_m |phi_m><phi_m|^(tensor k) of factorized states.
///
/// gamma^(k)(x; x') = sum_m w_m prod_{j<=k} phi_m(x_j) conj(phi_m(x'_j)). Orbitals
/// have unit mass, so the family is admissible for every k. An empty mixture
/// is the zero state.
struct MixtureState {
  std::vector<double> weights;
  std::vector<ComplexField> orbitals;

  MixtureState() = default;
  /// Throws ContractError unless weights are positive and sum to 1, and every
  /// orbital has unit mass on a common grid. `normalized = false` skips the
  /// sum and mass checks (linearity probes).
  MixtureState(std::vector<double> w, std::vector<ComplexField> phi, bool normalized = true);

  std::size_t size() const noexcept { return weights.size(); }
  bool empty() const noexcept { return weights.empty(); }
  const GridPtr& grid() const;
};

/// Explicit kernel gamma^(k)(x_1..x_k; x'_1..x'_k) on a 1D grid, stored with
/// slot order (x_1, ..., x_k, x'_1, ..., x'_k) and the last slot fastest.
struct MarginalTensor {
  int k = 1;
  GridPtr grid;
  std::vector<cplx> values;

  MarginalTensor() = default;
  MarginalTensor(int k, GridPtr grid);

  std::size_t points() const noexcept { return grid->points_per_axis; }
  std::size_t slots() const noexcept { return 2 * static_cast<std::size_t>(k); }
  std::size_t stride(std::size_t slot) const noexcept;

  /// h^k sum_x gamma(x; x)
  cplx trace() const;
  /// max |gamma(x; x') - conj(gamma(x'; x))|
  double hermiticity_residual() const;
  /// max deviation under simultaneous transposition of particles i, j, over all pairs
  double symmetry_residual() const;
  /// L^2 norm with quadrature weight h^(2k)
  double norm() const;
};

/// Maximum entries of an explicit tensor.
inline constexpr std::size_t kTensorEntryLimit = std::size_t{1} << 24;

MarginalTensor marginal(const MixtureState& state, int k);
MarginalTensor partial_trace(const MarginalTensor& gamma);

/// (B+_j gamma^(k+1))(x; x') = gamma^(k+1)(x, x_j; x', x_j), B-_j uses x'_j.
/// j counts from 1; sign is +1 or -1. The result has k = gamma.k - 1.
MarginalTensor contract_B(const MarginalTensor& gamma_kplus1, int j, int sign);
/// Same from a mixture without building gamma^(k+1).
MarginalTensor contract_B(const MixtureState& state, int k, int j, int sign);

/// lambda sum_j (B+_j - B-_j) gamma^(k+1), from the mixture.
MarginalTensor interaction_term(const MixtureState& state, int k, double lambda);

/// Spectral Laplacian in one slot of the tensor.
MarginalTensor slot_laplacian(const MarginalTensor& gamma, std::size_t slot);
/// Spectral d/dx in one slot, Nyquist mode zeroed.
MarginalTensor slot_derivative(const MarginalTensor& gamma, std::size_t slot);

struct MixtureTrajectory {
  std::vector<double> times;
  std::vector<MixtureState> states;
};

/// Evolves every orbital by the cubic NLS with coupling lambda.
MixtureTrajectory evolve_mixture(const MixtureState& state, double lambda, const SolverConfig& config);

/// L^2 norm of i (gamma_next - gamma_prev) / (2 dt) + sum_j (lap_xj - lap_x'j) gamma_now
/// - lambda sum_j (B+_j - B-_j) gamma^(k+1)_now.
double hierarchy_residual(const MixtureState& prev, const MixtureState& now, const MixtureState& next, int k,
                          double dt, double lambda);

/// || S^(k, alpha) gamma ||_L2 with S the product of <nabla>^alpha over all slots.
double h_alpha_norm(const MarginalTensor& gamma, double alpha);
/// Mixture closed form: sqrt(sum_{m,m'} w_m w_m' |<psi_m, psi_m'>|^(2k)), psi = <nabla>^alpha phi.
double h_alpha_norm(const MixtureState& state, int k, double alpha);

struct HXiNorm {
  double partial = 0.0;            // sum_{k=1}^{k_max} xi^k ||gamma^(k)||
  std::vector<double> terms;       // ||gamma^(k)||, k = 1..k_max
  double orbital_bound = 0.0;      // c = max_m ||phi_m||^2_{H^alpha}
  double tail_bound = 0.0;         // (xi c)^(k_max+1) / (1 - xi c)
  bool divergent = false;          // xi c >= 1
};
HXiNorm h_xi_norm(const MixtureState& state, int k_max, double xi, double alpha);

struct GPDensities {
  ComplexField rho;
  VectorField P;
};
/// rho = gamma^(1)(x; x), P = (1/2i)(d_x - d_x') gamma^(1) on the diagonal.
GPDensities gp_density_and_momentum(const MarginalTensor& gamma1);
/// rho = sum w |phi|^2, P = sum w Im(conj(phi) grad phi); any dimension.
GPDensities gp_density_and_momentum(const MixtureState& state);

struct ContinuityCheck {
  double kinetic_residual = 0.0;
  double interaction_contribution = 0.0;
  double scale = 0.0;  // ||d_t rho|| + 2 ||div P||
};
ContinuityCheck gp_continuity_check(const MixtureState& prev, const MixtureState& now, const MixtureState& next,
                                    double dt, double lambda);

}  // namespace mlab
