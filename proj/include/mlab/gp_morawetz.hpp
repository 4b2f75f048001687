#pragma once

#include <array>
#include <memory>
#include <string_view>
#include <vector>

#include "mlab/gp.hpp"
#include "mlab/weight.hpp"

namespace mlab {

/// Two-body weight a(x, y). Either a(x, y) = a~(x - y) or a(x, y) = a~(x - c),
/// independent of y.
struct GPWeight {
  enum class Form { displacement, x_only };
  Form form = Form::displacement;
  Weight weight = Weight::abs_smoothed(1, 1.0);
  Vec3 center{};

  static GPWeight displacement(Weight w) { return {Form::displacement, std::move(w), {}}; }
  static GPWeight x_only(Weight w, Vec3 c = {}) { return {Form::x_only, std::move(w), c}; }
};

// ---------------------------------------------------------------------------
// One particle: M_a = int grad a(x) . P(x).

double gp_one_particle_action(const MixtureState& state, const Weight& weight, const Vec3& center = {});

struct GPOneParticleTerms {
  double T1 = 0.0;        // -1/2 int (lap lap a) gamma1(x; x)
  double T2 = 0.0;        // lambda/2 int (lap a) gamma2(x, x; x, x)
  double T3 = 0.0;        // 2 Re int hess a : d d' gamma1 on the diagonal
  double T1_chain = 0.0;  // -1/2 int (lap a) lap gamma1(x; x), T1 after one integration by parts
  double total() const noexcept { return T1 + T2 + T3; }
  double chain_total() const noexcept { return T1_chain + T2 + T3; }
  double scale() const noexcept;
};
GPOneParticleTerms gp_one_particle_rhs(const MixtureState& state, const Weight& weight, double lambda,
                                       const Vec3& center = {});

// ---------------------------------------------------------------------------
// Interaction: M_a = int int grad_x a(x, y) . P_x(x, y), dM_a/dt = 1/2 (A1 + A2 + A3 + A4).

struct GPInteractionTerms {
  // Raw terms, each evaluated from its Fourier-side definition moved to
  // position space on the diagonal.
  double A1 = 0.0;  // kinetic term in the x particle
  double A2 = 0.0;  // kinetic term in the y particle
  double A3 = 0.0;  // contraction into the x particle
  double A4 = 0.0;  // contraction into the y particle, zero in exact arithmetic
  // Closed form of the identity: dM_a/dt = Theta1 + Theta2 + Theta3 + Theta4.
  double theta1 = 0.0;  // -1/2 int int (lap_x a) lap_x gamma2(x, y; x, y)
  double theta2 = 0.0;  // lambda/2 int int (lap_x a) gamma3(x, y, x; x, y, x)
  double theta3 = 0.0;  // 2 Re int int hess_x a : d_x d_x' gamma2(x, y; x', y) on the diagonal
  double theta4 = 0.0;  // 2 int int d_xj d_yl a P_j(x) P_l(y), per mixture term

  double raw_rate() const noexcept { return 0.5 * (A1 + A2 + A3 + A4); }
  double theorem_rate() const noexcept { return theta1 + theta2 + theta3 + theta4; }
  double raw_scale() const noexcept;
  double theorem_scale() const noexcept;
};

/// Raw-to-closed-form bookkeeping. raw = factor * (sum of the listed theorem terms).
struct TermMapping {
  std::string_view raw;
  std::string_view theorem;
  double factor;
  std::string_view nls_pure_state;
};
inline constexpr std::array<TermMapping, 4> kTermMapping{{
    {"A1", "theta1 + theta3", 2.0, "I + III"},
    {"A2", "theta4", 2.0, "IV"},
    {"A3", "theta2", 2.0, "II"},
    {"A4", "-", 0.0, "-"},
}};

/// Kernels for one weight on one grid, tabulated once.
class GPMorawetzEvaluator {
 public:
  GPMorawetzEvaluator(GridPtr grid, GPWeight weight);
  ~GPMorawetzEvaluator();
  GPMorawetzEvaluator(GPMorawetzEvaluator&&) noexcept;
  GPMorawetzEvaluator& operator=(GPMorawetzEvaluator&&) noexcept;

  double action(const MixtureState& state) const;
  GPInteractionTerms rhs(const MixtureState& state, double lambda) const;
  const GPWeight& weight() const noexcept { return weight_; }

 private:
  struct Kernels;
  GridPtr grid_;
  GPWeight weight_;
  std::unique_ptr<Kernels> k_;
};

double gp_interaction_action(const MixtureState& state, const GPWeight& weight);
GPInteractionTerms gp_interaction_rhs(const MixtureState& state, const GPWeight& weight, double lambda);

/// A1..A4 from explicit gamma^(2) and gamma^(3) tensors with slot derivatives
/// and contraction operators. 1D, displacement weight, grids with N^6 <= 2^24.
struct ExplicitInteractionTerms {
  double A1 = 0.0, A2 = 0.0, A3 = 0.0, A4 = 0.0;
};
ExplicitInteractionTerms gp_interaction_rhs_explicit(const MixtureState& state, const Weight& weight, double lambda);

// ---------------------------------------------------------------------------
// Collapse of the interaction identity for a y-independent weight.

struct ReductionReport {
  GPInteractionTerms collapsed;  // interaction terms with a(x, y) = a(x)
  GPOneParticleTerms one_particle;
  // theta1 - T1_chain, theta2 - T2, theta3 - T3, theta4
  std::array<double, 4> theorem_delta{};
  // A1 - 2 (T1_chain + T3), A2, A3 - 2 T2, A4
  std::array<double, 4> raw_delta{};
  double max_theorem_delta() const noexcept;
  double max_raw_delta() const noexcept;
};
ReductionReport reduction_consistency(const MixtureState& state, const Weight& weight, double lambda,
                                      const Vec3& center = {});

}  // namespace mlab
