#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mlab/field.hpp"

namespace mlab {

enum class Direction { forward, inverse };

/// Discrete Fourier transform between position and frequency space.
///
/// Forward is unnormalized, u_hat(k) = sum_x u(x) exp(-i k.x); inverse divides
/// by N^n. Throws ContractError when the field's space tag does not match the
/// direction's source space.
ComplexField transform(const ComplexField& field, Direction direction);

/// Properly normalized L^2 norm squared of a frequency-space field:
/// h^n / N^n * sum |u_hat|^2, which equals the position-space integral of |u|^2.
double spectral_norm_sq(const ComplexField& freq);

using Symbol = std::function<cplx(const Vec3& xi)>;

/// Returns the inverse transform of symbol(xi) * u_hat(xi).
ComplexField apply_multiplier(const ComplexField& field, const Symbol& symbol);
/// Same with a symbol pre-tabulated in FFT storage order.
ComplexField apply_multiplier(const ComplexField& field, std::span<const cplx> table);
std::vector<cplx> tabulate_symbol(const Grid& grid, const Symbol& symbol);

// Odd-order derivatives drop the Nyquist mode so real fields stay real.
ComplexField partial_derivative(const ComplexField& field, int axis);
VectorField gradient(const ComplexField& field);
ComplexField divergence(const VectorField& v);
ComplexField laplacian(const ComplexField& field);

/// D^alpha with symbol |xi|^alpha. For alpha != 0 the zero mode is mapped
/// to 0; alpha == 0 is the identity. Requires alpha in [-3, 3].
ComplexField fractional_derivative(const ComplexField& field, double alpha);

/// <nabla>^alpha with symbol (1 + |xi|^2)^(alpha/2).
ComplexField bessel_potential(const ComplexField& field, double alpha);

/// 2/3-rule truncation: keeps modes with 3|k_j| < N on every axis.
bool dealias_keeps(const Grid& grid, std::size_t flat) noexcept;
ComplexField dealias(const ComplexField& field);

/// Trapezoidal (spectrally exact) quadrature h^n * sum values.
cplx integrate(const ComplexField& field);
/// Integral of conj(f) * g.
cplx inner(const ComplexField& f, const ComplexField& g);
double l2_norm(const ComplexField& f);

// ---------------------------------------------------------------------------
// Displacement kernels on the torus.
//
// A kernel K(x - y) is sampled at the minimum-image displacement. For a
// displacement component sitting exactly on the Nyquist offset -L/2 the value
// is averaged over both signs of that component, so tabulated kernels keep
// the parity K(-d) = +-K(d) of the underlying function, and positive
// semidefinite matrix kernels stay positive semidefinite.

using KernelFn = std::function<double(const Vec3& d)>;

/// Kernel value at a displacement already reduced to [-L/2, L/2).
double symmetrized_eval(const KernelFn& kernel, const Vec3& d, const Grid& grid);

/// Minimum-image displacement x - y, componentwise.
Vec3 displacement(const Vec3& x, const Vec3& y, const Grid& grid) noexcept;

/// Kernel samples indexed by displacement: slot i holds K(wrap(i * h)).
ComplexField tabulate_kernel(const GridPtr& grid, const KernelFn& kernel);

/// Periodic convolution (K * f)(x) = h^n sum_y K(x - y) f(y) with a kernel
/// transformed once.
class ConvolutionKernel {
 public:
  ConvolutionKernel(const GridPtr& grid, const KernelFn& kernel);
  explicit ConvolutionKernel(const ComplexField& table);

  ComplexField apply(const ComplexField& f) const;
  const ComplexField& spectrum() const noexcept { return hat_; }

 private:
  ComplexField hat_;
};

/// Convolution of a real density with 1/sqrt(|x|^2 + eps^2) (eps > 0) or with
/// 1/|x| (eps == 0, diagonal cell replaced by the cell average of 1/|x|).
/// Rejects n = 1 and non-real densities.
ComplexField riesz_potential(const ComplexField& density, double eps);

/// Cell average of 1/|x| over [-h/2, h/2]^n for n = 2, 3.
double riesz_cell_average(int dim, double spacing);

}  // namespace mlab
