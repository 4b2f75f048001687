#pragma once

#include <functional>
#include <string>

#include "mlab/grid.hpp"
#include "mlab/spectral.hpp"

namespace mlab {

/// Morawetz weight a(d) with closed-form derivatives, evaluated at a
/// displacement vector d (for a centred weight, d = x - y).
///
/// The smoothed-modulus family a_eps(d) = sqrt(|d|^2 + eps^2) has, with
/// s = sqrt(|d|^2 + eps^2):
///   grad a    = d / s
///   hess a    = I / s - d d^T / s^3                 (positive semidefinite)
///   lap a     = (n - 1) / s + eps^2 / s^3
///   lap lap a = (n - 1)(3 - n) / s^3 + 6 (3 - n) eps^2 / s^5 - 15 eps^4 / s^7
/// As eps -> 0 these reduce to the |d| forms, e.g. lap a -> (n - 1)/|d|.
class Weight {
 public:
  enum class Kind { abs_smoothed, custom };

  struct Callables {
    std::function<double(const Vec3&)> value;
    std::function<Vec3(const Vec3&)> gradient;
    std::function<Mat3(const Vec3&)> hessian;
    std::function<double(const Vec3&)> laplacian;
    std::function<double(const Vec3&)> bilaplacian;
  };

  static Weight abs_smoothed(int dim, double epsilon);
  static Weight custom(int dim, std::string name, Callables fns, bool smooth = true);

  Kind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  int dim() const noexcept { return dim_; }
  double epsilon() const noexcept { return epsilon_; }
  /// False for the unsmoothed modulus, whose Hessian is singular at d = 0.
  bool smooth() const noexcept { return smooth_; }

  double value(const Vec3& d) const { return fns_.value(d); }
  Vec3 gradient(const Vec3& d) const { return fns_.gradient(d); }
  Mat3 hessian(const Vec3& d) const { return fns_.hessian(d); }
  double laplacian(const Vec3& d) const { return fns_.laplacian(d); }
  double bilaplacian(const Vec3& d) const { return fns_.bilaplacian(d); }

  // Scalar kernels for tabulation / FFT convolution.
  KernelFn gradient_kernel(int j) const;
  KernelFn hessian_kernel(int j, int k) const;
  KernelFn laplacian_kernel() const;
  KernelFn bilaplacian_kernel() const;

 private:
  Kind kind_ = Kind::custom;
  std::string name_;
  int dim_ = 1;
  double epsilon_ = 0.0;
  bool smooth_ = true;
  Callables fns_;
};

}  // namespace mlab
