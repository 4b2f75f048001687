#include "mlab/weight.hpp"

#include <cmath>
#include <limits>

#include "mlab/errors.hpp"

namespace mlab {

Weight Weight::abs_smoothed(int dim, double epsilon) {
  if (dim < 1 || dim > 3) throw ContractError("weight dimension must be 1, 2 or 3");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ContractError("weight epsilon must be finite and >= 0");
  Weight w;
  w.kind_ = Kind::abs_smoothed;
  w.name_ = "abs_smoothed";
  w.dim_ = dim;
  w.epsilon_ = epsilon;
  w.smooth_ = epsilon > 0.0;

  const double e2 = epsilon * epsilon;
  const double n = dim;
  auto s_of = [dim, e2](const Vec3& d) {
    double r2 = e2;
    for (int a = 0; a < dim; ++a) r2 += d[a] * d[a];
    return std::sqrt(r2);
  };
  constexpr double inf = std::numeric_limits<double>::infinity();

  w.fns_.value = s_of;
  w.fns_.gradient = [dim, s_of](const Vec3& d) {
    const double s = s_of(d);
    Vec3 g{0.0, 0.0, 0.0};
    if (s == 0.0) return g;
    for (int a = 0; a < dim; ++a) g[a] = d[a] / s;
    return g;
  };
  w.fns_.hessian = [dim, s_of](const Vec3& d) {
    const double s = s_of(d);
    Mat3 h{};
    for (int j = 0; j < dim; ++j)
      for (int k = 0; k < dim; ++k)
        h[j][k] = s == 0.0 ? (j == k ? inf : 0.0) : ((j == k ? 1.0 / s : 0.0) - d[j] * d[k] / (s * s * s));
    return h;
  };
  w.fns_.laplacian = [n, e2, s_of](const Vec3& d) {
    const double s = s_of(d);
    if (s == 0.0) return inf;
    return (n - 1.0) / s + e2 / (s * s * s);
  };
  w.fns_.bilaplacian = [n, e2, s_of](const Vec3& d) {
    const double s = s_of(d);
    if (s == 0.0) return inf;
    const double s2 = s * s;
    const double s3 = s2 * s;
    return (n - 1.0) * (3.0 - n) / s3 + 6.0 * (3.0 - n) * e2 / (s3 * s2) - 15.0 * e2 * e2 / (s3 * s2 * s2);
  };
  return w;
}

Weight Weight::custom(int dim, std::string name, Callables fns, bool smooth) {
  if (dim < 1 || dim > 3) throw ContractError("weight dimension must be 1, 2 or 3");
  if (!fns.value || !fns.gradient || !fns.hessian || !fns.laplacian || !fns.bilaplacian)
    throw ContractError("custom weight needs all five closed forms");
  Weight w;
  w.kind_ = Kind::custom;
  w.name_ = std::move(name);
  w.dim_ = dim;
  w.smooth_ = smooth;
  w.fns_ = std::move(fns);
  return w;
}

KernelFn Weight::gradient_kernel(int j) const {
  return [f = fns_.gradient, j](const Vec3& d) { return f(d)[j]; };
}

KernelFn Weight::hessian_kernel(int j, int k) const {
  return [f = fns_.hessian, j, k](const Vec3& d) { return f(d)[j][k]; };
}

KernelFn Weight::laplacian_kernel() const { return fns_.laplacian; }
KernelFn Weight::bilaplacian_kernel() const { return fns_.bilaplacian; }

}  // namespace mlab
