#include "mlab/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "mlab/errors.hpp"

namespace mlab {
namespace {

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is. Plans are created once per (dim, N, sign) and shared.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int dim, std::size_t n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto key = std::make_tuple(dim, n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::size_t total = 1;
    int shape[3];
    for (int a = 0; a < dim; ++a) {
      shape[a] = static_cast<int>(n);
      total *= n;
    }
    auto* in = fftw_alloc_complex(total);
    auto* out = fftw_alloc_complex(total);
    fftw_plan plan = fftw_plan_dft(dim, shape, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, std::size_t, int>, fftw_plan> plans_;
};

void execute(const Grid& g, int sign, const std::vector<cplx>& in, std::vector<cplx>& out) {
  fftw_plan plan = PlanCache::instance().get(g.dim, g.points_per_axis, sign);
  out.resize(in.size());
  // FFTW's new-array execute does not write to the input of an out-of-place plan.
  auto* src = const_cast<fftw_complex*>(reinterpret_cast<const fftw_complex*>(in.data()));
  fftw_execute_dft(plan, src, reinterpret_cast<fftw_complex*>(out.data()));
}

void require_position(const ComplexField& f, const char* what) {
  if (f.space != Space::position) throw ContractError(std::string(what) + " expects a position-space field");
}

}  // namespace

ComplexField transform(const ComplexField& field, Direction direction) {
  const bool fwd = direction == Direction::forward;
  if (fwd && field.space != Space::position) throw ContractError("forward transform needs a position-space field");
  if (!fwd && field.space != Space::frequency) throw ContractError("inverse transform needs a frequency-space field");
  ComplexField out(field.grid, fwd ? Space::frequency : Space::position);
  execute(*field.grid, fwd ? FFTW_FORWARD : FFTW_BACKWARD, field.values, out.values);
  if (!fwd) {
    const double scale = 1.0 / static_cast<double>(field.size());
    for (auto& v : out.values) v *= scale;
  }
  return out;
}

double spectral_norm_sq(const ComplexField& freq) {
  if (freq.space != Space::frequency) throw ContractError("spectral_norm_sq expects a frequency-space field");
  double s = 0.0;
  for (const auto& v : freq.values) s += std::norm(v);
  return s * freq.grid->cell_volume() / static_cast<double>(freq.size());
}

std::vector<cplx> tabulate_symbol(const Grid& grid, const Symbol& symbol) {
  std::vector<cplx> table(grid.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    table[i] = symbol(grid.wavevector(i));
    if (!std::isfinite(table[i].real()) || !std::isfinite(table[i].imag()))
      throw ContractError("multiplier symbol is not finite at a grid wavenumber");
  }
  return table;
}

ComplexField apply_multiplier(const ComplexField& field, std::span<const cplx> table) {
  require_position(field, "apply_multiplier");
  if (table.size() != field.size()) throw ContractError("multiplier table size does not match the grid");
  ComplexField hat = transform(field, Direction::forward);
  for (std::size_t i = 0; i < hat.size(); ++i) hat[i] *= table[i];
  return transform(hat, Direction::inverse);
}

ComplexField apply_multiplier(const ComplexField& field, const Symbol& symbol) {
  const auto table = tabulate_symbol(*field.grid, symbol);
  return apply_multiplier(field, table);
}

ComplexField partial_derivative(const ComplexField& field, int axis) {
  const Grid& g = *field.grid;
  if (axis < 0 || axis >= g.dim) throw ContractError("derivative axis out of range");
  require_position(field, "partial_derivative");
  ComplexField hat = transform(field, Direction::forward);
  for (std::size_t i = 0; i < hat.size(); ++i) {
    const std::size_t slot = g.unflatten(i)[axis];
    hat[i] *= g.is_nyquist(slot) ? cplx{} : cplx{0.0, g.wavenumbers[slot]};
  }
  return transform(hat, Direction::inverse);
}

VectorField gradient(const ComplexField& field) {
  VectorField v;
  for (int a = 0; a < field.grid->dim; ++a) v.components.push_back(partial_derivative(field, a));
  return v;
}

ComplexField divergence(const VectorField& v) {
  ComplexField out = partial_derivative(v[0], 0);
  for (int a = 1; a < v.dim(); ++a) out += partial_derivative(v[a], a);
  return out;
}

ComplexField laplacian(const ComplexField& field) {
  return apply_multiplier(field, [](const Vec3& xi) {
    return cplx{-(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]), 0.0};
  });
}

ComplexField fractional_derivative(const ComplexField& field, double alpha) {
  if (!(alpha >= -3.0 && alpha <= 3.0)) throw ContractError("fractional_derivative needs alpha in [-3, 3]");
  require_position(field, "fractional_derivative");
  if (alpha == 0.0) return field;
  return apply_multiplier(field, [alpha](const Vec3& xi) {
    const double k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    return k2 == 0.0 ? cplx{} : cplx{std::pow(k2, 0.5 * alpha), 0.0};
  });
}

ComplexField bessel_potential(const ComplexField& field, double alpha) {
  return apply_multiplier(field, [alpha](const Vec3& xi) {
    return cplx{std::pow(1.0 + xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2], 0.5 * alpha), 0.0};
  });
}

bool dealias_keeps(const Grid& grid, std::size_t flat) noexcept {
  const Index3 idx = grid.unflatten(flat);
  const auto n = static_cast<long>(grid.points_per_axis);
  for (int a = 0; a < grid.dim; ++a)
    if (3 * std::labs(grid.mode(idx[a])) >= n) return false;
  return true;
}

ComplexField dealias(const ComplexField& field) {
  require_position(field, "dealias");
  ComplexField hat = transform(field, Direction::forward);
  for (std::size_t i = 0; i < hat.size(); ++i)
    if (!dealias_keeps(*field.grid, i)) hat[i] = 0.0;
  return transform(hat, Direction::inverse);
}

cplx integrate(const ComplexField& field) {
  require_position(field, "integrate");
  cplx s{};
  for (const auto& v : field.values) s += v;
  return s * field.grid->cell_volume();
}

cplx inner(const ComplexField& f, const ComplexField& g) {
  require_same_grid(f, g);
  require_position(f, "inner");
  require_position(g, "inner");
  cplx s{};
  for (std::size_t i = 0; i < f.size(); ++i) s += std::conj(f[i]) * g[i];
  return s * f.grid->cell_volume();
}

double l2_norm(const ComplexField& f) {
  require_position(f, "l2_norm");
  double s = 0.0;
  for (const auto& v : f.values) s += std::norm(v);
  return std::sqrt(s * f.grid->cell_volume());
}

double symmetrized_eval(const KernelFn& kernel, const Vec3& d, const Grid& grid) {
  const double half = 0.5 * grid.box_length;
  const double tol = 1e-9 * grid.spacing;
  int nyq[3];
  int count = 0;
  for (int a = 0; a < grid.dim; ++a)
    if (std::abs(std::abs(d[a]) - half) <= tol) nyq[count++] = a;
  if (count == 0) return kernel(d);
  double sum = 0.0;
  const int combos = 1 << count;
  for (int mask = 0; mask < combos; ++mask) {
    Vec3 e = d;
    for (int b = 0; b < count; ++b) e[nyq[b]] = (mask >> b & 1) ? half : -half;
    sum += kernel(e);
  }
  return sum / combos;
}

Vec3 displacement(const Vec3& x, const Vec3& y, const Grid& grid) noexcept {
  Vec3 d{0.0, 0.0, 0.0};
  for (int a = 0; a < grid.dim; ++a) d[a] = min_image(x[a] - y[a], grid.box_length);
  return d;
}

ComplexField tabulate_kernel(const GridPtr& grid, const KernelFn& kernel) {
  const Grid& g = *grid;
  ComplexField table(grid);
  for (std::size_t i = 0; i < table.size(); ++i) {
    const Index3 idx = g.unflatten(i);
    Vec3 d{0.0, 0.0, 0.0};
    for (int a = 0; a < g.dim; ++a) d[a] = min_image(static_cast<double>(idx[a]) * g.spacing, g.box_length);
    table[i] = symmetrized_eval(kernel, d, g);
  }
  return table;
}

ConvolutionKernel::ConvolutionKernel(const GridPtr& grid, const KernelFn& kernel)
    : ConvolutionKernel(tabulate_kernel(grid, kernel)) {}

ConvolutionKernel::ConvolutionKernel(const ComplexField& table) : hat_(transform(table, Direction::forward)) {
  hat_ *= hat_.grid->cell_volume();
}

ComplexField ConvolutionKernel::apply(const ComplexField& f) const {
  require_same_grid(f, hat_);
  ComplexField fh = transform(f, Direction::forward);
  for (std::size_t i = 0; i < fh.size(); ++i) fh[i] *= hat_[i];
  return transform(fh, Direction::inverse);
}

double riesz_cell_average(int dim, double spacing) {
  // Integrals of 1/|x| over the unit square / unit cube corner [0,1]^n.
  const double unit2 = 2.0 * std::log(1.0 + std::numbers::sqrt2);
  const double unit3 = 3.0 * std::log((1.0 + std::numbers::sqrt3) / std::numbers::sqrt2) - 0.25 * std::numbers::pi;
  if (dim == 2) return 2.0 * unit2 / spacing;
  if (dim == 3) return 2.0 * unit3 / spacing;
  throw ContractError("riesz cell average is defined for n = 2, 3");
}

ComplexField riesz_potential(const ComplexField& density, double eps) {
  const Grid& g = *density.grid;
  if (g.dim == 1) throw ContractError("riesz_potential: 1/|x| is not locally integrable in one dimension");
  if (!(eps >= 0.0)) throw ContractError("riesz_potential: regularization must be >= 0");
  require_position(density, "riesz_potential");
  if (density.max_abs_imag() > 1e-12 * std::max(density.max_abs(), 1e-300))
    throw ContractError("riesz_potential expects a real density");
  const double diag = eps > 0.0 ? 1.0 / eps : riesz_cell_average(g.dim, g.spacing);
  const ConvolutionKernel kernel(density.grid, [eps, diag](const Vec3& d) {
    const double r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
    if (r2 == 0.0) return diag;
    return 1.0 / std::sqrt(r2 + eps * eps);
  });
  return kernel.apply(density);
}

}  // namespace mlab
