#include "mlab/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mlab/errors.hpp"

namespace mlab {

std::size_t Grid::size() const noexcept {
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) total *= points_per_axis;
  return total;
}

double Grid::cell_volume() const noexcept { return std::pow(spacing, dim); }

long Grid::mode(std::size_t i) const noexcept {
  const auto n = static_cast<long>(points_per_axis);
  const auto k = static_cast<long>(i);
  return k < n / 2 ? k : k - n;
}

Index3 Grid::unflatten(std::size_t flat) const noexcept {
  Index3 idx{0, 0, 0};
  for (int a = dim - 1; a >= 0; --a) {
    idx[a] = flat % points_per_axis;
    flat /= points_per_axis;
  }
  return idx;
}

std::size_t Grid::flatten(const Index3& idx) const noexcept {
  std::size_t flat = 0;
  for (int a = 0; a < dim; ++a) flat = flat * points_per_axis + idx[a];
  return flat;
}

Vec3 Grid::position(std::size_t flat) const noexcept {
  const Index3 idx = unflatten(flat);
  Vec3 x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) x[a] = coordinate(idx[a]);
  return x;
}

Vec3 Grid::wavevector(std::size_t flat) const noexcept {
  const Index3 idx = unflatten(flat);
  Vec3 xi{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) xi[a] = wavenumbers[idx[a]];
  return xi;
}

bool Grid::same_shape(const Grid& other) const noexcept {
  return dim == other.dim && points_per_axis == other.points_per_axis && box_length == other.box_length;
}

GridPtr make_grid(int dim, std::size_t points_per_axis, double box_length) {
  if (dim < 1 || dim > 3) throw ContractError("grid dimension must be 1, 2 or 3, got " + std::to_string(dim));
  const std::size_t n = points_per_axis;
  if (n < 8 || (n & (n - 1)) != 0)
    throw ContractError("points_per_axis must be a power of two >= 8 (FFT size contract), got " + std::to_string(n));
  if (!(box_length > 0.0) || !std::isfinite(box_length)) throw ContractError("box_length must be positive and finite");

  auto g = std::make_shared<Grid>();
  g->dim = dim;
  g->points_per_axis = n;
  g->box_length = box_length;
  g->spacing = box_length / static_cast<double>(n);
  g->wavenumbers.resize(n);
  const double dk = 2.0 * std::numbers::pi / box_length;
  for (std::size_t i = 0; i < n; ++i) g->wavenumbers[i] = dk * static_cast<double>(g->mode(i));
  return g;
}

double min_image(double d, double box_length) noexcept {
  const double half = 0.5 * box_length;
  double w = std::fmod(d + half, box_length);
  if (w < 0.0) w += box_length;
  return w - half;
}

}  // namespace mlab
