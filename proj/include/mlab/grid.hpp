#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

namespace mlab {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;
using Index3 = std::array<std::size_t, 3>;

/// Uniform periodic grid on the box [-L/2, L/2)^n.
///
/// Points are stored row-major with axis 0 slowest, matching FFTW's layout.
/// The origin sits at index N/2 along every axis. `wavenumbers` lists 2*pi*k/L
/// in FFT storage order: k = 0, 1, ..., N/2-1, -N/2, ..., -1.
struct Grid {
  int dim = 1;
  std::size_t points_per_axis = 0;
  double box_length = 0.0;
  double spacing = 0.0;
  std::vector<double> wavenumbers;

  std::size_t size() const noexcept;
  double coordinate(std::size_t i) const noexcept { return -0.5 * box_length + static_cast<double>(i) * spacing; }
  double cell_volume() const noexcept;

  // Signed integer mode index of FFT slot i, in [-N/2, N/2).
  long mode(std::size_t i) const noexcept;
  bool is_nyquist(std::size_t i) const noexcept { return i == points_per_axis / 2; }

  Index3 unflatten(std::size_t flat) const noexcept;
  std::size_t flatten(const Index3& idx) const noexcept;
  Vec3 position(std::size_t flat) const noexcept;
  Vec3 wavevector(std::size_t flat) const noexcept;

  bool same_shape(const Grid& other) const noexcept;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Throws ContractError unless dim is 1..3, N >= 8 is a power of two and L > 0.
GridPtr make_grid(int dim, std::size_t points_per_axis, double box_length);

/// Wraps a displacement component into [-L/2, L/2).
double min_image(double d, double box_length) noexcept;

}  // namespace mlab
