#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "mlab/grid.hpp"

namespace mlab {

using cplx = std::complex<double>;

enum class Space { position, frequency };

/// Complex samples of a function on a Grid, tagged with the space they live in.
struct ComplexField {
  GridPtr grid;
  std::vector<cplx> values;
  Space space = Space::position;

  ComplexField() = default;
  ComplexField(GridPtr g, Space s = Space::position);
  ComplexField(GridPtr g, std::vector<cplx> v, Space s = Space::position);

  std::size_t size() const noexcept { return values.size(); }
  cplx& operator[](std::size_t i) noexcept { return values[i]; }
  const cplx& operator[](std::size_t i) const noexcept { return values[i]; }

  double max_abs() const noexcept;
  double max_abs_imag() const noexcept;

  ComplexField& operator+=(const ComplexField& rhs);
  ComplexField& operator-=(const ComplexField& rhs);
  ComplexField& operator*=(cplx s) noexcept;
};

ComplexField operator+(ComplexField lhs, const ComplexField& rhs);
ComplexField operator-(ComplexField lhs, const ComplexField& rhs);
ComplexField operator*(cplx s, ComplexField f);

/// Pointwise product; both operands must be position-space fields on one grid.
ComplexField pointwise(const ComplexField& a, const ComplexField& b);

/// Real part as a new field (imaginary part dropped).
ComplexField real_part(const ComplexField& f);

/// n components on one grid, all in the same space.
struct VectorField {
  std::vector<ComplexField> components;

  int dim() const noexcept { return static_cast<int>(components.size()); }
  const ComplexField& operator[](int j) const { return components[static_cast<std::size_t>(j)]; }
  ComplexField& operator[](int j) { return components[static_cast<std::size_t>(j)]; }
};

// Throws ContractError when the grids differ in shape.
void require_same_grid(const ComplexField& a, const ComplexField& b);

}  // namespace mlab
