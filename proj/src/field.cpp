#include "mlab/field.hpp"

#include <algorithm>
#include <cmath>

#include "mlab/errors.hpp"

namespace mlab {

ComplexField::ComplexField(GridPtr g, Space s) : grid(std::move(g)), values(grid->size(), cplx{}), space(s) {}

ComplexField::ComplexField(GridPtr g, std::vector<cplx> v, Space s)
    : grid(std::move(g)), values(std::move(v)), space(s) {
  if (values.size() != grid->size()) throw ContractError("field size does not match grid point count");
}

double ComplexField::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v));
  return m;
}

double ComplexField::max_abs_imag() const noexcept {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v.imag()));
  return m;
}

void require_same_grid(const ComplexField& a, const ComplexField& b) {
  if (!a.grid || !b.grid || !a.grid->same_shape(*b.grid)) throw ContractError("fields live on different grids");
}

ComplexField& ComplexField::operator+=(const ComplexField& rhs) {
  require_same_grid(*this, rhs);
  if (space != rhs.space) throw ContractError("space-tag mismatch in field addition");
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += rhs.values[i];
  return *this;
}

ComplexField& ComplexField::operator-=(const ComplexField& rhs) {
  require_same_grid(*this, rhs);
  if (space != rhs.space) throw ContractError("space-tag mismatch in field subtraction");
  for (std::size_t i = 0; i < values.size(); ++i) values[i] -= rhs.values[i];
  return *this;
}

ComplexField& ComplexField::operator*=(cplx s) noexcept {
  for (auto& v : values) v *= s;
  return *this;
}

ComplexField operator+(ComplexField lhs, const ComplexField& rhs) { return lhs += rhs; }
ComplexField operator-(ComplexField lhs, const ComplexField& rhs) { return lhs -= rhs; }
ComplexField operator*(cplx s, ComplexField f) { return f *= s; }

ComplexField pointwise(const ComplexField& a, const ComplexField& b) {
  require_same_grid(a, b);
  if (a.space != Space::position || b.space != Space::position)
    throw ContractError("pointwise products are defined in position space only");
  ComplexField out(a.grid);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

ComplexField real_part(const ComplexField& f) {
  ComplexField out(f.grid, f.space);
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i].real();
  return out;
}

}  // namespace mlab
