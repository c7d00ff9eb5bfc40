#include "etnet/fields.hpp"

#include <algorithm>
#include <cmath>

#include "etnet/error.hpp"

namespace etnet {

ScalarField::ScalarField(SpatialGrid grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

ScalarField::ScalarField(SpatialGrid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw DimensionError("scalar field values do not match the spatial grid");
}

ScalarField ScalarField::sample(const SpatialGrid& grid, const std::function<double(double)>& f) {
  ScalarField out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = f(grid.node(i));
  return out;
}

double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }
double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

DensityField::DensityField(AgeGrid ages, SpatialGrid space, double fill)
    : ages_(ages), space_(space), values_(ages.size() * space.size(), fill) {}

DensityField DensityField::sample(const AgeGrid& ages, const SpatialGrid& space,
                                  const std::function<double(double, double)>& f) {
  DensityField out(ages, space);
  for (std::size_t ix = 0; ix < space.size(); ++ix) {
    const double x = space.node(ix);
    auto col = out.column(ix);
    for (std::size_t is = 0; is < ages.size(); ++is) col[is] = f(ages.node(is), x);
  }
  return out;
}

double DensityField::min() const { return *std::min_element(values_.begin(), values_.end()); }

ConnectivityKernel::ConnectivityKernel(SpatialGrid grid, double fill)
    : grid_(grid), values_(grid.size() * grid.size(), fill) {}

ConnectivityKernel ConnectivityKernel::sample(const SpatialGrid& grid,
                                              const std::function<double(double, double)>& f) {
  ConnectivityKernel out(grid);
  for (std::size_t ix = 0; ix < grid.size(); ++ix)
    for (std::size_t iy = 0; iy < grid.size(); ++iy) out(ix, iy) = f(grid.node(ix), grid.node(iy));
  return out;
}

double ConnectivityKernel::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace etnet
