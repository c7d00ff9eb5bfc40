#include "etnet/grid.hpp"

#include "etnet/error.hpp"

namespace etnet {

SpatialGrid::SpatialGrid(std::size_t nx, double x_min, double x_max)
    : nx_(nx), x_min_(x_min), x_max_(x_max) {
  if (nx == 0) throw PreconditionError("spatial grid needs at least one cell");
  if (!(x_max > x_min)) throw PreconditionError("spatial grid needs x_max > x_min");
  dx_ = (x_max - x_min) / static_cast<double>(nx);
}

std::vector<double> SpatialGrid::nodes() const {
  std::vector<double> out(nx_);
  for (std::size_t i = 0; i < nx_; ++i) out[i] = node(i);
  return out;
}

AgeGrid::AgeGrid(std::size_t ns, double s_max) : ns_(ns), s_max_(s_max) {
  if (ns == 0) throw PreconditionError("age grid needs at least one cell");
  if (!(s_max > 0.0)) throw PreconditionError("age grid needs s_max > 0");
  ds_ = s_max / static_cast<double>(ns);
}

std::vector<double> AgeGrid::nodes() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = node(i);
  return out;
}

}  // namespace etnet
