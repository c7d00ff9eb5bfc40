#pragma once

#include <cstddef>
#include <vector>

namespace etnet {

/// Uniform cell-centred grid on the position interval (x_min, x_max).
class SpatialGrid {
public:
  SpatialGrid() = default;
  SpatialGrid(std::size_t nx, double x_min = 0.0, double x_max = 1.0);

  std::size_t size() const noexcept { return nx_; }
  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  double dx() const noexcept { return dx_; }
  double length() const noexcept { return x_max_ - x_min_; }
  double node(std::size_t i) const noexcept { return x_min_ + (static_cast<double>(i) + 0.5) * dx_; }
  std::vector<double> nodes() const;

  /// Quadrature weight of node i (midpoint rule, every weight is dx).
  double weight(std::size_t) const noexcept { return dx_; }

  friend bool operator==(const SpatialGrid&, const SpatialGrid&) = default;

private:
  std::size_t nx_ = 0;
  double x_min_ = 0.0;
  double x_max_ = 1.0;
  double dx_ = 0.0;
};

/// Uniform age grid s_i = i*ds, i = 0..ns, truncating [0, inf) at s_max.
class AgeGrid {
public:
  AgeGrid() = default;
  AgeGrid(std::size_t ns, double s_max);

  /// Number of cells; there are ns+1 nodes.
  std::size_t cells() const noexcept { return ns_; }
  std::size_t size() const noexcept { return ns_ + 1; }
  double s_max() const noexcept { return s_max_; }
  double ds() const noexcept { return ds_; }
  double node(std::size_t i) const noexcept { return static_cast<double>(i) * ds_; }
  std::vector<double> nodes() const;

  /// Trapezoid weight of node i.
  double weight(std::size_t i) const noexcept { return (i == 0 || i == ns_) ? 0.5 * ds_ : ds_; }

  friend bool operator==(const AgeGrid&, const AgeGrid&) = default;

private:
  std::size_t ns_ = 0;
  double s_max_ = 0.0;
  double ds_ = 0.0;
};

}  // namespace etnet
