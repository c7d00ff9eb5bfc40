#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "etnet/grid.hpp"

namespace etnet {

/// Real values indexed by position node: N, S, I, g.
class ScalarField {
public:
  ScalarField() = default;
  explicit ScalarField(SpatialGrid grid, double fill = 0.0);
  ScalarField(SpatialGrid grid, std::vector<double> values);

  static ScalarField sample(const SpatialGrid& grid, const std::function<double(double)>& f);

  const SpatialGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  double max() const;
  double min() const;
  double max_abs() const;

  friend bool operator==(const ScalarField&, const ScalarField&) = default;

private:
  SpatialGrid grid_;
  std::vector<double> values_;
};

/// Density n(s, x) on an age x position grid. Each x-column is contiguous in s.
class DensityField {
public:
  DensityField() = default;
  DensityField(AgeGrid ages, SpatialGrid space, double fill = 0.0);

  static DensityField sample(const AgeGrid& ages, const SpatialGrid& space,
                             const std::function<double(double s, double x)>& f);

  const AgeGrid& ages() const noexcept { return ages_; }
  const SpatialGrid& space() const noexcept { return space_; }

  double& operator()(std::size_t is, std::size_t ix) noexcept { return values_[ix * ages_.size() + is]; }
  double operator()(std::size_t is, std::size_t ix) const noexcept { return values_[ix * ages_.size() + is]; }

  std::span<double> column(std::size_t ix) noexcept {
    return {values_.data() + ix * ages_.size(), ages_.size()};
  }
  std::span<const double> column(std::size_t ix) const noexcept {
    return {values_.data() + ix * ages_.size(), ages_.size()};
  }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  double min() const;

  friend bool operator==(const DensityField&, const DensityField&) = default;

private:
  AgeGrid ages_;
  SpatialGrid space_;
  std::vector<double> values_;
};

/// Connectivity kernel w(x, y), row-major in x.
class ConnectivityKernel {
public:
  ConnectivityKernel() = default;
  explicit ConnectivityKernel(SpatialGrid grid, double fill = 0.0);

  static ConnectivityKernel sample(const SpatialGrid& grid, const std::function<double(double x, double y)>& f);

  const SpatialGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return grid_.size(); }

  double& operator()(std::size_t ix, std::size_t iy) noexcept { return values_[ix * grid_.size() + iy]; }
  double operator()(std::size_t ix, std::size_t iy) const noexcept { return values_[ix * grid_.size() + iy]; }

  std::span<double> row(std::size_t ix) noexcept { return {values_.data() + ix * grid_.size(), grid_.size()}; }
  std::span<const double> row(std::size_t ix) const noexcept {
    return {values_.data() + ix * grid_.size(), grid_.size()};
  }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  double max_abs() const;

  friend bool operator==(const ConnectivityKernel&, const ConnectivityKernel&) = default;

private:
  SpatialGrid grid_;
  std::vector<double> values_;
};

}  // namespace etnet
