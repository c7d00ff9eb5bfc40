#pragma once

#include <optional>
#include <span>

#include "etnet/fields.hpp"

namespace etnet {

/// Trapezoid rule in s of f (optionally times a per-age-node weight) for every x-column.
ScalarField age_integral(const DensityField& f, std::optional<std::span<const double>> weights = std::nullopt);

/// Trapezoid rule on a single column.
double column_integral(std::span<const double> column, double ds);

/// Midpoint rule over the position interval.
double spatial_integral(const ScalarField& f);

/// (K N)(x) = integral of w(x, y) N(y) dy.
ScalarField kernel_apply(const ConnectivityKernel& w, const ScalarField& n);

/// <w> = |Omega|^-2 * double integral of w.
double kernel_mean(const ConnectivityKernel& w);

/// sup |w - <w>|.
double kernel_mean_deviation(const ConnectivityKernel& w);

/// sup |f - mean(f)| for a position field.
double mean_deviation(const ScalarField& f);

struct ScalarDistances {
  double l1 = 0.0;
  double linf = 0.0;
};

struct DensityDistances {
  double l1_sx = 0.0;        ///< integral over s and x of |a - b|
  double linf_x_l1_s = 0.0;  ///< sup over x of the s-integral of |a - b|
  double linf = 0.0;
};

struct KernelDistances {
  double l1 = 0.0;
  double linf = 0.0;
};

ScalarDistances norms(const ScalarField& a, const ScalarField& b);
DensityDistances norms(const DensityField& a, const DensityField& b);
KernelDistances norms(const ConnectivityKernel& a, const ConnectivityKernel& b);

}  // namespace etnet
