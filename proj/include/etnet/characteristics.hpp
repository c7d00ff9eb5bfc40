#pragma once

// Reference solution of the linear problem with S frozen on time pieces, built from the
// characteristics representation. Used to validate the upwind scheme.

#include <functional>
#include <vector>

#include "etnet/fields.hpp"
#include "etnet/rate_models.hpp"

namespace etnet {

/// S(t, x) = levels[k](x) for t in [k*piece_length, (k+1)*piece_length).
struct StimulationPath {
  double piece_length = 1.0;
  std::vector<ScalarField> levels;

  static StimulationPath frozen(const ScalarField& S, double t);
  const ScalarField& at_piece(std::size_t k) const;
};

struct OracleOptions {
  double time_step = 1e-3;  ///< resolution of the boundary equation in time
};

using InitialDensity = std::function<double(double s, double x)>;

/// n(t, s, x) on the given grids for initial datum n0 given pointwise.
DensityField characteristics_oracle(const InitialDensity& n0, const AgeGrid& ages, const SpatialGrid& space,
                                    const StimulationPath& path, const FiringRateModel& model, double t,
                                    const OracleOptions& opts = {});

/// Same for a gridded initial datum (linear interpolation in s, zero beyond s_max).
DensityField characteristics_oracle(const DensityField& n0, const StimulationPath& path,
                                    const FiringRateModel& model, double t, const OracleOptions& opts = {});

/// Activity N(t, x) on the oracle's time grid for one column with S frozen; index j is time j*h.
struct ColumnSolution {
  double h = 0.0;
  std::vector<double> N;
  std::function<double(double s)> density;  ///< n(t_end, s)
};

ColumnSolution solve_column(const std::function<double(double)>& n0, double support, double S,
                            const FiringRateModel& model, double t, double h);

}  // namespace etnet
