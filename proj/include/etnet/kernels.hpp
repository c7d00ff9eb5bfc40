#pragma once

// Inner loops of the solvers. Every kernel has a serial reference in `serial` and an OpenMP
// version in `parallel` with identical per-element arithmetic, so results agree bitwise.

#include <span>

#include "etnet/fields.hpp"
#include "etnet/rate_models.hpp"

namespace etnet::kernels {

/// Trapezoid integral of q * n over one column.
double column_activity(std::span<const double> n, std::span<const double> q, double ds);

/// One explicit upwind step of  d_t n + (d_s n + q n) / eps = 0  on a column, in place.
///
/// dtp = dt / eps. Node 0 is the half cell fed by the renewal flux N = column_activity(n, q)
/// of the pre-step field; the last node is closed. Discrete trapezoid mass is conserved
/// exactly. Returns the injected flux N.
double upwind_column(std::span<double> n, std::span<const double> q, double ds, double dtp);

namespace serial {

void activity(const DensityField& n, const ScalarField& S, const FiringRateModel& model, ScalarField& out);
void advance(DensityField& n, const ScalarField& S, const FiringRateModel& model, double dtp, ScalarField& injected);
void kernel_apply(const ConnectivityKernel& w, const ScalarField& v, ScalarField& out);
void relax_kernel(ConnectivityKernel& w, const ScalarField& activity, const LearningRule& rule, double dt);

}  // namespace serial

namespace parallel {

void activity(const DensityField& n, const ScalarField& S, const FiringRateModel& model, ScalarField& out);
void advance(DensityField& n, const ScalarField& S, const FiringRateModel& model, double dtp, ScalarField& injected);
void kernel_apply(const ConnectivityKernel& w, const ScalarField& v, ScalarField& out);
void relax_kernel(ConnectivityKernel& w, const ScalarField& activity, const LearningRule& rule, double dt);

}  // namespace parallel

}  // namespace etnet::kernels
