#include "etnet/kernels.hpp"

#include <cmath>
#include <vector>

namespace etnet::kernels {

double column_activity(std::span<const double> n, std::span<const double> q, double ds) {
  const std::size_t M = n.size() - 1;
  double sum = 0.5 * (q[0] * n[0] + q[M] * n[M]);
  for (std::size_t i = 1; i < M; ++i) sum += q[i] * n[i];
  return sum * ds;
}

double upwind_column(std::span<double> n, std::span<const double> q, double ds, double dtp) {
  const std::size_t M = n.size() - 1;
  const double lam = dtp / ds;
  const double injected = column_activity(n, q, ds);

  double n0_new;
  double outflow;  // value leaving the half cell at s = 0
  if (2.0 * lam + dtp * q[0] <= 1.0) {
    n0_new = n[0] + 2.0 * lam * (injected - n[0]) - dtp * q[0] * n[0];
    outflow = n[0];
  } else {
    n0_new = (n[0] * (1.0 - dtp * q[0]) + 2.0 * lam * injected) / (1.0 + 2.0 * lam);
    outflow = n0_new;
  }

  // Sweep downwards so n[i-1] still holds the pre-step value.
  const double last_in = M >= 2 ? n[M - 1] : outflow;
  n[M] = n[M] * (1.0 - dtp * q[M]) + 2.0 * lam * last_in;
  for (std::size_t i = M - 1; i >= 2 && i < M; --i) n[i] = n[i] * (1.0 - lam - dtp * q[i]) + lam * n[i - 1];
  if (M >= 2) n[1] = n[1] * (1.0 - lam - dtp * q[1]) + lam * outflow;
  n[0] = n0_new;
  return injected;
}

namespace {

std::vector<double>& rate_buffer(std::size_t size) {
  thread_local std::vector<double> q;
  q.resize(size);
  return q;
}

inline void activity_column(const DensityField& n, const ScalarField& S, const FiringRateModel& model,
                            ScalarField& out, std::size_t ix) {
  auto& q = rate_buffer(n.ages().size());
  cell_rates(model, S[ix], n.ages(), q);
  out[ix] = column_activity(n.column(ix), q, n.ages().ds());
}

inline void advance_column(DensityField& n, const ScalarField& S, const FiringRateModel& model, double dtp,
                           ScalarField& injected, std::size_t ix) {
  auto& q = rate_buffer(n.ages().size());
  cell_rates(model, S[ix], n.ages(), q);
  injected[ix] = upwind_column(n.column(ix), q, n.ages().ds(), dtp);
}

inline void kernel_row(const ConnectivityKernel& w, const ScalarField& v, ScalarField& out, std::size_t ix) {
  auto row = w.row(ix);
  double sum = 0.0;
  for (std::size_t iy = 0; iy < v.size(); ++iy) sum += row[iy] * v[iy];
  out[ix] = sum * v.grid().dx();
}

inline void relax_row(ConnectivityKernel& w, const ScalarField& a, const LearningRule& rule, double decay,
                      double gain, std::size_t ix) {
  auto row = w.row(ix);
  for (std::size_t iy = 0; iy < a.size(); ++iy)
    row[iy] = decay * row[iy] + gain * rule.gamma * rule.G(a[ix], a[iy]);
}

}  // namespace

namespace serial {

void activity(const DensityField& n, const ScalarField& S, const FiringRateModel& model, ScalarField& out) {
  for (std::size_t ix = 0; ix < n.space().size(); ++ix) activity_column(n, S, model, out, ix);
}

void advance(DensityField& n, const ScalarField& S, const FiringRateModel& model, double dtp,
             ScalarField& injected) {
  for (std::size_t ix = 0; ix < n.space().size(); ++ix) advance_column(n, S, model, dtp, injected, ix);
}

void kernel_apply(const ConnectivityKernel& w, const ScalarField& v, ScalarField& out) {
  for (std::size_t ix = 0; ix < v.size(); ++ix) kernel_row(w, v, out, ix);
}

void relax_kernel(ConnectivityKernel& w, const ScalarField& a, const LearningRule& rule, double dt) {
  const double decay = std::exp(-dt);
  const double gain = -std::expm1(-dt);
  for (std::size_t ix = 0; ix < a.size(); ++ix) relax_row(w, a, rule, decay, gain, ix);
}

}  // namespace serial

namespace parallel {

void activity(const DensityField& n, const ScalarField& S, const FiringRateModel& model, ScalarField& out) {
  const auto nx = static_cast<long>(n.space().size());
#pragma omp parallel for schedule(static)
  for (long ix = 0; ix < nx; ++ix) activity_column(n, S, model, out, static_cast<std::size_t>(ix));
}

void advance(DensityField& n, const ScalarField& S, const FiringRateModel& model, double dtp,
             ScalarField& injected) {
  const auto nx = static_cast<long>(n.space().size());
#pragma omp parallel for schedule(static)
  for (long ix = 0; ix < nx; ++ix) advance_column(n, S, model, dtp, injected, static_cast<std::size_t>(ix));
}

void kernel_apply(const ConnectivityKernel& w, const ScalarField& v, ScalarField& out) {
  const auto nx = static_cast<long>(v.size());
#pragma omp parallel for schedule(static)
  for (long ix = 0; ix < nx; ++ix) kernel_row(w, v, out, static_cast<std::size_t>(ix));
}

void relax_kernel(ConnectivityKernel& w, const ScalarField& a, const LearningRule& rule, double dt) {
  const double decay = std::exp(-dt);
  const double gain = -std::expm1(-dt);
  const auto nx = static_cast<long>(a.size());
#pragma omp parallel for schedule(static)
  for (long ix = 0; ix < nx; ++ix) relax_row(w, a, rule, decay, gain, static_cast<std::size_t>(ix));
}

}  // namespace parallel

}  // namespace etnet::kernels
