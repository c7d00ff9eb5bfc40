// Serial vs OpenMP timings of the column kernels. Thread count from OMP_NUM_THREADS.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include <omp.h>

#include "etnet/kernels.hpp"

using namespace etnet;

namespace {

double seconds(int reps, const std::function<void()>& f) {
  f();  // warm up
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

void row(const char* name, double ser, double par) {
  std::printf("%-14s %12.3e %12.3e %8.2fx\n", name, ser, par, ser / par);
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t nx = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 256;
  const std::size_t ns = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 1600;
  const int reps = argc > 3 ? std::atoi(argv[3]) : 20;

  const AgeGrid ages(ns, 20.0);
  const SpatialGrid space(nx);
  const auto model = FiringRateModel::step(1.0);
  const LearningRule rule{LearningRule::Kind::hebbian, 1.0};
  const ScalarField S = ScalarField::sample(space, [](double x) { return 1.0 + x; });
  const DensityField n0 =
      DensityField::sample(ages, space, [](double s, double x) { return (x + 1) * std::exp(-s * (x + 1)); });
  const ConnectivityKernel w0 =
      ConnectivityKernel::sample(space, [](double x, double y) { return 10 * std::exp(-10 * (x - y) * (x - y)); });
  const double dtp = 0.5 * ages.ds();

  std::printf("nx = %zu, ns = %zu, threads = %d, seconds per call\n", nx, ns, omp_get_max_threads());
  std::printf("%-14s %12s %12s %9s\n", "kernel", "serial", "parallel", "speedup");

  ScalarField out(space), inj(space);
  row("activity", seconds(reps, [&] { kernels::serial::activity(n0, S, model, out); }),
      seconds(reps, [&] { kernels::parallel::activity(n0, S, model, out); }));

  DensityField a = n0, b = n0;
  row("advance", seconds(reps, [&] { kernels::serial::advance(a, S, model, dtp, inj); }),
      seconds(reps, [&] { kernels::parallel::advance(b, S, model, dtp, inj); }));

  row("kernel_apply", seconds(reps, [&] { kernels::serial::kernel_apply(w0, S, out); }),
      seconds(reps, [&] { kernels::parallel::kernel_apply(w0, S, out); }));

  ConnectivityKernel wa = w0, wb = w0;
  row("relax_kernel", seconds(reps, [&] { kernels::serial::relax_kernel(wa, S, rule, 1e-3); }),
      seconds(reps, [&] { kernels::parallel::relax_kernel(wb, S, rule, 1e-3); }));

  std::printf("advance results %s\n", a == b ? "identical" : "DIFFER");
  return a == b ? 0 : 1;
}
