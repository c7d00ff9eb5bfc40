#include <doctest.h>

#include <cmath>
#include <random>

#include "etnet/kernels.hpp"
#include "etnet/quadrature.hpp"

using namespace etnet;

namespace {

struct Fixture {
  AgeGrid ages{400, 10.0};
  SpatialGrid space{37};
  DensityField n;
  ScalarField S;
  ConnectivityKernel w;
  Fixture() : n(ages, space), S(space), w(space) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& v : n.values()) v = u(rng);
    for (auto& v : S.values()) v = 2.0 * u(rng);
    for (auto& v : w.values()) v = 5.0 * u(rng);
  }
};

}  // namespace

TEST_CASE("serial and parallel kernels agree bitwise") {
  for (const auto& model : {FiringRateModel::step(1.0), FiringRateModel::smooth(1.2, SigmaMap::clamped(1.5), 0.3)}) {
    Fixture f;
    DensityField a = f.n, b = f.n;
    ScalarField na(f.space), nb(f.space);
    kernels::serial::activity(a, f.S, model, na);
    kernels::parallel::activity(b, f.S, model, nb);
    CHECK(na == nb);
    for (int k = 0; k < 20; ++k) {
      kernels::serial::advance(a, f.S, model, 0.0125, na);
      kernels::parallel::advance(b, f.S, model, 0.0125, nb);
    }
    CHECK(a == b);
    CHECK(na == nb);

    ScalarField ka(f.space), kb(f.space);
    kernels::serial::kernel_apply(f.w, na, ka);
    kernels::parallel::kernel_apply(f.w, nb, kb);
    CHECK(ka == kb);

    ConnectivityKernel wa = f.w, wb = f.w;
    const LearningRule rule{LearningRule::Kind::gaussian_sigmoid, 3.0};
    kernels::serial::relax_kernel(wa, na, rule, 0.01);
    kernels::parallel::relax_kernel(wb, nb, rule, 0.01);
    CHECK(wa == wb);
  }
}

TEST_CASE("kernel_apply kernels match the quadrature module") {
  Fixture f;
  ScalarField out(f.space);
  kernels::serial::kernel_apply(f.w, f.S, out);
  const ScalarField ref = kernel_apply(f.w, f.S);
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == doctest::Approx(ref[i]).epsilon(1e-14));
}

TEST_CASE("upwind column conserves trapezoid mass") {
  Fixture f;
  const auto model = FiringRateModel::step(1.0);
  std::vector<double> q(f.ages.size());
  for (std::size_t ix = 0; ix < 5; ++ix) {
    cell_rates(model, f.S[ix], f.ages, q);
    auto col = f.n.column(ix);
    const double before = column_integral(col, f.ages.ds());
    for (int k = 0; k < 200; ++k) kernels::upwind_column(col, q, f.ages.ds(), 0.0125);
    CHECK(column_integral(col, f.ages.ds()) == doctest::Approx(before).epsilon(1e-13));
    for (double v : col) CHECK(v >= 0.0);
  }
}

TEST_CASE("implicit boundary branch stays positive and conservative") {
  // 2 lambda > 1 forces the implicit update of the boundary half cell
  const AgeGrid ages(50, 5.0);
  std::vector<double> n(ages.size(), 1.0), q(ages.size());
  cell_rates(FiringRateModel::step(1.0), 0.2, ages, q);
  const double dtp = 0.08;  // lambda = 0.8
  const double before = column_integral(n, ages.ds());
  for (int k = 0; k < 100; ++k) kernels::upwind_column(n, q, ages.ds(), dtp);
  CHECK(column_integral(n, ages.ds()) == doctest::Approx(before).epsilon(1e-13));
  for (double v : n) CHECK(v >= 0.0);
}
