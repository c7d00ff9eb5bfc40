#include <doctest.h>

#include <cmath>
#include <vector>

#include "etnet/characteristics.hpp"
#include "etnet/error.hpp"
#include "etnet/quadrature.hpp"
#include "etnet/renewal_solver.hpp"

using namespace etnet;

namespace {

// e^{-s} + k e^{-2s}, with k chosen so that f(0) = int_sigma^inf f: the datum is compatible with
// the renewal boundary condition under p = 1{s > sigma} and the solution has no jump along s = t.
double compatible(double s, double sigma) {
  const double k = (1 - std::exp(-sigma)) / (0.5 * std::exp(-2 * sigma) - 1);
  return (std::exp(-s) + k * std::exp(-2 * s)) / (1 + 0.5 * k);
}

ScalarField frozen_S(const SpatialGrid& g) {
  return ScalarField::sample(g, [](double x) { return 0.5 + 0.5 * x; });
}

}  // namespace

TEST_CASE("oracle with p = 0 is a pure shift") {
  const AgeGrid ages(200, 10.0);
  const SpatialGrid space(2);
  // threshold far beyond every age reached: p vanishes identically on the horizon
  const auto silent = FiringRateModel::step(1.0, SigmaMap::constant(1e3));
  const auto n0 = [](double s, double x) { return (1 + x) * std::exp(-s); };
  const double t = 1.5;
  const DensityField n =
      characteristics_oracle(n0, ages, space, StimulationPath::frozen(ScalarField(space, 0.0), t), silent, t);
  for (std::size_t ix = 0; ix < space.size(); ++ix)
    for (std::size_t is = 0; is < ages.size(); ++is) {
      const double s = ages.node(is);
      const double expect = s >= t ? n0(s - t, space.node(ix)) : 0.0;
      CHECK(n(is, ix) == doctest::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("oracle keeps exp(-s) stationary for p = 1") {
  const AgeGrid ages(800, 40.0);
  const SpatialGrid space(1);
  const auto model = FiringRateModel::step(1.0, SigmaMap::constant(0.0));
  const double t = 6.0;
  const DensityField n = characteristics_oracle([](double s, double) { return std::exp(-s); }, ages, space,
                                                StimulationPath::frozen(ScalarField(space, 0.0), t), model, t,
                                                OracleOptions{2e-3});
  for (std::size_t is = 0; ages.node(is) <= 5.0; ++is) CHECK(std::abs(n(is, 0) - std::exp(-ages.node(is))) < 1e-6);
}

TEST_CASE("oracle conserves mass") {
  const AgeGrid ages(4000, 20.0);
  const SpatialGrid space(3);
  const ScalarField S = frozen_S(space);
  const double t = 1.0;
  const auto n0 = [](double s, double x) { return compatible(s, 0.5 + 0.5 * x); };
  const DensityField n = characteristics_oracle(n0, ages, space, StimulationPath::frozen(S, t), FiringRateModel::step(1.0), t);
  const ScalarField m = age_integral(n);
  for (double v : m.values()) CHECK(std::abs(v - 1.0) < 1e-5);
}

TEST_CASE("piecewise-constant paths compose") {
  const AgeGrid ages(2000, 10.0);
  const SpatialGrid space(2);
  const ScalarField S = frozen_S(space);
  const auto model = FiringRateModel::step(1.0);
  const auto n0 = [](double s, double x) { return compatible(s, 0.5 + 0.5 * x); };
  StimulationPath two{0.5, {S, S}};
  const DensityField a = characteristics_oracle(n0, ages, space, StimulationPath::frozen(S, 1.0), model, 1.0);
  const DensityField b = characteristics_oracle(n0, ages, space, two, model, 1.0);
  CHECK(norms(a, b).linf < 1e-5);
  CHECK_THROWS_AS(characteristics_oracle(n0, ages, space, two, model, 0.75), PreconditionError);

  // a genuinely switching path against the upwind solution; the switch makes N jump, so the
  // upwind error is limited by smearing of that jump rather than by the first-order truncation
  const ScalarField high(space, 1.5);
  StimulationPath sw{0.5, {S, high}};
  const DensityField ref = characteristics_oracle(n0, ages, space, sw, model, 1.0);
  SolverConfig c;
  c.dt = 0.5 * ages.ds();
  DensityField up = DensityField::sample(ages, space, n0);
  up = linear_run(up, S, model, c, 0.5).final_density;
  up = linear_run(up, high, model, c, 0.5).final_density;
  MESSAGE("switching path L1 distance " << norms(up, ref).l1_sx);
  CHECK(norms(up, ref).l1_sx < 0.02);
}

TEST_CASE("upwind converges to the oracle at first order") {
  const SpatialGrid space(4);
  const ScalarField S = frozen_S(space);
  const auto model = FiringRateModel::step(1.0);
  const double t = 1.0;
  const auto n0 = [&](double s, double x) { return compatible(s, 0.5 + 0.5 * x); };
  std::vector<double> err, ds;
  for (std::size_t ns : {2000, 4000, 8000}) {
    const AgeGrid ages(ns, 10.0);
    DensityField start = DensityField::sample(ages, space, n0);
    SolverConfig c;
    c.dt = 0.5 * ages.ds();
    const DensityField up = linear_run(start, S, model, c, t).final_density;
    const DensityField ref =
        characteristics_oracle(n0, ages, space, StimulationPath::frozen(S, t), model, t, OracleOptions{5e-4});
    err.push_back(norms(up, ref).l1_sx);
    ds.push_back(ages.ds());
  }
  const double order = std::log(err[0] / err[2]) / std::log(ds[0] / ds[2]);
  MESSAGE("errors " << err[0] << " " << err[1] << " " << err[2] << " order " << order);
  CHECK(err[1] < err[0]);
  CHECK(err[2] < err[1]);
  CHECK(order >= 0.8);
}
