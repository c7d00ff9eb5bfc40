#include <doctest.h>

#include <cmath>
#include <string>

#include "etnet/config.hpp"
#include "etnet/error.hpp"
#include "etnet/quadrature.hpp"
#include "etnet/renewal_solver.hpp"

using namespace etnet;

namespace {

SolverConfig cfg_for(const AgeGrid& ages, double eps = 1.0) {
  SolverConfig c;
  c.dt = 0.5 * eps * ages.ds();
  c.epsilon = eps;
  c.save_every = 0.1;
  return c;
}

DensityField homogeneous_datum(const AgeGrid& ages, const SpatialGrid& space) {
  DensityField n = DensityField::sample(ages, space, [](double s, double x) { return (x + 1) * std::exp(-s * (x + 1)); });
  normalize_mass(n, ScalarField(space, 1.0));
  return n;
}

Problem problem(double gamma, double I, LearningRule::Kind kind = LearningRule::Kind::hebbian,
                SigmaMap sigma = SigmaMap::identity(), std::size_t nx = 8) {
  return Problem{FiringRateModel::step(1.0, sigma), LearningRule{kind, gamma}, ScalarField(SpatialGrid(nx), I)};
}

ConnectivityKernel preset_kernel(const SpatialGrid& g) {
  return ConnectivityKernel::sample(g, [](double x, double y) { return 10 * std::exp(-10 * (x - y) * (x - y)); });
}

}  // namespace

TEST_CASE("pure transport when p vanishes") {
  const AgeGrid ages(2000, 20.0);
  const SpatialGrid space(3);
  const auto datum = [](double s, double x) { return std::exp(-(s - 2 - x) * (s - 2 - x) * 4); };
  const DensityField n0 = DensityField::sample(ages, space, datum);
  const auto silent = FiringRateModel::step(1.0).at_infinite_input();  // sigma = inf
  const SolverConfig c = cfg_for(ages);
  DensityField n = n0;
  const int steps = 100;  // t = 0.5
  for (int k = 0; k < steps; ++k) n = linear_step(n, ScalarField(space, 0.0), silent, c);
  const ScalarField m0 = age_integral(n0), m = age_integral(n);
  const double t = steps * c.dt;
  for (std::size_t ix = 0; ix < space.size(); ++ix) {
    CHECK(std::abs(m[ix] - m0[ix]) < 1e-12);
    CHECK(n(0, ix) == 0.0);
    double err = 0.0;
    for (std::size_t is = 0; is < ages.size(); ++is)
      err += ages.weight(is) * std::abs(n(is, ix) - datum(ages.node(is) - t, space.node(ix)));
    CHECK(err < 0.02);  // numerical diffusion of the first-order scheme only
  }
}

TEST_CASE("exp(-s) is stationary for p = 1") {
  const AgeGrid ages(400, 20.0);
  const SpatialGrid space(2);
  const DensityField n0 = DensityField::sample(ages, space, [](double s, double) { return std::exp(-s); });
  const auto model = FiringRateModel::step(1.0, SigmaMap::constant(0.0));
  const SolverConfig c = cfg_for(ages);
  DensityField n = n0;
  for (int k = 0; k < 1000; ++k) n = linear_step(n, ScalarField(space, 0.0), model, c);
  double worst = 0.0;
  for (std::size_t ix = 0; ix < space.size(); ++ix)
    for (std::size_t is = 0; is + 1 < ages.size(); ++is) worst = std::max(worst, std::abs(n(is, ix) - n0(is, ix)));
  CHECK(worst <= ages.ds());
}

TEST_CASE("mass is conserved on the homogeneous datum") {
  const AgeGrid ages(800, 20.0);
  const SpatialGrid space(8);
  const DensityField n0 = homogeneous_datum(ages, space);
  const ScalarField S = ScalarField::sample(space, [](double x) { return 0.5 + x; });
  const RunRecord rec = linear_run(n0, S, FiringRateModel::step(1.0), cfg_for(ages), 10.0);
  double worst = 0.0;
  for (const auto& m : rec.mass_series)
    for (double v : m.values()) worst = std::max(worst, std::abs(v - 1.0));
  CHECK(worst <= 1e-10);
  CHECK(rec.final_density.min() >= 0.0);
}

TEST_CASE("CFL guard") {
  const AgeGrid ages(800, 20.0);
  SolverConfig c = cfg_for(ages);
  c.dt = 0.05;
  try {
    check_cfl(c, ages, FiringRateModel::step(1.0));
    FAIL("expected a CFL error");
  } catch (const CflError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("0.05") != std::string::npos);
    CHECK(msg.find("0.025") != std::string::npos);
  }
  c.dt = 0.0249;  // within dt <= ds but not positivity preserving
  CHECK_THROWS_AS(check_cfl(c, ages, FiringRateModel::step(1.0)), CflError);
  c.cfl_guard = false;
  CHECK_NOTHROW(check_cfl(c, ages, FiringRateModel::step(1.0)));
  c.epsilon = 0.0;
  CHECK_THROWS_AS(check_cfl(c, ages, FiringRateModel::step(1.0)), PreconditionError);
}

TEST_CASE("negative density sentinel") {
  const AgeGrid ages(50, 5.0);
  const SpatialGrid space(1);
  const DensityField n0 = DensityField::sample(ages, space, [](double s, double) { return std::exp(-s) * (1 + std::sin(20 * s)); });
  SolverConfig c = cfg_for(ages);
  c.dt = 3.0 * ages.ds();
  c.cfl_guard = false;
  DensityField n = n0;
  CHECK_THROWS_AS(
      [&] {
        for (int k = 0; k < 5; ++k) n = linear_step(n, ScalarField(space, 0.5), FiringRateModel::step(1.0), c);
      }(),
      NegativeDensityError);
}

TEST_CASE("decoupled network relaxes to F(I)") {
  const AgeGrid ages(800, 20.0);
  const SpatialGrid space(4);
  const Problem p = problem(0.0, 1.0, LearningRule::Kind::hebbian, SigmaMap::identity(), 4);
  SolverConfig c = cfg_for(ages);
  c.save_every = 1.0;
  const RunRecord rec = nonlinear_run(homogeneous_datum(ages, space), preset_kernel(space), p, c, 40.0);
  for (std::size_t i = 0; i < space.size(); ++i) {
    CHECK(std::abs(rec.N_series.back()[i] - 0.5) < 1e-3);
    CHECK(rec.S_series.back()[i] == doctest::Approx(1.0 + rec.final_kernel.max_abs() * 0.0).epsilon(1e-12));
  }
  // w decays to gamma G = 0
  CHECK(rec.final_kernel.max_abs() <= 10.0 * std::exp(-40.0) * 1.0001);
}

TEST_CASE("run record bookkeeping and a-priori bounds") {
  const AgeGrid ages(400, 20.0);
  const SpatialGrid space(8);
  const Problem p = problem(1.0, 1.0);
  SolverConfig c = cfg_for(ages);
  c.save_every = 0.25;
  const RunRecord rec = nonlinear_run(homogeneous_datum(ages, space), preset_kernel(space), p, c, 5.0);
  REQUIRE(rec.times.size() == 21);
  CHECK(rec.N_series.size() == rec.times.size());
  CHECK(rec.S_series.size() == rec.times.size());
  CHECK(rec.mass_series.size() == rec.times.size());
  CHECK(rec.w_snapshots.size() == rec.times.size());
  for (std::size_t i = 1; i < rec.times.size(); ++i) CHECK(rec.times[i] > rec.times[i - 1]);
  CHECK(rec.times.back() == doctest::Approx(5.0));
  const double w_bound = std::max(10.0, p.rule.gamma) + 1e-9;
  for (std::size_t k = 0; k < rec.times.size(); ++k) {
    CHECK(rec.N_series[k].max() <= 1.0 + 1e-9);
    CHECK(rec.N_series[k].min() >= 0.0);
    CHECK(rec.w_snapshots[k].max_abs() <= w_bound);
  }
}

TEST_CASE("lagged and iterated coupling agree to O(dt)") {
  const AgeGrid ages(400, 20.0);
  const SpatialGrid space(8);
  const Problem p = problem(1.0, 1.0);
  SolverConfig lag = cfg_for(ages);
  SolverConfig it = lag;
  it.coupling = Coupling::iterate;
  it.tol = 1e-12;
  it.damping = 0.5;
  const DensityField n0 = homogeneous_datum(ages, space);
  const RunRecord a = nonlinear_run(n0, preset_kernel(space), p, lag, 5.0);
  const RunRecord b = nonlinear_run(n0, preset_kernel(space), p, it, 5.0);
  double worst = 0.0;
  for (std::size_t k = 0; k < a.times.size(); ++k) worst = std::max(worst, norms(a.S_series[k], b.S_series[k]).linf);
  CHECK(worst < 10.0 * lag.dt);
  CHECK(b.coupling_iterations > a.coupling_iterations);
}

TEST_CASE("iterated coupling reports non-convergence with its residual") {
  const AgeGrid ages(400, 20.0);
  const SpatialGrid space(4);
  SolverConfig c = cfg_for(ages);
  c.coupling = Coupling::iterate;
  c.max_iters = 1;
  c.tol = 1e-14;
  try {
    nonlinear_run(homogeneous_datum(ages, space), preset_kernel(space),
                  problem(1.0, 1.0, LearningRule::Kind::hebbian, SigmaMap::identity(), 4), c, 1.0);
    FAIL("expected non-convergence");
  } catch (const ConvergenceError& e) {
    CHECK(e.residual() > 1e-14);
    CHECK(std::string(e.what()).find("residual") != std::string::npos);
  }
}

TEST_CASE("serial and parallel runs are identical") {
  const AgeGrid ages(200, 20.0);
  const SpatialGrid space(8);
  const Problem p = problem(10.0, 1.0, LearningRule::Kind::gaussian_sigmoid);
  SolverConfig a = cfg_for(ages);
  SolverConfig b = a;
  b.parallel = false;
  const DensityField n0 = homogeneous_datum(ages, space);
  const RunRecord ra = nonlinear_run(n0, preset_kernel(space), p, a, 2.0);
  const RunRecord rb = nonlinear_run(n0, preset_kernel(space), p, b, 2.0);
  CHECK(ra.final_density == rb.final_density);
  CHECK(ra.final_kernel == rb.final_kernel);
  CHECK(ra.N_series == rb.N_series);
}

TEST_CASE("age-domain and input preconditions") {
  const AgeGrid ages(200, 5.0);
  const SpatialGrid space(4);
  const Problem p = problem(1.0, 10.0, LearningRule::Kind::hebbian, SigmaMap::identity(), 4);
  CHECK_THROWS_AS(nonlinear_run(homogeneous_datum(ages, space), preset_kernel(space), p, cfg_for(ages), 1.0),
                  PreconditionError);
  const Problem zero = problem(1.0, 0.0, LearningRule::Kind::hebbian, SigmaMap::clamped(2.0), 4);
  CHECK_THROWS_AS(large_input_run({1.0}, homogeneous_datum(ages, space), preset_kernel(space), zero, cfg_for(ages), {1.0}),
                  PreconditionError);
}

TEST_CASE("large input with a clamped threshold") {
  const AgeGrid ages(400, 20.0);
  const SpatialGrid space(4);
  const Problem p = problem(1.0, 1.0, LearningRule::Kind::hebbian, SigmaMap::clamped(2.0), 4);
  const auto res = large_input_run({1000.0}, homogeneous_datum(ages, space), preset_kernel(space), p, cfg_for(ages), {1.0});
  CHECK(res.distance[0][0] < 1e-2);
}

TEST_CASE("large input with the identity threshold silences the network") {
  const AgeGrid ages(400, 20.0);
  const SpatialGrid space(4);
  const Problem p = problem(1.0, 1.0, LearningRule::Kind::hebbian, SigmaMap::identity(), 4);
  SolverConfig c = cfg_for(ages);
  c.age_domain_guard = false;
  const auto res = large_input_run({1.0, 10.0, 100.0}, homogeneous_datum(ages, space), preset_kernel(space), p, c, {1.0});
  CHECK(res.activity_sup[1][0] < res.activity_sup[0][0]);
  CHECK(res.activity_sup[2][0] <= res.activity_sup[1][0]);
  CHECK(res.activity_sup[2][0] < 1e-12);
}
