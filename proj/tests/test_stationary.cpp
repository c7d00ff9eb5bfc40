#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <tuple>

#include "etnet/config.hpp"
#include "etnet/error.hpp"
#include "etnet/quadrature.hpp"
#include "etnet/stationary.hpp"

using namespace etnet;

namespace {

constexpr double kRootG1I1 = 1.1069193403762174;
constexpr double kRootG15I1 = 1.7339996896214678;
constexpr double kRootG35I5 = 5.150435534002976;

StationaryProblem homogeneous(double gamma, double I0, std::size_t nx = 16,
                              LearningRule::Kind kind = LearningRule::Kind::hebbian) {
  const SpatialGrid grid(nx);
  return {LearningRule{kind, gamma}, SurvivalFunction::exact(FiringRateModel::step(1.0)), ScalarField(grid, 1.0),
          ScalarField(grid, I0)};
}

}  // namespace

TEST_CASE("T reduces to the input without coupling") {
  const auto p = homogeneous(0.0, 0.7);
  const ScalarField S = ScalarField::sample(p.g.grid(), [](double x) { return 3 * x; });
  const ScalarField T = apply_T(S, p);
  for (double v : T.values()) CHECK(v == 0.7);
  const StationaryState st = solve_stationary(p, S);
  CHECK(st.converged);
  CHECK(st.iterations <= 2);
  for (double v : st.S_star.values()) CHECK(v == 0.7);
}

TEST_CASE("T on constants is the scalar map") {
  for (double c : {0.0, 0.5, 2.0}) {
    const auto p = homogeneous(3.0, 0.25);
    const ScalarField T = apply_T(ScalarField(p.g.grid(), c), p);
    for (double v : T.values()) CHECK(v == doctest::Approx(3.0 / std::pow(1 + c, 3) + 0.25).epsilon(1e-13));
  }
}

TEST_CASE("sigmoid rule collapses on constant stimulation") {
  const auto p = homogeneous(2.0, 0.1, 16, LearningRule::Kind::gaussian_sigmoid);
  const double c = 0.4;
  const double F = 1.0 / (1.0 + c);
  const double expect = 2.0 * F / (1.0 + std::exp(-2.0 * F * F + 2.0)) + 0.1;
  const ScalarField T = apply_T(ScalarField(p.g.grid(), c), p);
  for (double v : T.values()) CHECK(v == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("scalar roots") {
  const auto F = SurvivalFunction::exact(FiringRateModel::step(1.0));
  const LearningRule heb{LearningRule::Kind::hebbian, 0.0};
  CHECK(scalar_stationary(heb, 0.3, F) == 0.3);
  CHECK(std::abs(scalar_stationary({LearningRule::Kind::hebbian, 1.0}, 1.0, F) - kRootG1I1) < 1e-10);
  CHECK(std::abs(scalar_stationary({LearningRule::Kind::hebbian, 15.0}, 1.0, F) - kRootG15I1) < 1e-10);
  CHECK(std::abs(scalar_stationary({LearningRule::Kind::hebbian, 35.0}, 5.0, F) - kRootG35I5) < 1e-10);
  CHECK_THROWS_AS(scalar_stationary({LearningRule::Kind::hebbian, -1.0}, 1.0, F), PreconditionError);
}

TEST_CASE("spatial fixed point matches the scalar root") {
  for (auto [gamma, I0, root] : {std::tuple{1.0, 1.0, kRootG1I1}, std::tuple{15.0, 1.0, kRootG15I1}}) {
    const auto p = homogeneous(gamma, I0);
    const StationaryState st = solve_stationary(p, p.input);
    CHECK(st.converged);
    CHECK(st.residual < 1e-12);
    for (double v : st.S_star.values()) CHECK(std::abs(v - root) < 1e-10);
    CHECK(norms(apply_T(st.S_star, p), st.S_star).linf < 2e-12);
    for (std::size_t i = 0; i < st.N_star.size(); ++i) CHECK(st.N_star[i] == doctest::Approx(p.F(st.S_star[i])));
    CHECK(st.w_star(0, 3) == doctest::Approx(gamma * st.N_star[0] * st.N_star[3]));
  }
}

TEST_CASE("contraction certificate and geometric decay") {
  const auto weak = homogeneous(1.0, 1.0);
  const StationaryState st = solve_stationary(weak, ScalarField(weak.g.grid(), 0.0));
  REQUIRE(st.certificate.holds);
  const auto& r = st.residual_history;
  for (std::size_t k = 1; k < r.size() && r[k] > 1e-13; ++k) CHECK(r[k] / r[k - 1] <= st.certificate.bound + 0.05);
  CHECK_FALSE(stationary_certificate(homogeneous(35.0, 5.0)).holds);
}

TEST_CASE("non-convergence is flagged and the best iterate returned") {
  const auto p = homogeneous(15.0, 1.0);
  StationaryOptions o;
  o.max_iters = 3;
  const StationaryState st = solve_stationary(p, ScalarField(p.g.grid(), 0.0), o);
  CHECK_FALSE(st.converged);
  CHECK(st.residual > o.tol);
  CHECK(st.residual == doctest::Approx(*std::min_element(st.residual_history.begin(), st.residual_history.end())));
  CHECK_THROWS_AS(solve_stationary(p, p.input, StationaryOptions{0.0}), PreconditionError);
}

TEST_CASE("multistart finds the unique weak-coupling fixed point once") {
  const auto p = homogeneous(1.0, 1.0);
  const auto all = solve_stationary_multistart(p);
  REQUIRE(all.size() == 1);
  CHECK(std::abs(all[0].S_star[0] - kRootG1I1) < 1e-10);
}

TEST_CASE("reconstructed density carries the mass profile") {
  const SpatialGrid grid(6);
  const auto model = FiringRateModel::step(1.0);
  const ScalarField g = ScalarField::sample(grid, [](double x) { return 0.5 + x; });
  const ScalarField I = ScalarField::sample(grid, [](double x) { return std::pow(std::sin(2 * M_PI * x), 2); });
  {
    const StationaryProblem p{{LearningRule::Kind::hebbian, 1.0}, SurvivalFunction::exact(model), g, I};
    const StationaryState st = solve_stationary(p, I);
    REQUIRE(st.converged);
    const AgeGrid fine(200000, 40.0);
    const ScalarField m = age_integral(reconstruct_density(st, model, fine));
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(m[i] - g[i]) < 1e-8);
  }
  {
    const AgeGrid ages(400, 20.0);
    const StationaryProblem p{{LearningRule::Kind::hebbian, 1.0}, SurvivalFunction::scheme(model, ages), g, I};
    const StationaryState st = solve_stationary(p, I);
    REQUIRE(st.converged);
    const ScalarField m = age_integral(reconstruct_density(st, model, ages, true));
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(m[i] - g[i]) < 1e-12);
  }
}

TEST_CASE("stationary triple is a steady state of the dynamics") {
  ExperimentConfig cfg = preset_config("g1i1v");
  cfg.nx = 8;
  cfg.ns = 400;
  const auto ages = cfg.ages();
  const LimitProblem lp = cfg.limit_problem();
  const StationaryProblem p{lp.rule, lp.F, lp.g, lp.input};
  StationaryOptions o;
  o.tol = 1e-13;
  const StationaryState st = solve_stationary(p, p.input, o);
  REQUIRE(st.converged);
  const DensityField n = reconstruct_density(st, lp.F.model(), ages, true);
  const Problem prob = cfg.problem();
  SolverConfig sc = cfg.solver();
  const RunRecord rec = nonlinear_run(n, st.w_star, prob, sc, 100 * sc.dt);
  CHECK(norms(rec.N_series.back(), st.N_star).linf < 1e-9);
  CHECK(norms(rec.final_S, st.S_star).linf < 1e-9);
}

TEST_CASE("inhomogeneous fixed point reproduces the late-time activity") {
  ExperimentConfig cfg = preset_config("g1i1v");
  cfg.nx = 16;
  const LimitProblem lp = cfg.limit_problem();
  const StationaryProblem p{lp.rule, lp.F, lp.g, lp.input};
  const StationaryState st = solve_stationary(p, p.input);
  CHECK(st.residual < 1e-10);
  const RunRecord rec = nonlinear_run(cfg.initial_density(), cfg.initial_kernel(), cfg.problem(), cfg.solver(), cfg.t_end);
  CHECK(norms(rec.N_series.back(), st.N_star).linf < 2e-3);
}
