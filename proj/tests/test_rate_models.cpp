#include <doctest.h>

#include <cmath>
#include <vector>

#include "etnet/error.hpp"
#include "etnet/rate_models.hpp"

using namespace etnet;

TEST_CASE("step rate values") {
  const auto m = FiringRateModel::step(1.0);
  CHECK(evaluate_p(m, 0.4, 0.5) == 0.0);
  CHECK(evaluate_p(m, 0.6, 0.5) == 1.0);
  CHECK(evaluate_p(m, 0.5, 0.5) == 0.0);  // strict inequality
  CHECK(evaluate_p(m, 0.1, -3.0) == 1.0);  // sigma(S) = S+
}

TEST_CASE("smooth rate saturates outside the ramp") {
  const double theta = 0.05;
  const auto sm = FiringRateModel::smooth(1.0, SigmaMap::identity(), theta);
  const auto st = FiringRateModel::step(1.0);
  double worst = 0.0;
  for (double S : {0.0, 0.3, 1.0, 2.5})
    for (int k = 0; k <= 400; ++k) {
      const double s = 0.01 * k;
      if (std::abs(s - S) < theta || std::abs(s - S - theta) < theta) continue;
      worst = std::max(worst, std::abs(evaluate_p(sm, s, S) - evaluate_p(st, s, S)));
    }
  CHECK(worst == 0.0);
}

TEST_CASE("rate bounds and monotonicity") {
  const std::vector<FiringRateModel> models{
      FiringRateModel::step(1.0), FiringRateModel::step(2.0, SigmaMap::clamped(1.5)),
      FiringRateModel::smooth(1.0, SigmaMap::identity(), 0.2), FiringRateModel::smooth(0.7, SigmaMap::constant(0.4), 0.1)};
  for (const auto& m : models) {
    const double s_star = m.s_star(3.0);
    for (double S = 0.0; S <= 3.0; S += 0.25) {
      double prev = 0.0;
      for (double s = 0.0; s <= 6.0; s += 0.01) {
        const double p = m.rate(s, S);
        CHECK(p >= 0.0);
        CHECK(p <= m.p_inf());
        CHECK(p >= prev);
        if (s > s_star) CHECK(p >= m.p_star());
        prev = p;
      }
    }
  }
}

TEST_CASE("dpdS_bound dominates sampled derivatives") {
  const auto m = FiringRateModel::smooth(1.5, SigmaMap::identity(), 0.3);
  double sampled = 0.0;
  const double h = 1e-6;
  for (double S = 0.0; S <= 3.0; S += 0.01)
    for (double s = 0.0; s <= 4.0; s += 0.01)
      sampled = std::max(sampled, std::abs(m.rate(s, S + h) - m.rate(s, S - h)) / (2 * h));
  CHECK(sampled <= m.dpdS_bound() * (1 + 1e-9));
  CHECK(sampled > 0.9 * m.dpdS_bound());
}

TEST_CASE("cumulative rate matches quadrature of the rate") {
  const auto m = FiringRateModel::smooth(1.3, SigmaMap::clamped(1.0), 0.4);
  for (double S : {0.2, 0.8, 3.0}) {
    double acc = 0.0;
    const int n = 200000;
    const double a = 3.0, h = a / n;
    for (int k = 0; k < n; ++k) acc += h * m.rate((k + 0.5) * h, S);
    CHECK(m.cumulative(a, S) == doctest::Approx(acc).epsilon(1e-8));
  }
}

TEST_CASE("survival function") {
  const auto m = FiringRateModel::step(1.0);
  CHECK(survival_F(m, 0.0) == 1.0);
  CHECK(survival_F(m, 1.0) == 0.5);
  CHECK(survival_F(FiringRateModel::step(2.0), 1.0) == doctest::Approx(1.0 / 1.5));

  const auto sm = FiringRateModel::smooth(1.0, SigmaMap::identity(), 1e-3);
  CHECK(std::abs(survival_F(sm, 1.0) - 0.5) < 1e-3);

  // smooth kind against the age-grid quadrature
  const auto wide = FiringRateModel::smooth(1.0, SigmaMap::identity(), 0.5);
  CHECK(survival_F_quadrature(wide, 1.0, AgeGrid(40000, 40.0)) == doctest::Approx(survival_F(wide, 1.0)).epsilon(1e-7));
  CHECK_THROWS_AS(survival_F_quadrature(m, 1.0, AgeGrid(100, 5.0)), PreconditionError);

  double prev = INFINITY;
  for (double S = 0.0; S <= 10.0; S += 0.05) {
    const double F = survival_F(wide, S);
    CHECK(F <= prev);
    CHECK(F > 0.0);
    CHECK(F <= wide.p_inf());
    prev = F;
  }
}

TEST_CASE("derivative of F is bounded by the Lipschitz constant") {
  for (double theta : {0.2, 0.5, 1.0}) {
    const auto m = FiringRateModel::smooth(1.0, SigmaMap::clamped(4.0), theta);
    const double s_star = m.s_star(10.0);
    const double p = m.p_inf();
    const double bound = p * p * m.dpdS_bound() * (s_star * s_star / 2 + s_star / p + 1 / (p * p));
    const double h = 1e-5;
    for (double S = 0.0; S <= 10.0; S += 0.05) {
      const double d = std::abs(survival_F(m, S + h) - survival_F(m, S - h)) / (2 * h);
      CHECK(d <= bound);
    }
  }
}

TEST_CASE("effective cell rates") {
  const AgeGrid ages(10, 1.0);
  std::vector<double> q(ages.size());
  cell_rates(FiringRateModel::step(1.0), 0.35, ages, q);
  CHECK(q[0] == 0.0);
  CHECK(q[3] == 0.0);
  CHECK(q[4] == doctest::Approx(std::expm1(0.05) / 0.1).epsilon(1e-14));
  CHECK(q[5] == doctest::Approx(std::expm1(0.1) / 0.1).epsilon(1e-14));
  CHECK(q[10] == doctest::Approx(1.0).epsilon(1e-14));
  // generic path agrees with the step fast path for a narrow smooth ramp away from the kink
  std::vector<double> r(ages.size());
  cell_rates(FiringRateModel::smooth(1.0, SigmaMap::identity(), 1e-9), 0.35, ages, r);
  for (std::size_t i = 0; i < q.size(); ++i) CHECK(r[i] == doctest::Approx(q[i]).epsilon(1e-7));
  std::vector<double> wrong(3);
  CHECK_THROWS_AS(cell_rates(FiringRateModel::step(1.0), 0.0, ages, wrong), DimensionError);
}

TEST_CASE("scheme survival function approaches F") {
  const auto m = FiringRateModel::step(1.0);
  double prev_err = INFINITY;
  for (std::size_t ns : {200, 400, 800}) {
    const double err = std::abs(scheme_survival_F(m, 1.13, AgeGrid(ns, 20.0)) - survival_F(m, 1.13));
    CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(prev_err < 1e-4);
  const auto scheme = SurvivalFunction::scheme(m, AgeGrid(800, 20.0));
  CHECK(scheme.is_scheme());
  CHECK(scheme(0.0) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(scheme(0.01) == doctest::Approx(survival_F(m, 0.01)).epsilon(1e-4));
}

TEST_CASE("sigma maps and the infinite-input rate") {
  CHECK(SigmaMap::clamped(2.0)(5.0) == 2.0);
  CHECK(SigmaMap::clamped(2.0)(-1.0) == 0.0);
  CHECK(SigmaMap::constant(0.5)(7.0) == 0.5);
  const auto inf_clamped = FiringRateModel::step(1.0, SigmaMap::clamped(2.0)).at_infinite_input();
  CHECK(inf_clamped.rate(1.9, 0.0) == 0.0);
  CHECK(inf_clamped.rate(2.1, 0.0) == 1.0);
  const auto inf_identity = FiringRateModel::step(1.0).at_infinite_input();
  CHECK(inf_identity.rate(100.0, 0.0) == 0.0);
  CHECK(survival_F(inf_identity, 0.0) == 0.0);
  CHECK_THROWS_AS(FiringRateModel::step(0.0), PreconditionError);
  CHECK_THROWS_AS(FiringRateModel::smooth(1.0, SigmaMap::identity(), 0.0), PreconditionError);
}

TEST_CASE("learning rules") {
  const LearningRule hebb{LearningRule::Kind::hebbian, 15.0};
  const LearningRule sig{LearningRule::Kind::gaussian_sigmoid, 1.0};
  CHECK(evaluate_G(hebb, 0.0, 0.0) == 0.0);
  CHECK(evaluate_G(sig, 1.0, 1.0) == 0.5);
  for (double a = 0.0; a <= 2.0; a += 0.1)
    for (double b = 0.0; b <= 2.0; b += 0.1) {
      CHECK(sig.G(a, b) == sig.G(b, a));
      CHECK(hebb.G(a, b) == hebb.G(b, a));
      CHECK(sig.G(a, b) > 0.0);
      CHECK(sig.G(a, b) < 1.0);
    }

  const SpatialGrid g(16);
  const ConnectivityKernel half = kernel_target(hebb, ScalarField(g, 0.5));
  for (double v : half.values()) CHECK(v == 15.0 / 4.0);

  // numerical rank one: residual after removing the dominant singular triple
  const auto N = ScalarField::sample(g, [](double x) { return 0.3 + x * x; });
  const ConnectivityKernel K = kernel_target(hebb, N);
  std::vector<double> v(g.size(), 1.0), u(g.size());
  double sigma1 = 0.0;
  for (int it = 0; it < 100; ++it) {
    double nu = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      u[i] = 0.0;
      for (std::size_t j = 0; j < g.size(); ++j) u[i] += K(i, j) * v[j];
      nu += u[i] * u[i];
    }
    nu = std::sqrt(nu);
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = u[i] / nu;
    sigma1 = nu;
  }
  double resid = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j) resid += std::pow(K(i, j) - sigma1 * v[i] * v[j], 2);
  CHECK(std::sqrt(resid) < 1e-10 * sigma1);

  CHECK(normalization_warning(LearningRule{LearningRule::Kind::hebbian, 1.0}, 1.0).has_value());
  CHECK_FALSE(normalization_warning(LearningRule{LearningRule::Kind::hebbian, 1.0}, 0.4).has_value());
}

TEST_CASE("input models") {
  const SpatialGrid g(8);
  InputModel sin2{InputModel::Kind::sin_squared, 5.0, 1.0, {}};
  const ScalarField I = sin2.evaluate(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double s = std::sin(2 * M_PI * g.node(i));
    CHECK(I[i] == doctest::Approx(5 * s * s));
    CHECK(I[i] >= 0.0);
  }
  InputModel c{InputModel::Kind::constant, 2.0, 10.0, {}};
  CHECK(c.evaluate(g)[3] == 20.0);
  InputModel t{InputModel::Kind::table, 1.0, 1.0, {1, 2, 3}};
  CHECK_THROWS_AS(t.evaluate(g), DimensionError);
}

TEST_CASE("closed-form scheme F for the step rate matches the discrete profile") {
  auto profile_F = [](const FiringRateModel& m, double S, const AgeGrid& ages) {
    std::vector<double> q(ages.size());
    cell_rates(m, S, ages, q);
    const std::size_t M = ages.cells();
    const double ds = ages.ds();
    if (!(q[M] > 0.0)) return 0.0;
    double n = 1.0, mass = 0.5 * ds;
    for (std::size_t i = 1; i < M; ++i) {
      n /= 1.0 + ds * q[i];
      mass += ds * n;
    }
    return 1.0 / (mass + n / q[M]);
  };
  for (auto sm : {SigmaMap::identity(), SigmaMap::clamped(2.0)})
    for (double p : {1.0, 3.0})
      for (std::size_t ns : {10, 800}) {
        const AgeGrid ages(ns, 20.0);
        const auto m = FiringRateModel::step(p, sm);
        for (double S = 0.0; S < 21.0; S += 0.0137) {
          const double a = profile_F(m, S, ages);
          CHECK(scheme_survival_F(m, S, ages) == doctest::Approx(a).epsilon(1e-13));
        }
        for (std::size_t i = 0; i <= ns; ++i)
          CHECK(scheme_survival_F(m, ages.node(i), ages) == doctest::Approx(profile_F(m, ages.node(i), ages)).epsilon(1e-13));
      }
}
