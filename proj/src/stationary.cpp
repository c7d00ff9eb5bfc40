#include "etnet/stationary.hpp"

#include <algorithm>
#include <cmath>

#include "etnet/error.hpp"
#include "etnet/quadrature.hpp"

namespace etnet {

namespace {

ScalarField activity_of(const ScalarField& S, const StationaryProblem& p) {
  ScalarField N(S.grid());
  for (std::size_t i = 0; i < S.size(); ++i) N[i] = p.g[i] * p.F(S[i]);
  return N;
}

double sup_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

ScalarField apply_T(const ScalarField& S, const StationaryProblem& p) {
  if (!(S.grid() == p.g.grid()) || !(S.grid() == p.input.grid()))
    throw DimensionError("apply_T: S, g and I must share the spatial grid");
  const ScalarField N = activity_of(S, p);
  const std::size_t nx = S.size();
  const double dx = S.grid().dx();
  ScalarField out(S.grid());
#pragma omp parallel for schedule(static)
  for (long il = 0; il < static_cast<long>(nx); ++il) {
    const auto i = static_cast<std::size_t>(il);
    double sum = 0.0;
    for (std::size_t j = 0; j < nx; ++j) sum += p.rule.G(N[i], N[j]) * N[j];
    out[i] = p.rule.gamma * sum * dx + p.input[i];
  }
  return out;
}

ContractionCertificate stationary_certificate(const StationaryProblem& p) {
  const double g_sup = p.g.max_abs();
  const double lo = std::max(0.0, p.input.min());
  const double F_hi = p.F.model().p_inf();  // F <= p_inf
  const double hi = p.input.max() + p.rule.gamma * p.rule.sup_on(g_sup * F_hi) * g_sup * F_hi *
                                        p.g.grid().length();
  const double dF = p.F.derivative_bound(lo, std::max(hi, lo + 1e-6));
  const double Fs = p.F.sup(lo, std::max(hi, lo + 1e-6));
  ContractionCertificate c;
  c.bound = p.rule.gamma * dF * (2.0 * g_sup * Fs + 1.0);
  c.holds = c.bound < 1.0;
  return c;
}

StationaryState solve_stationary(const StationaryProblem& p, const ScalarField& initial,
                                 const StationaryOptions& opts) {
  if (!(opts.tol > 0.0)) throw PreconditionError("stationary tolerance must be positive");
  if (!(opts.omega > 0.0 && opts.omega <= 1.0)) throw PreconditionError("damping must lie in (0, 1]");
  StationaryState st;
  st.certificate = stationary_certificate(p);

  ScalarField S = initial;
  ScalarField best = S;
  double best_res = INFINITY;
  double omega = opts.omega;
  double prev = INFINITY;
  for (int it = 1; it <= opts.max_iters; ++it) {
    const ScalarField TS = apply_T(S, p);
    const double res = sup_diff(TS, S);
    st.residual_history.push_back(res);
    if (res < best_res) {
      best_res = res;
      best = S;
    }
    st.iterations = it;
    if (res < opts.tol) {
      st.converged = true;
      break;
    }
    if (res > prev) omega = std::max(0.5 * omega, 1e-3);
    prev = res;
    for (std::size_t i = 0; i < S.size(); ++i) S[i] = (1.0 - omega) * S[i] + omega * TS[i];
  }
  if (!st.converged) S = best;
  st.residual = st.converged ? st.residual_history.back() : best_res;
  st.S_star = S;
  st.N_star = activity_of(S, p);
  st.w_star = kernel_target(p.rule, st.N_star);
  return st;
}

std::vector<StationaryState> solve_stationary_multistart(const StationaryProblem& p, const StationaryOptions& opts,
                                                         std::vector<ScalarField> initials) {
  if (initials.empty()) {
    ScalarField shifted = p.input;
    for (auto& v : shifted.values()) v += p.rule.gamma;
    initials = {p.input, shifted, ScalarField(p.input.grid(), 0.0)};
  }
  std::vector<StationaryState> found;
  for (const auto& init : initials) {
    StationaryState st = solve_stationary(p, init, opts);
    if (!st.converged) continue;
    const bool dup = std::any_of(found.begin(), found.end(), [&](const StationaryState& f) {
      return sup_diff(f.S_star, st.S_star) <= 10.0 * opts.tol;
    });
    if (!dup) found.push_back(std::move(st));
  }
  return found;
}

DensityField reconstruct_density(const StationaryState& state, const FiringRateModel& model, const AgeGrid& ages,
                                 bool scheme) {
  const SpatialGrid& grid = state.S_star.grid();
  DensityField n(ages, grid);
  const std::size_t M = ages.cells();
  const double ds = ages.ds();
  std::vector<double> q(ages.size());
  for (std::size_t ix = 0; ix < grid.size(); ++ix) {
    const double S = state.S_star[ix];
    const double N = state.N_star[ix];
    auto col = n.column(ix);
    if (!scheme) {
      for (std::size_t is = 0; is <= M; ++is) col[is] = N * std::exp(-model.cumulative(ages.node(is), S));
      continue;
    }
    cell_rates(model, S, ages, q);
    col[0] = N / (1.0 + 0.5 * ds * q[0]);
    for (std::size_t is = 1; is < M; ++is) col[is] = col[is - 1] / (1.0 + ds * q[is]);
    col[M] = q[M] > 0.0 ? 2.0 * col[M - 1] / (ds * q[M]) : 0.0;
  }
  return n;
}

double scalar_stationary(const LearningRule& rule, double I0, const SurvivalFunction& F) {
  if (rule.gamma < 0.0 || I0 < 0.0) throw PreconditionError("scalar_stationary needs gamma >= 0 and I0 >= 0");
  auto phi = [&](double S) {
    const double f = F(S);
    return rule.gamma * rule.G(f, f) * f + I0 - S;
  };
  const double Fmax = F.model().p_inf();
  double lo = I0;
  double hi = I0 + rule.gamma * rule.sup_on(Fmax) * Fmax;
  if (hi == lo) return lo;
  if (phi(lo) < 0.0 || phi(hi) > 0.0) throw ConvergenceError("scalar_stationary: bracket does not contain a root", 0.0, 0);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (phi(mid) >= 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace etnet
