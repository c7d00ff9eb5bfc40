#include "etnet/limit_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "etnet/error.hpp"
#include "etnet/kernels.hpp"
#include "etnet/quadrature.hpp"
#include "etnet/stationary.hpp"

namespace etnet {

namespace {

ScalarField activity_of(const ScalarField& S, const LimitProblem& p) {
  ScalarField N(S.grid());
  for (std::size_t i = 0; i < S.size(); ++i) N[i] = p.g[i] * p.F(S[i]);
  return N;
}

}  // namespace

InnerResult inner_fixed_point(const ConnectivityKernel& w, const LimitProblem& p, const ScalarField& S_guess,
                              double tol, int max_iters) {
  if (!(tol > 0.0)) throw PreconditionError("inner tolerance must be positive");
  if (!(w.grid() == S_guess.grid()) || !(p.g.grid() == S_guess.grid()) || !(p.input.grid() == S_guess.grid()))
    throw DimensionError("inner_fixed_point: fields on different spatial grids");
  InnerResult r{S_guess, 0, 0.0};
  ScalarField KN(S_guess.grid());
  double omega = 1.0;
  double prev = INFINITY;
  for (int it = 1; it <= max_iters; ++it) {
    const ScalarField N = activity_of(r.S, p);
    kernels::parallel::kernel_apply(w, N, KN);
    double res = 0.0;
    for (std::size_t i = 0; i < KN.size(); ++i) res = std::max(res, std::abs(KN[i] + p.input[i] - r.S[i]));
    r.iterations = it;
    r.residual = res;
    if (res < tol) return r;
    if (res > prev) omega = std::max(0.5 * omega, 1e-3);
    prev = res;
    for (std::size_t i = 0; i < KN.size(); ++i) r.S[i] = (1.0 - omega) * r.S[i] + omega * (KN[i] + p.input[i]);
  }
  std::ostringstream msg;
  msg << "inner fixed point did not converge: residual " << r.residual << " after " << max_iters << " iterations";
  throw ConvergenceError(msg.str(), r.residual, max_iters);
}

UniquenessCertificate limit_uniqueness_certificate(double w0_sup, const LimitProblem& p) {
  const double A = std::max(w0_sup, p.rule.gamma);
  const double lo = std::max(0.0, p.input.min());
  const double hi = p.input.max() + A * p.F.model().p_inf() * p.g.max_abs() * p.g.grid().length();
  UniquenessCertificate c;
  c.bound = A * p.F.derivative_bound(lo, std::max(hi, lo + 1e-6));
  c.holds = c.bound < 1.0;
  return c;
}

RunRecord limit_run(const ConnectivityKernel& w0, const LimitProblem& p, const LimitConfig& cfg, double t_end,
                    const RunObserver& observer) {
  if (!(cfg.dt > 0.0)) throw PreconditionError("dt must be positive");
  if (!(t_end >= 0.0)) throw PreconditionError("t_end must be nonnegative");
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / cfg.dt - 1e-9));
  const double dt = steps > 0 ? t_end / static_cast<double>(steps) : cfg.dt;
  const std::size_t stride =
      cfg.save_every > 0.0 ? std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.save_every / dt))) : 1;

  RunRecord rec;
  rec.dt = dt;
  ConnectivityKernel w = w0;
  ScalarField S = p.input;
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * dt;
    InnerResult inner = inner_fixed_point(w, p, S, cfg.tol, cfg.max_iters);
    rec.coupling_iterations += inner.iterations;
    S = std::move(inner.S);
    const ScalarField N = activity_of(S, p);
    if (k % stride == 0 || k == steps) {
      rec.times.push_back(t);
      rec.N_series.push_back(N);
      rec.S_series.push_back(S);
      rec.mass_series.push_back(p.g);
      if (cfg.record_kernels) rec.w_snapshots.push_back(w);
      if (observer) observer(RunSample{t, nullptr, N, S, w});
    }
    if (k == steps) break;
    kernels::parallel::relax_kernel(w, N, p.rule, dt);
  }
  rec.final_kernel = std::move(w);
  rec.final_S = std::move(S);
  return rec;
}

namespace {

// Trapezoid rule in time over equally spaced samples.
double time_integral(const std::vector<double>& v, double h) {
  if (v.size() < 2) return 0.0;
  double sum = 0.5 * (v.front() + v.back());
  for (std::size_t i = 1; i + 1 < v.size(); ++i) sum += v[i];
  return sum * h;
}

double fitted_order(const std::vector<EpsilonRow>& rows, double EpsilonRow::*field) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& r : rows) {
    if (!(r.*field > 0.0)) continue;
    const double x = std::log(r.epsilon), y = std::log(r.*field);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
    ++n;
  }
  if (n < 2) return 0.0;
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

EpsilonStudy epsilon_study(const std::vector<double>& eps_list, const DensityField& n0, const ConnectivityKernel& w0,
                           const Problem& problem, const SolverConfig& base, double T, const LimitConfig& limit_cfg,
                           double dt_factor) {
  if (eps_list.empty()) throw PreconditionError("epsilon list is empty");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0 && eps_list[i] <= 1.0)) throw PreconditionError("epsilon values must lie in (0, 1]");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) throw PreconditionError("epsilon list must be decreasing");
  }
  if (!(T > 0.0)) throw PreconditionError("epsilon study needs T > 0");

  const AgeGrid& ages = n0.ages();
  const ScalarField g = age_integral(n0);
  LimitProblem lp{problem.rule, SurvivalFunction::scheme(problem.rate, ages), g, problem.input};

  // Limit reference at every one of its steps, interpolated linearly in time below.
  LimitConfig lc = limit_cfg;
  lc.record_kernels = false;
  lc.save_every = 0.0;
  const RunRecord ref = limit_run(w0, lp, lc, T);
  const double ref_dt = ref.dt;
  auto blend = [&](const std::vector<ScalarField>& series, double t) {
    const double r = std::clamp(t / ref_dt, 0.0, static_cast<double>(series.size() - 1));
    const auto k = std::min(static_cast<std::size_t>(r), series.size() - 2);
    const double f = r - static_cast<double>(k);
    ScalarField out = series[k];
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (1.0 - f) * series[k][i] + f * series[k + 1][i];
    return out;
  };

  EpsilonStudy study;
  study.T = T;
  for (double eps : eps_list) {
    SolverConfig c = base;
    c.epsilon = eps;
    c.dt = dt_factor * eps * ages.ds();
    c.record_kernels = false;
    c.save_every = 0.0;  // every step: the initial layer is only O(eps) wide
    std::vector<double> dN, dS, dn;
    auto observer = [&](const RunSample& s) {
      StationaryState st;
      st.S_star = blend(ref.S_series, s.t);
      st.N_star = blend(ref.N_series, s.t);
      dN.push_back(norms(s.activity, st.N_star).l1);
      dS.push_back(norms(s.stimulation, st.S_star).l1);
      dn.push_back(norms(*s.density, reconstruct_density(st, problem.rate, ages, true)).l1_sx);
    };
    const RunRecord run = nonlinear_run(n0, w0, problem, c, T, observer);
    study.rows.push_back(
        {eps, time_integral(dN, run.dt), time_integral(dn, run.dt), time_integral(dS, run.dt)});
  }
  study.order_N = fitted_order(study.rows, &EpsilonRow::dist_N);
  study.order_n = fitted_order(study.rows, &EpsilonRow::dist_n);
  return study;
}

}  // namespace etnet
