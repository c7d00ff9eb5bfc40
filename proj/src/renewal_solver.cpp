#include "etnet/renewal_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "etnet/error.hpp"
#include "etnet/kernels.hpp"
#include "etnet/quadrature.hpp"

namespace etnet {

namespace {

constexpr double kNegativeSentinel = -1e-12;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void check_positive(DensityField& n) {
  for (auto& v : n.values()) {
    if (v < 0.0) {
      if (v < kNegativeSentinel) throw NegativeDensityError("density entry " + fmt(v) + " below round-off sentinel");
      v = 0.0;
    }
  }
}

// Dispatch on serial/parallel once per call.
struct Ops {
  bool parallel;
  void activity(const DensityField& n, const ScalarField& S, const FiringRateModel& m, ScalarField& out) const {
    parallel ? kernels::parallel::activity(n, S, m, out) : kernels::serial::activity(n, S, m, out);
  }
  void advance(DensityField& n, const ScalarField& S, const FiringRateModel& m, double dtp, ScalarField& inj) const {
    parallel ? kernels::parallel::advance(n, S, m, dtp, inj) : kernels::serial::advance(n, S, m, dtp, inj);
  }
  void apply(const ConnectivityKernel& w, const ScalarField& v, ScalarField& out) const {
    parallel ? kernels::parallel::kernel_apply(w, v, out) : kernels::serial::kernel_apply(w, v, out);
  }
  void relax(ConnectivityKernel& w, const ScalarField& a, const LearningRule& r, double dt) const {
    parallel ? kernels::parallel::relax_kernel(w, a, r, dt) : kernels::serial::relax_kernel(w, a, r, dt);
  }
};

struct Stepping {
  std::size_t steps;
  double dt;
  std::size_t stride;
};

Stepping plan(double dt_requested, double t_end, double save_every) {
  if (!(dt_requested > 0.0)) throw PreconditionError("dt must be positive");
  if (!(t_end >= 0.0)) throw PreconditionError("t_end must be nonnegative");
  Stepping p;
  p.steps = static_cast<std::size_t>(std::ceil(t_end / dt_requested - 1e-9));
  p.dt = p.steps > 0 ? t_end / static_cast<double>(p.steps) : dt_requested;
  p.stride = save_every > 0.0 ? std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(save_every / p.dt))) : 1;
  return p;
}

bool is_save_step(std::size_t k, const Stepping& p) { return k % p.stride == 0 || k == p.steps; }

}  // namespace

void check_cfl(const SolverConfig& cfg, const AgeGrid& ages, const FiringRateModel& model) {
  if (!(cfg.epsilon > 0.0 && cfg.epsilon <= 1.0)) throw PreconditionError("epsilon must lie in (0, 1]");
  if (!(cfg.tol > 0.0)) throw PreconditionError("Picard tolerance must be positive");
  if (!cfg.cfl_guard) return;
  const double dtp = cfg.dt / cfg.epsilon;
  const double ds = ages.ds();
  if (dtp > ds * (1.0 + 1e-12))
    throw CflError("CFL violation: dt/epsilon = " + fmt(dtp) + " exceeds ds = " + fmt(ds));
  if (cfg.dt * model.p_inf() > 1.0)
    throw CflError("CFL violation: dt*p_inf = " + fmt(cfg.dt * model.p_inf()) + " exceeds 1");
  // Positivity of the upwind update with the effective cell rates.
  const double q_max = std::expm1(model.p_inf() * ds) / ds;
  const double coeff = dtp / ds + dtp * q_max;
  if (coeff > 1.0 + 1e-12)
    throw CflError("positivity restriction: dt/epsilon = " + fmt(dtp) + " with ds = " + fmt(ds) +
                   " gives dt/epsilon*(1/ds + q_max) = " + fmt(coeff) + " > 1");
}

double stimulation_bound(const Problem& problem, double w0_sup, double g_sup) {
  const double n_bound = problem.rate.p_inf() * g_sup;
  const double w_bound = std::max(w0_sup, problem.rule.gamma * problem.rule.sup_on(n_bound));
  return w_bound * n_bound + problem.input.max_abs();
}

void check_age_domain(const AgeGrid& ages, const FiringRateModel& model, double S_bound) {
  const double reach = model.s_star(S_bound);
  if (!(reach < ages.s_max()))
    throw PreconditionError("age grid too short: firing threshold reaches s = " + fmt(reach) +
                            " under the a-priori stimulation bound " + fmt(S_bound) + " but s_max = " +
                            fmt(ages.s_max()));
}

void normalize_mass(DensityField& n, const ScalarField& g) {
  if (!(n.space() == g.grid())) throw DimensionError("normalize_mass: grid mismatch");
  const double ds = n.ages().ds();
  for (std::size_t ix = 0; ix < n.space().size(); ++ix) {
    auto col = n.column(ix);
    const double m = column_integral(col, ds);
    if (m <= 0.0) {
      if (g[ix] != 0.0) throw PreconditionError("cannot normalise a column with zero mass");
      continue;
    }
    const double scale = g[ix] / m;
    for (auto& v : col) v *= scale;
  }
}

DensityField linear_step(const DensityField& n, const ScalarField& S, const FiringRateModel& model,
                         const SolverConfig& cfg) {
  if (!(n.space() == S.grid())) throw DimensionError("linear_step: S is on a different spatial grid");
  check_cfl(cfg, n.ages(), model);
  DensityField out = n;
  ScalarField injected(n.space());
  Ops{cfg.parallel}.advance(out, S, model, cfg.dt / cfg.epsilon, injected);
  check_positive(out);
  return out;
}

RunRecord linear_run(const DensityField& n0, const ScalarField& S, const FiringRateModel& model,
                     const SolverConfig& cfg, double t_end, const RunObserver& observer) {
  if (!(n0.space() == S.grid())) throw DimensionError("linear_run: S is on a different spatial grid");
  const Stepping st = plan(cfg.dt, t_end, cfg.save_every);
  SolverConfig c = cfg;
  c.dt = st.dt;
  check_cfl(c, n0.ages(), model);
  const Ops ops{cfg.parallel};
  const double dtp = st.dt / cfg.epsilon;

  RunRecord rec;
  rec.dt = st.dt;
  DensityField n = n0;
  ScalarField N(n.space());
  const ConnectivityKernel no_kernel;
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * st.dt;
    if (is_save_step(k, st)) {
      ops.activity(n, S, model, N);
      rec.times.push_back(t);
      rec.N_series.push_back(N);
      rec.S_series.push_back(S);
      rec.mass_series.push_back(age_integral(n));
      if (observer) observer(RunSample{t, &n, N, S, no_kernel});
    }
    if (k == st.steps) break;
    ops.advance(n, S, model, dtp, N);
    check_positive(n);
  }
  rec.final_density = std::move(n);
  rec.final_S = S;
  return rec;
}

RunRecord nonlinear_run(const DensityField& n0, const ConnectivityKernel& w0, const Problem& problem,
                        const SolverConfig& cfg, double t_end, const RunObserver& observer) {
  const SpatialGrid& grid = n0.space();
  if (!(w0.grid() == grid) || !(problem.input.grid() == grid))
    throw DimensionError("nonlinear_run: density, kernel and input must share the spatial grid");
  if (n0.min() < 0.0) throw PreconditionError("initial density must be nonnegative");
  for (double v : w0.values())
    if (v < 0.0) throw PreconditionError("initial kernel must be nonnegative");

  const Stepping st = plan(cfg.dt, t_end, cfg.save_every);
  SolverConfig c = cfg;
  c.dt = st.dt;
  check_cfl(c, n0.ages(), problem.rate);
  if (!(cfg.max_iters > 0)) throw PreconditionError("max_iters must be positive");
  if (!(cfg.damping > 0.0 && cfg.damping <= 1.0)) throw PreconditionError("damping must lie in (0, 1]");
  if (cfg.age_domain_guard) {
    const ScalarField g0 = age_integral(n0);
    check_age_domain(n0.ages(), problem.rate, stimulation_bound(problem, w0.max_abs(), g0.max_abs()));
  }

  const Ops ops{cfg.parallel};
  const double dtp = st.dt / cfg.epsilon;
  const FiringRateModel& model = problem.rate;
  const ScalarField& I = problem.input;

  DensityField n = n0;
  ConnectivityKernel w = w0;
  ScalarField S = I;
  ScalarField N(grid), KN(grid), S_new(grid);

  RunRecord rec;
  rec.dt = st.dt;

  // S = K[w] N(n, S) + I by damped Picard; the damping is halved whenever the update grows.
  // Returns the final update size.
  auto picard = [&](int max_iters) {
    double res = 0.0, prev = INFINITY, omega = cfg.damping;
    for (int it = 0; it < max_iters; ++it) {
      ops.activity(n, S, model, N);
      ops.apply(w, N, KN);
      res = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        S_new[i] = KN[i] + I[i];
        res = std::max(res, std::abs(S_new[i] - S[i]));
      }
      ++rec.coupling_iterations;
      if (res > prev) omega = std::max(0.5 * omega, 1e-3);
      prev = res;
      for (std::size_t i = 0; i < grid.size(); ++i) S[i] = (1.0 - omega) * S[i] + omega * S_new[i];
      if (res < cfg.tol) return res;
    }
    return res;
  };

  // Consistent S at t = 0 in either mode; lagged mode tolerates an unconverged start.
  {
    const ScalarField start = S;
    const double res = picard(cfg.max_iters);
    if (res >= cfg.tol && cfg.coupling == Coupling::iterate)
      throw ConvergenceError("Picard iteration for S did not converge at t = 0 (residual " + fmt(res) + ")", res,
                             cfg.max_iters);
    if (!std::isfinite(S.max_abs())) S = start;
  }

  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * st.dt;
    if (k > 0) {
      if (cfg.coupling == Coupling::lagged) {
        picard(1);
      } else {
        const double res = picard(cfg.max_iters);
        if (res >= cfg.tol)
          throw ConvergenceError("Picard iteration for S did not converge at t = " + fmt(t) + " (residual " +
                                     fmt(res) + ")",
                                 res, cfg.max_iters);
      }
    }
    const bool save = is_save_step(k, st);
    if (save || k == st.steps) {
      ops.activity(n, S, model, N);
      rec.times.push_back(t);
      rec.N_series.push_back(N);
      rec.S_series.push_back(S);
      rec.mass_series.push_back(age_integral(n));
      if (cfg.record_kernels) rec.w_snapshots.push_back(w);
      if (observer) observer(RunSample{t, &n, N, S, w});
    }
    if (k == st.steps) break;
    ops.advance(n, S, model, dtp, N);  // N <- activity of the pre-step field under S
    check_positive(n);
    ops.relax(w, N, problem.rule, st.dt);
  }

  rec.final_density = std::move(n);
  rec.final_kernel = std::move(w);
  rec.final_S = std::move(S);
  return rec;
}

LargeInputResult large_input_run(const std::vector<double>& k_values, const DensityField& n0,
                                 const ConnectivityKernel& w0, const Problem& problem, const SolverConfig& cfg,
                                 const std::vector<double>& sample_times) {
  if (problem.input.size() == 0 || problem.input.min() <= 0.0)
    throw PreconditionError("large-input study needs I(x) > 0 on the grid");
  if (sample_times.empty()) throw PreconditionError("large-input study needs at least one sample time");
  if (!std::is_sorted(sample_times.begin(), sample_times.end()) || sample_times.front() < 0.0)
    throw PreconditionError("sample times must be nonnegative and increasing");

  const double t_end = sample_times.back();
  const FiringRateModel limit_model = problem.rate.at_infinite_input();

  // Captures n at the recorded times closest to each sample time.
  auto sampler = [&](std::vector<DensityField>& out, double dt) {
    return [&out, &sample_times, dt](const RunSample& s) {
      for (std::size_t j = 0; j < sample_times.size(); ++j)
        if (std::abs(s.t - sample_times[j]) < 0.5 * dt) out[j] = *s.density;
    };
  };

  SolverConfig c = cfg;
  c.save_every = 0.0;  // observe every step so sample times are hit exactly
  c.record_kernels = false;

  std::vector<DensityField> reference(sample_times.size());
  const Stepping st = plan(cfg.dt, t_end, 0.0);
  linear_run(n0, ScalarField(n0.space(), 0.0), limit_model, c, t_end, sampler(reference, st.dt));

  LargeInputResult result;
  result.k_values = k_values;
  result.sample_times = sample_times;
  for (double k : k_values) {
    if (!(k > 0.0)) throw PreconditionError("large-input scale k must be positive");
    Problem pk = problem;
    for (auto& v : pk.input.values()) v *= k;
    std::vector<DensityField> snaps(sample_times.size());
    RunRecord rec = nonlinear_run(n0, w0, pk, c, t_end, sampler(snaps, st.dt));
    std::vector<double> dist, nsup;
    for (std::size_t j = 0; j < sample_times.size(); ++j) {
      dist.push_back(norms(snaps[j], reference[j]).l1_sx);
      double best = 0.0;
      for (std::size_t i = 0; i < rec.times.size(); ++i)
        if (std::abs(rec.times[i] - sample_times[j]) < 0.5 * rec.dt) best = rec.N_series[i].max_abs();
      nsup.push_back(best);
    }
    result.distance.push_back(std::move(dist));
    result.activity_sup.push_back(std::move(nsup));
    // Keep the series but drop the per-step density history.
    result.runs.push_back(std::move(rec));
  }
  return result;
}

}  // namespace etnet
