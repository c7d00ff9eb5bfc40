#include "etnet/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "etnet/error.hpp"
#include "etnet/limit_solver.hpp"
#include "etnet/quadrature.hpp"
#include "etnet/stationary.hpp"

namespace etnet {

DecayFit fit_decay(std::span<const double> t, std::span<const double> d, double floor, double skip_fraction) {
  if (t.size() != d.size()) throw DimensionError("fit_decay: time and distance series differ in length");
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (d[i] > floor && std::isfinite(d[i])) usable.push_back(i);
  if (usable.size() < 5) throw PreconditionError("fit_decay needs at least 5 samples above the round-off floor");
  const double a = t[usable.front()], b = t[usable.back()];
  const double start = a + skip_fraction * (b - a);
  std::erase_if(usable, [&](std::size_t i) { return t[i] < start; });
  if (usable.size() < 5) throw PreconditionError("fit_decay needs at least 5 samples after dropping the transient");

  double mx = 0, my = 0;
  for (auto i : usable) mx += t[i], my += std::log(d[i]);
  const double n = static_cast<double>(usable.size());
  mx /= n, my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (auto i : usable) {
    const double dx = t[i] - mx, dy = std::log(d[i]) - my;
    sxx += dx * dx, sxy += dx * dy, syy += dy * dy;
  }
  if (sxx == 0.0) throw PreconditionError("fit_decay needs distinct sample times");
  DecayFit f;
  const double slope = sxy / sxx;
  f.lambda_hat = -slope;
  f.intercept = my - slope * mx;
  f.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  f.t_begin = t[usable.front()];
  f.t_end = t[usable.back()];
  f.samples = usable.size();
  return f;
}

DoeblinReport doeblin_constants(double p_star, double s_star, double p_inf) {
  if (!(s_star > 0.0)) throw PreconditionError("Doeblin constants need s* > 0");
  DoeblinReport r;
  r.p_star = p_star;
  r.s_star = s_star;
  r.t0 = 2.0 * s_star;
  r.alpha = p_star * s_star * std::exp(-2.0 * p_inf * s_star);
  r.lambda_theory = -std::log1p(-r.alpha) / (2.0 * s_star);
  r.degenerate = !(r.alpha > 1e-12);
  return r;
}

DoeblinReport doeblin_check(const DensityField& n0, const ScalarField& S, const FiringRateModel& model,
                            const OracleOptions& opts) {
  const AgeGrid& ages = n0.ages();
  const double ds = ages.ds();
  double s_star = model.s_star(S.max());
  if (!(s_star > 0.0)) s_star = ds;
  if (!(s_star < ages.s_max())) throw PreconditionError("s* lies outside the age grid");
  DoeblinReport r = doeblin_constants(model.p_star(), s_star, model.p_inf());
  r.tolerance = 2.0 * ds;

  const ScalarField g = age_integral(n0);
  const DensityField n = characteristics_oracle(n0, StimulationPath::frozen(S, r.t0), model, r.t0, opts);
  const double level = r.p_star * std::exp(-2.0 * model.p_inf() * s_star);
  double margin = INFINITY;
  for (std::size_t ix = 0; ix < n.space().size(); ++ix)
    for (std::size_t is = 0; is < ages.size() && ages.node(is) <= s_star * (1.0 + 1e-12); ++is)
      margin = std::min(margin, n(is, ix) - level * g[ix]);
  r.minorization_margin = margin;
  r.passed = !r.degenerate && margin >= -r.tolerance;
  return r;
}

HomogenizationSeries homogenization_metrics(const RunRecord& rec) {
  if (rec.w_snapshots.size() != rec.times.size())
    throw PreconditionError("homogenization metrics need a kernel snapshot at every recorded time");
  HomogenizationSeries h;
  h.times = rec.times;
  for (std::size_t i = 0; i < rec.times.size(); ++i) {
    h.w_dev.push_back(kernel_mean_deviation(rec.w_snapshots[i]));
    h.N_dev.push_back(mean_deviation(rec.N_series[i]));
    h.S_dev.push_back(mean_deviation(rec.S_series[i]));
  }
  return h;
}

std::vector<Certificate> regime_certificates(const RegimeSetup& s) {
  const double A = std::max(s.w0_sup, s.rule.gamma);
  const double omega = s.g.grid().length();
  const double g_sup = s.g.max_abs();
  const double p_inf = s.rate.p_inf();
  std::vector<Certificate> out;

  Certificate wp{"well_posedness", 0.0, false};
  if (s.rate.kind() == RateKind::smooth)
    wp.lhs = g_sup * omega * s.rate.dpdS_bound() * A;
  else
    wp.lhs = p_inf * s.rate.sigma().lipschitz() * omega * A * (s.n0_sup + p_inf * g_sup);
  wp.holds = wp.lhs < 1.0;
  out.push_back(wp);

  const SurvivalFunction F = SurvivalFunction::exact(s.rate);
  const ContractionCertificate sc = stationary_certificate(StationaryProblem{s.rule, F, s.g, s.input});
  out.push_back({"stationary_contraction", sc.bound, sc.holds});

  const UniquenessCertificate lc = limit_uniqueness_certificate(s.w0_sup, LimitProblem{s.rule, F, s.g, s.input});
  out.push_back({"limit_uniqueness", lc.bound, lc.holds});
  return out;
}

}  // namespace etnet
