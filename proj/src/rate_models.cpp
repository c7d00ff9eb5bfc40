#include "etnet/rate_models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "etnet/error.hpp"

namespace etnet {

namespace {

constexpr double kPi = 3.14159265358979323846;

double smoothstep(double z) noexcept {
  if (z <= 0.0) return 0.0;
  if (z >= 1.0) return 1.0;
  return z * z * (3.0 - 2.0 * z);
}

// Antiderivative of smoothstep with value 0 at z = 0.
double smoothstep_integral(double z) noexcept {
  if (z <= 0.0) return 0.0;
  if (z >= 1.0) return 0.5 + (z - 1.0);
  const double z3 = z * z * z;
  return z3 - 0.5 * z3 * z;
}

}  // namespace

double SigmaMap::operator()(double S) const noexcept {
  const double pos = std::max(S, 0.0);
  switch (kind) {
    case Kind::identity: return pos;
    case Kind::clamped: return std::min(pos, cap);
    case Kind::constant: return value;
  }
  return pos;
}

double SigmaMap::lipschitz() const noexcept { return kind == Kind::constant ? 0.0 : 1.0; }

double SigmaMap::at_infinity() const noexcept {
  switch (kind) {
    case Kind::identity: return std::numeric_limits<double>::infinity();
    case Kind::clamped: return cap;
    case Kind::constant: return value;
  }
  return std::numeric_limits<double>::infinity();
}

FiringRateModel FiringRateModel::step(double p_inf, SigmaMap sigma) {
  if (!(p_inf > 0.0)) throw PreconditionError("firing rate needs p_inf > 0");
  FiringRateModel m;
  m.kind_ = RateKind::step;
  m.p_inf_ = p_inf;
  m.sigma_ = sigma;
  return m;
}

FiringRateModel FiringRateModel::smooth(double p_inf, SigmaMap sigma, double theta) {
  if (!(p_inf > 0.0)) throw PreconditionError("firing rate needs p_inf > 0");
  if (!(theta > 0.0)) throw PreconditionError("smooth firing rate needs a smoothing width theta > 0");
  FiringRateModel m;
  m.kind_ = RateKind::smooth;
  m.p_inf_ = p_inf;
  m.sigma_ = sigma;
  m.theta_ = theta;
  return m;
}

double FiringRateModel::rate(double s, double S) const noexcept {
  const double sig = sigma_(S);
  if (kind_ == RateKind::step) return s > sig ? p_inf_ : 0.0;
  return p_inf_ * smoothstep((s - sig) / theta_);
}

double FiringRateModel::cumulative(double a, double S) const noexcept {
  const double sig = sigma_(S);
  if (!(a > sig)) return 0.0;
  if (kind_ == RateKind::step) return p_inf_ * (a - sig);
  return p_inf_ * theta_ * smoothstep_integral((a - sig) / theta_);
}

double FiringRateModel::dpdS_bound() const noexcept {
  if (kind_ == RateKind::step) return 0.0;
  // max of the smoothstep derivative is 3/2
  return 1.5 * p_inf_ * sigma_.lipschitz() / theta_;
}

double FiringRateModel::s_star(double S_upper) const noexcept {
  const double sig = sigma_(S_upper);
  return kind_ == RateKind::smooth ? sig + theta_ : sig;
}

FiringRateModel FiringRateModel::at_infinite_input() const {
  FiringRateModel m = *this;
  m.sigma_ = SigmaMap::constant(sigma_.at_infinity());
  return m;
}

double evaluate_p(const FiringRateModel& model, double s, double S) { return model.rate(s, S); }

double survival_F(const FiringRateModel& model, double S) {
  const double sig = model.sigma()(S);
  const double p = model.p_inf();
  if (!std::isfinite(sig)) return 0.0;
  if (model.kind() == RateKind::step) return 1.0 / (1.0 / p + sig);

  // exp(-Lambda) is 1 on [0, sigma], smooth on the ramp, and a pure exponential after it.
  const double theta = model.theta();
  constexpr int kPanels = 64;
  const double h = theta / kPanels;
  double ramp = 0.0;
  for (int k = 0; k <= kPanels; ++k) {
    const double z = static_cast<double>(k) / kPanels;
    const double coef = (k == 0 || k == kPanels) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    ramp += coef * std::exp(-p * theta * smoothstep_integral(z));
  }
  ramp *= h / 3.0;
  const double tail = std::exp(-0.5 * p * theta) / p;
  return 1.0 / (sig + ramp + tail);
}

double survival_F_quadrature(const FiringRateModel& model, double S, const AgeGrid& ages) {
  const double ds = ages.ds();
  double exponent = 0.0;
  double prev_rate = model.rate(0.0, S);
  double integral = 0.5 * ds;  // exp(0) at s = 0
  double surv = 1.0;
  for (std::size_t i = 1; i < ages.size(); ++i) {
    const double r = model.rate(ages.node(i), S);
    exponent += 0.5 * ds * (prev_rate + r);
    prev_rate = r;
    surv = std::exp(-exponent);
    integral += ages.weight(i) * surv;
  }
  if (surv > 1e-12) {
    std::ostringstream msg;
    msg << "age domain too short for survival quadrature: survival at s_max = " << ages.s_max() << " is " << surv;
    throw PreconditionError(msg.str());
  }
  return 1.0 / integral;
}

void cell_rates(const FiringRateModel& model, double S, const AgeGrid& ages, std::span<double> q) {
  if (q.size() != ages.size()) throw DimensionError("rate buffer does not match the age grid");
  const std::size_t M = ages.cells();
  const double ds = ages.ds();

  if (model.kind() == RateKind::step) {
    const double sig = model.sigma()(S);
    const double p = model.p_inf();
    const double q_full = std::expm1(p * ds) / ds;
    q[0] = 0.0;
    for (std::size_t i = 1; i < M; ++i) {
      const double a1 = ages.node(i);
      const double a0 = a1 - ds;
      if (a1 <= sig)
        q[i] = 0.0;
      else if (a0 >= sig)
        q[i] = q_full;
      else
        q[i] = std::expm1(p * (a1 - sig)) / ds;
    }
    const double a1 = ages.node(M);
    const double a0 = a1 - ds;
    q[M] = a1 <= sig ? 0.0 : p * (a1 - std::max(a0, sig)) / ds;
    return;
  }

  q[0] = 0.0;
  double prev = 0.0;
  for (std::size_t i = 1; i <= M; ++i) {
    const double cur = model.cumulative(ages.node(i), S);
    const double P = cur - prev;
    q[i] = i < M ? std::expm1(P) / ds : P / ds;
    prev = cur;
  }
}

namespace {

// Same value as the generic loop below for the step kind, in O(1): the profile is 1 up to the
// cell holding sigma and geometric beyond it.
double scheme_survival_F_step(const FiringRateModel& model, double S, const AgeGrid& ages) {
  const double sig = model.sigma()(S);
  const double p = model.p_inf();
  const std::size_t M = ages.cells();
  const double ds = ages.ds();
  std::size_t c = sig <= 0.0 ? 1 : static_cast<std::size_t>(std::min(sig / ds, static_cast<double>(M))) + 1;
  while (c > 1 && ages.node(c - 1) > sig) --c;
  while (c <= M && ages.node(c) <= sig) ++c;
  if (c > M) return 0.0;  // the closing cell never fires

  const double r = 1.0 / (1.0 + std::expm1(p * ds));
  double mass = 0.5 * ds + ds * static_cast<double>(c - 1);
  double n_last = 1.0;  // n at node M - 1
  if (c < M) {
    const double first = ages.node(c) - ds >= sig ? r : 1.0 / (1.0 + std::expm1(p * (ages.node(c) - sig)));
    const double L = static_cast<double>(M - c);
    mass += ds * first * -std::expm1(L * std::log(r)) / -std::expm1(-p * ds);
    n_last = first * std::pow(r, L - 1.0);
  }
  const double qM = p * (ages.node(M) - std::max(ages.node(M) - ds, sig)) / ds;
  return 1.0 / (mass + n_last / qM);
}

}  // namespace

double scheme_survival_F(const FiringRateModel& model, double S, const AgeGrid& ages) {
  if (model.kind() == RateKind::step) return scheme_survival_F_step(model, S, ages);
  std::vector<double> q(ages.size());
  cell_rates(model, S, ages, q);
  const std::size_t M = ages.cells();
  const double ds = ages.ds();
  if (!(q[M] > 0.0)) return 0.0;
  // stationary profile with n_0 = 1
  double n = 1.0;
  double mass = 0.5 * ds;
  for (std::size_t i = 1; i < M; ++i) {
    n /= 1.0 + ds * q[i];
    mass += ds * n;
  }
  const double n_last = 2.0 * n / (ds * q[M]);
  mass += 0.5 * ds * n_last;
  return (1.0 + 0.5 * ds * q[0]) / mass;
}

SurvivalFunction SurvivalFunction::exact(FiringRateModel model) {
  SurvivalFunction f;
  f.model_ = model;
  return f;
}

SurvivalFunction SurvivalFunction::scheme(FiringRateModel model, AgeGrid ages) {
  SurvivalFunction f;
  f.model_ = model;
  f.ages_ = ages;
  return f;
}

double SurvivalFunction::operator()(double S) const {
  return ages_ ? scheme_survival_F(model_, S, *ages_) : survival_F(model_, S);
}

double SurvivalFunction::derivative_bound(double lo, double hi, double spacing) const {
  if (hi < lo) std::swap(lo, hi);
  const double h = 1e-6;
  double m = 0.0;
  // Lattice anchored at lo: enlarging [lo, hi] only adds sample points.
  for (double S = lo; S <= hi + 0.5 * spacing; S += spacing)
    m = std::max(m, std::abs((*this)(S + h) - (*this)(S - h)) / (2.0 * h));
  return 1.05 * m;
}

double SurvivalFunction::sup(double lo, double hi, double spacing) const {
  if (hi < lo) std::swap(lo, hi);
  double m = 0.0;
  for (double S = lo; S <= hi + 0.5 * spacing; S += spacing) m = std::max(m, (*this)(S));
  return m;
}

double LearningRule::G(double a, double b) const noexcept {
  if (kind == Kind::hebbian) return a * b;
  const double d = a - b;
  return std::exp(-d * d) / (1.0 + std::exp(-2.0 * a * b + 2.0));
}

double LearningRule::sup_on(double bound) const noexcept {
  if (kind == Kind::hebbian) return bound * bound;
  return 1.0;
}

double evaluate_G(const LearningRule& rule, double a, double b) { return rule.G(a, b); }

ConnectivityKernel kernel_target(const LearningRule& rule, const ScalarField& n) {
  ConnectivityKernel out(n.grid());
  const std::size_t nx = n.size();
  for (std::size_t ix = 0; ix < nx; ++ix)
    for (std::size_t iy = 0; iy < nx; ++iy) out(ix, iy) = rule.gamma * rule.G(n[ix], n[iy]);
  return out;
}

std::optional<std::string> normalization_warning(const LearningRule& rule, double bound) {
  constexpr int kSamples = 40;
  const double h = std::max(bound, 1e-9) * 1e-6;
  double g_sup = 0.0;
  double grad_sup = 0.0;
  for (int i = 0; i <= kSamples; ++i) {
    for (int j = 0; j <= kSamples; ++j) {
      const double a = bound * i / kSamples;
      const double b = bound * j / kSamples;
      g_sup = std::max(g_sup, std::abs(rule.G(a, b)));
      const double ga = (rule.G(a + h, b) - rule.G(a - h, b)) / (2 * h);
      const double gb = (rule.G(a, b + h) - rule.G(a, b - h)) / (2 * h);
      grad_sup = std::max(grad_sup, std::max(std::abs(ga), std::abs(gb)));
    }
  }
  if (g_sup + grad_sup <= 1.0) return std::nullopt;
  std::ostringstream msg;
  msg << "learning rule exceeds the normalisation ||G|| + ||grad G|| <= 1 on [0, " << bound
      << "]^2 (value " << g_sup + grad_sup << "); kernel stays bounded through the activity bound";
  return msg.str();
}

ScalarField InputModel::evaluate(const SpatialGrid& grid) const {
  switch (kind) {
    case Kind::constant:
      return ScalarField(grid, scale * amplitude);
    case Kind::sin_squared:
      return ScalarField::sample(grid, [&](double x) {
        const double s = std::sin(2.0 * kPi * x);
        return scale * amplitude * s * s;
      });
    case Kind::table: {
      if (table.size() != grid.size())
        throw DimensionError("input table has " + std::to_string(table.size()) + " values for " +
                             std::to_string(grid.size()) + " position nodes");
      std::vector<double> v(table);
      for (double& e : v) e *= scale * amplitude;
      return ScalarField(grid, std::move(v));
    }
  }
  return ScalarField(grid, 0.0);
}

}  // namespace etnet
