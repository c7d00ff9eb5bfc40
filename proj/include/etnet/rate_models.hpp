#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "etnet/fields.hpp"
#include "etnet/grid.hpp"

namespace etnet {

/// Threshold map sigma(S): the age at which a neuron stimulated by S starts firing.
struct SigmaMap {
  enum class Kind { identity, clamped, constant };

  Kind kind = Kind::identity;
  double cap = std::numeric_limits<double>::infinity();  ///< clamped: sigma = min(S+, cap)
  double value = 0.0;                                    ///< constant: sigma = value

  static SigmaMap identity() { return {}; }
  static SigmaMap clamped(double cap) { return {Kind::clamped, cap, 0.0}; }
  static SigmaMap constant(double v) { return {Kind::constant, std::numeric_limits<double>::infinity(), v}; }

  double operator()(double S) const noexcept;
  double lipschitz() const noexcept;
  /// lim sigma(S) as S -> infinity (may be +inf).
  double at_infinity() const noexcept;

  friend bool operator==(const SigmaMap&, const SigmaMap&) = default;
};

enum class RateKind { step, smooth };

/// Firing rate p(s, S).
///
/// step:   p = p_inf * 1{s > sigma(S)}
/// smooth: p = p_inf * ramp((s - sigma(S)) / theta), ramp the clamped cubic 3z^2 - 2z^3.
///
/// Both kinds equal p_inf beyond s* = sup sigma (+ theta), so p* = p_inf.
class FiringRateModel {
public:
  static FiringRateModel step(double p_inf, SigmaMap sigma = SigmaMap::identity());
  static FiringRateModel smooth(double p_inf, SigmaMap sigma, double theta);

  RateKind kind() const noexcept { return kind_; }
  double p_inf() const noexcept { return p_inf_; }
  double p_star() const noexcept { return p_inf_; }
  double theta() const noexcept { return theta_; }
  const SigmaMap& sigma() const noexcept { return sigma_; }

  double rate(double s, double S) const noexcept;
  /// Lambda(a) = integral over [0, a] of p(tau, S) dtau, in closed form.
  double cumulative(double a, double S) const noexcept;

  /// Upper bound on |dp/dS|. Zero for the step kind (use sigma().lipschitz() there).
  double dpdS_bound() const noexcept;

  /// Smallest s* with p >= p* 1{s > s*} for every S in [0, S_upper].
  double s_star(double S_upper) const noexcept;

  /// The rate p(s, inf) as a model independent of S.
  FiringRateModel at_infinite_input() const;

  friend bool operator==(const FiringRateModel&, const FiringRateModel&) = default;

private:
  RateKind kind_ = RateKind::step;
  double p_inf_ = 1.0;
  SigmaMap sigma_{};
  double theta_ = 0.0;
};

double evaluate_p(const FiringRateModel& model, double s, double S);

/// F(S) = (integral of exp(-Lambda(s)) ds)^-1, closed form for the step kind.
double survival_F(const FiringRateModel& model, double S);

/// F(S) by trapezoid quadrature on an age grid, exponent accumulated with the trapezoid rule.
/// Throws PreconditionError when the survival function exceeds 1e-12 at s_max.
double survival_F_quadrature(const FiringRateModel& model, double S, const AgeGrid& ages);

/// Effective per-node loss rates used by the upwind scheme.
///
/// Node i >= 1 carries q_i = expm1(P_i) / ds with P_i the exact integral of p over the upwind
/// cell [s_{i-1}, s_i]; the closing node uses P_M / ds. Node 0 carries no loss, since the cell of
/// node 1 already covers [0, ds]. With these rates the scheme's stationary profile is
/// exp(-Lambda) sampled at the nodes and its boundary value equals the activity.
void cell_rates(const FiringRateModel& model, double S, const AgeGrid& ages, std::span<double> q);

/// Stationary activity per unit mass of the discrete upwind scheme on this age grid.
double scheme_survival_F(const FiringRateModel& model, double S, const AgeGrid& ages);

/// Survival normalisation used by the algebraic solvers: either the continuous F or the
/// discrete counterpart of a given age grid.
class SurvivalFunction {
public:
  static SurvivalFunction exact(FiringRateModel model);
  static SurvivalFunction scheme(FiringRateModel model, AgeGrid ages);

  double operator()(double S) const;
  const FiringRateModel& model() const noexcept { return model_; }
  bool is_scheme() const noexcept { return ages_.has_value(); }

  /// max |F'| over a lattice of [lo, hi] with the given spacing, by central differences, times 1.05.
  double derivative_bound(double lo, double hi, double spacing = 0.01) const;
  /// max F over the same lattice.
  double sup(double lo, double hi, double spacing = 0.01) const;

private:
  FiringRateModel model_;
  std::optional<AgeGrid> ages_;
};

/// Learning rule G(Na, Nb) scaled by the connectivity gamma.
struct LearningRule {
  enum class Kind { hebbian, gaussian_sigmoid };

  Kind kind = Kind::hebbian;
  double gamma = 0.0;

  double G(double a, double b) const noexcept;
  /// sup of G over [0, bound]^2.
  double sup_on(double bound) const noexcept;

  friend bool operator==(const LearningRule&, const LearningRule&) = default;
};

double evaluate_G(const LearningRule& rule, double a, double b);

/// gamma * G(N(x), N(y)).
ConnectivityKernel kernel_target(const LearningRule& rule, const ScalarField& n);

/// Non-empty when G exceeds the normalisation ||G|| + ||grad G|| <= 1 on [0, bound]^2.
std::optional<std::string> normalization_warning(const LearningRule& rule, double bound);

/// Time-independent external input, scaled by k.
struct InputModel {
  enum class Kind { constant, sin_squared, table };

  Kind kind = Kind::constant;
  double amplitude = 1.0;
  double scale = 1.0;
  std::vector<double> table;  ///< one value per position node

  ScalarField evaluate(const SpatialGrid& grid) const;

  friend bool operator==(const InputModel&, const InputModel&) = default;
};

}  // namespace etnet
