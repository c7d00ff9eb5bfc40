#pragma once

#include <span>
#include <string>
#include <vector>

#include "etnet/characteristics.hpp"
#include "etnet/fields.hpp"
#include "etnet/rate_models.hpp"
#include "etnet/renewal_solver.hpp"

namespace etnet {

struct DecayFit {
  double lambda_hat = 0.0;  ///< minus the slope of log d against t
  double intercept = 0.0;   ///< log C
  double r_squared = 0.0;
  double t_begin = 0.0;
  double t_end = 0.0;
  std::size_t samples = 0;
};

/// Least-squares line through (t, log d) using samples with d above `floor`, after dropping the
/// first `skip_fraction` of the usable window. Throws PreconditionError with fewer than 5 samples.
DecayFit fit_decay(std::span<const double> t, std::span<const double> d, double floor = 1e-13,
                   double skip_fraction = 0.1);

struct DoeblinReport {
  double alpha = 0.0;          ///< p* s* exp(-2 p_inf s*)
  double lambda_theory = 0.0;  ///< -log(1 - alpha) / (2 s*)
  double t0 = 0.0;             ///< 2 s*
  double s_star = 0.0;
  double p_star = 0.0;
  double minorization_margin = 0.0;  ///< min over s <= s*, x of n(t0, s, x) - p* exp(-2 p_inf s*) g(x)
  double tolerance = 0.0;            ///< 2 ds
  bool passed = false;
  bool degenerate = false;  ///< alpha numerically zero
};

/// The constants alone, without a margin computation.
DoeblinReport doeblin_constants(double p_star, double s_star, double p_inf);

/// Integrates the linear problem with S frozen to t0 = 2 s* with the characteristics oracle and
/// measures the minorization margin. A model with s* = 0 uses the smallest grid s* = ds.
DoeblinReport doeblin_check(const DensityField& n0, const ScalarField& S, const FiringRateModel& model,
                            const OracleOptions& opts = {});

struct HomogenizationSeries {
  std::vector<double> times;
  std::vector<double> w_dev;  ///< sup |w - <w>|
  std::vector<double> N_dev;  ///< sup |N - mean N|
  std::vector<double> S_dev;  ///< sup |S - mean S|
};

HomogenizationSeries homogenization_metrics(const RunRecord& record);

struct Certificate {
  std::string name;
  double lhs = 0.0;
  bool holds = false;
};

struct RegimeSetup {
  FiringRateModel rate;
  LearningRule rule;
  ScalarField g;
  ScalarField input;
  double w0_sup = 0.0;
  double n0_sup = 0.0;
};

/// Sufficient smallness conditions: well-posedness (smooth-rate or step-rate form), stationary
/// contraction, and uniqueness for the limit system. Each lhs must be < 1.
std::vector<Certificate> regime_certificates(const RegimeSetup& setup);

}  // namespace etnet
