#pragma once

#include <vector>

#include "etnet/fields.hpp"
#include "etnet/rate_models.hpp"
#include "etnet/renewal_solver.hpp"

namespace etnet {

/// Slow-learning limit: the density is slaved to S, so N = g F(S) at every time.
struct LimitProblem {
  LearningRule rule;
  SurvivalFunction F;
  ScalarField g;
  ScalarField input;
};

struct InnerResult {
  ScalarField S;
  int iterations = 0;
  double residual = 0.0;
};

/// Solves S = int w(., y) g(y) F(S(y)) dy + I by damped Picard from S_guess.
/// Throws ConvergenceError when the tolerance is not reached within max_iters.
InnerResult inner_fixed_point(const ConnectivityKernel& w, const LimitProblem& problem, const ScalarField& S_guess,
                              double tol = 1e-12, int max_iters = 2000);

/// max{|w0|, gamma} |F'| < 1 over the reachable S range.
struct UniquenessCertificate {
  bool holds = false;
  double bound = 0.0;
};
UniquenessCertificate limit_uniqueness_certificate(double w0_sup, const LimitProblem& problem);

struct LimitConfig {
  double dt = 1e-2;
  double tol = 1e-12;
  int max_iters = 2000;
  double save_every = 0.1;
  bool record_kernels = true;
};

/// Integrates the limit system. The record's mass series is g at every saved time and its
/// final density is empty.
RunRecord limit_run(const ConnectivityKernel& w0, const LimitProblem& problem, const LimitConfig& cfg, double t_end,
                    const RunObserver& observer = {});

struct EpsilonRow {
  double epsilon = 0.0;
  double dist_N = 0.0;  ///< L1 over (0, T) x Omega of N^eps - N_limit
  double dist_n = 0.0;  ///< L1 over (0, T) x ages x Omega of n^eps - n_limit
  double dist_S = 0.0;  ///< L1 over (0, T) x Omega of S^eps - S_limit
};

struct EpsilonStudy {
  std::vector<EpsilonRow> rows;
  double order_N = 0.0;  ///< least-squares slope of log dist_N against log eps
  double order_n = 0.0;
  double T = 0.0;
};

/// Runs the eps-rescaled system for each eps on the same grids and compares with the limit run.
/// The full-system runs use dt = dt_factor * eps * ds; the limit run uses limit_cfg.dt.
/// Distances are trapezoid-rule time integrals over every step of each run, against the limit
/// solution interpolated linearly in time.
EpsilonStudy epsilon_study(const std::vector<double>& eps_list, const DensityField& n0, const ConnectivityKernel& w0,
                           const Problem& problem, const SolverConfig& base, double T,
                           const LimitConfig& limit_cfg, double dt_factor = 0.5);

}  // namespace etnet
