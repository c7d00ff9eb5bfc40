#pragma once

#include <optional>
#include <vector>

#include "etnet/fields.hpp"
#include "etnet/rate_models.hpp"

namespace etnet {

/// Data of the stationary fixed-point problem S = T[S].
struct StationaryProblem {
  LearningRule rule;
  SurvivalFunction F;
  ScalarField g;      ///< mass profile of the density
  ScalarField input;  ///< time-independent I
};

/// T[S](x) = gamma * int G(gF(S)(x), gF(S)(y)) gF(S)(y) dy + I(x).
ScalarField apply_T(const ScalarField& S, const StationaryProblem& problem);

struct ContractionCertificate {
  bool holds = false;
  double bound = 0.0;  ///< gamma |F'| (2 |g| |F| + 1), sup over the reachable S range
};

/// Sufficient contraction condition for T, with |F'| and |F| over [min I, max I + gamma sup G |g| sup F].
ContractionCertificate stationary_certificate(const StationaryProblem& problem);

struct StationaryOptions {
  double tol = 1e-12;
  int max_iters = 20000;
  double omega = 1.0;  ///< initial damping, halved whenever the residual grows
};

struct StationaryState {
  ScalarField S_star;
  ScalarField N_star;
  ConnectivityKernel w_star;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  ContractionCertificate certificate;
  std::vector<double> residual_history;
};

/// Damped Picard iteration from `initial`. Never throws on non-convergence; check `converged`.
StationaryState solve_stationary(const StationaryProblem& problem, const ScalarField& initial,
                                 const StationaryOptions& opts = {});

/// Runs from every initial guess (default {I, I + gamma, 0}) and keeps the distinct converged fixed points.
std::vector<StationaryState> solve_stationary_multistart(const StationaryProblem& problem,
                                                         const StationaryOptions& opts = {},
                                                         std::vector<ScalarField> initials = {});

/// n*(s, x) = N*(x) exp(-Lambda(s, S*(x))). With `scheme` the discrete stationary profile of the
/// upwind scheme on `ages` is returned instead (same thing up to the scheme's quadrature).
DensityField reconstruct_density(const StationaryState& state, const FiringRateModel& model, const AgeGrid& ages,
                                 bool scheme = false);

/// Root of S = gamma G(F(S), F(S)) F(S) + I0 for a homogeneous network of unit mass on a unit
/// interval, by bisection.
double scalar_stationary(const LearningRule& rule, double I0, const SurvivalFunction& F);

}  // namespace etnet
