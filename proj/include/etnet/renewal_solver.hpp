#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "etnet/fields.hpp"
#include "etnet/rate_models.hpp"

namespace etnet {

enum class Coupling { lagged, iterate };

struct SolverConfig {
  double dt = 0.0125;
  double epsilon = 1.0;          ///< time-scale separation; 1 is the original system
  Coupling coupling = Coupling::lagged;
  double tol = 1e-10;            ///< Picard tolerance on sup |S_{k+1} - S_k|
  int max_iters = 200;
  double damping = 1.0;
  bool cfl_guard = true;
  bool age_domain_guard = true;  ///< reject grids whose s_max does not exceed the reachable threshold
  bool parallel = true;
  double save_every = 0.1;       ///< record cadence in time; 0 records every step
  bool record_kernels = true;
};

/// Everything that defines the right-hand side apart from initial data.
struct Problem {
  FiringRateModel rate;
  LearningRule rule;
  ScalarField input;
};

/// What the run loop exposes at each recorded time.
struct RunSample {
  double t;
  const DensityField* density;  ///< null for the limit system
  const ScalarField& activity;
  const ScalarField& stimulation;
  const ConnectivityKernel& kernel;
};

using RunObserver = std::function<void(const RunSample&)>;

struct RunRecord {
  std::vector<double> times;
  std::vector<ScalarField> N_series;
  std::vector<ScalarField> S_series;
  std::vector<ScalarField> mass_series;
  std::vector<ConnectivityKernel> w_snapshots;  ///< one per entry of `times` when kernels are recorded

  DensityField final_density;
  ConnectivityKernel final_kernel;
  ScalarField final_S;
  double dt = 0.0;  ///< step actually used (t_end divided into whole steps)
  int coupling_iterations = 0;
};

/// Throws CflError when the explicit scheme on this age grid is not positivity preserving.
void check_cfl(const SolverConfig& cfg, const AgeGrid& ages, const FiringRateModel& model);

/// A-priori bound on S: max{|w0|, gamma sup G} * p_inf * |g| + |I| (kernel and activity bounds).
double stimulation_bound(const Problem& problem, double w0_sup, double g_sup);

/// Throws PreconditionError when the threshold reachable under S_bound is not inside the age grid.
void check_age_domain(const AgeGrid& ages, const FiringRateModel& model, double S_bound);

/// Rescale each column of a sampled density so its trapezoid mass equals g(x).
void normalize_mass(DensityField& n, const ScalarField& g);

/// One explicit upwind step of the linear problem with S frozen.
DensityField linear_step(const DensityField& n, const ScalarField& S, const FiringRateModel& model,
                         const SolverConfig& cfg);

/// Integrate the linear problem with frozen S. Recorded kernels are empty.
RunRecord linear_run(const DensityField& n0, const ScalarField& S, const FiringRateModel& model,
                     const SolverConfig& cfg, double t_end, const RunObserver& observer = {});

/// Integrate the full coupled system (or its eps-rescaled form) to t_end.
RunRecord nonlinear_run(const DensityField& n0, const ConnectivityKernel& w0, const Problem& problem,
                        const SolverConfig& cfg, double t_end, const RunObserver& observer = {});

struct LargeInputResult {
  std::vector<double> k_values;
  std::vector<double> sample_times;
  std::vector<std::vector<double>> distance;  ///< [k][sample] L1_{s,x} distance to the limiting linear solution
  std::vector<std::vector<double>> activity_sup;  ///< [k][sample] sup_x N^k
  std::vector<RunRecord> runs;
};

/// Runs the system with input k*I for every k and compares with the linear problem at rate p(s, inf).
LargeInputResult large_input_run(const std::vector<double>& k_values, const DensityField& n0,
                                 const ConnectivityKernel& w0, const Problem& problem, const SolverConfig& cfg,
                                 const std::vector<double>& sample_times);

}  // namespace etnet
