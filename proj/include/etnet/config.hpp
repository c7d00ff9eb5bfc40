#pragma once

#include <optional>
#include <string>
#include <vector>

#include "etnet/fields.hpp"
#include "etnet/limit_solver.hpp"
#include "etnet/rate_models.hpp"
#include "etnet/renewal_solver.hpp"

namespace etnet {

enum class SystemKind { full, limit };

struct RateSpec {
  RateKind kind = RateKind::step;
  double p_inf = 1.0;
  SigmaMap::Kind sigma = SigmaMap::Kind::identity;
  double sigma_max = 2.0;    ///< clamped map cap
  double sigma_value = 0.5;  ///< constant map value
  double theta = 0.1;        ///< smooth kind ramp width

  FiringRateModel build() const;
  friend bool operator==(const RateSpec&, const RateSpec&) = default;
};

struct DensitySpec {
  /// shifted_exponential: (x+1) e^{-s(x+1)};  gaussian: e^{-s-(x-1/2)^2} / Z;  exponential: e^{-s}
  enum class Kind { shifted_exponential, gaussian, exponential };
  Kind kind = Kind::shifted_exponential;
  friend bool operator==(const DensitySpec&, const DensitySpec&) = default;
};

struct KernelSpec {
  /// gaussian: amplitude e^{-width (x-y)^2};  constant: amplitude
  enum class Kind { gaussian, constant };
  Kind kind = Kind::gaussian;
  double amplitude = 10.0;
  double width = 10.0;
  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

struct ExperimentConfig {
  std::string name = "custom";
  SystemKind system = SystemKind::full;
  std::size_t nx = 64;
  std::size_t ns = 800;
  double s_max = 20.0;
  std::optional<double> dt;  ///< default eps * ds / 2
  double t_end = 25.0;
  double save_every = 0.1;
  double epsilon = 1.0;

  RateSpec rate;
  LearningRule rule{LearningRule::Kind::hebbian, 1.0};
  InputModel input;
  DensitySpec density;
  KernelSpec kernel;

  Coupling coupling = Coupling::lagged;
  double tol = 1e-10;
  int max_iters = 200;
  double damping = 1.0;
  bool cfl_guard = true;

  std::string out;  ///< empty means out/<name>

  SpatialGrid space() const { return SpatialGrid(nx); }
  AgeGrid ages() const { return AgeGrid(ns, s_max); }
  double effective_dt() const;
  SolverConfig solver() const;
  Problem problem() const;
  LimitProblem limit_problem() const;
  LimitConfig limit_config() const;
  /// Analytic mass profile g(x) of the initial density.
  ScalarField mass_profile() const;
  /// Sampled initial density, each column rescaled to carry exactly g(x).
  DensityField initial_density() const;
  ConnectivityKernel initial_kernel() const;
  std::string output_dir() const { return out.empty() ? "out/" + name : out; }

  /// Throws ConfigError when a solver precondition fails (CFL, age domain, ranges).
  void validate() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parses `key = value` lines (# starts a comment) and validates the result.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
/// Every key written explicitly, floats with 17 significant digits.
std::string serialize_config(const ExperimentConfig& cfg);

struct Preset {
  std::string name;
  std::string description;
  ExperimentConfig config;
};

const std::vector<Preset>& presets();
/// Throws ConfigError for an unknown name.
ExperimentConfig preset_config(const std::string& name);

}  // namespace etnet
