#pragma once

#include <stdexcept>
#include <string>

namespace etnet {

/// Base class for all solver and configuration failures.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Grid or field shapes that do not match.
class DimensionError : public Error {
public:
  using Error::Error;
};

/// A documented precondition of an operation was violated.
class PreconditionError : public Error {
public:
  using Error::Error;
};

/// Time step violates the upwind stability restriction.
class CflError : public Error {
public:
  using Error::Error;
};

/// Density dropped below the round-off sentinel; indicates an unstable scheme.
class NegativeDensityError : public Error {
public:
  using Error::Error;
};

/// An iterative solve did not reach its tolerance.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, double residual, int iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

private:
  double residual_;
  int iterations_;
};

/// Configuration text could not be turned into a valid experiment.
class ConfigError : public Error {
public:
  ConfigError(const std::string& what, int line = 0, std::string key = {})
      : Error(line > 0 ? "line " + std::to_string(line) + (key.empty() ? "" : " (" + key + ")") + ": " + what
                       : (key.empty() ? what : key + ": " + what)),
        line_(line), key_(std::move(key)) {}

  int line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

private:
  int line_;
  std::string key_;
};

}  // namespace etnet
