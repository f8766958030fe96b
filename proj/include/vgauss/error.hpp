#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace vgauss {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent experiment configuration. `path` names the
/// offending key (dotted form, e.g. "probability.process").
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Circulant embedding produced eigenvalues that are too negative.
class EmbeddingError : public Error {
 public:
  using Error::Error;
};

/// Covariance matrix is indefinite beyond tolerance.
class FactorizationError : public Error {
 public:
  using Error::Error;
};

/// Exact orthant-union integration would exceed the subset budget.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Piterbarg-constant ladder did not settle. Carries the per-rung values.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> values, std::vector<double> errors)
      : Error(what), values_(std::move(values)), errors_(std::move(errors)) {}
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<double>& errors() const noexcept { return errors_; }

 private:
  std::vector<double> values_;
  std::vector<double> errors_;
};

/// A constant provider cannot supply a requested value.
class ProviderError : public Error {
 public:
  using Error::Error;
};

/// Hypothesis of an asymptotic formula is violated by the inputs.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

/// Operation precondition not met (audit not applicable, horizon too short, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Model combination the samplers do not support.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Assumption I: generalized variance has no unique minimizer.
class AmbiguityError : public Error {
 public:
  using Error::Error;
};

}  // namespace vgauss
