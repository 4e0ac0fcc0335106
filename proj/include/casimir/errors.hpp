#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace casimir {

/// Base of every error raised by the solver. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad config values, invalid tabulated data, bad lattice.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Function evaluated outside its domain (e.g. Drude model at xi = 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Base for failures of the numerics themselves (exit code 3 in the CLI).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularPolarizabilityError : public NumericalError {
 public:
  SingularPolarizabilityError(double xi_eV, double kappa_a);
  double xi_eV() const noexcept { return xi_; }
  double kappa_a() const noexcept { return kappa_a_; }

 private:
  double xi_;
  double kappa_a_;
};

class CoincidentParticleError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class OverlapError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class EmptyClusterError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Determinant of the system matrix is not positive.
class PivotSignError : public NumericalError {
 public:
  PivotSignError(const std::string& what, double xi_eV);
  double xi_eV() const noexcept { return xi_; }

 private:
  double xi_;
};

class SingularMatrixError : public NumericalError {
 public:
  SingularMatrixError(const std::string& what, double xi_eV);
  double xi_eV() const noexcept { return xi_; }

 private:
  double xi_;
};

/// Quadrature did not meet its tolerance; carries the best estimate obtained.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double partial_energy, double error_estimate);
  double partial_energy() const noexcept { return partial_; }
  double error_estimate() const noexcept { return error_; }

 private:
  double partial_;
  double error_;
};

/// Integrand does not decay and no cutoff was supplied.
class DivergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class StencilError : public NumericalError {
 public:
  StencilError(const std::string& what, double param);
  double param() const noexcept { return param_; }

 private:
  double param_;
};

class NonPowerLawError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Two-dipole determinant argument left (0, inf): particles effectively in contact.
class ContactRegimeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Config rejected; holds every violation found, not only the first.
class ConfigError : public ValidationError {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

}  // namespace casimir
