#include "casimir/errors.hpp"

#include <sstream>

namespace casimir {

namespace {

std::string singular_message(double xi, double ka) {
  std::ostringstream os;
  os << "singular polarizability at xi = " << xi << " eV (kappa*a = " << ka
     << "): radiative denominator is not positive, the dipole model is invalid here";
  return os.str();
}

std::string with_xi(const std::string& what, double xi) {
  std::ostringstream os;
  os << what << " (xi = " << xi << " eV)";
  return os.str();
}

std::string join(const std::vector<std::string>& v) {
  std::string s = "invalid config:";
  for (const auto& e : v) s += "\n  " + e;
  return s;
}

}  // namespace

SingularPolarizabilityError::SingularPolarizabilityError(double xi_eV, double kappa_a)
    : NumericalError(singular_message(xi_eV, kappa_a)), xi_(xi_eV), kappa_a_(kappa_a) {}

PivotSignError::PivotSignError(const std::string& what, double xi_eV)
    : NumericalError(with_xi(what, xi_eV)), xi_(xi_eV) {}

SingularMatrixError::SingularMatrixError(const std::string& what, double xi_eV)
    : NumericalError(with_xi(what, xi_eV)), xi_(xi_eV) {}

ConvergenceError::ConvergenceError(const std::string& what, double partial_energy, double error_estimate)
    : NumericalError(what), partial_(partial_energy), error_(error_estimate) {}

StencilError::StencilError(const std::string& what, double param) : NumericalError(what), param_(param) {}

ConfigError::ConfigError(std::vector<std::string> violations)
    : ValidationError(join(violations)), violations_(std::move(violations)) {}

}  // namespace casimir
