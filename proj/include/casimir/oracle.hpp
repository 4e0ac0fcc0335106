#pragma once

// Reference results that share no matrix code with the solver: closed-form
// two-dipole determinants and 1D integrals for the London and Casimir-Polder limits.

#include <functional>
#include <optional>

#include "casimir/materials.hpp"

namespace casimir::oracle {

/// Scalar polarizability (um^3) as a function of xi (eV).
using ScalarPolarizability = std::function<double(double xi_eV)>;

struct TwoDipoleConfig {
  ScalarPolarizability alpha1;
  ScalarPolarizability alpha2;
  double r_um;  // centre-to-centre distance
  InteractionMode mode = InteractionMode::nonretarded;
};

/// log(1 - a1 a2 T_L^2) + 2 log(1 - a1 a2 T_T^2), with T_L, T_T the
/// longitudinal and transverse kernel magnitudes (static: 2/r^3, 1/r^3).
double two_dipole_delta_logdet(const TwoDipoleConfig& cfg, double xi_eV);

/// (1 / 2 pi) * integral of two_dipole_delta_logdet over xi in [0, cutoff or inf).
double two_dipole_energy(const TwoDipoleConfig& cfg, std::optional<double> cutoff_eV = std::nullopt);

/// C6 = (3 / pi) * integral alpha1 alpha2 dxi (eV um^6), to 1e-8 relative.
/// Throws DivergenceError when the integrand does not decay and no cutoff is given.
double london_c6(const ScalarPolarizability& alpha1, const ScalarPolarizability& alpha2,
                 std::optional<double> cutoff_eV = std::nullopt);

/// -23 hbar c alpha1 alpha2 / (4 pi r^7), in eV.
double casimir_polder_u(double alpha1_static, double alpha2_static, double r_um);

/// Static-limit polarizability of a sphere model for use with the oracles.
ScalarPolarizability sphere_alpha(double radius_um, DielectricModel material, InteractionMode mode);

}  // namespace casimir::oracle
