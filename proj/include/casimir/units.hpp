#pragma once

// Unit system: lengths in micrometres, imaginary frequencies as photon
// energies in eV, energies in eV. Polarizabilities are in um^3.

namespace casimir {

/// hbar * c in eV * um.
inline constexpr double kHbarC = 0.197327;

inline constexpr double kPi = 3.14159265358979323846;

/// Spatial wavenumber (1/um) of an imaginary-axis frequency given as energy in eV.
constexpr double wavenumber_of(double xi_eV) { return xi_eV / kHbarC; }

}  // namespace casimir
