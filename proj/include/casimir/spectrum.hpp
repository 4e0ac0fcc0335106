#pragma once

#include <optional>
#include <string>
#include <vector>

#include "casimir/geometry.hpp"

namespace casimir {

enum class QuadratureScheme { gauss_legendre_mapped, adaptive_simpson };

const char* to_string(QuadratureScheme s);
QuadratureScheme parse_scheme(const std::string& text);

/// How the imaginary-frequency integral is discretized.
///
/// Without `xi_max`, the half line is mapped to u in (0, 1) by
/// xi = xi0 u / (1 - u). With `xi_max`, the integral is cut at xi_max and
/// the map is linear; this is required when the polarizabilities never decay
/// (perfect metals or constant eps in non-retarded mode).
struct QuadratureSpec {
  QuadratureScheme scheme = QuadratureScheme::gauss_legendre_mapped;
  int nodes = 40;
  std::optional<double> xi0_eV;  // default chosen from the scene
  double rel_tol = 1e-6;  // adaptive scheme only
  std::optional<double> xi_max_eV;
  int threads = 1;

  void validate() const;
};

struct IntegrandSample {
  double xi_eV;
  double delta_logdet;
};

struct EnergyResult {
  double energy = 0.0;  // eV, negative = attraction
  double quad_error_estimate = 0.0;  // eV
  /// Lower-order estimate the error is measured against: half the nodes for
  /// Gauss-Legendre, the unrefined Simpson panels for the adaptive scheme.
  double energy_coarse = 0.0;
  std::vector<IntegrandSample> integrand_samples;  // sorted by xi
  int node_count = 0;
  double xi0_eV = 0.0;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// log det M_full - log det M_decoupled at one imaginary frequency.
double delta_logdet(const Scene& scene, const ImagFrequency& xi);

/// Default mapping scale for the scene: hbar c / (closest inter-body distance)
/// in retarded mode, half the largest material resonance scale otherwise.
double default_xi0(const Scene& scene);

/// Nodes with kappa * (closest inter-body distance) above this are skipped in
/// retarded mode: the inter-body coupling there is below e^-50 of its static value.
inline constexpr double kRetardedTailCutoff = 50.0;

/// U = (1 / 2 pi) * integral_0^inf dxi  delta_logdet(i xi), xi in eV.
EnergyResult interaction_energy(const Scene& scene, const QuadratureSpec& quad);

}  // namespace casimir
