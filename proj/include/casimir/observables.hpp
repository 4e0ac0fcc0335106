#pragma once

#include <functional>
#include <string>
#include <vector>

#include "casimir/spectrum.hpp"

namespace casimir {

enum class SweepParameter { separation, angle };
enum class SeparationKind { surface_gap, center };

struct SweepSpec {
  SweepParameter parameter = SweepParameter::separation;
  std::vector<double> grid;  // um or rad, strictly increasing
  std::size_t body_index = 1;
  Vec3 axis = Vec3::UnitZ();
  SeparationKind separation_kind = SeparationKind::surface_gap;
  double fd_step = 1e-3;

  void validate() const;

  /// Central-difference half step at parameter value p: fd_step * |p| for
  /// separations, fd_step * max(|p|, pi/180) for angles.
  double step_at(double p) const;
};

struct SweepRow {
  double param;
  double energy;  // eV
  double derivative;  // force (eV/um) or torque (eV/rad): -dU/dparam
  double quad_error;  // eV
  double derivative_error;  // change of the derivative between coarse and fine quadrature
  int node_count = 0;  // integrand evaluations over the whole stencil
  std::vector<IntegrandSample> integrand;  // centre point samples
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::string scene_digest;
  QuadratureSpec quad;
  InteractionMode mode = InteractionMode::retarded;
};

using SceneFamily = std::function<Scene(double)>;

/// Moves `body` along `axis` so that its separation from the other bodies
/// (surface gap or centre distance) equals the parameter.
SceneFamily separation_family(Scene base, std::size_t body, Vec3 axis, SeparationKind kind);

/// Rotates `body` by the parameter (rad) about `axis` through its geometric centre.
SceneFamily rotation_family(Scene base, std::size_t body, Vec3 axis);

/// Hex digest of particle positions, inclusion sizes and mode.
std::string scene_digest(const Scene& scene);

/// Called after each completed row; return false to stop the sweep early.
using RowCallback = std::function<bool(const SweepRow&)>;

/// Energy and central-difference derivative at every grid point. Each stencil
/// shares the quadrature nodes of its centre point.
SweepResult sweep(const SceneFamily& family, const SweepSpec& spec, const QuadratureSpec& quad,
                  const RowCallback& on_row = {});

/// Same finite-difference machinery over a closed-form energy U(param).
SweepResult sweep_function(const std::function<double(double)>& energy, const SweepSpec& spec);

struct PowerLawFit {
  double exponent;
  double stderr_;
  std::size_t points;
};

/// Least-squares slope of log|derivative| against log(param) over rows with
/// param in [lo, hi].
PowerLawFit fit_power_law(const std::vector<SweepRow>& rows, double lo, double hi);

}  // namespace casimir
