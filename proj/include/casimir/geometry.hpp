#pragma once

#include <array>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "casimir/materials.hpp"

namespace casimir {

/// Rotation followed by translation: x -> R x + t.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidTransform from_axis_angle(const Vec3& axis, double angle_rad, const Vec3& translation = Vec3::Zero());

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

  /// `outer` applied after *this.
  RigidTransform then(const RigidTransform& outer) const;
};

struct Lattice {
  std::array<double, 3> spacing_um{1.0, 1.0, 1.0};
  std::array<int, 3> counts{1, 1, 1};
  std::array<double, 3> stretch{1.0, 1.0, 1.0};

  double effective_spacing(int axis) const { return spacing_um[axis] * stretch[axis]; }
};

struct Cube {
  double side_um;
};
struct Box {
  double lx_um, ly_um, lz_um;
};
struct CircularCylinder {
  double radius_um, height_um;  // axis along z
};

using Shape = std::variant<Cube, Box, CircularCylinder>;

bool contains(const Shape& shape, const Vec3& p);

struct Particle {
  Vec3 position;  // body frame, um
  std::size_t inclusion = 0;  // index into Body::inclusions()
};

/// A rigid cluster of polarizable particles.
class Body {
 public:
  Body(std::vector<Particle> particles, std::vector<PolarizabilityModel> inclusions,
       RigidTransform transform = {});

  std::size_t size() const { return particles_.size(); }
  const std::vector<Particle>& particles() const { return particles_; }
  const std::vector<PolarizabilityModel>& inclusions() const { return inclusions_; }
  const RigidTransform& transform() const { return transform_; }

  const PolarizabilityModel& inclusion_of(std::size_t i) const { return inclusions_[particles_[i].inclusion]; }
  Vec3 lab_position(std::size_t i) const { return transform_.apply(particles_[i].position); }
  std::vector<Vec3> lab_positions() const;

  /// Centroid of the lab-frame particle positions.
  Vec3 geometric_center() const;

  /// Largest extent of the body along unit direction n: max over particles of
  /// (n . x + inclusion support along n).
  double extent_along(const Vec3& n) const;

  Body with_transform(const RigidTransform& t) const;

 private:
  std::vector<Particle> particles_;
  std::vector<PolarizabilityModel> inclusions_;
  RigidTransform transform_;
};

/// Lattice sites whose centres fall inside `shape`, ordered by (z, y, x), with
/// the lattice centred on the body origin. Throws EmptyClusterError.
Body build_cluster(const Shape& shape, const Lattice& lattice, const PolarizabilityModel& inclusion);

/// Lab positions become R p + t; tensor polarizabilities follow the rotation.
Body transform_body(const Body& body, const Mat3& rotation, const Vec3& translation);

struct Scene {
  std::vector<Body> bodies;
  InteractionMode mode = InteractionMode::retarded;

  std::size_t particle_count() const;
};

/// Checks that no two particles overlap (bounding spheres), within or across bodies.
void validate_scene(const Scene& scene);

/// Minimum centre-to-centre distance between particles of different bodies.
double min_interbody_distance(const Scene& scene);

/// Surface gap between body `moving` and the rest along unit axis n, assuming
/// `moving` sits on the +n side.
double surface_gap(const Scene& scene, std::size_t moving, const Vec3& n);

/// Filling fraction (4 pi / 3)(r / d)^3 of spheres on a cubic lattice.
double filling_fraction(double radius_um, double spacing_um);

// ---------------------------------------------------------------------------
// Presets

struct PresetParams {
  std::map<std::string, double> values;
  std::string variant;
  std::string material = "gold";
  std::string mode;  // empty: preset default
};

struct PresetInfo {
  std::string name;
  std::string summary;
  std::map<std::string, double> defaults;
  std::vector<std::string> variants;
  std::string default_mode;
};

const std::vector<PresetInfo>& preset_catalog();

/// Builds one of the named scenes. Body 0 is fixed, body 1 sits above it on
/// +z at the requested surface gap and carries any rotation. Unknown names or
/// knobs throw ValidationError.
Scene preset_scene(const std::string& name, const PresetParams& params);

/// Characteristic length L of a preset (cube side, base side, sqrt(area)).
double preset_length_scale(const std::string& name, const PresetParams& params);

}  // namespace casimir
