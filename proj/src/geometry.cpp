#include "casimir/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "casimir/errors.hpp"
#include "casimir/units.hpp"

namespace casimir {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Relative slack for lattice sites that sit exactly on a shape boundary.
constexpr double kBoundarySlack = 1e-12;

bool is_rotation(const Mat3& R) {
  return (R.transpose() * R).isIdentity(1e-9) && std::abs(R.determinant() - 1.0) < 1e-9;
}

}  // namespace

RigidTransform RigidTransform::from_axis_angle(const Vec3& axis, double angle_rad, const Vec3& translation) {
  RigidTransform t;
  const double n = axis.norm();
  if (n == 0.0) {
    if (angle_rad != 0.0) throw ValidationError("rotation axis must be non-zero");
  } else {
    t.rotation = Eigen::AngleAxisd(angle_rad, axis / n).toRotationMatrix();
  }
  t.translation = translation;
  return t;
}

RigidTransform RigidTransform::then(const RigidTransform& outer) const {
  return {outer.rotation * rotation, outer.rotation * translation + outer.translation};
}

bool contains(const Shape& shape, const Vec3& p) {
  return std::visit(overloaded{
                        [&](const Cube& c) {
                          const double h = 0.5 * c.side_um * (1.0 + kBoundarySlack);
                          return std::abs(p.x()) <= h && std::abs(p.y()) <= h && std::abs(p.z()) <= h;
                        },
                        [&](const Box& b) {
                          const double s = 0.5 * (1.0 + kBoundarySlack);
                          return std::abs(p.x()) <= s * b.lx_um && std::abs(p.y()) <= s * b.ly_um &&
                                 std::abs(p.z()) <= s * b.lz_um;
                        },
                        [&](const CircularCylinder& c) {
                          const double r = c.radius_um * (1.0 + kBoundarySlack);
                          return p.x() * p.x() + p.y() * p.y() <= r * r &&
                                 std::abs(p.z()) <= 0.5 * c.height_um * (1.0 + kBoundarySlack);
                        },
                    },
                    shape);
}

// ---------------------------------------------------------------------------

Body::Body(std::vector<Particle> particles, std::vector<PolarizabilityModel> inclusions, RigidTransform transform)
    : particles_(std::move(particles)), inclusions_(std::move(inclusions)), transform_(std::move(transform)) {
  if (particles_.empty()) throw EmptyClusterError("body has no particles");
  if (!is_rotation(transform_.rotation)) throw ValidationError("body rotation must be a proper rotation");
  for (const auto& p : particles_) {
    if (!p.position.allFinite()) throw ValidationError("particle position is not finite");
    if (p.inclusion >= inclusions_.size()) throw ValidationError("particle refers to a missing inclusion");
  }
}

std::vector<Vec3> Body::lab_positions() const {
  std::vector<Vec3> out;
  out.reserve(particles_.size());
  for (std::size_t i = 0; i < particles_.size(); ++i) out.push_back(lab_position(i));
  return out;
}

Vec3 Body::geometric_center() const {
  Vec3 c = Vec3::Zero();
  for (std::size_t i = 0; i < particles_.size(); ++i) c += lab_position(i);
  return c / static_cast<double>(particles_.size());
}

double Body::extent_along(const Vec3& n) const {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < particles_.size(); ++i)
    best = std::max(best, n.dot(lab_position(i)) + inclusion_of(i).support(n, transform_.rotation));
  return best;
}

Body Body::with_transform(const RigidTransform& t) const { return Body(particles_, inclusions_, t); }

Body build_cluster(const Shape& shape, const Lattice& lattice, const PolarizabilityModel& inclusion) {
  for (int a = 0; a < 3; ++a) {
    if (!(lattice.spacing_um[a] > 0.0) || !(lattice.stretch[a] > 0.0))
      throw ValidationError("lattice spacings and stretch factors must be > 0");
    if (lattice.counts[a] < 1) throw ValidationError("lattice counts must be >= 1");
  }
  std::visit(overloaded{
                 [](const Cube& c) {
                   if (!(c.side_um > 0.0)) throw ValidationError("cube side must be > 0");
                 },
                 [](const Box& b) {
                   if (!(b.lx_um > 0.0 && b.ly_um > 0.0 && b.lz_um > 0.0))
                     throw ValidationError("box dimensions must be > 0");
                 },
                 [](const CircularCylinder& c) {
                   if (!(c.radius_um > 0.0 && c.height_um > 0.0))
                     throw ValidationError("cylinder radius and height must be > 0");
                 },
             },
             shape);

  std::array<double, 3> d{};
  for (int a = 0; a < 3; ++a) d[a] = lattice.effective_spacing(a);
  auto coord = [&](int axis, int i) { return (i - 0.5 * (lattice.counts[axis] - 1)) * d[axis]; };

  std::vector<Particle> particles;
  for (int k = 0; k < lattice.counts[2]; ++k)
    for (int j = 0; j < lattice.counts[1]; ++j)
      for (int i = 0; i < lattice.counts[0]; ++i) {
        const Vec3 p(coord(0, i), coord(1, j), coord(2, k));
        if (contains(shape, p)) particles.push_back({p, 0});
      }
  if (particles.empty()) throw EmptyClusterError("no lattice site falls inside the shape");

  const double r = inclusion.bounding_radius();
  const double dmin = std::min({d[0], d[1], d[2]});
  if (particles.size() > 1 && !(dmin > 2.0 * r))
    throw OverlapError("inclusions overlap: lattice spacing " + std::to_string(dmin) + " um <= 2 x radius " +
                       std::to_string(r) + " um");
  return Body(std::move(particles), {inclusion});
}

Body transform_body(const Body& body, const Mat3& rotation, const Vec3& translation) {
  if (!is_rotation(rotation)) throw ValidationError("transform_body: rotation must be proper (det = +1)");
  return body.with_transform(body.transform().then(RigidTransform{rotation, translation}));
}

std::size_t Scene::particle_count() const {
  std::size_t n = 0;
  for (const auto& b : bodies) n += b.size();
  return n;
}

void validate_scene(const Scene& scene) {
  struct Site {
    Vec3 x;
    double r;
    std::size_t body;
  };
  std::vector<Site> sites;
  for (std::size_t b = 0; b < scene.bodies.size(); ++b) {
    const Body& body = scene.bodies[b];
    for (std::size_t i = 0; i < body.size(); ++i)
      sites.push_back({body.lab_position(i), body.inclusion_of(i).bounding_radius(), b});
  }
  for (std::size_t i = 0; i < sites.size(); ++i)
    for (std::size_t j = i + 1; j < sites.size(); ++j) {
      const double dist = (sites[i].x - sites[j].x).norm();
      if (!(dist > sites[i].r + sites[j].r)) {
        if (dist == 0.0) throw CoincidentParticleError("two particles share a position");
        throw OverlapError(sites[i].body == sites[j].body ? "particles overlap within a body"
                                                          : "particles of different bodies overlap");
      }
    }
}

double min_interbody_distance(const Scene& scene) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < scene.bodies.size(); ++a) {
    const auto xa = scene.bodies[a].lab_positions();
    for (std::size_t b = a + 1; b < scene.bodies.size(); ++b) {
      const auto xb = scene.bodies[b].lab_positions();
      for (const auto& p : xa)
        for (const auto& q : xb) best = std::min(best, (p - q).squaredNorm());
    }
  }
  return std::sqrt(best);
}

double surface_gap(const Scene& scene, std::size_t moving, const Vec3& n_in) {
  const Vec3 n = n_in.normalized();
  if (moving >= scene.bodies.size()) throw ValidationError("surface_gap: body index out of range");
  double below = -std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < scene.bodies.size(); ++b)
    if (b != moving) below = std::max(below, scene.bodies[b].extent_along(n));
  const double above = -scene.bodies[moving].extent_along(-n);
  return above - below;
}

double filling_fraction(double radius_um, double spacing_um) {
  const double ratio = radius_um / spacing_um;
  return 4.0 * kPi / 3.0 * ratio * ratio * ratio;
}

}  // namespace casimir
