#include "casimir/observables.hpp"

#include <charconv>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>

#include "casimir/errors.hpp"
#include "casimir/units.hpp"

namespace casimir {

namespace {

Vec3 unit_axis(const Vec3& axis) {
  const double n = axis.norm();
  if (!(n > 0.0)) throw ValidationError("sweep axis must be non-zero");
  return axis / n;
}

Vec3 others_center(const Scene& scene, std::size_t body) {
  Vec3 c = Vec3::Zero();
  std::size_t count = 0;
  for (std::size_t b = 0; b < scene.bodies.size(); ++b) {
    if (b == body) continue;
    for (const auto& x : scene.bodies[b].lab_positions()) c += x;
    count += scene.bodies[b].size();
  }
  return c / static_cast<double>(count);
}

std::string format_point(double p) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, p);
  return std::string(buf, res.ptr);
}

}  // namespace

void SweepSpec::validate() const {
  if (grid.empty()) throw ValidationError("sweep grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw ValidationError("sweep grid must be strictly increasing");
  if (!(fd_step >= 1e-6 && fd_step <= 1e-1)) throw ValidationError("fd_step must lie in [1e-6, 1e-1]");
  if (parameter == SweepParameter::separation && !(grid.front() > 0.0))
    throw ValidationError("separation grid values must be > 0");
  unit_axis(axis);
}

double SweepSpec::step_at(double p) const {
  if (parameter == SweepParameter::separation) return fd_step * std::abs(p);
  return fd_step * std::max(std::abs(p), kPi / 180.0);
}

SceneFamily separation_family(Scene base, std::size_t body, Vec3 axis, SeparationKind kind) {
  if (base.bodies.size() < 2 || body >= base.bodies.size())
    throw ValidationError("separation sweep needs at least two bodies and a valid body index");
  const Vec3 n = unit_axis(axis);
  const double current = kind == SeparationKind::surface_gap
                             ? surface_gap(base, body, n)
                             : n.dot(base.bodies[body].geometric_center() - others_center(base, body));
  return [base = std::move(base), body, n, current](double p) {
    Scene s = base;
    s.bodies[body] = transform_body(base.bodies[body], Mat3::Identity(), (p - current) * n);
    return s;
  };
}

SceneFamily rotation_family(Scene base, std::size_t body, Vec3 axis) {
  if (body >= base.bodies.size()) throw ValidationError("rotation sweep: body index out of range");
  const Vec3 n = unit_axis(axis);
  const Vec3 c = base.bodies[body].geometric_center();
  return [base = std::move(base), body, n, c](double theta) {
    const Mat3 R = Eigen::AngleAxisd(theta, n).toRotationMatrix();
    Scene s = base;
    s.bodies[body] = transform_body(base.bodies[body], R, c - R * c);
    return s;
  };
}

std::string scene_digest(const Scene& scene) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  auto mixd = [&](double d) { mix(std::bit_cast<std::uint64_t>(d)); };
  mix(scene.mode == InteractionMode::retarded ? 1 : 0);
  for (const auto& b : scene.bodies) {
    mix(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
      const Vec3 x = b.lab_position(i);
      mixd(x.x());
      mixd(x.y());
      mixd(x.z());
      mixd(b.inclusion_of(i).bounding_radius());
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SweepResult sweep(const SceneFamily& family, const SweepSpec& spec, const QuadratureSpec& quad,
                  const RowCallback& on_row) {
  spec.validate();
  quad.validate();
  SweepResult out;
  out.quad = quad;

  auto scene_at = [&](double p) {
    try {
      Scene s = family(p);
      validate_scene(s);
      return s;
    } catch (const OverlapError& e) {
      throw StencilError("stencil point " + format_point(p) + ": " + e.what(), p);
    } catch (const CoincidentParticleError& e) {
      throw StencilError("stencil point " + format_point(p) + ": " + e.what(), p);
    }
  };

  for (double p : spec.grid) {
    const double h = spec.step_at(p);
    const Scene center = scene_at(p);
    if (out.rows.empty()) {
      out.scene_digest = scene_digest(center);
      out.mode = center.mode;
    }
    QuadratureSpec q = quad;
    if (!q.xi0_eV && !q.xi_max_eV) q.xi0_eV = default_xi0(center);

    const EnergyResult e0 = interaction_energy(center, q);
    const EnergyResult ep = interaction_energy(scene_at(p + h), q);
    const EnergyResult em = interaction_energy(scene_at(p - h), q);
    SweepRow row;
    row.param = p;
    row.energy = e0.energy;
    row.quad_error = e0.quad_error_estimate;
    row.derivative = -(ep.energy - em.energy) / (2.0 * h);
    const double coarse = -(ep.energy_coarse - em.energy_coarse) / (2.0 * h);
    row.derivative_error = std::abs(row.derivative - coarse);
    row.node_count = e0.node_count + ep.node_count + em.node_count;
    row.integrand = e0.integrand_samples;
    out.rows.push_back(row);
    if (on_row && !on_row(row)) break;
  }
  return out;
}

SweepResult sweep_function(const std::function<double(double)>& energy, const SweepSpec& spec) {
  spec.validate();
  SweepResult out;
  for (double p : spec.grid) {
    const double h = spec.step_at(p);
    SweepRow row{};
    row.param = p;
    row.energy = energy(p);
    row.derivative = -(energy(p + h) - energy(p - h)) / (2.0 * h);
    out.rows.push_back(row);
  }
  return out;
}

PowerLawFit fit_power_law(const std::vector<SweepRow>& rows, double lo, double hi) {
  std::vector<double> x, y;
  int sign = 0;
  for (const auto& r : rows) {
    if (r.param < lo || r.param > hi) continue;
    const int s = (r.derivative > 0.0) - (r.derivative < 0.0);
    if (s == 0 || !(r.param > 0.0)) throw NonPowerLawError("power-law fit: zero derivative or non-positive parameter");
    if (sign != 0 && s != sign) throw NonPowerLawError("power-law fit: derivative changes sign inside the window");
    sign = s;
    x.push_back(std::log(r.param));
    y.push_back(std::log(std::abs(r.derivative)));
  }
  const auto n = x.size();
  if (n < 4) throw NonPowerLawError("power-law fit: need at least 4 points in the window");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double res = y[i] - (my + slope * (x[i] - mx));
    ssr += res * res;
  }
  const double se = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
  return {slope, se, n};
}

}  // namespace casimir
