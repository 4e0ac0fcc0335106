#pragma once

#include "casimir/geometry.hpp"

namespace testing {

inline casimir::Body single(const casimir::Vec3& x, const casimir::PolarizabilityModel& inc) {
  return casimir::Body({{x, 0}}, {inc});
}

// Two one-particle bodies, the second at distance r along `dir`.
inline casimir::Scene pair(double r, const casimir::PolarizabilityModel& inc, casimir::InteractionMode mode,
                           casimir::Vec3 dir = casimir::Vec3::UnitZ()) {
  casimir::Scene s;
  s.mode = mode;
  s.bodies.push_back(single(casimir::Vec3::Zero(), inc));
  s.bodies.push_back(single(r * dir.normalized(), inc));
  return s;
}

inline casimir::Body cube_cluster(double L, int n, const casimir::DielectricModel& m) {
  casimir::Lattice lat;
  lat.spacing_um = {L / n, L / n, L / n};
  lat.counts = {n, n, n};
  return casimir::build_cluster(casimir::Cube{L}, lat, casimir::sphere_radiative(L / n / 3.0, m));
}

}  // namespace testing
