#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include "casimir/coupling.hpp"
#include "casimir/errors.hpp"
#include "casimir/units.hpp"
#include "support.hpp"

using namespace casimir;

namespace {

const DielectricModel kGold = make_drude(9.0, 0.035);

// Naive reference: static kernel (I - 3 u u^T) / r^3, component by component.
Eigen::MatrixXd naive_static(const std::vector<Vec3>& x, const std::vector<double>& alpha) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (int b = 0; b < 3; ++b) m(3 * j + b, 3 * j + b) = 1.0 / alpha[static_cast<std::size_t>(j)];
    for (Eigen::Index k = 0; k < n; ++k) {
      if (j == k) continue;
      const double dx = x[j][0] - x[k][0], dy = x[j][1] - x[k][1], dz = x[j][2] - x[k][2];
      const double r2 = dx * dx + dy * dy + dz * dz;
      const double r = std::sqrt(r2);
      const double d[3] = {dx, dy, dz};
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c) m(3 * j + b, 3 * k + c) = ((b == c ? r2 : 0.0) - 3.0 * d[b] * d[c]) / (r2 * r2 * r);
    }
  }
  return m;
}

}  // namespace

TEST_CASE("dipole tensor: static field along z") {
  const Mat3 t = dipole_tensor(Vec3(0.0, 0.0, 1.0), 0.0);
  const Vec3 want(1.0, 1.0, -2.0);
  CHECK((t - Mat3(want.asDiagonal())).norm() < 1e-15);
}

TEST_CASE("dipole tensor: retarded eigenvalues at kappa r = 1") {
  const Mat3 t = dipole_tensor(Vec3(0.0, 0.0, 1.0), 1.0);
  CHECK(t(2, 2) == doctest::Approx(-4.0 * std::exp(-1.0)).epsilon(1e-14));
  CHECK(t(2, 2) == doctest::Approx(-1.47152).epsilon(1e-5));
  CHECK(t(0, 0) == doctest::Approx(3.0 * std::exp(-1.0)).epsilon(1e-14));
  CHECK(t(0, 0) == doctest::Approx(1.10364).epsilon(1e-5));
  CHECK(std::abs(t(0, 1)) < 1e-16);
}

TEST_CASE("property: dipole tensor symmetric and even") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    const Vec3 r(u(rng), u(rng), u(rng));
    const double kappa = std::abs(u(rng)) * 3.0;
    const Mat3 a = dipole_tensor(r, kappa);
    CHECK((a - a.transpose()).norm() <= 1e-14 * a.norm());
    CHECK((a - dipole_tensor(-r, kappa)).norm() == 0.0);
    // eigen structure: u is an eigenvector with the longitudinal eigenvalue
    const double rr = r.norm(), kr = kappa * rr;
    const Vec3 n = r / rr;
    const double lon = -2.0 * std::exp(-kr) * (1.0 + kr) / (rr * rr * rr);
    CHECK((a * n - lon * n).norm() <= 1e-12 * a.norm());
  }
  CHECK_THROWS_AS(dipole_tensor(Vec3::Zero(), 1.0), CoincidentParticleError);
}

TEST_CASE("assemble: single isolated particle") {
  Scene s;
  s.mode = InteractionMode::nonretarded;
  s.bodies.push_back(testing::single(Vec3(0.3, 0.1, -2.0), sphere_radiative(0.05, kGold)));
  const ImagFrequency f = ImagFrequency::at(1.0, s.mode);
  const double alpha = sphere_polarizability(0.05, kGold, f);
  const CouplingMatrix m = assemble(s, f);
  REQUIRE(m.dim() == 3);
  CHECK((m.matrix - Eigen::Matrix3d::Identity() / alpha).norm() < 1e-12 / alpha);
}

TEST_CASE("assemble: two particles have equal symmetric off-diagonal blocks") {
  const Scene s = testing::pair(0.4, sphere_radiative(0.05, kGold), InteractionMode::retarded, Vec3(1.0, 2.0, 0.5));
  const CouplingMatrix m = assemble(s, ImagFrequency::at(0.8, s.mode));
  const Mat3 a = m.matrix.block(0, 3, 3, 3), b = m.matrix.block(3, 0, 3, 3);
  CHECK((a - b).norm() == 0.0);
  CHECK((a - a.transpose()).norm() < 1e-13 * a.norm());
  CHECK((m.matrix - m.matrix.transpose()).norm() <= 1e-13 * m.matrix.norm());
}

TEST_CASE("assemble: matches a naive static reassembly") {
  const Body cube = testing::cube_cluster(0.4, 3, kGold);
  Scene s;
  s.mode = InteractionMode::nonretarded;
  s.bodies.push_back(cube);
  s.bodies.push_back(transform_body(cube, Eigen::AngleAxisd(0.3, Vec3::UnitZ()).toRotationMatrix(), Vec3(0, 0, 0.7)));
  const ImagFrequency f = ImagFrequency::at(2.0, s.mode);
  std::vector<Vec3> x;
  std::vector<double> alpha;
  for (const auto& b : s.bodies)
    for (std::size_t i = 0; i < b.size(); ++i) {
      x.push_back(b.lab_position(i));
      alpha.push_back(sphere_polarizability(b.inclusion_of(i).bounding_radius(), kGold, f));
    }
  const Eigen::MatrixXd want = naive_static(x, alpha);
  for (int threads : {1, 3}) {
    AssemblyOptions opts;
    opts.threads = threads;
    const CouplingMatrix m = assemble(s, f, opts);
    CHECK((m.matrix - want).norm() <= 1e-14 * want.norm());
  }
}

TEST_CASE("assemble: length scale multiplies every entry") {
  const Scene s = testing::pair(0.4, sphere_radiative(0.05, kGold), InteractionMode::retarded);
  const ImagFrequency f = ImagFrequency::at(0.8, s.mode);
  AssemblyOptions opts;
  opts.length3_scale = 1.25e-4;
  const CouplingMatrix a = assemble(s, f), b = assemble(s, f, opts);
  CHECK((b.matrix - 1.25e-4 * a.matrix).norm() <= 1e-15 * b.matrix.norm());
  CHECK(b.scale == 1.25e-4);
}

TEST_CASE("assemble_decoupled") {
  const Body cube = testing::cube_cluster(0.2, 2, kGold);
  Scene one;
  one.bodies.push_back(cube);
  const ImagFrequency f = ImagFrequency::at(1.0, one.mode);
  CHECK((assemble_decoupled(one, f).matrix - assemble(one, f).matrix).norm() == 0.0);

  Scene two = one;
  two.bodies.push_back(transform_body(cube, Mat3::Identity(), Vec3(0, 0, 0.5)));
  const CouplingMatrix full = assemble(two, f), dec = assemble_decoupled(two, f);
  CHECK(dec.matrix.block(0, 24, 24, 24).norm() == 0.0);
  CHECK(dec.matrix.block(24, 0, 24, 24).norm() == 0.0);
  CHECK((dec.matrix.block(0, 0, 24, 24) - full.matrix.block(0, 0, 24, 24)).norm() == 0.0);
  CHECK((dec.matrix.block(24, 24, 24, 24) - full.matrix.block(24, 24, 24, 24)).norm() == 0.0);
}

TEST_CASE("property: coupling vanishes at large kappa gap") {
  const double a = 0.01, r = 0.1;
  const Scene s = testing::pair(r, sphere_radiative(a, kGold), InteractionMode::retarded);
  const ImagFrequency f = ImagFrequency::at(30.0 / r * kHbarC, s.mode);
  const CouplingMatrix m = assemble(s, f);
  const double off = std::sqrt(2.0) * m.matrix.block(0, 3, 3, 3).norm();
  const double diag = std::sqrt(m.matrix.block(0, 0, 3, 3).squaredNorm() + m.matrix.block(3, 3, 3, 3).squaredNorm());
  CHECK(off < 1e-12 * diag);
}

TEST_CASE("tensor inclusions are inverted per block") {
  const Mat3 rot = Eigen::AngleAxisd(0.4, Vec3(0.0, 1.0, 1.0).normalized()).toRotationMatrix();
  Scene s;
  s.mode = InteractionMode::nonretarded;
  s.bodies.push_back(transform_body(testing::single(Vec3::Zero(), spheroid_static({0.03, 0.02, 0.02}, kGold)), rot,
                                    Vec3::Zero()));
  const ImagFrequency f = ImagFrequency::at(1.5, s.mode);
  const Mat3 alpha_body = spheroid_polarizability({{0.03, 0.02, 0.02}}, kGold, f);
  const Mat3 alpha_lab = rot * alpha_body * rot.transpose();
  const Mat3 inv = inverse_polarizabilities(s, f).front();
  CHECK((inv * alpha_lab - Mat3::Identity()).norm() < 1e-12);
  CHECK((assemble(s, f).matrix - inv).norm() < 1e-12 * inv.norm());
}

TEST_CASE("matrix dump: header and round trip") {
  const Scene s = testing::pair(0.4, sphere_radiative(0.05, kGold), InteractionMode::retarded);
  const CouplingMatrix m = assemble(s, ImagFrequency::at(0.8, s.mode));
  std::stringstream buf;
  write_matrix_dump(buf, m);
  const std::string bytes = buf.str();
  REQUIRE(bytes.size() == 16 + 36 * 8);
  const auto* u = reinterpret_cast<const unsigned char*>(bytes.data());
  CHECK(u[0] == 6);
  for (int i = 1; i < 8; ++i) CHECK(u[i] == 0);
  CHECK(u[8] == 1);
  for (int i = 9; i < 16; ++i) CHECK(u[i] == 0);
  // element (0, 1) sits at offset 16 + 8, little-endian
  std::uint64_t raw = 0;
  for (int i = 0; i < 8; ++i) raw |= static_cast<std::uint64_t>(u[24 + i]) << (8 * i);
  double v;
  std::memcpy(&v, &raw, 8);
  CHECK(v == m.matrix(0, 1));

  const CouplingMatrix back = read_matrix_dump(buf);
  CHECK(back.mode == InteractionMode::retarded);
  CHECK((back.matrix - m.matrix).norm() == 0.0);

  std::stringstream truncated(bytes.substr(0, 40));
  CHECK_THROWS_AS(read_matrix_dump(truncated), Error);
}
