#include "casimir/coupling.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "casimir/errors.hpp"
#include "parallel.hpp"

namespace casimir {

namespace {

struct Site {
  Vec3 x;
  std::size_t body;
};

std::vector<Site> lab_sites(const Scene& scene) {
  std::vector<Site> sites;
  sites.reserve(scene.particle_count());
  for (std::size_t b = 0; b < scene.bodies.size(); ++b)
    for (const auto& x : scene.bodies[b].lab_positions()) sites.push_back({x, b});
  return sites;
}

CouplingMatrix assemble_impl(const Scene& scene, const ImagFrequency& xi, const AssemblyOptions& opts,
                             bool interbody) {
  const double kappa = scene.mode == InteractionMode::retarded ? xi.kappa_or_zero() : 0.0;
  const ImagFrequency f = scene.mode == InteractionMode::retarded ? xi : ImagFrequency{xi.xi, std::nullopt};
  const auto sites = lab_sites(scene);
  const auto inv_alpha = inverse_polarizabilities(scene, f);
  const auto n = static_cast<Eigen::Index>(sites.size());
  const double s = opts.length3_scale;

  CouplingMatrix out;
  out.mode = scene.mode;
  out.scale = s;
  out.matrix.setZero(3 * n, 3 * n);
  Eigen::MatrixXd& M = out.matrix;

  // Upper block triangle only; mirrored below.
  parallel_for(static_cast<std::size_t>(n), opts.threads, [&](std::size_t jj) {
    const auto j = static_cast<Eigen::Index>(jj);
    M.block<3, 3>(3 * j, 3 * j) = s * inv_alpha[jj];
    for (Eigen::Index k = j + 1; k < n; ++k) {
      if (!interbody && sites[jj].body != sites[static_cast<std::size_t>(k)].body) continue;
      const Vec3 r = sites[jj].x - sites[static_cast<std::size_t>(k)].x;
      if (r.squaredNorm() == 0.0) throw CoincidentParticleError("coincident particles in coupling assembly");
      M.block<3, 3>(3 * j, 3 * k) = s * dipole_tensor(r, kappa);
    }
  });
  M.triangularView<Eigen::StrictlyLower>() = M.transpose();
  return out;
}

}  // namespace

Mat3 dipole_tensor(const Vec3& r_jk, double kappa) {
  const double r = r_jk.norm();
  if (r == 0.0) throw CoincidentParticleError("dipole tensor at zero separation");
  const Vec3 u = r_jk / r;
  const double kr = kappa * r;
  const double damp = kappa == 0.0 ? 1.0 : std::exp(-kr);
  const double r3 = r * r * r;
  const double transverse = damp * (1.0 + kr + kr * kr) / r3;
  const double longitudinal = -2.0 * damp * (1.0 + kr) / r3;
  const Mat3 uu = u * u.transpose();
  return transverse * (Mat3::Identity() - uu) + longitudinal * uu;
}

std::vector<Mat3> inverse_polarizabilities(const Scene& scene, const ImagFrequency& xi) {
  std::vector<Mat3> out;
  out.reserve(scene.particle_count());
  for (const Body& body : scene.bodies) {
    const Mat3& R = body.transform().rotation;
    std::vector<Mat3> per_inclusion;
    for (const auto& inc : body.inclusions()) {
      const Mat3 alpha = polarizability_tensor(inc, xi);
      Mat3 inv;
      if (inc.is_isotropic()) {
        if (!(alpha(0, 0) > 0.0)) throw SingularPolarizabilityError(xi.xi, xi.kappa_or_zero() * inc.bounding_radius());
        inv = (1.0 / alpha(0, 0)) * Mat3::Identity();
      } else {
        Eigen::SelfAdjointEigenSolver<Mat3> eig(alpha);
        if (!(eig.eigenvalues().minCoeff() > 0.0))
          throw SingularPolarizabilityError(xi.xi, xi.kappa_or_zero() * inc.bounding_radius());
        inv = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
        inv = R * inv * R.transpose();
      }
      per_inclusion.push_back(inv);
    }
    for (const auto& p : body.particles()) out.push_back(per_inclusion[p.inclusion]);
  }
  return out;
}

CouplingMatrix assemble(const Scene& scene, const ImagFrequency& xi, const AssemblyOptions& opts) {
  return assemble_impl(scene, xi, opts, true);
}

CouplingMatrix assemble_decoupled(const Scene& scene, const ImagFrequency& xi, const AssemblyOptions& opts) {
  return assemble_impl(scene, xi, opts, false);
}

namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw Error("matrix dump: truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

void write_matrix_dump(std::ostream& out, const CouplingMatrix& m) {
  const auto dim = static_cast<std::uint64_t>(m.dim());
  put_u64(out, dim);
  put_u64(out, m.mode == InteractionMode::retarded ? 1u : 0u);
  for (Eigen::Index i = 0; i < m.dim(); ++i)
    for (Eigen::Index j = 0; j < m.dim(); ++j) put_u64(out, std::bit_cast<std::uint64_t>(m.matrix(i, j)));
  if (!out) throw Error("matrix dump: write failed");
}

CouplingMatrix read_matrix_dump(std::istream& in) {
  const auto dim = static_cast<Eigen::Index>(get_u64(in));
  const auto flag = get_u64(in);
  CouplingMatrix m;
  m.mode = flag == 1 ? InteractionMode::retarded : InteractionMode::nonretarded;
  m.matrix.resize(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) m.matrix(i, j) = std::bit_cast<double>(get_u64(in));
  return m;
}

}  // namespace casimir
