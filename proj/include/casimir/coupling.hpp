#pragma once

#include <cstdint>
#include <iosfwd>

#include <Eigen/Dense>

#include "casimir/geometry.hpp"

namespace casimir {

/// Dipole interaction tensor A(r) at q = i kappa, in 1/um^3.
///
/// Transverse eigenvalue  e^{-kr}(1 + kr + k^2 r^2)/r^3 on the plane normal to r,
/// longitudinal eigenvalue -2 e^{-kr}(1 + kr)/r^3 along r. kappa = 0 gives the
/// static dipole kernel (I - 3 u u^T)/r^3.
Mat3 dipole_tensor(const Vec3& r_jk, double kappa);

/// Dense 3N x 3N system matrix diag(alpha^-1) + A. Row 3j + beta holds
/// particle j (in scene order: bodies in order, particles in order) and
/// cartesian component beta.
struct CouplingMatrix {
  Eigen::MatrixXd matrix;
  InteractionMode mode = InteractionMode::retarded;
  double scale = 1.0;  // matrix has been multiplied by this (um^3)

  Eigen::Index dim() const { return matrix.rows(); }
};

struct AssemblyOptions {
  /// Every entry is multiplied by this factor (um^3), keeping pivots O(1).
  double length3_scale = 1.0;
  int threads = 1;
};

CouplingMatrix assemble(const Scene& scene, const ImagFrequency& xi, const AssemblyOptions& opts = {});

/// As `assemble`, with every inter-body block zeroed.
CouplingMatrix assemble_decoupled(const Scene& scene, const ImagFrequency& xi, const AssemblyOptions& opts = {});

/// Inverse polarizability of every particle, in lab frame (block j is 3x3).
std::vector<Mat3> inverse_polarizabilities(const Scene& scene, const ImagFrequency& xi);

/// Binary dump: 16-byte header (uint64 dim, uint64 mode flag: 1 retarded,
/// 0 nonretarded), then dim*dim float64 row-major, all little-endian.
void write_matrix_dump(std::ostream& out, const CouplingMatrix& m);
CouplingMatrix read_matrix_dump(std::istream& in);

}  // namespace casimir
