#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace casimir {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class InteractionMode { retarded, nonretarded };

const char* to_string(InteractionMode mode);
InteractionMode parse_mode(const std::string& text);

/// A point on the imaginary frequency axis, omega = i * xi.
///
/// `kappa` is the spatial wavenumber xi / (hbar c) and is only populated in
/// retarded mode; consumers treat a missing kappa as kappa = 0.
struct ImagFrequency {
  double xi = 0.0;  // eV
  std::optional<double> kappa;  // 1/um

  static ImagFrequency at(double xi_eV, InteractionMode mode);
  double kappa_or_zero() const { return kappa.value_or(0.0); }
};

// ---------------------------------------------------------------------------
// Dielectric functions on the imaginary axis

struct Drude {
  double plasma_eV;
  double damping_eV;
};

struct LorentzOscillator {
  double strength_eV2;
  double resonance_eV;
  double damping_eV;
};

struct Lorentz {
  std::vector<LorentzOscillator> oscillators;
};

struct ConstantEps {
  double eps;
};

struct PerfectMetal {};

/// Tabulated eps(i xi). Construct through `make_tabulated`, which validates.
struct Tabulated {
  std::vector<double> xi_eV;
  std::vector<double> eps;
};

class DielectricModel;

struct MaxwellGarnett {
  std::shared_ptr<const DielectricModel> inclusion;
  std::shared_ptr<const DielectricModel> host;
  double fill;
};

class DielectricModel {
 public:
  using Variant = std::variant<Drude, Lorentz, ConstantEps, PerfectMetal, Tabulated, MaxwellGarnett>;

  DielectricModel();  // perfect metal
  DielectricModel(Variant v);  // NOLINT(google-explicit-constructor)

  const Variant& variant() const { return v_; }
  bool is_perfect_metal() const { return std::holds_alternative<PerfectMetal>(v_); }

  /// True when eps(i xi) -> 1 as xi -> infinity, i.e. the static-coupling
  /// energy integral converges without a frequency cutoff.
  bool decays() const;

  /// Characteristic frequency of the sphere resonance (eV), if the model has one.
  std::optional<double> resonance_scale() const;

  std::string describe() const;

 private:
  Variant v_;
};

DielectricModel make_drude(double plasma_eV, double damping_eV);
DielectricModel make_lorentz(std::vector<LorentzOscillator> oscillators);
DielectricModel make_constant(double eps);
DielectricModel make_tabulated(std::vector<double> xi_eV, std::vector<double> eps);
DielectricModel make_maxwell_garnett(DielectricModel inclusion, DielectricModel host, double fill);

/// Reads a two-column CSV (xi_eV, eps) with a header row.
DielectricModel load_tabulated_csv(const std::string& path);

/// eps(i xi). Perfect metals return +infinity, which only the polarizability
/// functions know how to consume.
double eval_epsilon(const DielectricModel& model, const ImagFrequency& xi);

/// Built-in materials: gold, aluminum, silicon, polystyrene, perfect_metal.
DielectricModel named_material(const std::string& name);
std::vector<std::string> named_materials();

// ---------------------------------------------------------------------------
// Inclusion polarizabilities

struct SphereRadiative {
  double radius_um;
};

struct SphereStatic {
  double radius_um;
};

struct SpheroidStatic {
  std::array<double, 3> semi_axes_um;
  Mat3 orientation = Mat3::Identity();  // body-frame rotation of the principal axes
};

class PolarizabilityModel {
 public:
  using Shape = std::variant<SphereRadiative, SphereStatic, SpheroidStatic>;

  PolarizabilityModel(Shape shape, DielectricModel material);

  const Shape& shape() const { return shape_; }
  const DielectricModel& material() const { return material_; }

  bool is_isotropic() const { return !std::holds_alternative<SpheroidStatic>(shape_); }

  /// Radius of the smallest centred sphere enclosing the inclusion.
  double bounding_radius() const;

  /// Half-extent of the inclusion along unit direction `n`, given the
  /// rotation `frame` taking inclusion body coordinates to the lab.
  double support(const Vec3& n, const Mat3& frame) const;

 private:
  Shape shape_;
  DielectricModel material_;
};

PolarizabilityModel sphere_radiative(double radius_um, DielectricModel material);
PolarizabilityModel sphere_static(double radius_um, DielectricModel material);
PolarizabilityModel spheroid_static(std::array<double, 3> semi_axes_um, DielectricModel material,
                                    Mat3 orientation = Mat3::Identity());

/// Sphere polarizability with radiative corrections continued to q = i kappa:
/// a^3 (eps-1) / (3 + (eps-1)[1 - (ka)^2 - (2/3)(ka)^3]).
/// Throws SingularPolarizabilityError when the denominator is not positive.
double sphere_polarizability(double radius_um, const DielectricModel& material,
                             const ImagFrequency& xi);

/// Depolarization factors of an ellipsoid with the given semi-axes.
std::array<double, 3> depolarization_factors(const std::array<double, 3>& semi_axes_um);

/// Static ellipsoid tensor, (a1 a2 a3 / 3)(eps-1)/(1 + L_i (eps-1)) on the
/// principal axes, rotated by the spheroid's own orientation.
Mat3 spheroid_polarizability(const SpheroidStatic& spheroid, const DielectricModel& material,
                             const ImagFrequency& xi);

/// Polarizability tensor in the inclusion's parent frame for any model.
/// Non-radiative shapes ignore kappa.
Mat3 polarizability_tensor(const PolarizabilityModel& model, const ImagFrequency& xi);

}  // namespace casimir
