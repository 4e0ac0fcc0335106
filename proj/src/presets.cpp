#include <algorithm>
#include <cmath>

#include "casimir/errors.hpp"
#include "casimir/geometry.hpp"
#include "casimir/units.hpp"

namespace casimir {

namespace {

using Knobs = std::map<std::string, double>;

const Knobs kCubeKnobs{{"L_um", 0.5},       {"n", 10},         {"z_over_L", 0.5},
                       {"radius_over_L", 0}, {"theta_rad", 0.0}};

const std::vector<PresetInfo>& catalog() {
  static const std::vector<PresetInfo> presets{
      {"fig1_cubes", "two cubes of n^3 spheres, r = d/3 (f = 4 pi / 81), face-to-face along z", kCubeKnobs, {},
       "retarded"},
      {"fig1_cylinder",
       "two coaxial circular cylinders, base area L^2, height 0.8 L, lattice spacing L/n",
       {{"L_um", 5.0}, {"n", 10}, {"height_over_L", 0.8}, {"z_over_L", 0.5}, {"theta_rad", 0.0}},
       {},
       "retarded"},
      {"fig2_materials", "fig1 cubes with a selectable sphere material", kCubeKnobs, {}, "retarded"},
      {"fig2_resolution", "fig1 cubes at n^3 = 10^3, 8^3, 6^3 or radius L/50", kCubeKnobs,
       {"n10", "n8", "n6", "radius_L50"}, "retarded"},
      {"fig3_rect_torque",
       "two L x 2L x 0.5L boxes at surface gap d_s; body 1 rotated by theta about z",
       {{"L_um", 1.0}, {"nx", 10}, {"ny", 20}, {"nz", 5}, {"d_s_over_L", 0.35}, {"theta_rad", 0.0}},
       {},
       "retarded"},
      {"fig4_aniso_torque",
       "two circular cylinders (base area A) of anisotropic metamaterial; body 1 rotated by theta about z",
       {{"A_um2", 1.0},
        {"n_per_side", 14},
        {"height_um", 0.43},
        {"gap_over_sqrtA", 0.4},
        {"stretch", 1.2},
        {"aspect", 1.2},
        {"theta_rad", 0.0}},
       {"spheres_asymmetric", "prolates_symmetric", "prolates_asymmetric", "spheres_symmetric"},
       "nonretarded"},
  };
  return presets;
}

const PresetInfo& find_preset(const std::string& name) {
  for (const auto& p : catalog())
    if (p.name == name) return p;
  std::string known;
  for (const auto& p : catalog()) known += (known.empty() ? "" : ", ") + p.name;
  throw ValidationError("unknown preset '" + name + "' (known: " + known + ")");
}

class KnobReader {
 public:
  KnobReader(const PresetInfo& info, const PresetParams& params) : info_(info), params_(params) {
    for (const auto& [key, value] : params.values)
      if (!info.defaults.count(key))
        throw ValidationError("preset " + info.name + ": unknown parameter '" + key + "'");
  }

  double operator()(const std::string& key) const {
    auto it = params_.values.find(key);
    return it != params_.values.end() ? it->second : info_.defaults.at(key);
  }

  int count(const std::string& key) const {
    const double v = (*this)(key);
    if (!(v >= 1.0) || v != std::floor(v))
      throw ValidationError("preset " + info_.name + ": '" + key + "' must be a positive integer");
    return static_cast<int>(v);
  }

  double positive(const std::string& key) const {
    const double v = (*this)(key);
    if (!(v > 0.0)) throw ValidationError("preset " + info_.name + ": '" + key + "' must be > 0");
    return v;
  }

 private:
  const PresetInfo& info_;
  const PresetParams& params_;
};

InteractionMode mode_of(const PresetInfo& info, const PresetParams& params) {
  return parse_mode(params.mode.empty() ? info.default_mode : params.mode);
}

// Places `upper` above `lower` along +z at the requested surface gap, after
// rotating it by theta about z through its own centre.
Scene stack_pair(const Body& lower, const Body& upper, double gap_um, double theta_rad, InteractionMode mode) {
  if (!(gap_um > 0.0)) throw ValidationError("preset surface gap must be > 0");
  const Vec3 ez = Vec3::UnitZ();
  const Mat3 rot = Eigen::AngleAxisd(theta_rad, ez).toRotationMatrix();
  Body rotated = transform_body(upper, rot, Vec3::Zero());
  rotated = transform_body(rotated, Mat3::Identity(), -rotated.geometric_center());
  const double offset = lower.extent_along(ez) + gap_um + rotated.extent_along(-ez);
  Scene scene;
  scene.mode = mode;
  scene.bodies.push_back(lower);
  scene.bodies.push_back(transform_body(rotated, Mat3::Identity(), offset * ez));
  return scene;
}

Scene cubes(const PresetInfo& info, const PresetParams& params) {
  KnobReader k(info, params);
  const double L = k.positive("L_um");
  int n = k.count("n");
  double radius_over_L = k("radius_over_L");
  if (info.name == "fig2_resolution" && !params.variant.empty()) {
    if (params.variant == "n10") n = 10;
    else if (params.variant == "n8") n = 8;
    else if (params.variant == "n6") n = 6;
    else if (params.variant == "radius_L50") { n = 10; radius_over_L = 1.0 / 50.0; }
    else throw ValidationError("fig2_resolution: unknown variant '" + params.variant + "'");
  } else if (!params.variant.empty()) {
    throw ValidationError(info.name + ": takes no variant");
  }
  const double d = L / n;
  const double r = radius_over_L > 0.0 ? radius_over_L * L : d / 3.0;
  Lattice lat;
  lat.spacing_um = {d, d, d};
  lat.counts = {n, n, n};
  const Body cube = build_cluster(Cube{L}, lat, sphere_radiative(r, named_material(params.material)));
  return stack_pair(cube, cube, k("z_over_L") * L, k("theta_rad"), mode_of(info, params));
}

Scene circular_cylinders(const PresetInfo& info, const PresetParams& params) {
  KnobReader k(info, params);
  if (!params.variant.empty()) throw ValidationError(info.name + ": takes no variant");
  const double L = k.positive("L_um");
  const int n = k.count("n");
  const double d = L / n;
  const double R = L / std::sqrt(kPi);
  const double h = k.positive("height_over_L") * L;
  Lattice lat;
  lat.spacing_um = {d, d, d};
  const int nxy = static_cast<int>(std::floor(2.0 * R / d + 1e-9));
  lat.counts = {nxy, nxy, std::max(1, static_cast<int>(std::floor(h / d + 1e-9)))};
  const Body cyl = build_cluster(CircularCylinder{R, h}, lat, sphere_radiative(d / 3.0, named_material(params.material)));
  return stack_pair(cyl, cyl, k("z_over_L") * L, k("theta_rad"), mode_of(info, params));
}

Scene rect_torque(const PresetInfo& info, const PresetParams& params) {
  KnobReader k(info, params);
  if (!params.variant.empty()) throw ValidationError(info.name + ": takes no variant");
  const double L = k.positive("L_um");
  const int nx = k.count("nx");
  const int ny = k.count("ny");
  const int nz = k.count("nz");
  const Box box{L, 2.0 * L, 0.5 * L};
  Lattice lat;
  lat.spacing_um = {box.lx_um / nx, box.ly_um / ny, box.lz_um / nz};
  lat.counts = {nx, ny, nz};
  const double r = std::min({lat.spacing_um[0], lat.spacing_um[1], lat.spacing_um[2]}) / 3.0;
  const Body body = build_cluster(box, lat, sphere_radiative(r, named_material(params.material)));
  return stack_pair(body, body, k("d_s_over_L") * L, k("theta_rad"), mode_of(info, params));
}

Scene aniso_torque(const PresetInfo& info, const PresetParams& params) {
  KnobReader k(info, params);
  const std::string variant = params.variant.empty() ? "prolates_symmetric" : params.variant;
  bool stretched = false;
  bool prolate = false;
  if (variant == "spheres_asymmetric") stretched = true;
  else if (variant == "prolates_symmetric") prolate = true;
  else if (variant == "prolates_asymmetric") stretched = prolate = true;
  else if (variant != "spheres_symmetric")
    throw ValidationError("fig4_aniso_torque: unknown variant '" + variant + "'");

  const double s = std::sqrt(k.positive("A_um2"));
  const int n = k.count("n_per_side");
  const double d = s / n;
  const double R = s / std::sqrt(kPi);
  const double h = k.positive("height_um");
  const double stretch = k.positive("stretch");
  const double aspect = k.positive("aspect");

  Lattice lat;
  lat.spacing_um = {d, d, d};
  if (stretched) lat.stretch = {stretch, 1.0, 1.0};
  lat.counts = {static_cast<int>(std::floor(2.0 * R / lat.effective_spacing(0) + 1e-9)),
                static_cast<int>(std::floor(2.0 * R / d + 1e-9)),
                std::max(1, static_cast<int>(std::floor(h / d + 1e-9)))};

  const DielectricModel material = named_material(params.material);
  const double a_long = d / 3.0;
  const PolarizabilityModel inclusion = prolate
                                            ? spheroid_static({a_long, a_long / aspect, a_long / aspect}, material)
                                            : sphere_static(a_long, material);
  const Body cyl = build_cluster(CircularCylinder{R, h}, lat, inclusion);
  return stack_pair(cyl, cyl, k("gap_over_sqrtA") * s, k("theta_rad"), mode_of(info, params));
}

}  // namespace

const std::vector<PresetInfo>& preset_catalog() { return catalog(); }

Scene preset_scene(const std::string& name, const PresetParams& params) {
  const PresetInfo& info = find_preset(name);
  Scene scene;
  if (name == "fig1_cubes" || name == "fig2_materials" || name == "fig2_resolution") scene = cubes(info, params);
  else if (name == "fig1_cylinder") scene = circular_cylinders(info, params);
  else if (name == "fig3_rect_torque") scene = rect_torque(info, params);
  else scene = aniso_torque(info, params);
  validate_scene(scene);
  return scene;
}

double preset_length_scale(const std::string& name, const PresetParams& params) {
  const PresetInfo& info = find_preset(name);
  KnobReader k(info, params);
  if (name == "fig4_aniso_torque") return std::sqrt(k.positive("A_um2"));
  return k.positive("L_um");
}

}  // namespace casimir
