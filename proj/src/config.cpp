#include "casimir/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "casimir/errors.hpp"
#include "json_util.hpp"
#include "material_io.hpp"

namespace casimir {

using detail::check_keys;
using detail::get_integer;
using detail::get_number;
using detail::get_string;
using detail::get_vector;
using detail::Json;
using detail::Violations;

namespace {

std::optional<Vec3> get_vec3(const Json& obj, const char* key, const std::string& where, Violations& out,
                             bool required) {
  auto v = get_vector(obj, key, where, out, required, 3);
  if (!v) return std::nullopt;
  return Vec3((*v)[0], (*v)[1], (*v)[2]);
}

std::optional<RigidTransform> parse_transform(const Json& j, const std::string& where, Violations& out) {
  check_keys(j, {"axis", "angle_rad", "translation_um"}, where, out);
  const std::size_t before = out.size();
  const Vec3 axis = get_vec3(j, "axis", where, out, false).value_or(Vec3::UnitZ());
  const double angle = get_number(j, "angle_rad", where, out, false).value_or(0.0);
  const Vec3 t = get_vec3(j, "translation_um", where, out, false).value_or(Vec3::Zero());
  if (axis.norm() == 0.0) out.push_back(where + ".axis: must be non-zero");
  if (out.size() != before) return std::nullopt;
  return RigidTransform::from_axis_angle(axis, angle, t);
}

std::optional<PolarizabilityModel> parse_inclusion(const Json& j, const DielectricModel& material,
                                                   const std::string& where, Violations& out) {
  const auto type = get_string(j, "type", where, out, true);
  if (!type) return std::nullopt;
  const std::size_t before = out.size();
  if (*type == "sphere_radiative" || *type == "sphere_static") {
    check_keys(j, {"type", "radius_um"}, where, out);
    auto r = get_number(j, "radius_um", where, out, true);
    if (r && !(*r > 0.0)) out.push_back(where + ".radius_um: must be > 0");
    if (out.size() != before) return std::nullopt;
    return *type == "sphere_radiative" ? sphere_radiative(*r, material) : sphere_static(*r, material);
  }
  if (*type == "spheroid_static") {
    check_keys(j, {"type", "semi_axes_um", "axis", "angle_rad"}, where, out);
    auto axes = get_vector(j, "semi_axes_um", where, out, true, 3);
    if (axes)
      for (double a : *axes)
        if (!(a > 0.0)) out.push_back(where + ".semi_axes_um: all semi-axes must be > 0");
    const Vec3 axis = get_vec3(j, "axis", where, out, false).value_or(Vec3::UnitZ());
    const double angle = get_number(j, "angle_rad", where, out, false).value_or(0.0);
    if (out.size() != before) return std::nullopt;
    const Mat3 R = RigidTransform::from_axis_angle(axis, angle).rotation;
    return spheroid_static({(*axes)[0], (*axes)[1], (*axes)[2]}, material, R);
  }
  out.push_back(where + ".type: unknown inclusion type '" + *type + "'");
  return std::nullopt;
}

std::optional<Shape> parse_shape(const Json& j, const std::string& where, Violations& out) {
  const auto type = get_string(j, "type", where, out, true);
  if (!type) return std::nullopt;
  const std::size_t before = out.size();
  auto positive = [&](const char* key) {
    auto v = get_number(j, key, where, out, true);
    if (v && !(*v > 0.0)) out.push_back(where + "." + key + ": must be > 0");
    return v.value_or(0.0);
  };
  Shape s;
  if (*type == "cube") {
    check_keys(j, {"type", "side_um"}, where, out);
    s = Cube{positive("side_um")};
  } else if (*type == "box") {
    check_keys(j, {"type", "lx_um", "ly_um", "lz_um"}, where, out);
    s = Box{positive("lx_um"), positive("ly_um"), positive("lz_um")};
  } else if (*type == "circular_cylinder") {
    check_keys(j, {"type", "radius_um", "height_um"}, where, out);
    s = CircularCylinder{positive("radius_um"), positive("height_um")};
  } else {
    out.push_back(where + ".type: unknown shape '" + *type + "'");
  }
  if (out.size() != before) return std::nullopt;
  return s;
}

std::optional<Lattice> parse_lattice(const Json& j, const std::string& where, Violations& out) {
  check_keys(j, {"spacing_um", "counts", "stretch"}, where, out);
  const std::size_t before = out.size();
  Lattice lat;
  if (auto s = get_vector(j, "spacing_um", where, out, true, 3))
    for (int a = 0; a < 3; ++a) {
      if (!((*s)[a] > 0.0)) out.push_back(where + ".spacing_um: spacings must be > 0");
      lat.spacing_um[a] = (*s)[a];
    }
  if (auto c = get_vector(j, "counts", where, out, true, 3))
    for (int a = 0; a < 3; ++a) {
      if (!((*c)[a] >= 1.0) || (*c)[a] != std::floor((*c)[a]))
        out.push_back(where + ".counts: counts must be positive integers");
      lat.counts[a] = static_cast<int>((*c)[a]);
    }
  if (auto st = get_vector(j, "stretch", where, out, false, 3))
    for (int a = 0; a < 3; ++a) {
      if (!((*st)[a] > 0.0)) out.push_back(where + ".stretch: factors must be > 0");
      lat.stretch[a] = (*st)[a];
    }
  if (out.size() != before) return std::nullopt;
  return lat;
}

std::optional<Body> parse_body(const Json& j, const std::string& where, Violations& out,
                               const std::filesystem::path& base_dir) {
  check_keys(j, {"shape", "lattice", "particles", "inclusion", "material", "transform"}, where, out);
  const std::size_t before = out.size();
  std::optional<DielectricModel> material;
  if (!j.contains("material")) out.push_back(where + ".material: required");
  else material = detail::material_from_json(j.at("material"), where + ".material", out, base_dir);
  std::optional<PolarizabilityModel> inclusion;
  if (!j.contains("inclusion")) out.push_back(where + ".inclusion: required");
  else if (material) inclusion = parse_inclusion(j.at("inclusion"), *material, where + ".inclusion", out);
  RigidTransform transform;
  if (j.contains("transform"))
    if (auto t = parse_transform(j.at("transform"), where + ".transform", out)) transform = *t;

  const bool explicit_particles = j.contains("particles");
  const bool lattice_cut = j.contains("shape") || j.contains("lattice");
  if (explicit_particles == lattice_cut) {
    out.push_back(where + ": give either 'particles' or both 'shape' and 'lattice'");
    return std::nullopt;
  }
  if (explicit_particles) {
    const Json& ps = j.at("particles");
    if (!ps.is_array() || ps.empty()) {
      out.push_back(where + ".particles: expected a non-empty array");
      return std::nullopt;
    }
    std::vector<Particle> particles;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const std::string w = where + ".particles[" + std::to_string(i) + "]";
      check_keys(ps[i], {"position_um"}, w, out);
      if (auto x = get_vec3(ps[i], "position_um", w, out, true)) particles.push_back({*x, 0});
    }
    if (out.size() != before || !inclusion) return std::nullopt;
    try {
      return Body(std::move(particles), {*inclusion}, transform);
    } catch (const Error& e) {
      out.push_back(where + ": " + e.what());
      return std::nullopt;
    }
  }
  std::optional<Shape> shape;
  std::optional<Lattice> lattice;
  if (!j.contains("shape")) out.push_back(where + ".shape: required with 'lattice'");
  else shape = parse_shape(j.at("shape"), where + ".shape", out);
  if (!j.contains("lattice")) out.push_back(where + ".lattice: required with 'shape'");
  else lattice = parse_lattice(j.at("lattice"), where + ".lattice", out);
  if (out.size() != before || !inclusion) return std::nullopt;
  try {
    Body b = build_cluster(*shape, *lattice, *inclusion);
    return b.with_transform(transform);
  } catch (const Error& e) {
    out.push_back(where + ": " + e.what());
    return std::nullopt;
  }
}

void absolutize_tabulated_paths(Json& j, const std::filesystem::path& base_dir) {
  if (j.is_object()) {
    if (j.contains("type") && j["type"] == "tabulated" && j.contains("path") && j["path"].is_string()) {
      std::filesystem::path p(j["path"].get<std::string>());
      if (p.is_relative()) j["path"] = std::filesystem::absolute(base_dir / p).lexically_normal().string();
    }
    for (auto& [key, value] : j.items()) absolutize_tabulated_paths(value, base_dir);
  } else if (j.is_array()) {
    for (auto& e : j) absolutize_tabulated_paths(e, base_dir);
  }
}

std::vector<double> parse_grid(const Json& sweep, const std::string& where, Violations& out) {
  const bool has_grid = sweep.contains("grid");
  const bool has_range = sweep.contains("range");
  if (has_grid == has_range) {
    out.push_back(where + ": give exactly one of 'grid' or 'range'");
    return {};
  }
  if (has_grid) return get_vector(sweep, "grid", where, out, true).value_or(std::vector<double>{});
  const Json& r = sweep.at("range");
  const std::string w = where + ".range";
  check_keys(r, {"start", "stop", "count", "spacing"}, w, out);
  auto start = get_number(r, "start", w, out, true);
  auto stop = get_number(r, "stop", w, out, true);
  auto count = get_integer(r, "count", w, out, true);
  const std::string spacing = get_string(r, "spacing", w, out, false).value_or("linear");
  if (!start || !stop || !count) return {};
  if (*count < 2) {
    out.push_back(w + ".count: must be >= 2");
    return {};
  }
  if (spacing != "linear" && spacing != "log") {
    out.push_back(w + ".spacing: expected 'linear' or 'log'");
    return {};
  }
  if (spacing == "log" && !(*start > 0.0 && *stop > 0.0)) {
    out.push_back(w + ": log spacing needs positive start and stop");
    return {};
  }
  std::vector<double> g;
  for (long long i = 0; i < *count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(*count - 1);
    g.push_back(spacing == "log" ? *start * std::pow(*stop / *start, t) : *start + t * (*stop - *start));
  }
  return g;
}

}  // namespace

double ScenarioConfig::to_physical(double grid_value) const {
  if (sweep && sweep->units == GridUnits::L) return grid_value * length_scale_um;
  return grid_value;
}

SceneFamily ScenarioConfig::scene_family() const {
  if (!sweep) throw ValidationError("scenario has no sweep block");
  const SweepSpec& s = sweep->spec;
  SceneFamily inner = s.parameter == SweepParameter::separation
                          ? separation_family(scene, s.body_index, s.axis, s.separation_kind)
                          : rotation_family(scene, s.body_index, s.axis);
  if (sweep->units != GridUnits::L) return inner;
  const double L = length_scale_um;
  return [inner, L](double p) { return inner(p * L); };
}

ScenarioConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError({std::string("config is not valid JSON: ") + e.what()});
  }
  Violations out;
  check_keys(root, {"scene", "mode", "quadrature", "sweep", "output"}, "", out);
  if (!root.is_object()) throw ConfigError(out);

  ScenarioConfig cfg;
  Json norm = root;

  const std::string mode_text = get_string(root, "mode", "", out, false).value_or("retarded");
  InteractionMode mode = InteractionMode::retarded;
  try {
    mode = parse_mode(mode_text);
  } catch (const Error& e) {
    out.push_back(std::string("mode: ") + e.what());
  }
  norm["mode"] = to_string(mode);

  // scene
  if (!root.contains("scene")) {
    out.push_back("scene: required");
  } else {
    const Json& sj = root.at("scene");
    if (sj.is_object() && sj.contains("preset")) {
      check_keys(sj, {"preset", "params", "variant", "material"}, "scene", out);
      const std::size_t before = out.size();
      auto name = get_string(sj, "preset", "scene", out, true);
      cfg.preset_params.variant = get_string(sj, "variant", "scene", out, false).value_or("");
      cfg.preset_params.material = get_string(sj, "material", "scene", out, false).value_or("gold");
      cfg.preset_params.mode = to_string(mode);
      const PresetInfo* info = nullptr;
      if (name) {
        for (const auto& p : preset_catalog())
          if (p.name == *name) info = &p;
        if (!info) out.push_back("scene.preset: unknown preset '" + *name + "'");
      }
      if (info && sj.contains("params")) {
        const Json& pj = sj.at("params");
        if (!pj.is_object()) {
          out.push_back("scene.params: expected an object");
        } else {
          for (const auto& [key, value] : pj.items()) {
            if (!info->defaults.count(key)) {
              std::string hint;
              for (const auto& [k, d] : info->defaults)
                if (k.substr(0, k.rfind('_')) == key.substr(0, key.rfind('_')) && k != key) hint = k;
              out.push_back("scene.params." + key +
                            (hint.empty() ? ": unknown parameter" : ": unit suffix mismatch (expected '" + hint + "')"));
            } else if (auto v = get_number(pj, key.c_str(), "scene.params", out, true)) {
              cfg.preset_params.values[key] = *v;
            }
          }
        }
      }
      if (info && out.size() == before) {
        try {
          cfg.scene = preset_scene(*name, cfg.preset_params);
          cfg.preset = *name;
          cfg.length_scale_um = preset_length_scale(*name, cfg.preset_params);
          Json params = Json::object();
          for (const auto& [k, d] : info->defaults) {
            auto it = cfg.preset_params.values.find(k);
            params[k] = it != cfg.preset_params.values.end() ? it->second : d;
          }
          norm["scene"]["params"] = params;
          norm["scene"]["material"] = cfg.preset_params.material;
        } catch (const Error& e) {
          out.push_back(std::string("scene: ") + e.what());
        }
      }
    } else if (sj.is_object() && sj.contains("bodies")) {
      check_keys(sj, {"bodies"}, "scene", out);
      const Json& bj = sj.at("bodies");
      if (!bj.is_array() || bj.empty()) {
        out.push_back("scene.bodies: expected a non-empty array");
      } else {
        cfg.scene.mode = mode;
        for (std::size_t i = 0; i < bj.size(); ++i)
          if (auto b = parse_body(bj[i], "scene.bodies[" + std::to_string(i) + "]", out, base_dir))
            cfg.scene.bodies.push_back(std::move(*b));
        if (cfg.scene.bodies.size() == bj.size()) {
          try {
            validate_scene(cfg.scene);
          } catch (const Error& e) {
            out.push_back(std::string("scene: ") + e.what());
          }
        }
      }
    } else {
      out.push_back("scene: expected an object with 'preset' or 'bodies'");
    }
  }

  // quadrature
  {
    const Json q = root.value("quadrature", Json::object());
    check_keys(q, {"scheme", "nodes", "xi0_eV", "rel_tol", "xi_max_eV"}, "quadrature", out);
    try {
      cfg.quad.scheme = parse_scheme(get_string(q, "scheme", "quadrature", out, false).value_or("gauss_legendre_mapped"));
    } catch (const Error& e) {
      out.push_back(std::string("quadrature.scheme: ") + e.what());
    }
    if (auto n = get_integer(q, "nodes", "quadrature", out, false)) {
      if (*n < 4) out.push_back("quadrature.nodes: must be >= 4 (got " + std::to_string(*n) + ")");
      cfg.quad.nodes = static_cast<int>(*n);
    }
    if (auto x = get_number(q, "xi0_eV", "quadrature", out, false)) {
      if (!(*x > 0.0)) out.push_back("quadrature.xi0_eV: must be > 0");
      cfg.quad.xi0_eV = *x;
    }
    if (auto t = get_number(q, "rel_tol", "quadrature", out, false)) {
      if (!(*t > 0.0 && *t <= 0.1)) out.push_back("quadrature.rel_tol: must lie in (0, 0.1]");
      cfg.quad.rel_tol = *t;
    }
    if (auto x = get_number(q, "xi_max_eV", "quadrature", out, false)) {
      if (!(*x > 0.0)) out.push_back("quadrature.xi_max_eV: must be > 0");
      cfg.quad.xi_max_eV = *x;
    }
    Json qn = q.is_object() ? q : Json::object();
    qn["scheme"] = to_string(cfg.quad.scheme);
    qn["nodes"] = cfg.quad.nodes;
    qn["rel_tol"] = cfg.quad.rel_tol;
    norm["quadrature"] = qn;
  }

  // sweep
  if (root.contains("sweep")) {
    const Json& s = root.at("sweep");
    const std::string w = "sweep";
    check_keys(s, {"parameter", "grid", "range", "grid_units", "body_index", "axis", "separation_kind", "fd_step", "fit"},
               w, out);
    SweepConfig sc;
    const std::string param = get_string(s, "parameter", w, out, false).value_or("separation");
    if (param == "separation") sc.spec.parameter = SweepParameter::separation;
    else if (param == "angle") sc.spec.parameter = SweepParameter::angle;
    else out.push_back("sweep.parameter: expected 'separation' or 'angle'");
    sc.spec.grid = parse_grid(s, w, out);
    const std::string units = get_string(s, "grid_units", w, out, false)
                                  .value_or(sc.spec.parameter == SweepParameter::angle ? "rad" : "um");
    if (units == "um") sc.units = GridUnits::um;
    else if (units == "rad") sc.units = GridUnits::rad;
    else if (units == "L") sc.units = GridUnits::L;
    else out.push_back("sweep.grid_units: expected 'um', 'rad' or 'L'");
    if (sc.spec.parameter == SweepParameter::angle && units != "rad")
      out.push_back("sweep.grid_units: angle sweeps use 'rad'");
    if (sc.spec.parameter == SweepParameter::separation && units == "rad")
      out.push_back("sweep.grid_units: separation sweeps use 'um' or 'L'");
    if (units == "L" && !root.value("scene", Json::object()).contains("preset"))
      out.push_back("sweep.grid_units: 'L' needs a preset scene");
    if (auto b = get_integer(s, "body_index", w, out, false)) {
      if (*b < 0) out.push_back("sweep.body_index: must be >= 0");
      sc.spec.body_index = static_cast<std::size_t>(std::max(0LL, *b));
    }
    if (auto a = get_vec3(s, "axis", w, out, false)) {
      if (a->norm() == 0.0) out.push_back("sweep.axis: must be non-zero");
      sc.spec.axis = *a;
    }
    const std::string kind = get_string(s, "separation_kind", w, out, false).value_or("surface_gap");
    if (kind == "surface_gap") sc.spec.separation_kind = SeparationKind::surface_gap;
    else if (kind == "center") sc.spec.separation_kind = SeparationKind::center;
    else out.push_back("sweep.separation_kind: expected 'surface_gap' or 'center'");
    if (auto f = get_number(s, "fd_step", w, out, false)) {
      if (!(*f >= 1e-6 && *f <= 1e-1)) out.push_back("sweep.fd_step: must lie in [1e-6, 1e-1]");
      sc.spec.fd_step = *f;
    }
    if (auto f = get_vector(s, "fit", w, out, false, 2)) {
      if (!((*f)[0] < (*f)[1])) out.push_back("sweep.fit: window must be [lo, hi] with lo < hi");
      sc.fit = std::make_pair((*f)[0], (*f)[1]);
    }
    for (std::size_t i = 1; i < sc.spec.grid.size(); ++i)
      if (!(sc.spec.grid[i] > sc.spec.grid[i - 1])) {
        out.push_back("sweep.grid: must be strictly increasing");
        break;
      }
    if (sc.spec.parameter == SweepParameter::separation && !sc.spec.grid.empty() && !(sc.spec.grid.front() > 0.0))
      out.push_back("sweep.grid: separations must be > 0");
    if (sc.spec.body_index >= cfg.scene.bodies.size() && !cfg.scene.bodies.empty())
      out.push_back("sweep.body_index: out of range");
    Json sn = s;
    sn.erase("range");
    sn["grid"] = sc.spec.grid;
    sn["parameter"] = param;
    sn["grid_units"] = units;
    sn["body_index"] = sc.spec.body_index;
    sn["axis"] = {sc.spec.axis.x(), sc.spec.axis.y(), sc.spec.axis.z()};
    sn["separation_kind"] = kind;
    sn["fd_step"] = sc.spec.fd_step;
    norm["sweep"] = sn;
    cfg.sweep = sc;
  }

  // output
  {
    const Json o = root.value("output", Json::object());
    check_keys(o, {"directory", "dump_integrand"}, "output", out);
    cfg.output.directory = get_string(o, "directory", "output", out, false).value_or("out");
    if (o.is_object() && o.contains("dump_integrand")) {
      if (!o.at("dump_integrand").is_boolean()) out.push_back("output.dump_integrand: expected a boolean");
      else cfg.output.dump_integrand = o.at("dump_integrand").get<bool>();
    }
    norm["output"] = {{"directory", cfg.output.directory}, {"dump_integrand", cfg.output.dump_integrand}};
  }

  if (!out.empty()) throw ConfigError(std::move(out));
  absolutize_tabulated_paths(norm, base_dir);
  cfg.echo = norm.dump(2);
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::filesystem::filesystem_error("cannot open config", path, std::make_error_code(std::errc::no_such_file_or_directory));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
}

}  // namespace casimir
