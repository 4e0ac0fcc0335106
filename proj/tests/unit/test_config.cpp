#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "casimir/config.hpp"
#include "casimir/errors.hpp"

using namespace casimir;

namespace {

const char* kTwoSpheres = R"({
  "scene": {"bodies": [
    {"material": "gold", "inclusion": {"type": "sphere_radiative", "radius_um": 0.05},
     "particles": [{"position_um": [0, 0, 0]}]},
    {"material": "gold", "inclusion": {"type": "sphere_radiative", "radius_um": 0.05},
     "particles": [{"position_um": [0, 0, 1.0]}]}
  ]}
})";

std::vector<std::string> violations_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.violations();
  }
  return {};
}

bool any_contains(const std::vector<std::string>& v, const std::string& needle) {
  return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("minimal two-sphere config gets defaults") {
  const ScenarioConfig c = parse_config(kTwoSpheres);
  CHECK(c.scene.bodies.size() == 2);
  CHECK(c.scene.mode == InteractionMode::retarded);
  CHECK(c.quad.nodes == 40);
  CHECK(c.quad.scheme == QuadratureScheme::gauss_legendre_mapped);
  CHECK_FALSE(c.sweep.has_value());
  CHECK(c.output.directory == "out");
  CHECK_FALSE(c.output.dump_integrand);
  CHECK_FALSE(c.preset.has_value());
}

TEST_CASE("echo round-trips") {
  const ScenarioConfig a = parse_config(R"({
    "scene": {"preset": "fig1_cubes", "params": {"n": 3, "L_um": 0.2}},
    "mode": "nonretarded",
    "quadrature": {"nodes": 12},
    "sweep": {"grid_units": "L", "range": {"start": 0.2, "stop": 1.0, "count": 3, "spacing": "log"}, "fit": [0.2, 1.0]},
    "output": {"directory": "x", "dump_integrand": true}
  })");
  const ScenarioConfig b = parse_config(a.echo);
  CHECK(a.echo == b.echo);
  CHECK(b.scene.particle_count() == 54);
  CHECK(b.sweep->spec.grid == a.sweep->spec.grid);
  CHECK(b.quad.nodes == 12);
  CHECK(b.scene.mode == InteractionMode::nonretarded);
  CHECK(b.length_scale_um == 0.2);
  CHECK(b.output.dump_integrand);
}

TEST_CASE("fig1_cubes preset with L_um = 0.5 has 2000 particles") {
  const ScenarioConfig c = parse_config(R"({"scene": {"preset": "fig1_cubes", "params": {"L_um": 0.5}}})");
  CHECK(c.scene.particle_count() == 2000);
  CHECK(c.length_scale_um == 0.5);
}

TEST_CASE("fill out of range names the field and bound") {
  const auto v = violations_of(R"({
    "scene": {"bodies": [
      {"material": {"type": "maxwell_garnett", "inclusion": "gold", "host": {"type": "constant", "eps": 2.0}, "fill": 1.2},
       "inclusion": {"type": "sphere_static", "radius_um": 0.05}, "particles": [{"position_um": [0, 0, 0]}]}
    ]}
  })");
  REQUIRE_FALSE(v.empty());
  CHECK(any_contains(v, "fill"));
  CHECK(any_contains(v, "[0, 1]"));
}

TEST_CASE("every violation is reported, not just the first") {
  const auto v = violations_of(R"({
    "scene": {"bodies": [
      {"material": "gold", "inclusion": {"type": "sphere_radiative", "radius_um": -1},
       "particles": [{"position_um": [0, 0, 0]}]}
    ]},
    "quadrature": {"nodes": 2, "rel_tol": 3},
    "sweep": {"grid": [0.3, 0.1]},
    "colour": "blue"
  })");
  CHECK(v.size() >= 5);
  CHECK(any_contains(v, "radius_um"));
  CHECK(any_contains(v, "nodes"));
  CHECK(any_contains(v, "rel_tol"));
  CHECK(any_contains(v, "increasing"));
  CHECK(any_contains(v, "colour"));
}

TEST_CASE("unknown keys and unit-suffix mismatches are rejected") {
  auto v = violations_of(R"({
    "scene": {"bodies": [
      {"material": "gold", "inclusion": {"type": "sphere_radiative", "radius_nm": 50},
       "particles": [{"position_um": [0, 0, 0]}]}
    ]}
  })");
  CHECK(any_contains(v, "radius_nm"));
  CHECK(any_contains(v, "suffix"));

  v = violations_of(R"({"scene": {"preset": "fig1_cubes", "params": {"L_nm": 500}}})");
  CHECK(any_contains(v, "suffix"));

  v = violations_of(R"({"scene": {"preset": "fig1_cubes"}, "quadrature": {"xi0_meV": 5}})");
  CHECK(any_contains(v, "xi0_meV"));

  v = violations_of(R"({"scene": {"preset": "fig1_cubes"}, "quadrature": {"nodez": 5}})");
  CHECK(any_contains(v, "nodez"));
}

TEST_CASE("malformed input") {
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_config("[]"), ConfigError);
  CHECK_THROWS_AS(parse_config("{}"), ConfigError);
  CHECK(any_contains(violations_of(R"({"scene": {"preset": "fig1_cubes"}, "mode": "quantum"})"), "mode"));
  CHECK(any_contains(violations_of(R"({"scene": {"preset": "fig7"}})"), "fig7"));
}

TEST_CASE("lattice bodies, transforms and overlap checks") {
  const ScenarioConfig c = parse_config(R"({
    "scene": {"bodies": [
      {"material": "aluminum", "inclusion": {"type": "sphere_static", "radius_um": 0.01},
       "shape": {"type": "box", "lx_um": 0.2, "ly_um": 0.1, "lz_um": 0.1},
       "lattice": {"spacing_um": [0.05, 0.05, 0.05], "counts": [4, 2, 2]}},
      {"material": "aluminum", "inclusion": {"type": "spheroid_static", "semi_axes_um": [0.012, 0.01, 0.01]},
       "shape": {"type": "circular_cylinder", "radius_um": 0.1, "height_um": 0.1},
       "lattice": {"spacing_um": [0.05, 0.05, 0.05], "counts": [4, 4, 2], "stretch": [1.2, 1, 1]},
       "transform": {"axis": [0, 0, 1], "angle_rad": 0.5, "translation_um": [0, 0, 0.4]}}
    ]},
    "mode": "nonretarded"
  })");
  CHECK(c.scene.bodies[0].size() == 16);
  CHECK(c.scene.bodies[1].geometric_center().z() == doctest::Approx(0.4));

  const auto v = violations_of(R"({
    "scene": {"bodies": [
      {"material": "gold", "inclusion": {"type": "sphere_radiative", "radius_um": 0.3},
       "particles": [{"position_um": [0, 0, 0]}]},
      {"material": "gold", "inclusion": {"type": "sphere_radiative", "radius_um": 0.3},
       "particles": [{"position_um": [0, 0, 0.5]}]}
    ]}
  })");
  CHECK(any_contains(v, "overlap"));
}

TEST_CASE("tabulated paths resolve against the config directory") {
  const auto dir = std::filesystem::temp_directory_path() / "casimir_cfg_test";
  std::filesystem::create_directories(dir / "data");
  {
    std::ofstream out(dir / "data" / "eps.csv");
    out << "xi_eV,eps\n0.1,5\n1,3\n10,1.2\n";
  }
  {
    std::ofstream out(dir / "scene.json");
    out << R"({"scene": {"bodies": [
      {"material": {"type": "tabulated", "path": "data/eps.csv"}, "inclusion": {"type": "sphere_static", "radius_um": 0.05},
       "particles": [{"position_um": [0, 0, 0]}]}]}})";
  }
  const ScenarioConfig c = load_config(dir / "scene.json");
  CHECK(c.echo.find((dir / "data" / "eps.csv").string()) != std::string::npos);
  const ScenarioConfig again = parse_config(c.echo, "/nonexistent");
  CHECK(again.scene.bodies.size() == 1);
  CHECK_THROWS_AS(load_config(dir / "missing.json"), std::filesystem::filesystem_error);
}

TEST_CASE("sweep block") {
  const ScenarioConfig c = parse_config(R"({
    "scene": {"preset": "fig3_rect_torque", "params": {"nx": 2, "ny": 4, "nz": 1}},
    "sweep": {"parameter": "angle", "range": {"start": 0, "stop": 1.5, "count": 4}, "fd_step": 1e-4}
  })");
  REQUIRE(c.sweep.has_value());
  CHECK(c.sweep->spec.parameter == SweepParameter::angle);
  CHECK(c.sweep->units == GridUnits::rad);
  CHECK(c.sweep->spec.grid.size() == 4);
  CHECK(c.sweep->spec.grid[3] == doctest::Approx(1.5));
  CHECK(c.sweep->spec.fd_step == 1e-4);

  CHECK(any_contains(violations_of(R"({"scene": {"preset": "fig1_cubes"},
    "sweep": {"parameter": "angle", "grid": [0.1], "grid_units": "L"}})"),
                     "grid_units"));
  CHECK(any_contains(violations_of(R"({"scene": {"preset": "fig1_cubes"},
    "sweep": {"grid": [0.1], "range": {"start": 1, "stop": 2, "count": 2}}})"),
                     "exactly one"));
  CHECK(any_contains(violations_of(R"({"scene": {"preset": "fig1_cubes"}, "sweep": {"grid": [0.1], "fd_step": 0.5}})"),
                     "fd_step"));
}

TEST_CASE("L grid units scale the sweep parameter") {
  const ScenarioConfig c = parse_config(R"({
    "scene": {"preset": "fig1_cubes", "params": {"n": 2, "L_um": 0.4}},
    "sweep": {"grid_units": "L", "grid": [0.5, 1.0]}
  })");
  CHECK(c.to_physical(0.5) == doctest::Approx(0.2));
  const Scene s = c.scene_family()(1.0);
  CHECK(surface_gap(s, 1, Vec3::UnitZ()) == doctest::Approx(0.4).epsilon(1e-12));
}
