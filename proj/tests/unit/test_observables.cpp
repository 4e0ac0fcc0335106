#include <doctest.h>

#include <cmath>

#include "casimir/errors.hpp"
#include "casimir/observables.hpp"
#include "casimir/units.hpp"
#include "support.hpp"

using namespace casimir;

namespace {

const DielectricModel kGold = make_drude(9.0, 0.035);

std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return g;
}

}  // namespace

TEST_CASE("sweep spec validation and steps") {
  SweepSpec s;
  s.grid = {0.1, 0.2};
  CHECK_NOTHROW(s.validate());
  CHECK(s.step_at(0.2) == doctest::Approx(2e-4));
  s.parameter = SweepParameter::angle;
  CHECK(s.step_at(0.0) == doctest::Approx(1e-3 * kPi / 180.0));
  CHECK(s.step_at(1.0) == doctest::Approx(1e-3));
  s.grid = {0.2, 0.1};
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s.grid = {};
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s.grid = {0.1};
  s.fd_step = 0.5;
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s.fd_step = 1e-3;
  s.parameter = SweepParameter::separation;
  s.grid = {0.0, 1.0};
  CHECK_THROWS_AS(s.validate(), ValidationError);
}

TEST_CASE("finite differences on an injected closed form") {
  SweepSpec s;
  s.grid = logspace(0.5, 4.0, 9);
  const double k = 2.5;
  const SweepResult r = sweep_function([&](double z) { return -k / std::pow(z, 6); }, s);
  REQUIRE(r.rows.size() == 9);
  for (const auto& row : r.rows) {
    const double want = -6.0 * k / std::pow(row.param, 7);
    // leading truncation term of the central difference: f''' h^2 / 6 with h = 1e-3 z
    CHECK(row.derivative / want - 1.0 == doctest::Approx(56.0e-6 / 6.0).epsilon(1e-3));
    CHECK(row.energy == doctest::Approx(-k / std::pow(row.param, 6)));
  }
  s.fd_step = 3e-4;
  for (const auto& row : sweep_function([&](double z) { return -k / std::pow(z, 6); }, s).rows)
    CHECK(std::abs(row.derivative / (-6.0 * k / std::pow(row.param, 7)) - 1.0) < 1e-6);
}

TEST_CASE("property: central differences converge at second order") {
  auto u = [](double z) { return -1.0 / std::pow(z, 6) + 0.3 * std::sin(3.0 * z); };
  auto du = [](double z) { return 6.0 / std::pow(z, 7) + 0.9 * std::cos(3.0 * z); };
  SweepSpec s;
  s.grid = {0.7, 1.1, 1.9};
  s.fd_step = 2e-2;
  const SweepResult a = sweep_function(u, s);
  s.fd_step = 1e-2;
  const SweepResult b = sweep_function(u, s);
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    const double ea = a.rows[i].derivative + du(s.grid[i]);
    const double eb = b.rows[i].derivative + du(s.grid[i]);
    const double ratio = ea / eb;
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
  }
}

TEST_CASE("power-law fit") {
  SweepSpec s;
  s.grid = logspace(1.0, 10.0, 12);
  const SweepResult r = sweep_function([](double z) { return -1.0 / (6.0 * std::pow(z, 6)); }, s);
  std::vector<SweepRow> rows = r.rows;
  for (auto& row : rows) row.derivative = std::pow(row.param, -7.0);
  const PowerLawFit f = fit_power_law(rows, 0.0, 100.0);
  CHECK(f.exponent == doctest::Approx(-7.0).epsilon(1e-12));
  CHECK(std::abs(f.exponent + 7.0) < 1e-10);
  CHECK(f.stderr_ < 1e-10);
  CHECK(f.points == 12);

  CHECK(fit_power_law(rows, 2.0, 5.0).points < 12);
  CHECK_THROWS_AS(fit_power_law(rows, 2.0, 2.5), NonPowerLawError);
  rows[5].derivative = -rows[5].derivative;
  CHECK_THROWS_AS(fit_power_law(rows, 0.0, 100.0), NonPowerLawError);
}

TEST_CASE("separation family places the body at the requested gap") {
  const Scene base = testing::pair(1.0, sphere_radiative(0.05, kGold), InteractionMode::nonretarded);
  const SceneFamily gap = separation_family(base, 1, Vec3::UnitZ(), SeparationKind::surface_gap);
  CHECK(surface_gap(gap(0.3), 1, Vec3::UnitZ()) == doctest::Approx(0.3).epsilon(1e-12));
  const SceneFamily centre = separation_family(base, 1, Vec3::UnitZ(), SeparationKind::center);
  CHECK(min_interbody_distance(centre(0.3)) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK_THROWS_AS(separation_family(base, 2, Vec3::UnitZ(), SeparationKind::center), ValidationError);
}

TEST_CASE("rotation family rotates about the geometric centre") {
  PresetParams p;
  p.values = {{"nx", 3}, {"ny", 6}, {"nz", 2}};
  const Scene base = preset_scene("fig3_rect_torque", p);
  const SceneFamily fam = rotation_family(base, 1, Vec3::UnitZ());
  const Scene s = fam(0.8);
  CHECK((s.bodies[1].geometric_center() - base.bodies[1].geometric_center()).norm() < 1e-12);
  CHECK((s.bodies[0].lab_position(3) - base.bodies[0].lab_position(3)).norm() == 0.0);
  // a half turn maps the rectangle onto itself
  const Scene half = fam(kPi);
  CHECK(scene_digest(half) != scene_digest(base));
  CHECK(surface_gap(half, 1, Vec3::UnitZ()) == doctest::Approx(surface_gap(base, 1, Vec3::UnitZ())).epsilon(1e-12));
}

TEST_CASE("stencil overlap is reported with its point") {
  const double a = 0.05;
  const Scene base = testing::pair(1.0, sphere_radiative(a, kGold), InteractionMode::nonretarded);
  SweepSpec s;
  s.separation_kind = SeparationKind::center;
  s.grid = {2.0 * a * (1.0 + 5e-4)};
  try {
    sweep(separation_family(base, 1, Vec3::UnitZ(), s.separation_kind), s, {});
    FAIL("expected StencilError");
  } catch (const StencilError& e) {
    CHECK(e.param() < s.grid[0]);
  }
}

TEST_CASE("sweep: far-field pair force and callback control") {
  const Scene base = testing::pair(1.0, sphere_radiative(0.05, kGold), InteractionMode::nonretarded);
  SweepSpec s;
  s.separation_kind = SeparationKind::center;
  s.grid = logspace(0.8, 2.0, 5);
  const auto fam = separation_family(base, 1, Vec3::UnitZ(), s.separation_kind);
  int calls = 0;
  const SweepResult r = sweep(fam, s, {}, [&](const SweepRow&) { return ++calls < 3; });
  CHECK(calls == 3);
  CHECK(r.rows.size() == 3);
  CHECK(r.mode == InteractionMode::nonretarded);
  CHECK(r.scene_digest.size() == 16);
  for (const auto& row : r.rows) {
    CHECK(row.derivative < 0.0);  // attraction toward the other body
    CHECK(row.energy < 0.0);
    CHECK(row.integrand.size() == 40);
    CHECK(row.node_count == 180);
  }
  const SweepResult full = sweep(fam, s, {});
  const PowerLawFit f = fit_power_law(full.rows, 0.8, 2.0);
  CHECK(f.exponent == doctest::Approx(-7.0).epsilon(0.05 / 7.0));
}

TEST_CASE("property: sweeps are pure functions of their inputs") {
  const Scene base = testing::pair(1.0, sphere_radiative(0.01, kGold), InteractionMode::retarded);
  SweepSpec s;
  s.grid = {0.3, 0.5};
  QuadratureSpec q;
  q.nodes = 16;
  const auto fam = separation_family(base, 1, Vec3::UnitZ(), s.separation_kind);
  const SweepResult a = sweep(fam, s, q), b = sweep(fam, s, q);
  q.threads = 3;
  const SweepResult c = sweep(fam, s, q);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].energy == b.rows[i].energy);
    CHECK(a.rows[i].derivative == b.rows[i].derivative);
    CHECK(a.rows[i].derivative == c.rows[i].derivative);
  }
  CHECK(a.scene_digest == b.scene_digest);
}

TEST_CASE("torque: aligned rectangles feel no torque and restore toward alignment") {
  PresetParams p;
  p.values = {{"nx", 3}, {"ny", 6}, {"nz", 2}, {"L_um", 0.3}};
  p.mode = "nonretarded";
  const Scene base = preset_scene("fig3_rect_torque", p);
  SweepSpec s;
  s.parameter = SweepParameter::angle;
  s.grid = {-0.3, 0.0, 0.3};
  QuadratureSpec q;
  q.nodes = 16;
  const SweepResult r = sweep(rotation_family(base, 1, Vec3::UnitZ()), s, q);
  const double scale = std::abs(r.rows[2].derivative);
  CHECK(std::abs(r.rows[1].derivative) < 1e-6 * scale);
  CHECK(r.rows[0].derivative > 0.0);
  CHECK(r.rows[2].derivative < 0.0);
  CHECK(r.rows[1].energy < r.rows[0].energy);
  CHECK(r.rows[1].energy < r.rows[2].energy);
}
