#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cmath>

#include "casimir/config.hpp"
#include "casimir/coupling.hpp"
#include "casimir/errors.hpp"
#include "casimir/observables.hpp"
#include "casimir/oracle.hpp"
#include "casimir/run.hpp"
#include "casimir/spectrum.hpp"

namespace py = pybind11;
using namespace casimir;

namespace {

ScenarioConfig as_config(const py::object& obj) {
  if (py::isinstance<ScenarioConfig>(obj)) return obj.cast<ScenarioConfig>();
  const std::string text = py::str(obj);
  // JSON text starts with a brace; anything else is a path
  if (text.find_first_not_of(" \t\r\n") != std::string::npos && text[text.find_first_not_of(" \t\r\n")] == '{')
    return parse_config(text);
  return load_config(text);
}

py::dict energy_dict(const EnergyResult& e) {
  Eigen::MatrixX2d samples(static_cast<Eigen::Index>(e.integrand_samples.size()), 2);
  for (std::size_t i = 0; i < e.integrand_samples.size(); ++i) {
    samples(static_cast<Eigen::Index>(i), 0) = e.integrand_samples[i].xi_eV;
    samples(static_cast<Eigen::Index>(i), 1) = e.integrand_samples[i].delta_logdet;
  }
  py::dict d;
  d["energy_eV"] = e.energy;
  d["quad_error_eV"] = e.quad_error_estimate;
  d["energy_coarse_eV"] = e.energy_coarse;
  d["node_count"] = e.node_count;
  d["xi0_eV"] = e.xi0_eV;
  d["integrand"] = samples;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Coupled-dipole Casimir and van der Waals solver";

  // translators run most-recent first, so subclasses are registered last
  auto base = py::register_exception<Error>(m, "CasimirError", PyExc_RuntimeError);
  auto validation = py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", validation.ptr());

  py::class_<ScenarioConfig>(m, "Scenario")
      .def_static("from_json", [](const std::string& text) { return parse_config(text); }, py::arg("text"))
      .def_static("load", [](const std::filesystem::path& p) { return load_config(p); }, py::arg("path"))
      .def_property_readonly("echo", [](const ScenarioConfig& c) { return c.echo; })
      .def_property_readonly("particle_count", [](const ScenarioConfig& c) { return c.scene.particle_count(); })
      .def_property_readonly("body_count", [](const ScenarioConfig& c) { return c.scene.bodies.size(); })
      .def_property_readonly("mode", [](const ScenarioConfig& c) { return std::string(to_string(c.scene.mode)); })
      .def_property_readonly("length_scale_um", [](const ScenarioConfig& c) { return c.length_scale_um; })
      .def_property_readonly("has_sweep", [](const ScenarioConfig& c) { return c.sweep.has_value(); });

  m.def(
      "energy",
      [](const py::object& cfg, int threads) {
        const ScenarioConfig c = as_config(cfg);
        QuadratureSpec q = c.quad;
        q.threads = threads;
        py::gil_scoped_release release;
        const EnergyResult e = interaction_energy(c.scene, q);
        py::gil_scoped_acquire acquire;
        return energy_dict(e);
      },
      py::arg("config"), py::arg("threads") = 0,
      "Interaction energy of a scenario (JSON text, path or Scenario).");

  m.def(
      "sweep",
      [](const py::object& cfg, int threads) {
        const ScenarioConfig c = as_config(cfg);
        if (!c.sweep) throw ValidationError("sweep: the scenario has no sweep block");
        QuadratureSpec q = c.quad;
        q.threads = threads;
        SweepResult r;
        {
          py::gil_scoped_release release;
          r = sweep(c.scene_family(), c.sweep->spec, q);
        }
        const double per_um = c.sweep->units == GridUnits::L ? 1.0 / c.length_scale_um : 1.0;
        Eigen::MatrixX4d rows(static_cast<Eigen::Index>(r.rows.size()), 4);
        for (std::size_t i = 0; i < r.rows.size(); ++i) {
          const auto k = static_cast<Eigen::Index>(i);
          rows.row(k) << r.rows[i].param, r.rows[i].energy, r.rows[i].derivative * per_um, r.rows[i].quad_error;
        }
        py::dict d;
        d["columns"] = std::vector<std::string>{"param", "energy_eV", "derivative", "quad_error_eV"};
        d["rows"] = rows;
        d["scene_digest"] = r.scene_digest;
        if (c.sweep->fit) {
          const PowerLawFit f = fit_power_law(r.rows, c.sweep->fit->first, c.sweep->fit->second);
          d["fit"] = py::dict(py::arg("exponent") = f.exponent, py::arg("stderr") = f.stderr_,
                              py::arg("points") = f.points);
        }
        return d;
      },
      py::arg("config"), py::arg("threads") = 0, "Energy and force/torque rows over the configured grid.");

  m.def(
      "run",
      [](const py::object& cfg, const std::optional<std::filesystem::path>& out, int threads, bool quiet) {
        RunOptions o;
        o.out_dir = out;
        o.threads = threads;
        o.quiet = quiet;
        const ScenarioConfig c = as_config(cfg);
        py::gil_scoped_release release;
        const RunOutcome r = run(c, o);
        py::gil_scoped_acquire acquire;
        return py::dict(py::arg("exit_code") = r.exit_code, py::arg("status") = r.status,
                        py::arg("out_dir") = r.out_dir.string());
      },
      py::arg("config"), py::arg("out") = py::none(), py::arg("threads") = 0, py::arg("quiet") = true,
      "Full run with CSV and manifest output; never raises for numerical or I/O failures.");

  m.def(
      "geometry",
      [](const py::object& cfg) {
        const ScenarioConfig c = as_config(cfg);
        Eigen::MatrixX4d out(static_cast<Eigen::Index>(c.scene.particle_count()), 4);
        Eigen::Index k = 0;
        for (const auto& b : c.scene.bodies)
          for (std::size_t i = 0; i < b.size(); ++i, ++k) {
            const Vec3 x = b.lab_position(i);
            out.row(k) << x.x(), x.y(), x.z(), b.inclusion_of(i).bounding_radius();
          }
        return out;
      },
      py::arg("config"), "Particle positions and radii (um), one row per particle.");

  m.def(
      "coupling_matrix",
      [](const py::object& cfg, double xi_eV) {
        const ScenarioConfig c = as_config(cfg);
        validate_scene(c.scene);
        return assemble(c.scene, ImagFrequency::at(xi_eV, c.scene.mode)).matrix;
      },
      py::arg("config"), py::arg("xi_eV"));

  m.def(
      "delta_logdet",
      [](const py::object& cfg, double xi_eV) {
        const ScenarioConfig c = as_config(cfg);
        return delta_logdet(c.scene, ImagFrequency::at(xi_eV, c.scene.mode));
      },
      py::arg("config"), py::arg("xi_eV"));

  m.def(
      "epsilon", [](const std::string& material, double xi_eV) {
        return eval_epsilon(named_material(material), ImagFrequency::at(xi_eV, InteractionMode::nonretarded));
      },
      py::arg("material"), py::arg("xi_eV"), "Dielectric function at imaginary frequency (inf for perfect metals).");

  m.def("materials", &named_materials);

  m.def("presets", [] {
    py::list out;
    for (const auto& p : preset_catalog())
      out.append(py::dict(py::arg("name") = p.name, py::arg("default_mode") = p.default_mode,
                          py::arg("variants") = p.variants, py::arg("params") = p.defaults,
                          py::arg("summary") = p.summary));
    return out;
  });

  auto orc = m.def_submodule("oracle", "Analytic two-sphere references");
  orc.def(
      "london_c6",
      [](const std::string& m1, double a1, const std::string& m2, double a2, std::optional<double> cutoff) {
        return oracle::london_c6(oracle::sphere_alpha(a1, named_material(m1), InteractionMode::nonretarded),
                                 oracle::sphere_alpha(a2, named_material(m2), InteractionMode::nonretarded), cutoff);
      },
      py::arg("material1"), py::arg("radius1_um"), py::arg("material2"), py::arg("radius2_um"),
      py::arg("cutoff_eV") = py::none());
  orc.def("casimir_polder_u", &oracle::casimir_polder_u, py::arg("alpha1_um3"), py::arg("alpha2_um3"),
          py::arg("r_um"));
  orc.def(
      "two_dipole_delta_logdet",
      [](const std::string& m1, double a1, const std::string& m2, double a2, double r, const std::string& mode,
         double xi) {
        const InteractionMode md = parse_mode(mode);
        const oracle::TwoDipoleConfig cfg{oracle::sphere_alpha(a1, named_material(m1), md),
                                          oracle::sphere_alpha(a2, named_material(m2), md), r, md};
        return oracle::two_dipole_delta_logdet(cfg, xi);
      },
      py::arg("material1"), py::arg("radius1_um"), py::arg("material2"), py::arg("radius2_um"), py::arg("r_um"),
      py::arg("mode"), py::arg("xi_eV"));
}
