#include <charconv>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "casimir/config.hpp"
#include "casimir/coupling.hpp"
#include "casimir/errors.hpp"
#include "casimir/oracle.hpp"
#include "casimir/run.hpp"
#include "casimir/spectrum.hpp"
#include "casimir/units.hpp"

namespace {

using namespace casimir;

struct Globals {
  int threads = -1;  // -1: not given on the command line
  std::string out;
  bool seedless = false;
  bool quiet = false;
};

void on_sigint(int) { request_stop(); }

int threads_from(const Globals& g) {
  if (g.threads >= 0) return g.threads;
  if (const char* env = std::getenv("CASIMIR_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 0) throw ValidationError("CASIMIR_THREADS must be a non-negative integer");
    return static_cast<int>(v);
  }
  return 0;
}

std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::pair<double, double> parse_window(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ValidationError("--fit expects <lo>:<hi>");
  try {
    const double lo = std::stod(text.substr(0, colon));
    const double hi = std::stod(text.substr(colon + 1));
    if (!(lo < hi)) throw ValidationError("--fit window needs lo < hi");
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw ValidationError("--fit expects two numbers, got '" + text + "'");
  }
}

int report(const Globals& g) {
  auto [code, type] = classify_current_exception();
  try {
    throw;
  } catch (const std::exception& e) {
    if (!g.quiet) std::cerr << "error (" << type << "): " << e.what() << "\n";
  }
  return code;
}

int cmd_run(const Globals& g, const std::string& path, const std::string& fit) {
  ScenarioConfig cfg = load_config(path);
  if (!fit.empty()) {
    if (!cfg.sweep) throw ValidationError("--fit requires a sweep block in the config");
    cfg.sweep->fit = parse_window(fit);
    auto echo = nlohmann::json::parse(cfg.echo);
    echo["sweep"]["fit"] = {cfg.sweep->fit->first, cfg.sweep->fit->second};
    cfg.echo = echo.dump();
  }
  RunOptions opts;
  opts.threads = threads_from(g);
  opts.quiet = g.quiet;
  opts.seedless = g.seedless;
  if (!g.out.empty()) opts.out_dir = g.out;
  std::signal(SIGINT, on_sigint);
  const RunOutcome outcome = run(cfg, opts);
  std::signal(SIGINT, SIG_DFL);
  if (!g.quiet) std::cerr << outcome.status << ": " << outcome.out_dir.string() << "\n";
  return outcome.exit_code;
}

int cmd_energy(const Globals& g, const std::string& path, const std::string& dump) {
  const ScenarioConfig cfg = load_config(path);
  QuadratureSpec quad = cfg.quad;
  quad.threads = threads_from(g);
  const EnergyResult e = interaction_energy(cfg.scene, quad);
  std::cout << "energy_eV,quad_error_eV,node_count\n"
            << num(e.energy) << "," << num(e.quad_error_estimate) << "," << e.node_count << "\n";
  if (!dump.empty()) {
    std::ofstream out(dump, std::ios::trunc);
    if (!out) throw std::filesystem::filesystem_error("cannot write", dump, std::make_error_code(std::errc::io_error));
    out << "xi_eV,delta_logdet\n";
    for (const auto& s : e.integrand_samples) out << num(s.xi_eV) << "," << num(s.delta_logdet) << "\n";
    if (!out) throw std::filesystem::filesystem_error("write failed", dump, std::make_error_code(std::errc::io_error));
  }
  return kExitOk;
}

int cmd_geometry_dump(const std::string& path, const std::string& output) {
  const ScenarioConfig cfg = load_config(path);
  std::ofstream file;
  if (!output.empty()) {
    file.open(output, std::ios::trunc);
    if (!file) throw std::filesystem::filesystem_error("cannot write", output, std::make_error_code(std::errc::io_error));
  }
  std::ostream& out = output.empty() ? std::cout : file;
  out << "x_um,y_um,z_um,radius_um\n";
  for (const auto& body : cfg.scene.bodies) {
    for (std::size_t i = 0; i < body.size(); ++i) {
      const Vec3 x = body.lab_position(i);
      out << num(x.x()) << "," << num(x.y()) << "," << num(x.z()) << "," << num(body.inclusion_of(i).bounding_radius())
          << "\n";
    }
  }
  if (!out) throw std::filesystem::filesystem_error("write failed", output, std::make_error_code(std::errc::io_error));
  return kExitOk;
}

int cmd_coupling_dump(const Globals& g, const std::string& path, double xi, const std::string& output) {
  const ScenarioConfig cfg = load_config(path);
  validate_scene(cfg.scene);
  AssemblyOptions opts;
  opts.threads = threads_from(g);
  const CouplingMatrix m = assemble(cfg.scene, ImagFrequency::at(xi, cfg.scene.mode), opts);
  std::ofstream out(output, std::ios::binary | std::ios::trunc);
  if (!out) throw std::filesystem::filesystem_error("cannot write", output, std::make_error_code(std::errc::io_error));
  write_matrix_dump(out, m);
  if (!out) throw std::filesystem::filesystem_error("write failed", output, std::make_error_code(std::errc::io_error));
  if (!g.quiet) std::cerr << "dim " << m.dim() << " written to " << output << "\n";
  return kExitOk;
}

struct OracleArgs {
  std::string kind;
  std::string material = "gold";
  double radius_um = 0.05;
  std::string material2;
  double radius2_um = 0.0;
  double r_um = 1.0;
  std::string mode = "nonretarded";
  double xi_eV = 1.0;
  double cutoff_eV = 0.0;
};

int cmd_oracle(const OracleArgs& a) {
  const InteractionMode mode = parse_mode(a.mode);
  const auto alpha1 = oracle::sphere_alpha(a.radius_um, named_material(a.material), mode);
  const auto alpha2 = oracle::sphere_alpha(a.radius2_um > 0.0 ? a.radius2_um : a.radius_um,
                                           named_material(a.material2.empty() ? a.material : a.material2), mode);
  const std::optional<double> cutoff = a.cutoff_eV > 0.0 ? std::optional<double>(a.cutoff_eV) : std::nullopt;
  const oracle::TwoDipoleConfig cfg{alpha1, alpha2, a.r_um, mode};
  if (a.kind == "london") {
    const double c6 = oracle::london_c6(alpha1, alpha2, cutoff);
    std::cout << "c6_eV_um6,energy_eV\n" << num(c6) << "," << num(-c6 / std::pow(a.r_um, 6)) << "\n";
  } else if (a.kind == "cp") {
    // Static polarizabilities; the tiny xi stands in for xi = 0 on drude metals.
    const double a1 = alpha1(1e-9), a2 = alpha2(1e-9);
    std::cout << "alpha1_um3,alpha2_um3,energy_eV\n"
              << num(a1) << "," << num(a2) << "," << num(oracle::casimir_polder_u(a1, a2, a.r_um)) << "\n";
  } else if (a.kind == "two-dipole") {
    std::cout << "xi_eV,delta_logdet,energy_eV\n"
              << num(a.xi_eV) << "," << num(oracle::two_dipole_delta_logdet(cfg, a.xi_eV)) << ","
              << num(oracle::two_dipole_energy(cfg, cutoff)) << "\n";
  } else {
    throw ValidationError("oracle: unknown kind '" + a.kind + "' (london, cp, two-dipole)");
  }
  return kExitOk;
}

int cmd_presets_list() {
  std::cout << "name,default_mode,variants,params\n";
  for (const auto& p : preset_catalog()) {
    std::string variants, params;
    for (const auto& v : p.variants) variants += (variants.empty() ? "" : ";") + v;
    for (const auto& [k, v] : p.defaults) params += (params.empty() ? "" : ";") + k + "=" + num(v);
    std::cout << p.name << "," << p.default_mode << "," << variants << "," << params << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"casimir: coupled-dipole Casimir and van der Waals solver"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--threads", g.threads, "worker threads (0 = auto; falls back to CASIMIR_THREADS)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--out", g.out, "output directory (overrides output.directory)");
  app.add_flag("--seedless", g.seedless, "assert a fully deterministic run (no RNG is used anywhere)");
  app.add_flag("--quiet", g.quiet, "suppress progress and error text on stderr");
  app.fallthrough();

  std::string config_path, fit, dump, output;
  double xi = 0.0;
  OracleArgs oa;

  auto* run_cmd = app.add_subcommand("run", "run a scenario (sweep or single energy)");
  run_cmd->add_option("config", config_path, "scenario JSON")->required();
  run_cmd->add_option("--fit", fit, "power-law fit window <lo>:<hi> in grid units");

  auto* energy_cmd = app.add_subcommand("energy", "print the interaction energy of a scenario");
  energy_cmd->add_option("config", config_path, "scenario JSON")->required();
  energy_cmd->add_option("--dump-integrand", dump, "write xi_eV,delta_logdet CSV");

  auto* geometry_cmd = app.add_subcommand("geometry", "geometry tools");
  geometry_cmd->require_subcommand(1);
  auto* geometry_dump = geometry_cmd->add_subcommand("dump", "particle positions and radii as CSV");
  geometry_dump->add_option("config", config_path, "scenario JSON")->required();
  geometry_dump->add_option("-o,--output", output, "CSV path (default stdout)");

  auto* coupling_cmd = app.add_subcommand("coupling", "coupling-matrix tools");
  coupling_cmd->require_subcommand(1);
  auto* coupling_dump = coupling_cmd->add_subcommand("dump", "dense binary dump of the system matrix");
  coupling_dump->add_option("config", config_path, "scenario JSON")->required();
  coupling_dump->add_option("--xi", xi, "imaginary frequency (eV)")->required()->check(CLI::PositiveNumber);
  coupling_dump->add_option("-o,--output", output, "binary output path")->required();

  auto* oracle_cmd = app.add_subcommand("oracle", "analytic two-sphere reference values");
  oracle_cmd->add_option("kind", oa.kind, "london | cp | two-dipole")->required();
  oracle_cmd->add_option("--material", oa.material, "named material of sphere 1");
  oracle_cmd->add_option("--radius-um", oa.radius_um, "radius of sphere 1")->check(CLI::PositiveNumber);
  oracle_cmd->add_option("--material2", oa.material2, "named material of sphere 2 (default: same)");
  oracle_cmd->add_option("--radius2-um", oa.radius2_um, "radius of sphere 2 (default: same)");
  oracle_cmd->add_option("--r-um", oa.r_um, "centre distance")->check(CLI::PositiveNumber);
  oracle_cmd->add_option("--mode", oa.mode, "retarded | nonretarded");
  oracle_cmd->add_option("--xi-eV", oa.xi_eV, "frequency for two-dipole")->check(CLI::PositiveNumber);
  oracle_cmd->add_option("--cutoff-eV", oa.cutoff_eV, "upper integration limit (perfect metals)");

  auto* presets_cmd = app.add_subcommand("presets", "scenario presets");
  presets_cmd->require_subcommand(1);
  auto* presets_list = presets_cmd->add_subcommand("list", "list presets with default parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run_cmd) return cmd_run(g, config_path, fit);
    if (*energy_cmd) return cmd_energy(g, config_path, dump);
    if (*geometry_dump) return cmd_geometry_dump(config_path, output);
    if (*coupling_dump) return cmd_coupling_dump(g, config_path, xi, output);
    if (*oracle_cmd) return cmd_oracle(oa);
    if (*presets_list) return cmd_presets_list();
  } catch (...) {
    return report(g);
  }
  return kExitConfig;
}
