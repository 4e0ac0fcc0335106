#include "casimir/run.hpp"

#include <charconv>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "casimir/errors.hpp"
#include "parallel.hpp"

#ifndef CASIMIR_VERSION
#define CASIMIR_VERSION "unknown"
#endif

namespace casimir {

namespace {

using Json = nlohmann::json;

std::atomic<bool> g_stop{false};

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_manifest(const std::filesystem::path& path, const Json& manifest) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::filesystem::filesystem_error("cannot write manifest", tmp, std::make_error_code(std::errc::io_error));
    out << manifest.dump(2) << "\n";
    if (!out) throw std::filesystem::filesystem_error("cannot write manifest", tmp, std::make_error_code(std::errc::io_error));
  }
  std::filesystem::rename(tmp, path);
}

void write_integrand(const std::filesystem::path& path, const std::vector<IntegrandSample>& samples) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::filesystem::filesystem_error("cannot write integrand dump", path, std::make_error_code(std::errc::io_error));
  out << "xi_eV,delta_logdet\n";
  for (const auto& s : samples) out << num(s.xi_eV) << "," << num(s.delta_logdet) << "\n";
}

}  // namespace

void request_stop() { g_stop.store(true); }
void clear_stop() { g_stop.store(false); }

std::pair<int, std::string> classify_current_exception() {
  try {
    throw;
  } catch (const ConfigError&) {
    return {kExitConfig, "config_error"};
  } catch (const ValidationError&) {
    return {kExitConfig, "validation_error"};
  } catch (const ConvergenceError&) {
    return {kExitNumerical, "convergence_error"};
  } catch (const SingularPolarizabilityError&) {
    return {kExitNumerical, "singular_polarizability"};
  } catch (const StencilError&) {
    return {kExitNumerical, "stencil_error"};
  } catch (const NumericalError&) {
    return {kExitNumerical, "numerical_error"};
  } catch (const DomainError&) {
    return {kExitNumerical, "domain_error"};
  } catch (const std::filesystem::filesystem_error&) {
    return {kExitIo, "io_error"};
  } catch (const std::ios_base::failure&) {
    return {kExitIo, "io_error"};
  } catch (const Error&) {
    return {kExitNumerical, "error"};
  } catch (...) {
    return {kExitNumerical, "internal_error"};
  }
}

RunOutcome run(const ScenarioConfig& config, const RunOptions& options) {
  RunOutcome outcome;
  outcome.out_dir = options.out_dir.value_or(std::filesystem::path(config.output.directory));
  const auto manifest_path = outcome.out_dir / "manifest.json";
  const auto t0 = std::chrono::steady_clock::now();
  const int threads = resolve_threads(options.threads);

  Json manifest;
  manifest["config"] = Json::parse(config.echo);
  manifest["code_version"] = CASIMIR_VERSION;
  manifest["start_time"] = utc_now();
  manifest["status"] = "running";
  manifest["threads"] = threads;
  manifest["seedless"] = options.seedless;
  manifest["mode"] = to_string(config.scene.mode);
  manifest["particles"] = config.scene.particle_count();
  manifest["outputs"] = Json::array();

  try {
    std::filesystem::create_directories(outcome.out_dir);
    write_manifest(manifest_path, manifest);
  } catch (const std::exception& e) {
    if (!options.quiet) std::cerr << "error: " << e.what() << "\n";
    outcome.exit_code = kExitIo;
    outcome.status = "failed";
    return outcome;
  }

  QuadratureSpec quad = config.quad;
  quad.threads = threads;
  long long nodes = 0;
  bool interrupted = false;

  auto finish = [&](const std::string& status) {
    manifest["status"] = status;
    manifest["end_time"] = utc_now();
    manifest["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest["node_count"] = nodes;
    outcome.status = status;
    try {
      write_manifest(manifest_path, manifest);
    } catch (const std::exception& e) {
      if (!options.quiet) std::cerr << "error: " << e.what() << "\n";
      if (outcome.exit_code == kExitOk) outcome.exit_code = kExitIo;
    }
  };

  try {
    if (config.sweep) {
      const auto csv_path = outcome.out_dir / "sweep.csv";
      std::ofstream csv(csv_path, std::ios::trunc);
      if (!csv) throw std::filesystem::filesystem_error("cannot write", csv_path, std::make_error_code(std::errc::io_error));
      csv << "param,energy_eV,derivative,quad_error_eV\n" << std::flush;
      manifest["outputs"].push_back(csv_path.filename().string());

      SweepSpec spec = config.sweep->spec;
      const SceneFamily family = config.scene_family();
      std::size_t index = 0;
      auto on_row = [&](const SweepRow& row) {
        // Params stay in grid units; forces are reported per um.
        const double per_um = config.sweep->units == GridUnits::L ? 1.0 / config.length_scale_um : 1.0;
        csv << num(row.param) << "," << num(row.energy) << "," << num(row.derivative * per_um) << ","
            << num(row.quad_error)
            << "\n"
            << std::flush;
        nodes += row.node_count;
        if (config.output.dump_integrand) {
          const auto name = "integrand_" + std::to_string(index) + ".csv";
          write_integrand(outcome.out_dir / name, row.integrand);
          manifest["outputs"].push_back(name);
        }
        ++index;
        if (!options.quiet) std::cerr << "  row " << index << "/" << spec.grid.size() << " param=" << row.param << "\n";
        if (g_stop.load()) {
          interrupted = true;
          return false;
        }
        return true;
      };
      const SweepResult result = sweep(family, spec, quad, on_row);
      manifest["scene_digest"] = result.scene_digest;
      if (!interrupted && config.sweep->fit) {
        const PowerLawFit fit = fit_power_law(result.rows, config.sweep->fit->first, config.sweep->fit->second);
        csv << "# exponent=" << num(fit.exponent) << " stderr=" << num(fit.stderr_) << "\n";
        manifest["fit"] = {{"exponent", fit.exponent}, {"stderr", fit.stderr_}, {"points", fit.points}};
      }
      if (!csv) throw std::filesystem::filesystem_error("write failed", csv_path, std::make_error_code(std::errc::io_error));
    } else {
      const EnergyResult e = interaction_energy(config.scene, quad);
      nodes = e.node_count;
      const auto csv_path = outcome.out_dir / "energy.csv";
      std::ofstream csv(csv_path, std::ios::trunc);
      if (!csv) throw std::filesystem::filesystem_error("cannot write", csv_path, std::make_error_code(std::errc::io_error));
      csv << "energy_eV,quad_error_eV,node_count\n" << num(e.energy) << "," << num(e.quad_error_estimate) << ","
          << e.node_count << "\n";
      manifest["outputs"].push_back(csv_path.filename().string());
      manifest["xi0_eV"] = e.xi0_eV;
      if (config.output.dump_integrand) {
        write_integrand(outcome.out_dir / "integrand.csv", e.integrand_samples);
        manifest["outputs"].push_back("integrand.csv");
      }
    }
  } catch (const std::exception& ex) {
    auto [code, type] = classify_current_exception();
    outcome.exit_code = code;
    Json err{{"type", type}, {"message", ex.what()}, {"exit_code", code}};
    if (const auto* c = dynamic_cast<const ConvergenceError*>(&ex)) {
      err["partial_energy_eV"] = c->partial_energy();
      err["error_estimate_eV"] = c->error_estimate();
    }
    if (const auto* s = dynamic_cast<const SingularPolarizabilityError*>(&ex)) {
      err["xi_eV"] = s->xi_eV();
      err["kappa_a"] = s->kappa_a();
    }
    if (const auto* s = dynamic_cast<const StencilError*>(&ex)) err["param"] = s->param();
    manifest["error"] = err;
    if (!options.quiet) std::cerr << "error: " << ex.what() << "\n";
    finish("failed");
    return outcome;
  }

  if (interrupted) {
    outcome.exit_code = kExitInterrupted;
    finish("incomplete");
  } else {
    finish("complete");
  }
  return outcome;
}

}  // namespace casimir
