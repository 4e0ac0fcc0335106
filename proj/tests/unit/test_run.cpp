#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "casimir/config.hpp"
#include "casimir/run.hpp"

using namespace casimir;
namespace fs = std::filesystem;

namespace {

const char* kSweep = R"({
  "scene": {"bodies": [
    {"material": "gold", "inclusion": {"type": "sphere_radiative", "radius_um": 0.05},
     "particles": [{"position_um": [0, 0, 0]}]},
    {"material": "gold", "inclusion": {"type": "sphere_radiative", "radius_um": 0.05},
     "particles": [{"position_um": [0, 0, 1.0]}]}
  ]},
  "mode": "nonretarded",
  "quadrature": {"nodes": 16},
  "sweep": {"separation_kind": "center", "range": {"start": 0.8, "stop": 2.0, "count": 4, "spacing": "log"},
            "fit": [0.8, 2.0]},
  "output": {"dump_integrand": true}
})";

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path fresh_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("casimir_run_" + name);
  fs::remove_all(d);
  return d;
}

RunOptions quiet_into(const fs::path& dir) {
  RunOptions o;
  o.out_dir = dir;
  o.quiet = true;
  return o;
}

}  // namespace

TEST_CASE("run writes sweep.csv and a complete manifest") {
  const ScenarioConfig c = parse_config(kSweep);
  const auto dir = fresh_dir("sweep");
  const RunOutcome r = run(c, quiet_into(dir));
  CHECK(r.exit_code == kExitOk);
  CHECK(r.status == "complete");

  const std::string csv = slurp(dir / "sweep.csv");
  CHECK(csv.rfind("param,energy_eV,derivative,quad_error_eV\n", 0) == 0);
  CHECK(csv.find("# exponent=") != std::string::npos);
  CHECK(fs::exists(dir / "integrand_3.csv"));

  const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(m["status"] == "complete");
  CHECK(m["particles"] == 2);
  CHECK(m["node_count"].get<long long>() > 0);
  CHECK(m["fit"]["points"] == 4);
  CHECK(m["fit"]["exponent"].get<double>() == doctest::Approx(-7.0).epsilon(0.01));
  CHECK(m.contains("scene_digest"));
  CHECK(m.contains("code_version"));
  CHECK(m.contains("wall_time_s"));
  CHECK(parse_config(m["config"].dump()).echo == c.echo);

  SUBCASE("reruns are bit-identical, whatever the thread count") {
    const auto again = fresh_dir("sweep_again");
    RunOptions o = quiet_into(again);
    o.threads = 3;
    CHECK(run(c, o).exit_code == kExitOk);
    CHECK(slurp(again / "sweep.csv") == csv);
  }
}

TEST_CASE("run without a sweep writes energy.csv") {
  ScenarioConfig c = parse_config(kSweep);
  c.sweep.reset();
  const auto dir = fresh_dir("energy");
  const RunOutcome r = run(c, quiet_into(dir));
  CHECK(r.exit_code == kExitOk);
  const std::string csv = slurp(dir / "energy.csv");
  CHECK(csv.rfind("energy_eV,quad_error_eV,node_count\n", 0) == 0);
  CHECK(csv.find(",24\n") != std::string::npos);
  CHECK(fs::exists(dir / "integrand.csv"));
}

TEST_CASE("a stop request ends the sweep after the current row") {
  const ScenarioConfig c = parse_config(kSweep);
  const auto dir = fresh_dir("stop");
  request_stop();
  const RunOutcome r = run(c, quiet_into(dir));
  clear_stop();
  CHECK(r.exit_code == kExitInterrupted);
  CHECK(r.status == "incomplete");
  const std::string csv = slurp(dir / "sweep.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  CHECK(csv.find("# exponent") == std::string::npos);
  const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(m["status"] == "incomplete");
}

TEST_CASE("numerical failures land in the manifest") {
  const ScenarioConfig c = parse_config(R"({
    "scene": {"bodies": [
      {"material": "perfect_metal", "inclusion": {"type": "sphere_radiative", "radius_um": 0.1},
       "particles": [{"position_um": [0, 0, 0]}]},
      {"material": "perfect_metal", "inclusion": {"type": "sphere_radiative", "radius_um": 0.1},
       "particles": [{"position_um": [0, 0, 0.25]}]}
    ]},
    "quadrature": {"xi0_eV": 5}
  })");
  const auto dir = fresh_dir("singular");
  const RunOutcome r = run(c, quiet_into(dir));
  CHECK(r.exit_code == kExitNumerical);
  CHECK(r.status == "failed");
  const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(m["status"] == "failed");
  CHECK(m["error"]["exit_code"] == kExitNumerical);
  CHECK(m["error"].contains("kappa_a"));
}

TEST_CASE("an unwritable output directory is an I/O failure") {
  const auto blocker = fs::temp_directory_path() / "casimir_run_blocker";
  fs::remove_all(blocker);
  std::ofstream(blocker) << "x";
  const RunOutcome r = run(parse_config(kSweep), quiet_into(blocker / "sub"));
  CHECK(r.exit_code == kExitIo);
  CHECK(r.status == "failed");
}
