#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "casimir/config.hpp"

namespace casimir {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNumerical = 3,
  kExitIo = 4,
  kExitInterrupted = 130,
};

/// Maps the in-flight exception to an exit code and a short type tag.
std::pair<int, std::string> classify_current_exception();

struct RunOptions {
  int threads = 0;  // 0 = auto
  std::optional<std::filesystem::path> out_dir;  // overrides output.directory
  bool quiet = false;
  bool seedless = false;
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::filesystem::path out_dir;
  std::string status;  // complete | incomplete | failed
};

/// Executes a scenario: a sweep when the config has one, a single energy
/// otherwise. Writes sweep.csv or energy.csv, optional integrand dumps, and
/// manifest.json. Never throws for numerical or I/O failures; they are
/// recorded in the manifest and reflected in the exit code.
RunOutcome run(const ScenarioConfig& config, const RunOptions& options);

/// Makes an active run stop after its current row (safe from a signal handler).
void request_stop();
void clear_stop();

}  // namespace casimir
