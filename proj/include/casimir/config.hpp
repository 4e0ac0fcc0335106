#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>

#include "casimir/geometry.hpp"
#include "casimir/observables.hpp"
#include "casimir/spectrum.hpp"

namespace casimir {

enum class GridUnits { um, rad, L };

struct SweepConfig {
  SweepSpec spec;
  GridUnits units = GridUnits::um;
  std::optional<std::pair<double, double>> fit;  // window, in grid units
};

struct OutputConfig {
  std::string directory = "out";
  bool dump_integrand = false;
};

/// A validated scenario. `echo` is the normalized JSON text (defaults filled,
/// tabulated paths made absolute); parsing it again yields the same scenario.
struct ScenarioConfig {
  Scene scene;
  std::optional<std::string> preset;
  PresetParams preset_params;
  double length_scale_um = 1.0;  // L for presets, 1 otherwise
  QuadratureSpec quad;
  std::optional<SweepConfig> sweep;
  OutputConfig output;
  std::string echo;

  /// Sweep parameter converted from grid units to um or rad.
  double to_physical(double grid_value) const;
  SceneFamily scene_family() const;
};

/// Parses and validates a JSON scenario. Throws ConfigError listing every
/// violation; relative paths resolve against `base_dir`.
ScenarioConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
ScenarioConfig load_config(const std::filesystem::path& path);

}  // namespace casimir
