#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "casimir/materials.hpp"
#include "json_util.hpp"

namespace casimir::detail {

/// Material block: a built-in name or an object with a "type" field.
/// Relative tabulated paths resolve against `base_dir`.
std::optional<DielectricModel> material_from_json(const Json& j, const std::string& where, Violations& out,
                                                  const std::filesystem::path& base_dir);

}  // namespace casimir::detail
