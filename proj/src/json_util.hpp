#pragma once

// Helpers for schema checking of JSON objects. Violations are collected, not
// thrown, so a config reports every problem in one pass.

#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace casimir::detail {

using Json = nlohmann::json;
using Violations = std::vector<std::string>;

/// Rejects keys not in `allowed`. A key whose stem matches an allowed key but
/// whose unit suffix differs (side_nm vs side_um) is reported as a unit mismatch.
void check_keys(const Json& obj, std::initializer_list<const char*> allowed, const std::string& where,
                Violations& out);

std::optional<double> get_number(const Json& obj, const char* key, const std::string& where, Violations& out,
                                 bool required);
std::optional<long long> get_integer(const Json& obj, const char* key, const std::string& where,
                                     Violations& out, bool required);
std::optional<std::string> get_string(const Json& obj, const char* key, const std::string& where,
                                      Violations& out, bool required);
std::optional<std::vector<double>> get_vector(const Json& obj, const char* key, const std::string& where,
                                              Violations& out, bool required, std::size_t expected_size = 0);

}  // namespace casimir::detail
