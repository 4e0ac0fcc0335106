#include "json_util.hpp"

#include <algorithm>
#include <cmath>

namespace casimir::detail {

namespace {

constexpr const char* kUnitSuffixes[] = {"_um", "_eV2", "_eV", "_rad", "_nm", "_m", "_deg", "_Hz", "_J", "_um2"};

std::string stem_of(const std::string& key) {
  for (const char* suffix : kUnitSuffixes) {
    const std::string s(suffix);
    if (key.size() > s.size() && key.compare(key.size() - s.size(), s.size(), s) == 0)
      return key.substr(0, key.size() - s.size());
  }
  return key;
}

std::string key_path(const std::string& where, const char* key) {
  return where.empty() ? std::string(key) : where + "." + key;
}

}  // namespace

void check_keys(const Json& obj, std::initializer_list<const char*> allowed, const std::string& where,
                Violations& out) {
  if (!obj.is_object()) {
    out.push_back((where.empty() ? std::string("<root>") : where) + ": expected an object");
    return;
  }
  for (const auto& [key, value] : obj.items()) {
    if (std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) continue;
    const std::string stem = stem_of(key);
    const char* match = nullptr;
    if (stem != key) {
      for (const char* a : allowed)
        if (stem_of(a) == stem && std::string(a) != stem) match = a;
    }
    if (match)
      out.push_back(key_path(where, key.c_str()) + ": unit suffix mismatch (expected '" + match + "')");
    else
      out.push_back(key_path(where, key.c_str()) + ": unknown key");
  }
}

std::optional<double> get_number(const Json& obj, const char* key, const std::string& where, Violations& out,
                                 bool required) {
  if (!obj.is_object() || !obj.contains(key)) {
    if (required) out.push_back(key_path(where, key) + ": required");
    return std::nullopt;
  }
  const Json& v = obj.at(key);
  if (!v.is_number() || !std::isfinite(v.get<double>())) {
    out.push_back(key_path(where, key) + ": expected a finite number");
    return std::nullopt;
  }
  return v.get<double>();
}

std::optional<long long> get_integer(const Json& obj, const char* key, const std::string& where,
                                     Violations& out, bool required) {
  if (!obj.is_object() || !obj.contains(key)) {
    if (required) out.push_back(key_path(where, key) + ": required");
    return std::nullopt;
  }
  const Json& v = obj.at(key);
  if (!v.is_number_integer()) {
    out.push_back(key_path(where, key) + ": expected an integer");
    return std::nullopt;
  }
  return v.get<long long>();
}

std::optional<std::string> get_string(const Json& obj, const char* key, const std::string& where,
                                      Violations& out, bool required) {
  if (!obj.is_object() || !obj.contains(key)) {
    if (required) out.push_back(key_path(where, key) + ": required");
    return std::nullopt;
  }
  const Json& v = obj.at(key);
  if (!v.is_string()) {
    out.push_back(key_path(where, key) + ": expected a string");
    return std::nullopt;
  }
  return v.get<std::string>();
}

std::optional<std::vector<double>> get_vector(const Json& obj, const char* key, const std::string& where,
                                              Violations& out, bool required, std::size_t expected_size) {
  if (!obj.is_object() || !obj.contains(key)) {
    if (required) out.push_back(key_path(where, key) + ": required");
    return std::nullopt;
  }
  const Json& v = obj.at(key);
  if (!v.is_array() || (expected_size && v.size() != expected_size)) {
    out.push_back(key_path(where, key) + ": expected an array" +
                  (expected_size ? " of " + std::to_string(expected_size) + " numbers" : std::string()));
    return std::nullopt;
  }
  std::vector<double> values;
  for (const auto& e : v) {
    if (!e.is_number() || !std::isfinite(e.get<double>())) {
      out.push_back(key_path(where, key) + ": expected finite numbers");
      return std::nullopt;
    }
    values.push_back(e.get<double>());
  }
  return values;
}

}  // namespace casimir::detail
