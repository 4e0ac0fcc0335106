#include "material_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "casimir/errors.hpp"

namespace casimir {

namespace {

const std::string& bundled_materials_text() {
  static const std::string text =
#include "materials_data.inc"
      ;
  return text;
}

}  // namespace

namespace detail {

std::optional<DielectricModel> material_from_json(const Json& j, const std::string& where, Violations& out,
                                                  const std::filesystem::path& base_dir) {
  if (j.is_string()) {
    try {
      return named_material(j.get<std::string>());
    } catch (const Error& e) {
      out.push_back(where + ": " + e.what());
      return std::nullopt;
    }
  }
  const auto type = get_string(j, "type", where, out, true);
  if (!type) return std::nullopt;
  const std::size_t before = out.size();
  try {
    if (*type == "drude") {
      check_keys(j, {"type", "plasma_eV", "damping_eV", "note"}, where, out);
      auto wp = get_number(j, "plasma_eV", where, out, true);
      auto g = get_number(j, "damping_eV", where, out, true);
      if (out.size() != before) return std::nullopt;
      return make_drude(*wp, *g);
    }
    if (*type == "lorentz") {
      check_keys(j, {"type", "oscillators", "note"}, where, out);
      if (!j.contains("oscillators") || !j.at("oscillators").is_array()) {
        out.push_back(where + ".oscillators: expected an array");
        return std::nullopt;
      }
      std::vector<LorentzOscillator> osc;
      std::size_t k = 0;
      for (const auto& o : j.at("oscillators")) {
        const std::string w = where + ".oscillators[" + std::to_string(k++) + "]";
        check_keys(o, {"strength_eV2", "resonance_eV", "damping_eV"}, w, out);
        auto s = get_number(o, "strength_eV2", w, out, true);
        auto r = get_number(o, "resonance_eV", w, out, true);
        auto g = get_number(o, "damping_eV", w, out, false);
        if (s && r) osc.push_back({*s, *r, g.value_or(0.0)});
      }
      if (out.size() != before) return std::nullopt;
      return make_lorentz(std::move(osc));
    }
    if (*type == "constant") {
      check_keys(j, {"type", "eps", "note"}, where, out);
      auto eps = get_number(j, "eps", where, out, true);
      if (eps && *eps < 1.0) out.push_back(where + ".eps: must be >= 1 (got " + std::to_string(*eps) + ")");
      if (out.size() != before) return std::nullopt;
      return make_constant(*eps);
    }
    if (*type == "perfect_metal") {
      check_keys(j, {"type", "note"}, where, out);
      if (out.size() != before) return std::nullopt;
      return DielectricModel(PerfectMetal{});
    }
    if (*type == "tabulated") {
      check_keys(j, {"type", "path", "note"}, where, out);
      auto path = get_string(j, "path", where, out, true);
      if (out.size() != before) return std::nullopt;
      std::filesystem::path p(*path);
      if (p.is_relative()) p = base_dir / p;
      return load_tabulated_csv(p.string());
    }
    if (*type == "maxwell_garnett") {
      check_keys(j, {"type", "inclusion", "host", "fill", "note"}, where, out);
      auto fill = get_number(j, "fill", where, out, true);
      if (fill && !(*fill >= 0.0 && *fill <= 1.0))
        out.push_back(where + ".fill: must lie in [0, 1] (got " + std::to_string(*fill) + ")");
      std::optional<DielectricModel> inc, host;
      if (!j.contains("inclusion")) out.push_back(where + ".inclusion: required");
      else inc = material_from_json(j.at("inclusion"), where + ".inclusion", out, base_dir);
      if (!j.contains("host")) out.push_back(where + ".host: required");
      else host = material_from_json(j.at("host"), where + ".host", out, base_dir);
      if (out.size() != before) return std::nullopt;
      return make_maxwell_garnett(*inc, *host, *fill);
    }
    out.push_back(where + ".type: unknown material type '" + *type + "'");
  } catch (const Error& e) {
    out.push_back(where + ": " + e.what());
  }
  return std::nullopt;
}

}  // namespace detail

DielectricModel load_tabulated_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("tabulated: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("tabulated: '" + path + "' is empty");
  {
    std::string head = line;
    std::replace(head.begin(), head.end(), ',', ' ');
    std::istringstream hs(head);
    double x = 0.0;
    if (hs >> x) throw ValidationError("tabulated: '" + path + "' needs a header row (xi_eV,eps)");
  }
  std::vector<double> xi, eps;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double x = 0.0, e = 0.0;
    if (!(ls >> x >> e)) throw ValidationError("tabulated: malformed row " + std::to_string(row) + " in " + path);
    xi.push_back(x);
    eps.push_back(e);
  }
  return make_tabulated(std::move(xi), std::move(eps));
}

DielectricModel named_material(const std::string& name) {
  static const detail::Json library = detail::Json::parse(bundled_materials_text());
  if (!library.contains(name)) throw ValidationError("unknown material '" + name + "'");
  detail::Violations v;
  auto m = detail::material_from_json(library.at(name), "materials." + name, v, {});
  if (!m) throw ValidationError("bundled material '" + name + "' is invalid: " + v.front());
  return *m;
}

std::vector<std::string> named_materials() {
  static const detail::Json library = detail::Json::parse(bundled_materials_text());
  std::vector<std::string> names;
  for (const auto& [key, value] : library.items()) names.push_back(key);
  return names;
}

}  // namespace casimir
