#include "casimir/materials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/ellint_rd.hpp>

#include "casimir/errors.hpp"
#include "casimir/units.hpp"

namespace casimir {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

double tabulated_eval(const Tabulated& t, double xi) {
  if (xi <= t.xi_eV.front()) return t.eps.front();
  if (xi >= t.xi_eV.back()) return t.eps.back();
  auto hi = std::upper_bound(t.xi_eV.begin(), t.xi_eV.end(), xi);
  const auto k = static_cast<std::size_t>(hi - t.xi_eV.begin());
  const double x0 = std::log(t.xi_eV[k - 1]);
  const double x1 = std::log(t.xi_eV[k]);
  const double y0 = std::log(t.eps[k - 1]);
  const double y1 = std::log(t.eps[k]);
  const double w = (std::log(xi) - x0) / (x1 - x0);
  return std::exp(y0 + w * (y1 - y0));
}

}  // namespace

const char* to_string(InteractionMode mode) {
  return mode == InteractionMode::retarded ? "retarded" : "nonretarded";
}

InteractionMode parse_mode(const std::string& text) {
  if (text == "retarded") return InteractionMode::retarded;
  if (text == "nonretarded" || text == "non-retarded") return InteractionMode::nonretarded;
  throw ValidationError("unknown interaction mode '" + text + "' (expected retarded|nonretarded)");
}

ImagFrequency ImagFrequency::at(double xi_eV, InteractionMode mode) {
  if (!(xi_eV >= 0.0)) throw DomainError("imaginary frequency must be >= 0");
  ImagFrequency f;
  f.xi = xi_eV;
  if (mode == InteractionMode::retarded) f.kappa = wavenumber_of(xi_eV);
  return f;
}

// ---------------------------------------------------------------------------

DielectricModel::DielectricModel() : v_(PerfectMetal{}) {}
DielectricModel::DielectricModel(Variant v) : v_(std::move(v)) {}

bool DielectricModel::decays() const {
  return std::visit(overloaded{
                        [](const Drude&) { return true; },
                        [](const Lorentz&) { return true; },
                        [](const ConstantEps& c) { return c.eps == 1.0; },
                        [](const PerfectMetal&) { return false; },
                        [](const Tabulated& t) { return t.eps.back() == 1.0; },
                        [](const MaxwellGarnett& mg) {
                          return mg.fill == 0.0 ? mg.host->decays()
                                                : mg.host->decays() && mg.inclusion->decays();
                        },
                    },
                    v_);
}

std::optional<double> DielectricModel::resonance_scale() const {
  return std::visit(
      overloaded{
          [](const Drude& d) -> std::optional<double> { return d.plasma_eV / std::sqrt(3.0); },
          [](const Lorentz& l) -> std::optional<double> {
            // Sphere resonance of the strongest oscillator: eps + 2 = 0.
            const LorentzOscillator* best = nullptr;
            for (const auto& o : l.oscillators)
              if (!best || o.strength_eV2 > best->strength_eV2) best = &o;
            if (!best) return std::nullopt;
            return std::sqrt(best->resonance_eV * best->resonance_eV + best->strength_eV2 / 3.0);
          },
          [](const ConstantEps&) -> std::optional<double> { return std::nullopt; },
          [](const PerfectMetal&) -> std::optional<double> { return std::nullopt; },
          [](const Tabulated& t) -> std::optional<double> {
            return std::sqrt(t.xi_eV.front() * t.xi_eV.back());
          },
          [](const MaxwellGarnett& mg) -> std::optional<double> {
            if (auto s = mg.inclusion->resonance_scale()) return s;
            return mg.host->resonance_scale();
          },
      },
      v_);
}

std::string DielectricModel::describe() const {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const Drude& d) { os << "drude(" << d.plasma_eV << " eV, " << d.damping_eV << " eV)"; },
                 [&](const Lorentz& l) { os << "lorentz(" << l.oscillators.size() << " oscillators)"; },
                 [&](const ConstantEps& c) { os << "constant(" << c.eps << ")"; },
                 [&](const PerfectMetal&) { os << "perfect_metal"; },
                 [&](const Tabulated& t) { os << "tabulated(" << t.xi_eV.size() << " points)"; },
                 [&](const MaxwellGarnett& mg) {
                   os << "maxwell_garnett(" << mg.inclusion->describe() << " in " << mg.host->describe()
                      << ", f=" << mg.fill << ")";
                 },
             },
             v_);
  return os.str();
}

DielectricModel make_drude(double plasma_eV, double damping_eV) {
  if (!(plasma_eV > 0.0) || !(damping_eV >= 0.0))
    throw ValidationError("drude: plasma energy must be > 0 and damping >= 0");
  return DielectricModel(Drude{plasma_eV, damping_eV});
}

DielectricModel make_lorentz(std::vector<LorentzOscillator> oscillators) {
  if (oscillators.empty()) throw ValidationError("lorentz: at least one oscillator required");
  for (const auto& o : oscillators) {
    if (!(o.strength_eV2 >= 0.0) || !(o.resonance_eV >= 0.0) || !(o.damping_eV >= 0.0))
      throw ValidationError("lorentz: strengths, resonances and dampings must be >= 0");
    if (o.resonance_eV == 0.0 && o.damping_eV == 0.0)
      throw ValidationError("lorentz: oscillator with zero resonance needs damping (use drude)");
  }
  return DielectricModel(Lorentz{std::move(oscillators)});
}

DielectricModel make_constant(double eps) {
  if (!(eps >= 1.0) || !std::isfinite(eps)) throw ValidationError("constant: eps must be finite and >= 1");
  return DielectricModel(ConstantEps{eps});
}

DielectricModel make_tabulated(std::vector<double> xi_eV, std::vector<double> eps) {
  if (xi_eV.size() != eps.size() || xi_eV.size() < 2)
    throw ValidationError("tabulated: need at least two (xi, eps) rows");
  for (std::size_t i = 0; i < xi_eV.size(); ++i) {
    if (!(xi_eV[i] > 0.0) || !std::isfinite(xi_eV[i]))
      throw ValidationError("tabulated: xi values must be positive and finite (row " + std::to_string(i) + ")");
    if (!(eps[i] >= 1.0) || !std::isfinite(eps[i]))
      throw ValidationError("tabulated: eps values must be finite and >= 1 (row " + std::to_string(i) + ")");
    if (i > 0 && !(xi_eV[i] > xi_eV[i - 1]))
      throw ValidationError("tabulated: xi must be strictly increasing (row " + std::to_string(i) + ")");
    if (i > 0 && eps[i] > eps[i - 1])
      throw ValidationError("tabulated: eps(i xi) must be non-increasing (row " + std::to_string(i) + ")");
  }
  return DielectricModel(Tabulated{std::move(xi_eV), std::move(eps)});
}

DielectricModel make_maxwell_garnett(DielectricModel inclusion, DielectricModel host, double fill) {
  if (!(fill >= 0.0 && fill <= 1.0)) throw ValidationError("maxwell_garnett: fill must lie in [0, 1]");
  if (host.is_perfect_metal()) throw ValidationError("maxwell_garnett: host cannot be a perfect metal");
  return DielectricModel(MaxwellGarnett{std::make_shared<const DielectricModel>(std::move(inclusion)),
                                        std::make_shared<const DielectricModel>(std::move(host)), fill});
}

double eval_epsilon(const DielectricModel& model, const ImagFrequency& f) {
  const double xi = f.xi;
  if (!(xi >= 0.0)) throw DomainError("eval_epsilon: xi must be >= 0");
  return std::visit(overloaded{
                        [&](const Drude& d) -> double {
                          if (xi == 0.0) throw DomainError("drude permittivity diverges at xi = 0");
                          return 1.0 + d.plasma_eV * d.plasma_eV / (xi * (xi + d.damping_eV));
                        },
                        [&](const Lorentz& l) -> double {
                          double eps = 1.0;
                          for (const auto& o : l.oscillators) {
                            const double den = o.resonance_eV * o.resonance_eV + xi * xi + o.damping_eV * xi;
                            if (den == 0.0) throw DomainError("lorentz permittivity diverges at xi = 0");
                            eps += o.strength_eV2 / den;
                          }
                          return eps;
                        },
                        [](const ConstantEps& c) -> double { return c.eps; },
                        [](const PerfectMetal&) -> double { return kInf; },
                        [&](const Tabulated& t) -> double { return tabulated_eval(t, xi); },
                        [&](const MaxwellGarnett& mg) -> double {
                          const double eh = eval_epsilon(*mg.host, f);
                          if (mg.fill == 0.0) return eh;
                          const double ei = eval_epsilon(*mg.inclusion, f);
                          const double eta = std::isinf(ei) ? 1.0 : (ei - eh) / (ei + 2.0 * eh);
                          return eh * (1.0 + 3.0 * mg.fill * eta / (1.0 - mg.fill * eta));
                        },
                    },
                    model.variant());
}

// ---------------------------------------------------------------------------

PolarizabilityModel::PolarizabilityModel(Shape shape, DielectricModel material)
    : shape_(std::move(shape)), material_(std::move(material)) {
  std::visit(overloaded{
                 [](const SphereRadiative& s) {
                   if (!(s.radius_um > 0.0)) throw ValidationError("sphere radius must be > 0");
                 },
                 [](const SphereStatic& s) {
                   if (!(s.radius_um > 0.0)) throw ValidationError("sphere radius must be > 0");
                 },
                 [](const SpheroidStatic& s) {
                   for (double a : s.semi_axes_um)
                     if (!(a > 0.0)) throw ValidationError("spheroid semi-axes must be > 0");
                   const Mat3 should_be_identity = s.orientation.transpose() * s.orientation;
                   if (!should_be_identity.isIdentity(1e-9) || s.orientation.determinant() < 0.0)
                     throw ValidationError("spheroid orientation must be a proper rotation");
                 },
             },
             shape_);
}

double PolarizabilityModel::bounding_radius() const {
  return std::visit(overloaded{
                        [](const SphereRadiative& s) { return s.radius_um; },
                        [](const SphereStatic& s) { return s.radius_um; },
                        [](const SpheroidStatic& s) {
                          return std::max({s.semi_axes_um[0], s.semi_axes_um[1], s.semi_axes_um[2]});
                        },
                    },
                    shape_);
}

double PolarizabilityModel::support(const Vec3& n, const Mat3& frame) const {
  if (const auto* s = std::get_if<SpheroidStatic>(&shape_)) {
    const Vec3 local = (frame * s->orientation).transpose() * n;
    double acc = 0.0;
    for (int i = 0; i < 3; ++i) acc += local[i] * local[i] * s->semi_axes_um[i] * s->semi_axes_um[i];
    return std::sqrt(acc);
  }
  return bounding_radius() * n.norm();
}

PolarizabilityModel sphere_radiative(double radius_um, DielectricModel material) {
  return PolarizabilityModel(SphereRadiative{radius_um}, std::move(material));
}

PolarizabilityModel sphere_static(double radius_um, DielectricModel material) {
  return PolarizabilityModel(SphereStatic{radius_um}, std::move(material));
}

PolarizabilityModel spheroid_static(std::array<double, 3> semi_axes_um, DielectricModel material,
                                    Mat3 orientation) {
  return PolarizabilityModel(SpheroidStatic{semi_axes_um, orientation}, std::move(material));
}

double sphere_polarizability(double radius_um, const DielectricModel& material, const ImagFrequency& xi) {
  const double a = radius_um;
  const double ka = xi.kappa_or_zero() * a;
  // [1 + (qa)^2 - 2i(qa)^3/3] at q = i kappa
  const double bracket = 1.0 - ka * ka - (2.0 / 3.0) * ka * ka * ka;
  const double a3 = a * a * a;
  const double eps = eval_epsilon(material, xi);
  if (std::isinf(eps)) {
    if (!(bracket > 0.0)) throw SingularPolarizabilityError(xi.xi, ka);
    return a3 / bracket;
  }
  const double em1 = eps - 1.0;
  const double den = 3.0 + em1 * bracket;
  if (!(den > 0.0)) throw SingularPolarizabilityError(xi.xi, ka);
  return a3 * em1 / den;
}

std::array<double, 3> depolarization_factors(const std::array<double, 3>& s) {
  const double a2 = s[0] * s[0];
  const double b2 = s[1] * s[1];
  const double c2 = s[2] * s[2];
  const double pref = s[0] * s[1] * s[2] / 3.0;
  using boost::math::ellint_rd;
  return {pref * ellint_rd(b2, c2, a2), pref * ellint_rd(c2, a2, b2), pref * ellint_rd(a2, b2, c2)};
}

Mat3 spheroid_polarizability(const SpheroidStatic& spheroid, const DielectricModel& material,
                             const ImagFrequency& xi) {
  const auto L = depolarization_factors(spheroid.semi_axes_um);
  const double v3 = spheroid.semi_axes_um[0] * spheroid.semi_axes_um[1] * spheroid.semi_axes_um[2] / 3.0;
  const double eps = eval_epsilon(material, xi);
  Vec3 principal;
  for (int i = 0; i < 3; ++i) {
    principal[i] = std::isinf(eps) ? v3 / L[i] : v3 * (eps - 1.0) / (1.0 + L[i] * (eps - 1.0));
  }
  const Mat3& R = spheroid.orientation;
  return R * principal.asDiagonal() * R.transpose();
}

Mat3 polarizability_tensor(const PolarizabilityModel& model, const ImagFrequency& xi) {
  return std::visit(overloaded{
                        [&](const SphereRadiative& s) -> Mat3 {
                          return sphere_polarizability(s.radius_um, model.material(), xi) * Mat3::Identity();
                        },
                        [&](const SphereStatic& s) -> Mat3 {
                          ImagFrequency stat{xi.xi, std::nullopt};
                          return sphere_polarizability(s.radius_um, model.material(), stat) * Mat3::Identity();
                        },
                        [&](const SpheroidStatic& s) -> Mat3 {
                          return spheroid_polarizability(s, model.material(), xi);
                        },
                    },
                    model.shape());
}

}  // namespace casimir
