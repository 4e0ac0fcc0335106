#include "casimir/oracle.hpp"

#include <cmath>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "casimir/errors.hpp"
#include "casimir/units.hpp"

namespace casimir::oracle {

namespace {

constexpr double kTolerance = 1e-10;

// Retarded pair integrals stop where the coupling has decayed by e^-50.
constexpr double kRetardedCutoffKr = 50.0;

double integrate(const std::function<double(double)>& f, std::optional<double> upper) {
  if (upper) {
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(f, 0.0, *upper, kTolerance);
  }
  boost::math::quadrature::exp_sinh<double> es;
  return es.integrate(f, 0.0, std::numeric_limits<double>::infinity(), kTolerance);
}

}  // namespace

double two_dipole_delta_logdet(const TwoDipoleConfig& cfg, double xi_eV) {
  if (!(cfg.r_um > 0.0)) throw ValidationError("two-dipole oracle: r must be > 0");
  const double r = cfg.r_um;
  const double r3 = r * r * r;
  double tl = 2.0 / r3;
  double tt = 1.0 / r3;
  if (cfg.mode == InteractionMode::retarded) {
    const double kr = xi_eV / kHbarC * r;
    const double e = std::exp(-kr);
    tl = 2.0 * e * (1.0 + kr) / r3;
    tt = e * (1.0 + kr + kr * kr) / r3;
  }
  const double aa = cfg.alpha1(xi_eV) * cfg.alpha2(xi_eV);
  const double arg_l = 1.0 - aa * tl * tl;
  const double arg_t = 1.0 - aa * tt * tt;
  if (!(arg_l > 0.0) || !(arg_t > 0.0))
    throw ContactRegimeError("two-dipole determinant is not positive: dipoles are too close");
  return std::log1p(-aa * tl * tl) + 2.0 * std::log1p(-aa * tt * tt);
}

double two_dipole_energy(const TwoDipoleConfig& cfg, std::optional<double> cutoff_eV) {
  if (cfg.mode == InteractionMode::retarded) {
    const double tail = kRetardedCutoffKr * kHbarC / cfg.r_um;
    cutoff_eV = cutoff_eV ? std::min(*cutoff_eV, tail) : tail;
  }
  auto f = [&](double xi) { return two_dipole_delta_logdet(cfg, xi); };
  return integrate(f, cutoff_eV) / (2.0 * kPi);
}

double london_c6(const ScalarPolarizability& alpha1, const ScalarPolarizability& alpha2,
                 std::optional<double> cutoff_eV) {
  auto f = [&](double xi) { return alpha1(xi) * alpha2(xi); };
  if (!cutoff_eV) {
    const double lo = std::abs(f(1.0));
    const double hi = std::abs(f(1e4));
    if (!(hi <= 1e-6 * lo))
      throw DivergenceError("london_c6: alpha1 * alpha2 does not decay; supply a frequency cutoff");
  }
  return 3.0 / kPi * integrate(f, cutoff_eV);
}

double casimir_polder_u(double alpha1_static, double alpha2_static, double r_um) {
  if (!(r_um > 0.0)) throw ValidationError("casimir_polder_u: r must be > 0");
  return -23.0 * kHbarC * alpha1_static * alpha2_static / (4.0 * kPi * std::pow(r_um, 7));
}

ScalarPolarizability sphere_alpha(double radius_um, DielectricModel material, InteractionMode mode) {
  return [a = radius_um, m = std::move(material), mode](double xi) {
    const double a3 = a * a * a;
    const double eps = eval_epsilon(m, ImagFrequency{xi, std::nullopt});
    const double x = mode == InteractionMode::retarded ? xi / kHbarC * a : 0.0;
    const double corr = 1.0 - x * x - 2.0 * x * x * x / 3.0;
    if (std::isinf(eps)) return a3 / corr;
    return a3 * (eps - 1.0) / (3.0 + (eps - 1.0) * corr);
  };
}

}  // namespace casimir::oracle
