#include "casimir/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "casimir/coupling.hpp"
#include "casimir/errors.hpp"
#include "casimir/units.hpp"
#include "parallel.hpp"

namespace casimir {

namespace {

// log det of a symmetric matrix whose determinant must be positive.
double logdet_positive(const Eigen::MatrixXd& m, double xi) {
  Eigen::LLT<Eigen::MatrixXd, Eigen::Upper> llt(m);
  if (llt.info() == Eigen::Success) {
    const auto& u = llt.matrixLLT();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) acc += std::log(u(i, i));
    return 2.0 * acc;
  }
  // Indefinite: the determinant may still be positive. Track the sign exactly.
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  const auto& f = lu.matrixLU();
  double acc = 0.0;
  int sign = static_cast<int>(lu.permutationP().determinant());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double p = f(i, i);
    if (p == 0.0 || !std::isfinite(p)) throw SingularMatrixError("system matrix is singular", xi);
    if (p < 0.0) sign = -sign;
    acc += std::log(std::abs(p));
  }
  if (sign <= 0) throw PivotSignError("system matrix determinant is not positive", xi);
  return acc;
}

double length_scale(const Scene& scene) {
  double r = 0.0;
  for (const auto& b : scene.bodies)
    for (const auto& inc : b.inclusions()) r = std::max(r, inc.bounding_radius());
  return r;
}

// Cholesky of I + E (E symmetric, lower triangle read) with the identity kept
// implicit, so pivots 1 + d keep full relative precision in d. Returns
// log det(I + E), or nullopt when I + E is not positive definite.
std::optional<double> logdet_identity_plus(Eigen::MatrixXd& e) {
  constexpr Eigen::Index kBlock = 64;
  const Eigen::Index n = e.rows();
  std::vector<double> diag(static_cast<std::size_t>(n));
  double acc = 0.0;
  for (Eigen::Index k0 = 0; k0 < n; k0 += kBlock) {
    const Eigen::Index kb = std::min(kBlock, n - k0);
    for (Eigen::Index j = k0; j < k0 + kb; ++j) {
      double d = e(j, j);
      for (Eigen::Index p = k0; p < j; ++p) d -= e(j, p) * e(j, p);
      if (!(1.0 + d > 0.0)) return std::nullopt;
      acc += std::log1p(d);
      const double ljj = std::sqrt(1.0 + d);
      diag[static_cast<std::size_t>(j)] = ljj;
      for (Eigen::Index i = j + 1; i < k0 + kb; ++i) {
        double s = e(i, j);
        for (Eigen::Index p = k0; p < j; ++p) s -= e(i, p) * e(j, p);
        e(i, j) = s / ljj;
      }
    }
    const Eigen::Index rest = n - k0 - kb;
    if (rest == 0) break;
    Eigen::MatrixXd l11 = e.block(k0, k0, kb, kb).triangularView<Eigen::StrictlyLower>();
    for (Eigen::Index j = 0; j < kb; ++j) l11(j, j) = diag[static_cast<std::size_t>(k0 + j)];
    auto l21 = e.block(k0 + kb, k0, rest, kb);
    l11.transpose().triangularView<Eigen::Upper>().solveInPlace<Eigen::OnTheRight>(l21);
    e.block(k0 + kb, k0 + kb, rest, rest).selfadjointView<Eigen::Lower>().rankUpdate(l21, -1.0);
  }
  return acc;
}

// With body blocks D_b = L_b L_b^T, the coupled-minus-decoupled log det equals
// log det(I + K), K_ab = L_a^-1 M_ab L_b^-T and K_bb = 0. Forming K avoids the
// cancellation of two nearly equal log dets when the coupling is weak.
std::optional<double> whitened_delta(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& offsets) {
  const std::size_t nb = offsets.size() - 1;
  std::vector<Eigen::MatrixXd> chol(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    const Eigen::Index n = offsets[b + 1] - offsets[b];
    Eigen::LLT<Eigen::MatrixXd> llt(m.block(offsets[b], offsets[b], n, n));
    if (llt.info() != Eigen::Success) return std::nullopt;
    chol[b] = llt.matrixL();
  }
  const Eigen::Index dim = m.rows();
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t a = 0; a < nb; ++a) {
    for (std::size_t b = a + 1; b < nb; ++b) {
      const Eigen::Index na = offsets[a + 1] - offsets[a], nbb = offsets[b + 1] - offsets[b];
      Eigen::MatrixXd blk = m.block(offsets[a], offsets[b], na, nbb);
      chol[a].triangularView<Eigen::Lower>().solveInPlace(blk);
      chol[b].transpose().triangularView<Eigen::Upper>().solveInPlace<Eigen::OnTheRight>(blk);
      k.block(offsets[b], offsets[a], nbb, na) = blk.transpose();
    }
  }
  // The leading block of I + K is exactly I: eliminate it with one rank update.
  const Eigen::Index n0 = offsets[1];
  Eigen::MatrixXd rest = k.bottomRightCorner(dim - n0, dim - n0);
  rest.selfadjointView<Eigen::Lower>().rankUpdate(k.bottomLeftCorner(dim - n0, n0), -1.0);
  return logdet_identity_plus(rest);
}

double delta_logdet_unchecked(const Scene& scene, const ImagFrequency& xi) {
  if (scene.bodies.size() < 2) return 0.0;
  const double ell = length_scale(scene);
  AssemblyOptions opts;
  opts.length3_scale = ell * ell * ell;
  const CouplingMatrix full = assemble(scene, xi, opts);

  std::vector<Eigen::Index> offsets{0};
  for (const auto& body : scene.bodies) offsets.push_back(offsets.back() + static_cast<Eigen::Index>(3 * body.size()));
  if (auto d = whitened_delta(full.matrix, offsets)) return *d;

  // Indefinite blocks: fall back to the difference of sign-tracked log dets.
  // The decoupled matrix is block diagonal and its blocks coincide with the
  // diagonal blocks of the full matrix, so factor those blocks directly.
  double decoupled = 0.0;
  for (std::size_t b = 0; b + 1 < offsets.size(); ++b) {
    const Eigen::Index n = offsets[b + 1] - offsets[b];
    decoupled += logdet_positive(full.matrix.block(offsets[b], offsets[b], n, n), xi.xi);
  }
  const double coupled = logdet_positive(full.matrix, xi.xi);
  return coupled - decoupled;
}

struct Mapping {
  bool finite;  // linear map onto [0, xi_max]
  double scale;  // xi0 or xi_max

  double xi(double u) const { return finite ? scale * u : scale * u / (1.0 - u); }
  double jacobian(double u) const { return finite ? scale : scale / ((1.0 - u) * (1.0 - u)); }
};

class NodeEvaluator {
 public:
  NodeEvaluator(const Scene& scene, const Mapping& map)
      : scene_(scene), map_(map), dmin_(scene.bodies.size() > 1 ? min_interbody_distance(scene) : 0.0) {}

  /// Integrand in u, including the 1/(2 pi) prefactor, and the raw sample.
  std::pair<double, IntegrandSample> operator()(double u) const {
    double xi = map_.xi(u);
    if (!map_.finite && u >= 1.0) return {0.0, {std::numeric_limits<double>::infinity(), 0.0}};
    // The integrand is continuous at xi = 0 but Drude-type models are not
    // evaluable there; sample just inside the interval instead.
    if (xi == 0.0) xi = 1e-9 * map_.scale;
    const ImagFrequency f = ImagFrequency::at(xi, scene_.mode);
    double d = 0.0;
    if (!(scene_.mode == InteractionMode::retarded && f.kappa_or_zero() * dmin_ > kRetardedTailCutoff))
      d = delta_logdet_unchecked(scene_, f);
    return {map_.jacobian(u) * d / (2.0 * kPi), {xi, d}};
  }

 private:
  const Scene& scene_;
  Mapping map_;
  double dmin_;
};

double gauss_sum(const std::vector<double>& w, const std::vector<double>& values) {
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * values[i];
  return acc;
}

EnergyResult gauss_legendre_energy(const NodeEvaluator& eval, const QuadratureSpec& quad) {
  std::vector<double> x_fine, w_fine, x_coarse, w_coarse;
  gauss_legendre(quad.nodes, x_fine, w_fine);
  gauss_legendre(quad.nodes / 2, x_coarse, w_coarse);

  // Fine and coarse node sets are evaluated in one parallel batch.
  std::vector<double> us;
  for (double x : x_fine) us.push_back(0.5 * (x + 1.0));
  for (double x : x_coarse) us.push_back(0.5 * (x + 1.0));
  std::vector<double> values(us.size());
  std::vector<IntegrandSample> samples(us.size());
  parallel_for(us.size(), quad.threads, [&](std::size_t i) {
    auto [v, s] = eval(us[i]);
    values[i] = v;
    samples[i] = s;
  });

  const auto nf = x_fine.size();
  EnergyResult r;
  r.energy = 0.5 * gauss_sum(w_fine, {values.begin(), values.begin() + static_cast<std::ptrdiff_t>(nf)});
  r.energy_coarse = 0.5 * gauss_sum(w_coarse, {values.begin() + static_cast<std::ptrdiff_t>(nf), values.end()});
  r.quad_error_estimate = std::abs(r.energy - r.energy_coarse);
  r.integrand_samples.assign(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(nf));
  r.node_count = static_cast<int>(us.size());
  return r;
}

struct Panel {
  double a, b;
  double fa, fm, fb;
  int depth;
};

EnergyResult adaptive_simpson_energy(const NodeEvaluator& eval, const QuadratureSpec& quad) {
  constexpr int kInitialPanels = 8;
  constexpr int kMaxDepth = 40;
  constexpr int kMaxEvaluations = 20000;

  std::vector<IntegrandSample> samples;
  int evaluations = 0;
  auto batch = [&](const std::vector<double>& us) {
    std::vector<double> values(us.size());
    std::vector<IntegrandSample> s(us.size());
    parallel_for(us.size(), quad.threads, [&](std::size_t i) {
      auto [v, sample] = eval(us[i]);
      values[i] = v;
      s[i] = sample;
    });
    evaluations += static_cast<int>(us.size());
    for (const auto& e : s)
      if (std::isfinite(e.xi_eV)) samples.push_back(e);
    return values;
  };

  std::vector<double> grid;
  for (int i = 0; i <= 2 * kInitialPanels; ++i) grid.push_back(static_cast<double>(i) / (2 * kInitialPanels));
  const auto g = batch(grid);
  std::vector<Panel> active;
  for (int i = 0; i < kInitialPanels; ++i)
    active.push_back({grid[2 * i], grid[2 * i + 2], g[2 * i], g[2 * i + 1], g[2 * i + 2], 0});

  auto simpson = [](double a, double b, double fa, double fm, double fb) { return (b - a) / 6.0 * (fa + 4.0 * fm + fb); };
  double estimate = 0.0;
  for (const auto& p : active) estimate += simpson(p.a, p.b, p.fa, p.fm, p.fb);

  double accepted = 0.0, accepted_coarse = 0.0, error = 0.0;
  while (!active.empty()) {
    std::vector<double> us;
    for (const auto& p : active) {
      const double m = 0.5 * (p.a + p.b);
      us.push_back(0.5 * (p.a + m));
      us.push_back(0.5 * (m + p.b));
    }
    const auto v = batch(us);
    std::vector<Panel> next;
    double refined_total = accepted;
    for (std::size_t i = 0; i < active.size(); ++i) {
      const Panel& p = active[i];
      const double m = 0.5 * (p.a + p.b);
      const double whole = simpson(p.a, p.b, p.fa, p.fm, p.fb);
      const double left = simpson(p.a, m, p.fa, v[2 * i], p.fm);
      const double right = simpson(m, p.b, p.fm, v[2 * i + 1], p.fb);
      const double diff = left + right - whole;
      const double tol = quad.rel_tol * std::abs(estimate) * (p.b - p.a);
      if (std::abs(diff) <= 15.0 * tol || p.depth >= kMaxDepth) {
        if (std::abs(diff) > 15.0 * tol)
          throw ConvergenceError("adaptive quadrature reached maximum depth", accepted + left + right, error);
        accepted += left + right + diff / 15.0;
        accepted_coarse += whole;
        error += std::abs(diff) / 15.0;
      } else {
        next.push_back({p.a, m, p.fa, v[2 * i], p.fm, p.depth + 1});
        next.push_back({m, p.b, p.fm, v[2 * i + 1], p.fb, p.depth + 1});
      }
      refined_total += left + right;
    }
    estimate = refined_total;
    active = std::move(next);
    if (evaluations > kMaxEvaluations && !active.empty()) {
      double partial = accepted;
      for (const auto& p : active) partial += simpson(p.a, p.b, p.fa, p.fm, p.fb);
      throw ConvergenceError("adaptive quadrature exceeded its evaluation budget", partial, error);
    }
  }

  std::sort(samples.begin(), samples.end(),
            [](const IntegrandSample& x, const IntegrandSample& y) { return x.xi_eV < y.xi_eV; });
  EnergyResult r;
  r.energy = accepted;
  r.energy_coarse = accepted_coarse;
  r.quad_error_estimate = error;
  r.integrand_samples = std::move(samples);
  r.node_count = evaluations;
  if (r.quad_error_estimate > quad.rel_tol * std::abs(r.energy) && r.quad_error_estimate > 0.0)
    throw ConvergenceError("adaptive quadrature did not reach rel_tol", r.energy, r.quad_error_estimate);
  return r;
}

}  // namespace

const char* to_string(QuadratureScheme s) {
  return s == QuadratureScheme::gauss_legendre_mapped ? "gauss_legendre_mapped" : "adaptive_simpson";
}

QuadratureScheme parse_scheme(const std::string& text) {
  if (text == "gauss_legendre_mapped") return QuadratureScheme::gauss_legendre_mapped;
  if (text == "adaptive_simpson") return QuadratureScheme::adaptive_simpson;
  throw ValidationError("unknown quadrature scheme '" + text + "'");
}

void QuadratureSpec::validate() const {
  if (nodes < 4) throw ValidationError("quadrature: nodes must be >= 4");
  if (xi0_eV && !(*xi0_eV > 0.0)) throw ValidationError("quadrature: xi0 must be > 0");
  if (!(rel_tol > 0.0 && rel_tol <= 0.1)) throw ValidationError("quadrature: rel_tol must lie in (0, 0.1]");
  if (xi_max_eV && !(*xi_max_eV > 0.0)) throw ValidationError("quadrature: xi_max must be > 0");
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[static_cast<std::size_t>(i)] = -x;
    nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
}

double delta_logdet(const Scene& scene, const ImagFrequency& xi) {
  validate_scene(scene);
  return delta_logdet_unchecked(scene, xi);
}

double default_xi0(const Scene& scene) {
  if (scene.mode == InteractionMode::retarded && scene.bodies.size() > 1)
    return kHbarC / min_interbody_distance(scene);
  double scale = 0.0;
  for (const auto& b : scene.bodies)
    for (const auto& inc : b.inclusions())
      if (auto s = inc.material().resonance_scale()) scale = std::max(scale, *s);
  return scale > 0.0 ? 0.5 * scale : 1.0;
}

EnergyResult interaction_energy(const Scene& scene, const QuadratureSpec& quad) {
  quad.validate();
  validate_scene(scene);
  if (scene.mode == InteractionMode::nonretarded && !quad.xi_max_eV) {
    for (const auto& b : scene.bodies)
      for (const auto& inc : b.inclusions())
        if (!inc.material().decays())
          throw DivergenceError("polarizability of " + inc.material().describe() +
                                " does not decay with frequency in non-retarded mode; set xi_max_eV");
  }
  Mapping map{};
  if (quad.xi_max_eV) map = {true, *quad.xi_max_eV};
  else map = {false, quad.xi0_eV.value_or(default_xi0(scene))};

  const NodeEvaluator eval(scene, map);
  EnergyResult r = quad.scheme == QuadratureScheme::gauss_legendre_mapped ? gauss_legendre_energy(eval, quad)
                                                                           : adaptive_simpson_energy(eval, quad);
  r.xi0_eV = map.scale;
  return r;
}

}  // namespace casimir
