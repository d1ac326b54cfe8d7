#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dscharge/tensor.hpp"

namespace dsc {

// Conformal class of a data set: the P-asymptotically de Sitter case
// (P a positive constant along M) or the H-asymptotically de Sitter case
// (T constant, H = sinh(T/lambda)).
struct ConformalClass {
  enum Kind { Planar, Hyperbolic } kind = Planar;
  double value = 1.0;  // P (planar) or the slice time T (hyperbolic)

  static ConformalClass planar(double P) {
    if (!(P > 0.0)) throw parameter_error("conformal factor P must be positive");
    return {Planar, P};
  }
  static ConformalClass hyperbolic(double T) {
    if (T == 0.0) throw singular_error("hyperbolic conformal class: T = 0 slice is singular");
    return {Hyperbolic, T};
  }

  double factor(double lambda) const {  // P or H = sinh(T/lambda)
    return kind == Planar ? value : std::sinh(value / lambda);
  }
};

// Initial data set (M, g, K) with cosmological constant Lambda = 3/lambda^2,
// conformal class, and an end chart. Planar-type ends use Cartesian
// coordinates on R^3 minus a ball; hyperbolic-type ends use (R, theta, psi).
// Models may register exact deviation evaluators (gbar - background, hbar)
// that avoid large-background cancellation at big radii.
struct InitialDataSet {
  MetricField3 g;
  SymTensorField3 K;
  double lambda = 1.0;
  ConformalClass conformal;
  Vec3 z{0.0, 0.0, 0.0};  // angular momentum reference point
  bool has_end = true;
  std::string name;

  std::function<Mat3(const Vec3&)> gbar_dev;     // optional: gbar - background
  std::function<Mat3(const Vec3&, int)> gbar_dev_d1;  // optional analytic derivative
  std::function<Mat3(const Vec3&)> hbar_exact;   // optional: hbar directly

  double Lambda() const { return 3.0 / (lambda * lambda); }
};

// ---------------------------------------------------------------------------
// conformal decomposition
// ---------------------------------------------------------------------------

struct ConformalDecomposition {
  MetricField3 gbar;      // P^-2 g  (or H^-2 g)
  SymTensorField3 hbar;   // P^-1 h  (or H^-1 h)
  SymTensorField3 htilde; // hyperbolic case only: hbar + gbar/lambda
  SymTensorField3 gbar_deviation;  // gbar minus flat/hyperbolic background
  double factor = 1.0;    // P or H
};

// gbar = P^-2 g, hbar = P^-1 (K - sqrt(Lambda/3) g) in the planar case,
// H^-1 (K - coth(T/lambda)/lambda g) in the hyperbolic case (plus
// htilde = hbar + gbar/lambda).  Exact model deviations are used if present.
inline ConformalDecomposition conformal_decompose(const InitialDataSet& d) {
  ConformalDecomposition out;
  const double lam = d.lambda;
  const double fac = d.conformal.factor(lam);
  const double kfac = d.conformal.kind == ConformalClass::Planar
                          ? 1.0 / lam
                          : 1.0 / (lam * std::tanh(d.conformal.value / lam));
  out.factor = fac;
  const double inv2 = 1.0 / (fac * fac);
  const double inv1 = 1.0 / fac;

  auto g_eval = d.g.eval;
  auto K_eval = d.K.eval;
  out.gbar.coords = d.g.coords;
  out.gbar.noise = d.g.noise;
  out.gbar.eval = [g_eval, inv2](const Vec3& x) { return scale(inv2, g_eval(x)); };
  if (d.g.d1) {
    auto gd1 = d.g.d1;
    out.gbar.d1 = [gd1, inv2](const Vec3& x, int k) { return scale(inv2, gd1(x, k)); };
  }
  if (d.g.d2) {
    auto gd2 = d.g.d2;
    out.gbar.d2 = [gd2, inv2](const Vec3& x, int k, int l) { return scale(inv2, gd2(x, k, l)); };
  }

  out.hbar.coords = d.K.coords;
  out.hbar.noise = std::max(d.g.noise, d.K.noise);
  if (d.hbar_exact) {
    out.hbar.eval = d.hbar_exact;
  } else {
    out.hbar.eval = [g_eval, K_eval, inv1, kfac](const Vec3& x) {
      return scale(inv1, sub<3>(K_eval(x), scale(kfac, g_eval(x))));
    };
    if (d.g.d1 && d.K.d1) {
      auto gd1 = d.g.d1;
      auto Kd1 = d.K.d1;
      out.hbar.d1 = [gd1, Kd1, inv1, kfac](const Vec3& x, int k) {
        return scale(inv1, sub<3>(Kd1(x, k), scale(kfac, gd1(x, k))));
      };
    }
  }

  // deviation of gbar from the end background (flat delta / hyperbolic metric)
  out.gbar_deviation.coords = d.g.coords;
  out.gbar_deviation.noise = d.g.noise;
  if (d.gbar_dev) {
    out.gbar_deviation.eval = d.gbar_dev;
    if (d.gbar_dev_d1) out.gbar_deviation.d1 = d.gbar_dev_d1;
  } else if (d.conformal.kind == ConformalClass::Planar) {
    out.gbar_deviation.eval = [g_eval, inv2](const Vec3& x) {
      return sub<3>(scale(inv2, g_eval(x)), identity<3>());
    };
    if (d.g.d1) {
      auto gd1 = d.g.d1;
      out.gbar_deviation.d1 = [gd1, inv2](const Vec3& x, int k) {
        return scale(inv2, gd1(x, k));
      };
    }
  } else {
    const double lam2 = lam;
    out.gbar_deviation.eval = [g_eval, inv2, lam2](const Vec3& x) {
      Mat3 gH{};  // hyperbolic background in (R, theta, psi)
      const double F = lam2 * std::sinh(x[0] / lam2);
      const double sth = std::sin(x[1]);
      gH[0][0] = 1.0;
      gH[1][1] = F * F;
      gH[2][2] = F * F * sth * sth;
      return sub<3>(scale(inv2, g_eval(x)), gH);
    };
  }

  if (d.conformal.kind == ConformalClass::Hyperbolic) {
    auto hb = out.hbar.eval;
    auto gb = out.gbar.eval;
    out.htilde.coords = d.g.coords;
    out.htilde.eval = [hb, gb, lam](const Vec3& x) {
      return add<3>(hb(x), scale(1.0 / lam, gb(x)));
    };
  }
  return out;
}

// ---------------------------------------------------------------------------
// decay-rate fitting (numerical surrogate for the weighted-space conditions)
// ---------------------------------------------------------------------------

struct DecayFit {
  double tau_hat = 0.0;   // fitted decay exponent
  double residual = 0.0;  // RMS of the log-linear fit
  bool exact = false;     // all sampled norms below 1e-14
  bool fit_failed = false;  // non-decreasing norms
  bool clears_threshold = false;  // tau_hat > 1/2 (planar) or > 3/2 (hyperbolic)
  std::vector<std::pair<double, double>> samples;  // (radius, sup-norm)
};

namespace detail {

// 256 quasi-uniform directions (Fibonacci sphere)
inline std::vector<Vec3> fibonacci_directions(int n = 256) {
  std::vector<Vec3> dirs;
  dirs.reserve(n);
  const double ga = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    dirs.push_back({rho * std::cos(ga * i), rho * std::sin(ga * i), z});
  }
  return dirs;
}

inline double sup_norm_on_sphere(const std::function<Mat3(const Vec3&)>& f, CoordSystem cs,
                                 double r, int ndirs = 256) {
  double sup = 0.0;
  if (cs == CoordSystem::Cartesian) {
    for (const Vec3& n : fibonacci_directions(ndirs)) sup = std::max(sup, max_abs(f(r * n)));
  } else {
    // (R, theta, psi) sphere: scan a theta x psi grid, frame-normalized by caller
    const int nt = 16, np = 16;
    for (int i = 0; i < nt; ++i)
      for (int j = 0; j < np; ++j) {
        const double th = kPi * (i + 0.5) / nt;
        const double ps = 2.0 * kPi * j / np;
        sup = std::max(sup, max_abs(f({r, th, ps})));
      }
  }
  return sup;
}

struct LineFit {
  double slope = 0.0, intercept = 0.0, rms = 0.0;
};

inline LineFit least_squares_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  LineFit f;
  const double den = n * sxx - sx * sx;
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ys[i] - f.slope * xs[i] - f.intercept;
    ss += e * e;
  }
  f.rms = std::sqrt(ss / n);
  return f;
}

}  // namespace detail

// Fits the decay exponent of a tensor field's sphere sup-norms:
// planar ends fit log(sup) vs log(r) (tau = -slope); hyperbolic ends fit
// log(sup) vs R (tau = -slope * lambda, matching e^{-tau R/lambda} decay).
// Frame components are used on hyperbolic ends (coordinate components carry
// sinh^2 factors).
inline DecayFit decay_fit_field(const std::function<Mat3(const Vec3&)>& f, CoordSystem cs,
                                bool hyperbolic_end, double lambda,
                                const std::vector<double>& radii) {
  if (radii.size() < 3) throw parameter_error("decay_fit: need at least 3 radii");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1]))
      throw parameter_error("decay_fit: radii must be strictly increasing");

  auto frame_normalized = [&](const Vec3& x) {
    Mat3 v = f(x);
    if (cs == CoordSystem::PolarSpherical) {
      // orthonormal frame scale of the end background
      double f1 = hyperbolic_end ? lambda * std::sinh(x[0] / lambda) : x[0];
      Vec3 sc = {1.0, f1, f1 * std::sin(x[1])};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) v[i][j] /= sc[i] * sc[j];
    }
    return v;
  };

  DecayFit out;
  std::vector<double> xs, ys;
  bool monotone = true;
  double prev = -1.0;
  for (double r : radii) {
    const double s = detail::sup_norm_on_sphere(frame_normalized, cs, r);
    out.samples.push_back({r, s});
    if (prev >= 0.0 && s >= prev) monotone = false;
    prev = s;
  }
  if (std::all_of(out.samples.begin(), out.samples.end(),
                  [](auto& p) { return p.second < 1e-14; })) {
    out.exact = true;
    out.clears_threshold = true;
    return out;
  }
  if (!monotone) {
    out.fit_failed = true;
    return out;
  }
  for (auto& [r, s] : out.samples) {
    xs.push_back(hyperbolic_end ? r : std::log(r));
    ys.push_back(std::log(s));
  }
  const auto fit = detail::least_squares_line(xs, ys);
  out.tau_hat = hyperbolic_end ? -fit.slope * lambda : -fit.slope;
  out.residual = fit.rms;
  out.clears_threshold = out.tau_hat > (hyperbolic_end ? 1.5 : 0.5);
  return out;
}

struct DataDecayFits {
  DecayFit metric;  // gbar - background
  DecayFit momentum;  // hbar
};

inline DataDecayFits decay_fit(const InitialDataSet& d, const std::vector<double>& radii) {
  const auto dec = conformal_decompose(d);
  const bool hyp = d.conformal.kind == ConformalClass::Hyperbolic;
  DataDecayFits out;
  out.metric = decay_fit_field(dec.gbar_deviation.eval, d.g.coords, hyp, d.lambda, radii);
  out.momentum = decay_fit_field(dec.hbar.eval, d.g.coords, hyp, d.lambda, radii);
  return out;
}

// ---------------------------------------------------------------------------
// integrability diagnostic
// ---------------------------------------------------------------------------

// Finite-radius surrogate for the L^1 integrability of the conformal data's
// scalar curvature and momentum divergence: annulus volume integrals of
// |Rbar| and |T0i|_gbar between consecutive radii. Reported as diagnostics,
// never enforced; `cauchy` means the increments shrink monotonically.
struct IntegrabilityReport {
  std::vector<double> curvature;  // int_annulus |Rbar| dVbar
  std::vector<double> momentum;   // int_annulus |divbar(hbar - gbar tr hbar)|_gbar dVbar
  bool cauchy = false;
};

inline IntegrabilityReport annulus_integrability(const InitialDataSet& d,
                                                 const std::vector<double>& radii,
                                                 int n_dirs = 64, int n_radial = 4) {
  if (radii.size() < 3) throw parameter_error("annulus_integrability: need at least 3 radii");
  if (d.g.coords != CoordSystem::Cartesian)
    throw parameter_error("annulus_integrability: Cartesian end required");
  const auto dec = conformal_decompose(d);
  const auto dirs = detail::fibonacci_directions(n_dirs);
  DerivativeConfig cfg;
  // Gauss-Legendre nodes in the radial direction of each annulus
  const auto& gl = gauss_legendre(n_radial);

  IntegrabilityReport out;
  for (std::size_t k = 0; k + 1 < radii.size(); ++k) {
    const double a = radii[k], b = radii[k + 1];
    double accR = 0.0, accM = 0.0;
    for (int q = 0; q < n_radial; ++q) {
      const double r = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[q];
      const double wr = 0.5 * (b - a) * gl.weights[q];
      for (const Vec3& n : dirs) {
        const Vec3 x = r * n;
        const Mat3 gb = dec.gbar.eval(x);
        const double vol = std::sqrt(det3(gb));
        const auto cur = curvature3(dec.gbar, x, cfg);
        // T0i of the conformal data: del^j (hbar_ij - gbar_ij tr hbar)
        const Mat3 hb = dec.hbar.eval(x);
        std::array<Mat3, 3> dh, dg;
        for (int c = 0; c < 3; ++c) {
          dh[c] = dec.hbar.deriv(x, c, cfg);
          dg[c] = dec.gbar.deriv(x, c, cfg);
        }
        const Mat3& gi = cur.ginv;
        const double trh = detail::trace_g(gi, hb);
        Mat3 pi = sub<3>(hb, scale(trh, gb));
        std::array<Mat3, 3> dpi;
        for (int c = 0; c < 3; ++c) {
          double dtr = detail::trace_g(gi, dh[c]);
          for (int a2 = 0; a2 < 3; ++a2)
            for (int b2 = 0; b2 < 3; ++b2)
              for (int c2 = 0; c2 < 3; ++c2)
                for (int d2 = 0; d2 < 3; ++d2)
                  dtr -= gi[a2][b2] * dg[c][b2][c2] * gi[c2][d2] * hb[d2][a2];
          dpi[c] = sub<3>(dh[c], add<3>(scale(trh, dg[c]), scale(dtr, gb)));
        }
        const Vec3 div = detail::divergence_second(gi, cur.gamma, pi, dpi);
        const double w = wr * (4.0 * kPi / n_dirs) * r * r * vol;
        accR += w * std::abs(cur.scalar);
        accM += w * detail::conorm_g(gi, div);
      }
    }
    out.curvature.push_back(accR);
    out.momentum.push_back(accM);
  }
  out.cauchy = true;
  auto check = [&](const std::vector<double>& v) {
    double vmax = 0.0;
    for (double x : v) vmax = std::max(vmax, x);
    if (vmax < 1e-8) return;  // vanishes to numerical precision
    for (std::size_t k = 1; k < v.size(); ++k)
      if (v[k] > v[k - 1] + 1e-12 * vmax) out.cauchy = false;
  };
  check(out.curvature);
  check(out.momentum);
  return out;
}

// ---------------------------------------------------------------------------
// apparent horizons
// ---------------------------------------------------------------------------

enum class HorizonSign { Future, Past };

// -+H_Sigma = tr_{g_Sigma}(K|_Sigma) - 2 sqrt(Lambda/3)   (planar case)
// -+H_Sigma = tr_{g_Sigma}(K|_Sigma) - 2 sqrt(Lambda/3) tanh(T/2lambda)  (hyperbolic)
// Returns -+H_Sigma - RHS (upper sign = future), averaged over a fixed
// direction set on the sphere. Convention fixed so the future residual is
// strictly negative on planar de Sitter slices (h = 0, H_Sigma > 0).
inline double horizon_residual(const InitialDataSet& d, const Vec3& center, double radius,
                               HorizonSign sign, const DerivativeConfig& cfg = {}) {
  const double lam = d.lambda;
  double rhs_const;
  if (d.conformal.kind == ConformalClass::Planar) {
    rhs_const = 2.0 / lam;
  } else {
    rhs_const = (2.0 / lam) * std::tanh(d.conformal.value / (2.0 * lam));
  }
  const double s = sign == HorizonSign::Future ? -1.0 : 1.0;

  std::vector<Vec3> points;
  if (d.g.coords == CoordSystem::Cartesian) {
    // cube-corner directions: symmetric, clear of the polar axis
    const double c = 0.5773502691896258;
    static const std::vector<Vec3> dirs = {{c, c, c},   {c, c, -c},  {c, -c, c},  {c, -c, -c},
                                           {-c, c, c},  {-c, c, -c}, {-c, -c, c}, {-c, -c, -c}};
    for (const Vec3& n : dirs) points.push_back(center + radius * n);
  } else {
    for (double th : {0.6, 1.2, 1.9, 2.6})
      for (double ps : {0.3, 2.1, 4.4}) points.push_back({radius, th, ps});
  }
  double acc = 0.0;
  for (const Vec3& x : points) {
    const SphereSection sec = sphere_section(d.g, d.K, center, x, cfg);
    acc += s * sec.H - (sec.trK_sigma - rhs_const);
  }
  return acc / points.size();
}

struct NullExpansions {
  double theta_plus = 0.0;
  double theta_minus = 0.0;
  bool physical_future = false;  // theta_plus = 0
  bool physical_past = false;    // theta_minus = 0
};

// theta_+- = H_Sigma +- tr_g(K|_Sigma)
inline NullExpansions null_expansions(const InitialDataSet& d, const Vec3& center, double radius,
                                      const DerivativeConfig& cfg = {}) {
  Vec3 x = d.g.coords == CoordSystem::Cartesian
               ? center + radius * Vec3{0.5773502691896258, 0.5773502691896258, 0.5773502691896258}
               : Vec3{radius, 1.2, 0.3};
  const SphereSection sec = sphere_section(d.g, d.K, center, x, cfg);
  NullExpansions out;
  out.theta_plus = sec.H + sec.trK_sigma;
  out.theta_minus = sec.H - sec.trK_sigma;
  out.physical_future = std::abs(out.theta_plus) < 1e-10;
  out.physical_past = std::abs(out.theta_minus) < 1e-10;
  return out;
}

// Bisection + secant polish on horizon_residual for spherically symmetric
// data; requires a sign change on the bracket.
inline double find_horizon_spherical(const InitialDataSet& d, HorizonSign sign, double r_lo,
                                     double r_hi, const DerivativeConfig& cfg = {}) {
  auto f = [&](double r) { return horizon_residual(d, {0, 0, 0}, r, sign, cfg); };
  double flo = f(r_lo), fhi = f(r_hi);
  if (flo == 0.0) return r_lo;
  if (fhi == 0.0) return r_hi;
  if (flo * fhi > 0.0)
    throw convergence_error("find_horizon_spherical: residual does not change sign on bracket");
  double a = r_lo, b = r_hi, fa = flo, fb = fhi;
  for (int it = 0; it < 200; ++it) {
    double m = 0.5 * (a + b);
    // secant proposal, kept if it lands inside and improves
    const double sec = b - fb * (b - a) / (fb - fa);
    if (sec > a && sec < b) m = sec;
    const double fm = f(m);
    if (std::abs(fm) < 1e-10 || 0.5 * (b - a) < 1e-14 * std::max(1.0, std::abs(m))) return m;
    if (fa * fm < 0.0) {
      b = m;
      fb = fm;
    } else {
      a = m;
      fa = fm;
    }
  }
  throw convergence_error("find_horizon_spherical: bisection did not converge");
}

// ---------------------------------------------------------------------------
// local angular momentum density
// ---------------------------------------------------------------------------

enum class EpsilonConvention {
  Flat,       // flat epsilon symbol, indices raised flat (the default)
  GbarVolume  // epsilon of gbar's volume form, indices raised by gbar
};

// htilde^z_ij = (1/2) eps_i^{uv} (grad_u rho_z^2)(hbar_vj - gbar_vj tr hbar),
// with grad rho_z^2 = 2(x - z) on the flat end background and the epsilon
// orientation fixed so that Kerr-de Sitter data yield J_3 = + m a/xi^2
// (the orientation that makes Kerr angular momentum positive under the K = +g/lambda
// sign convention). Trace-free by construction in the flat convention.
inline Mat3 angular_density(const InitialDataSet& d, const Vec3& x,
                            EpsilonConvention eps = EpsilonConvention::Flat) {
  if (d.conformal.kind != ConformalClass::Planar)
    throw parameter_error("angular_density: defined for planar-type data sets");
  if (norm(x - d.z) < 1e-14)
    throw domain_error("angular_density: evaluation point coincides with the reference point z");
  const auto dec = conformal_decompose(d);
  const Mat3 hb = dec.hbar.eval(x);
  const Mat3 gb = dec.gbar.eval(x);
  const Mat3 gbi = inv3(gb);
  double trh = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) trh += gbi[i][j] * hb[i][j];
  Mat3 pi;  // hbar - gbar tr hbar
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) pi[i][j] = hb[i][j] - gb[i][j] * trh;

  const Vec3 grad = 2.0 * (x - d.z);
  static const int E[3][3][3] = {{{0, 0, 0}, {0, 0, 1}, {0, -1, 0}},
                                 {{0, 0, -1}, {0, 0, 0}, {1, 0, 0}},
                                 {{0, 1, 0}, {-1, 0, 0}, {0, 0, 0}}};
  // eps_i^{uv} with the J_3 > 0 orientation; upper indices raised flat or by gbar
  double eps_up[3][3][3];
  if (eps == EpsilonConvention::Flat) {
    for (int i = 0; i < 3; ++i)
      for (int u = 0; u < 3; ++u)
        for (int v = 0; v < 3; ++v) eps_up[i][u][v] = -static_cast<double>(E[i][u][v]);
  } else {
    const double vol = std::sqrt(det3(gb));
    for (int i = 0; i < 3; ++i)
      for (int u = 0; u < 3; ++u)
        for (int v = 0; v < 3; ++v) {
          double s = 0.0;
          for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
              if (E[i][a][b] != 0) s += E[i][a][b] * gbi[a][u] * gbi[b][v];
          eps_up[i][u][v] = -vol * s;
        }
  }
  Mat3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int u = 0; u < 3; ++u)
        for (int v = 0; v < 3; ++v)
          if (eps_up[i][u][v] != 0.0) s += 0.5 * eps_up[i][u][v] * grad[u] * pi[v][j];
      out[i][j] = s;
    }
  return out;
}

// ---------------------------------------------------------------------------
// rotations of Cartesian-end data (used by equivariance checks)
// ---------------------------------------------------------------------------

// Pullback of the data set under x -> Q x (Q a fixed rotation): fields
// g'(x) = Q^T g(Qx) Q etc. Charges of d' are the Q^T-rotated charges of d.
inline InitialDataSet rotate_data_set(const InitialDataSet& d, const Mat3& Q) {
  if (d.g.coords != CoordSystem::Cartesian)
    throw parameter_error("rotate_data_set: requires a Cartesian end");
  InitialDataSet out = d;
  auto rot_point = [Q](const Vec3& x) { return mat_vec(Q, x); };
  auto conj = [Q](const Mat3& m) { return mul(transpose(Q), mul(m, Q)); };

  auto g_eval = d.g.eval;
  out.g.eval = [g_eval, rot_point, conj](const Vec3& x) { return conj(g_eval(rot_point(x))); };
  out.g.d1 = nullptr;
  out.g.d2 = nullptr;
  auto K_eval = d.K.eval;
  out.K.eval = [K_eval, rot_point, conj](const Vec3& x) { return conj(K_eval(rot_point(x))); };
  out.K.d1 = nullptr;
  if (d.gbar_dev) {
    auto dev = d.gbar_dev;
    out.gbar_dev = [dev, rot_point, conj](const Vec3& x) { return conj(dev(rot_point(x))); };
    out.gbar_dev_d1 = nullptr;
  }
  if (d.hbar_exact) {
    auto hb = d.hbar_exact;
    out.hbar_exact = [hb, rot_point, conj](const Vec3& x) { return conj(hb(rot_point(x))); };
  }
  out.z = mat_vec(transpose(Q), d.z);
  return out;
}

}  // namespace dsc
