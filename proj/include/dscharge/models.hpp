#pragma once

#include <cmath>
#include <string>

#include "dscharge/charts.hpp"
#include "dscharge/initial_data.hpp"

namespace dsc {

// ---------------------------------------------------------------------------
// Schwarzschild-de Sitter in McVittie form
// ---------------------------------------------------------------------------

struct McVittieParams {
  double m = 1.0;
  double lambda = 10.0;
  double t = 0.0;

  double A() const { return std::exp(t / lambda); }
  void validate() const {
    if (!(lambda > 0.0)) throw parameter_error("mcvittie: lambda must be positive");
    if (m < 0.0) throw parameter_error("mcvittie: m must be non-negative");
  }
};

// gt = -((1-u)/(1+u))^2 dt^2 + A^2 (1+u)^4 delta,  u = m/(2 A r).
// The 4-metric evaluation rejects r <= m/(2A) (1 - 1e-8): the lapse
// degenerates on the minimal sphere and flips sign on the double cover.
inline Metric4Field mcvittie_metric4(const McVittieParams& p) {
  p.validate();
  Metric4Field f;
  f.spatial_coords = CoordSystem::Cartesian;
  const double m = p.m, lam = p.lambda;
  f.eval = [m, lam](double t, const Vec3& x) {
    const double A = std::exp(t / lam);
    const double r = norm(x);
    if (!(r > 0.0)) throw domain_error("mcvittie: r = 0");
    if (m > 0.0 && r <= (m / (2.0 * A)) * (1.0 - 1e-8))
      throw domain_error("mcvittie: r <= m/(2A) is inside the minimal-sphere double cover");
    const double u = m / (2.0 * A * r);
    const double phi = 1.0 + u;
    Mat4 g{};
    const double N = (1.0 - u) / phi;
    g[0][0] = -N * N;
    const double s = A * A * phi * phi * phi * phi;
    g[1][1] = g[2][2] = g[3][3] = s;
    return g;
  };
  return f;
}

// Constant-t slice: g = A^2 (1+u)^4 delta with K = g/lambda exactly
// (d_t g = 2 N g / lambda, so the slice_geometry route reproduces it).
// The slice fields themselves are regular for all r > 0.
inline InitialDataSet mcvittie_slice(const McVittieParams& p) {
  p.validate();
  const double A = p.A();
  const double mu = p.m / A;  // gbar = (1 + mu/2r)^4 delta
  const double lam = p.lambda;

  auto phi = [mu](const Vec3& x) { return 1.0 + 0.5 * mu / norm(x); };
  auto dphi = [mu](const Vec3& x, int k) {
    const double r = norm(x);
    return -0.5 * mu * x[k] / (r * r * r);
  };
  auto ddphi = [mu](const Vec3& x, int k, int l) {
    const double r = norm(x);
    const double r3 = r * r * r;
    return -0.5 * mu * ((k == l ? 1.0 : 0.0) / r3 - 3.0 * x[k] * x[l] / (r3 * r * r));
  };

  auto gbar = [phi](const Vec3& x) {
    if (!(norm(x) > 0.0)) throw domain_error("mcvittie slice: r = 0");
    const double p4 = std::pow(phi(x), 4);
    return scale(p4, identity<3>());
  };
  auto gbar_d1 = [phi, dphi](const Vec3& x, int k) {
    const double p3 = std::pow(phi(x), 3);
    return scale(4.0 * p3 * dphi(x, k), identity<3>());
  };
  auto gbar_d2 = [phi, dphi, ddphi](const Vec3& x, int k, int l) {
    const double f = phi(x);
    const double v = 12.0 * f * f * dphi(x, k) * dphi(x, l) + 4.0 * f * f * f * ddphi(x, k, l);
    return scale(v, identity<3>());
  };

  InitialDataSet d;
  d.name = "mcvittie";
  d.lambda = lam;
  d.conformal = ConformalClass::planar(A);
  d.g.coords = CoordSystem::Cartesian;
  d.g.eval = [gbar, A](const Vec3& x) { return scale(A * A, gbar(x)); };
  d.g.d1 = [gbar_d1, A](const Vec3& x, int k) { return scale(A * A, gbar_d1(x, k)); };
  d.g.d2 = [gbar_d2, A](const Vec3& x, int k, int l) { return scale(A * A, gbar_d2(x, k, l)); };
  d.K.coords = CoordSystem::Cartesian;
  auto geval = d.g.eval;
  auto gd1 = d.g.d1;
  d.K.eval = [geval, lam](const Vec3& x) { return scale(1.0 / lam, geval(x)); };
  d.K.d1 = [gd1, lam](const Vec3& x, int k) { return scale(1.0 / lam, gd1(x, k)); };
  d.gbar_dev = [phi](const Vec3& x) {
    if (!(norm(x) > 0.0)) throw domain_error("mcvittie slice: r = 0");
    return scale(std::pow(phi(x), 4) - 1.0, identity<3>());
  };
  d.gbar_dev_d1 = gbar_d1;
  d.hbar_exact = [](const Vec3&) { return zero_mat<3>(); };
  return d;
}

// ---------------------------------------------------------------------------
// Kerr-de Sitter
// ---------------------------------------------------------------------------

enum class PsiRange { Standard, Shifted };

struct KerrDSParams {
  double m = 1.0;
  double a = 0.5;
  double lambda = 10.0;
  double t = 0.0;
  PsiRange psi_range = PsiRange::Standard;

  void validate() const {
    if (!(lambda > 0.0)) throw parameter_error("kerr-ds: lambda must be positive");
    if (!(std::abs(a) < lambda)) throw parameter_error("kerr-ds: requires |a| < lambda");
  }
  double A() const { return std::exp(t / lambda); }
  double xi() const { return 1.0 + a * a / (lambda * lambda); }
  double delta_r(double rb) const {
    return (rb * rb + a * a) * (1.0 - rb * rb / (lambda * lambda)) - 2.0 * m * rb;
  }
  double delta_theta(double thb) const {
    const double c = std::cos(thb);
    return 1.0 + (a * a / (lambda * lambda)) * c * c;
  }
  double Ufun(double rb, double thb) const {
    const double c = std::cos(thb);
    return rb * rb + a * a * c * c;
  }
  double B(double theta) const {
    const double s = std::sin(theta);
    return 1.0 + (a * a / (lambda * lambda)) * s * s;
  }
};

// Boyer-Lindquist components at (tb, rb, thb, psb).
inline Mat4 kerr_bl_metric_at(const KerrDSParams& p, const Vec4& xb) {
  p.validate();
  const double rb = xb[1], thb = xb[2];
  const double s = std::sin(thb);
  const double Dr = p.delta_r(rb);
  const double Dth = p.delta_theta(thb);
  const double U = p.Ufun(rb, thb);
  const double xi = p.xi();
  if (std::abs(Dr) < 1e-12 * std::max(1.0, rb * rb))
    throw singular_error("kerr-ds: Delta_r = 0 (horizon)");
  if (std::abs(U) < 1e-12) throw singular_error("kerr-ds: U = 0 (ring singularity)");
  const double w1t = 1.0, w1p = -(p.a / xi) * s * s;
  const double w2t = p.a, w2p = -(rb * rb + p.a * p.a) / xi;
  Mat4 g{};
  g[0][0] = -(Dr / U) * w1t * w1t + (Dth * s * s / U) * w2t * w2t;
  g[0][3] = g[3][0] = -(Dr / U) * w1t * w1p + (Dth * s * s / U) * w2t * w2p;
  g[3][3] = -(Dr / U) * w1p * w1p + (Dth * s * s / U) * w2p * w2p;
  g[1][1] = U / Dr;
  g[2][2] = U / Dth;
  return g;
}

inline Metric4Field kerr_bl_metric(const KerrDSParams& p) {
  p.validate();
  Metric4Field f;
  f.spatial_coords = CoordSystem::PolarSpherical;
  f.eval = [p](double t, const Vec3& x) {
    return kerr_bl_metric_at(p, {t, x[0], x[1], x[2]});
  };
  return f;
}

// static-like coordinates: rh^2 = (rb^2 Dth + a^2 sin^2 thb)/xi, rh cos(thh) = rb cos(thb)
inline std::pair<double, double> kerr_hat_from_bl(const KerrDSParams& p, double rb, double thb) {
  const double s = std::sin(thb), c = std::cos(thb);
  const double xi = p.xi();
  const double rh = std::sqrt(
      (rb * rb + p.a * p.a * s * s + (p.a * p.a / (p.lambda * p.lambda)) * rb * rb * c * c) / xi);
  double arg = rb * c / rh;
  arg = std::clamp(arg, -1.0, 1.0);
  return {rh, std::acos(arg)};
}

// damped Newton inverse of the hat map; residual driven to ~1e-14 x scale
inline std::pair<double, double> kerr_bl_from_hat(const KerrDSParams& p, double rh, double thh) {
  const double xi = p.xi();
  const double a = p.a, lam = p.lambda;
  const double B = p.B(thh);
  double rb = std::sqrt(B) * rh;
  double thb = std::acos(std::clamp(std::cos(thh) / std::sqrt(B), -1.0, 1.0));
  const double tol1 = 1e-14 * std::max(1.0, rh * rh);
  const double tol2 = 1e-14 * std::max(1.0, rh);
  auto residual = [&](double r, double th, double& F1, double& F2) {
    const double s = std::sin(th), c = std::cos(th);
    F1 = xi * rh * rh - r * r - a * a * s * s - (a * a / (lam * lam)) * r * r * c * c;
    F2 = rh * std::cos(thh) - r * c;
  };
  double F1, F2;
  residual(rb, thb, F1, F2);
  for (int it = 0; it < 50; ++it) {
    if (std::abs(F1) < tol1 && std::abs(F2) < tol2) return {rb, thb};
    const double s = std::sin(thb), c = std::cos(thb);
    const double J11 = -2.0 * rb - 2.0 * (a * a / (lam * lam)) * rb * c * c;
    const double J12 = -2.0 * a * a * s * c + 2.0 * (a * a / (lam * lam)) * rb * rb * c * s;
    const double J21 = -c;
    const double J22 = rb * s;
    const double det = J11 * J22 - J12 * J21;
    if (!(std::abs(det) > 0.0))
      throw convergence_error("kerr_bl_from_hat: singular Newton Jacobian");
    double dr = -(F1 * J22 - F2 * J12) / det;
    double dth = -(J11 * F2 - J21 * F1) / det;
    // halve the step until the residual decreases
    const double n0 = std::abs(F1) / std::max(1.0, rh * rh) + std::abs(F2) / std::max(1.0, rh);
    double scale_step = 1.0;
    for (int k = 0; k < 25; ++k) {
      double G1, G2;
      residual(rb + scale_step * dr, thb + scale_step * dth, G1, G2);
      const double n1 = std::abs(G1) / std::max(1.0, rh * rh) + std::abs(G2) / std::max(1.0, rh);
      if (n1 < n0 || n1 < 1e-15) {
        rb += scale_step * dr;
        thb += scale_step * dth;
        F1 = G1;
        F2 = G2;
        break;
      }
      scale_step *= 0.5;
      if (k == 24)
        throw convergence_error("kerr_bl_from_hat: damping failed, residual " + std::to_string(n0));
    }
  }
  if (std::abs(F1) < 1e-12 * std::max(1.0, rh * rh) && std::abs(F2) < 1e-12 * std::max(1.0, rh))
    return {rb, thb};
  throw convergence_error("kerr_bl_from_hat: no convergence after 50 iterations, residual " +
                          std::to_string(std::abs(F1) + std::abs(F2)));
}

namespace detail {

// Composed planar -> BL chart data at a planar-polar point (t, r, theta):
// coordinates, exact 4x4 Jacobian d(BL)/d(planar polar) via the implicit
// function theorem on the hat->BL leg, and the exact m-part of the metric.
struct KerrChain {
  double that, rhat, rb, thb;
  Mat4 J;      // d(tb, rb, thb, psb) / d(t, r, theta, psi)
  Mat4 a_hat;  // m-part of the BL metric, in BL differentials
};

inline KerrChain kerr_chain(const KerrDSParams& p, double t, double r, double theta) {
  const double lam = p.lambda, a = p.a, xi = p.xi();
  const double A = std::exp(t / lam);
  const double w = (r * A / lam) * (r * A / lam);
  if (std::abs(r * A - lam) <= 1e-8 * lam)
    throw singular_error("kerr-ds planar: r e^{t/lambda} = lambda (chart horizon)");
  if (std::sin(theta) < 1e-12)
    throw domain_error("kerr-ds planar: polar axis (sin theta = 0)");

  KerrChain ch;
  ch.that = t - 0.5 * lam * std::log(std::abs(1.0 - w));
  ch.rhat = A * r;
  auto [rb, thb] = kerr_bl_from_hat(p, ch.rhat, theta);
  ch.rb = rb;
  ch.thb = thb;

  const double dthat_dt = 1.0 / (1.0 - w);
  const double dthat_dr = (r * A * A / lam) / (1.0 - w);
  const double drhat_dt = r * A / lam;
  const double drhat_dr = A;

  // forward 2x2 (BL -> hat), analytic at the solution
  const double s = std::sin(thb), c = std::cos(thb);
  const double Dth = p.delta_theta(thb);
  const double drh_drb = rb * Dth / (xi * ch.rhat);
  const double drh_dthb = a * a * s * c * (1.0 - rb * rb / (lam * lam)) / (xi * ch.rhat);
  const double sh = std::sin(theta);
  const double dthh_drb = -(c / ch.rhat - rb * c * drh_drb / (ch.rhat * ch.rhat)) / sh;
  const double dthh_dthb =
      -(-rb * s / ch.rhat - rb * c * drh_dthb / (ch.rhat * ch.rhat)) / sh;
  const double det = drh_drb * dthh_dthb - drh_dthb * dthh_drb;
  if (!(std::abs(det) > 0.0)) throw singular_error("kerr-ds planar: degenerate hat map");
  const double drb_drh = dthh_dthb / det;
  const double drb_dthh = -drh_dthb / det;
  const double dthb_drh = -dthh_drb / det;
  const double dthb_dthh = drh_drb / det;

  Mat4& J = ch.J;
  J = zero_mat<4>();
  J[0][0] = dthat_dt;
  J[0][1] = dthat_dr;
  J[1][0] = drb_drh * drhat_dt;
  J[1][1] = drb_drh * drhat_dr;
  J[1][2] = drb_dthh;
  J[2][0] = dthb_drh * drhat_dt;
  J[2][1] = dthb_drh * drhat_dr;
  J[2][2] = dthb_dthh;
  J[3][0] = (a / (lam * lam)) * dthat_dt;
  J[3][1] = (a / (lam * lam)) * dthat_dr;
  J[3][3] = 1.0;

  const double U = p.Ufun(rb, thb);
  const double Dr = p.delta_r(rb);
  if (std::abs(Dr) < 1e-12 * std::max(1.0, rb * rb))
    throw singular_error("kerr-ds planar: Delta_r = 0 along the chain");
  Mat4& ah = ch.a_hat;
  ah = zero_mat<4>();
  ah[0][0] = 2.0 * p.m * rb / U;
  ah[0][3] = ah[3][0] = -2.0 * p.m * a * rb * s * s / (U * xi);
  ah[3][3] = 2.0 * p.m * a * a * rb * s * s * s * s / (U * xi * xi);
  ah[1][1] = 2.0 * p.m * rb * U / ((Dr + 2.0 * p.m * rb) * Dr);
  return ch;
}

// deviation from planar de Sitter in planar POLAR coordinates (t, r, th, psi)
inline Mat4 kerr_planar_deviation_polar(const KerrDSParams& p, double t, double r, double theta) {
  const KerrChain ch = kerr_chain(p, t, r, theta);
  return pullback<4>(ch.a_hat, ch.J);
}

struct PolarFrame {
  Vec3 er, eth, eps;  // orthonormal flat frame at the point
  double r, theta, psi;
};

inline PolarFrame polar_frame(const Vec3& x) {
  PolarFrame f;
  f.r = norm(x);
  if (!(f.r > 0.0)) throw domain_error("polar frame: r = 0");
  f.theta = std::acos(std::clamp(x[2] / f.r, -1.0, 1.0));
  f.psi = std::atan2(x[1], x[0]);
  const double s = std::sin(f.theta), c = std::cos(f.theta);
  const double sp = std::sin(f.psi), cp = std::cos(f.psi);
  f.er = {s * cp, s * sp, c};
  f.eth = {c * cp, c * sp, -s};
  f.eps = {-sp, cp, 0.0};
  return f;
}

// covariant transform of a 4-tensor from planar polar to planar Cartesian
// components: a_cart = C^T a_polar C with C = d(t,r,theta,psi)/d(t,x).
inline Mat4 polar4_to_cart4(const Mat4& apolar, const Vec3& x) {
  const PolarFrame f = polar_frame(x);
  const double s = std::sin(f.theta);
  Mat4 C{};
  C[0][0] = 1.0;
  for (int i = 0; i < 3; ++i) {
    C[1][i + 1] = f.er[i];
    C[2][i + 1] = f.eth[i] / f.r;
    C[3][i + 1] = f.eps[i] / (f.r * s);
  }
  return pullback<4>(apolar, C);
}

}  // namespace detail

// Kerr-de Sitter in planar coordinates, Cartesian spatial components, as an
// exact background/deviation split around planar de Sitter. Evaluation goes
// through closed-form maps plus the Newton inversion of the hat leg, so the
// deviation keeps full relative accuracy at any radius.
inline Metric4Field kerr_planar_metric4(const KerrDSParams& p) {
  p.validate();
  Metric4Field f;
  f.spatial_coords = CoordSystem::Cartesian;
  f.noise = 1e-13;
  const double lam = p.lambda;
  f.background = [lam](double t, const Vec3&) {
    const double A2 = std::exp(2.0 * t / lam);
    Mat4 g{};
    g[0][0] = -1.0;
    g[1][1] = g[2][2] = g[3][3] = A2;
    return g;
  };
  f.dt_background = [lam](double t, const Vec3&) {
    const double A2 = std::exp(2.0 * t / lam);
    Mat4 g{};
    g[1][1] = g[2][2] = g[3][3] = 2.0 * A2 / lam;
    return g;
  };
  f.deviation = [p](double t, const Vec3& x) {
    const detail::PolarFrame fr = detail::polar_frame(x);
    const Mat4 ap = detail::kerr_planar_deviation_polar(p, t, fr.r, fr.theta);
    return detail::polar4_to_cart4(ap, x);
  };
  auto bg = f.background;
  auto dev = f.deviation;
  f.eval = [bg, dev](double t, const Vec3& x) { return add<4>(bg(t, x), dev(t, x)); };
  return f;
}

// Planar t-slice of Kerr-de Sitter as an initial data set (Cartesian end).
// K and h come from the cancellation-free slice_momentum path; the exact
// deviation fields gbar - delta and hbar are registered for the charges.
inline InitialDataSet kerr_planar_slice(const KerrDSParams& p) {
  p.validate();
  const Metric4Field g4 = kerr_planar_metric4(p);
  const double t = p.t, lam = p.lambda;
  const double A = p.A();

  InitialDataSet d;
  d.name = "kerr-ds";
  d.lambda = lam;
  d.conformal = ConformalClass::planar(A);
  d.g.coords = CoordSystem::Cartesian;
  d.g.noise = 1e-13;
  d.g.eval = [g4, t](const Vec3& x) {
    const Mat4 g = g4.value(t, x);
    Mat3 out;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out[i][j] = g[i + 1][j + 1];
    return out;
  };
  d.K.coords = CoordSystem::Cartesian;
  d.K.noise = 1e-10;  // one FD in t inside slice_momentum
  d.K.eval = [g4, t, lam](const Vec3& x) { return slice_momentum(g4, t, x, lam).K; };
  d.gbar_dev = [g4, t, A](const Vec3& x) {
    const Mat4 a = g4.deviation(t, x);
    Mat3 out;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out[i][j] = a[i + 1][j + 1] / (A * A);
    return out;
  };
  d.hbar_exact = [g4, t, lam, A](const Vec3& x) {
    return scale(1.0 / A, slice_momentum(g4, t, x, lam).h);
  };
  return d;
}

// psi quadrature interval for the configured convention. The shifted range
// has length 2 pi xi with offset -(a/lambda^2) t_bar(r); the offset does not
// change any charge (J_3's integrand is psi-independent, J_1/J_2 vanish by
// theta-parity) but is kept for fidelity.
inline std::pair<double, double> kerr_psi_interval(const KerrDSParams& p, double r) {
  if (p.psi_range == PsiRange::Standard) return {0.0, 2.0 * kPi};
  const double A = p.A();
  const double w = (r * A / p.lambda) * (r * A / p.lambda);
  const double tbar = p.t - 0.5 * p.lambda * std::log(std::abs(1.0 - w));
  const double start = -(p.a / (p.lambda * p.lambda)) * tbar;
  return {start, start + 2.0 * kPi * p.xi()};
}

// ---------------------------------------------------------------------------
// leading-order asymptotics (test oracles)
// ---------------------------------------------------------------------------

// Leading terms of the planar-coordinate deviation a_{mu nu} (polar
// components), of hbar (polar components), and of the angular momentum
// density htilde^z (orthonormal-frame components), at (r, theta) on the
// t-slice, derived from the exact pullback chain.
struct KerrAsymptotics {
  Mat4 a_leading{};       // indices (t, r, theta, psi)
  Mat3 hbar_leading{};    // indices (r, theta, psi)
  Mat3 htilde_frame{};    // frame indices (e1, e2, e3); only the O(r^-2) entries
};

inline KerrAsymptotics kerr_asymptotic_oracle(const KerrDSParams& p, double r, double theta) {
  p.validate();
  if (!(r > 0.0)) throw parameter_error("kerr_asymptotic_oracle: r must be positive");
  const double m = p.m, a = p.a, lam = p.lambda;
  const double A = p.A();
  const double s = std::sin(theta), c = std::cos(theta);
  const double kap = a * a / (lam * lam);
  const double x = kap * s * s;
  const double B = 1.0 + x;
  const double B32 = std::pow(B, 1.5), B52 = std::pow(B, 2.5), B72 = std::pow(B, 3.5);

  KerrAsymptotics out;
  Mat4& al = out.a_leading;
  al[0][0] = 2.0 * m * lam * lam / (A * A * A * r * r * r * B32);
  al[0][1] = al[1][0] = 2.0 * m * lam * lam * lam * (2.0 + x) / (A * A * A * r * r * r * r * B52);
  al[0][2] = al[2][0] = 2.0 * m * a * a * lam * s * c / (A * A * A * r * r * r * B52);
  al[1][1] = 2.0 * m * lam * lam / (A * r * r * r * B52);
  al[1][2] = al[2][1] = 2.0 * m * a * a * lam * lam * s * c / (A * A * A * r * r * r * r * B52);
  al[1][3] = al[3][1] = 2.0 * m * lam * a * s * s / (A * r * r * B52);
  al[2][2] = 2.0 * m * a * a * a * a * s * s * c * c / (A * A * A * r * r * r * B72);
  al[3][3] = 2.0 * m * a * a * s * s * s * s / (A * r * B52);

  Mat3& hb = out.hbar_leading;
  hb[0][0] = -(2.0 * m * lam * lam - m * a * a * s * s) / (A * A * B52 * lam * r * r * r);
  hb[0][2] = hb[2][0] = -3.0 * m * a * s * s / (A * A * B52 * r * r);
  hb[1][1] = m * lam / (A * A * B32 * r);
  hb[2][2] = (m * lam * lam - 2.0 * m * a * a * s * s) * s * s / (A * A * B52 * lam * r);

  Mat3& ht = out.htilde_frame;
  ht[1][0] = -3.0 * m * a * s / (A * A * B52 * r * r);
  ht[1][2] = (m * lam * lam - 2.0 * m * a * a * s * s) / (A * A * B52 * lam * r * r);
  ht[2][1] = -m * lam / (A * A * B32 * r * r);
  return out;
}

// ---------------------------------------------------------------------------
// de Sitter slices as data sets
// ---------------------------------------------------------------------------

inline InitialDataSet de_sitter_data(ChartId chart, double time, double lambda) {
  SliceData sd = slice_data(chart, time, lambda);
  InitialDataSet d;
  d.name = std::string("de-sitter/") + to_string(chart);
  d.lambda = lambda;
  d.g = sd.g;
  d.K = sd.K;
  switch (chart) {
    case ChartId::PlanarUpper:
    case ChartId::PlanarLower:
      d.conformal = ConformalClass::planar(std::exp(time / lambda));
      d.gbar_dev = [](const Vec3&) { return zero_mat<3>(); };
      d.gbar_dev_d1 = [](const Vec3&, int) { return zero_mat<3>(); };
      d.hbar_exact = [](const Vec3&) { return zero_mat<3>(); };
      break;
    case ChartId::Hyperbolic:
      d.conformal = ConformalClass::hyperbolic(time);
      d.gbar_dev = [](const Vec3&) { return zero_mat<3>(); };
      d.hbar_exact = [](const Vec3&) { return zero_mat<3>(); };
      break;
    default:
      // compact or horizon-bounded slices: no asymptotic end, charges undefined
      d.conformal = ConformalClass::planar(1.0);
      d.has_end = false;
      break;
  }
  return d;
}

}  // namespace dsc
