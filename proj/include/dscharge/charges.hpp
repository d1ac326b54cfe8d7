#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "dscharge/initial_data.hpp"
#include "dscharge/quadrature.hpp"

namespace dsc {

// ---------------------------------------------------------------------------
// radius extrapolation
// ---------------------------------------------------------------------------

// Tail model Q(r) = Q_inf + c r^{-s} (planar; the hyperbolic case substitutes
// r -> e^{R/lambda}); s fitted freely or pinned from decay_fit.
struct PowerLawFit {
  double limit = 0.0;
  double c = 0.0;
  double s = 0.0;
  double rms = 0.0;
  double cond = 1.0;   // condition number of the linear subfit normal matrix
  bool s_pinned = false;
  bool exact = false;  // constant sequence at machine level
  bool warn = false;   // residual above threshold or non-monotone raw trend
  std::string note;
};

struct ExtrapolationSpec {
  std::vector<double> radii;  // empty: r_k = 100 lambda 2^k (planar, 5 values)
                              //        R_k = 2 lambda + k lambda/2 (hyperbolic)
  int count = 5;
  double pin_confidence = 1e-2;  // pin s when the decay fit has rms below this

  std::vector<double> planar_radii(double lambda) const {
    if (!radii.empty()) return radii;
    std::vector<double> out;
    double r = 100.0 * lambda;
    for (int k = 0; k < count; ++k, r *= 2.0) out.push_back(r);
    return out;
  }
  std::vector<double> hyperbolic_radii(double lambda) const {
    if (!radii.empty()) return radii;
    std::vector<double> out;
    for (int k = 0; k < count; ++k) out.push_back(2.0 * lambda + 0.5 * lambda * k);
    return out;
  }
};

namespace detail {

struct LinSub {
  double q = 0.0, c = 0.0, sse = 0.0, cond = 1.0;
};

inline LinSub linear_subfit(const std::vector<double>& r, const std::vector<double>& v, double s) {
  const std::size_t n = r.size();
  double s11 = n, s12 = 0, s22 = 0, b1 = 0, b2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double b = std::pow(r[i], -s);
    s12 += b;
    s22 += b * b;
    b1 += v[i];
    b2 += v[i] * b;
  }
  const double det = s11 * s22 - s12 * s12;
  LinSub out;
  if (!(std::abs(det) > 1e-300)) {
    out.q = b1 / n;
    out.c = 0.0;
    out.cond = 1e300;
  } else {
    out.q = (b1 * s22 - b2 * s12) / det;
    out.c = (s11 * b2 - s12 * b1) / det;
    // eigenvalue ratio of the symmetric normal matrix (lmin = det/lmax is
    // stable where the direct root formula cancels)
    const double tr = s11 + s22;
    const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
    const double lmax = 0.5 * (tr + disc);
    out.cond = det > 0.0 ? lmax * lmax / det : 1e300;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double e = v[i] - out.q - out.c * std::pow(r[i], -s);
    out.sse += e * e;
  }
  return out;
}

}  // namespace detail

inline PowerLawFit fit_power_tail(const std::vector<double>& radii, const std::vector<double>& vals,
                                  double pinned_s = 0.0, bool have_pin = false) {
  if (radii.size() < 3) throw parameter_error("fit_power_tail: need at least 3 radii");
  PowerLawFit out;
  double vmax = 0.0, vmean = 0.0;
  for (double v : vals) vmean += v;
  vmean /= vals.size();
  for (double v : vals) vmax = std::max(vmax, std::abs(v - vmean));
  if (vmax < 1e-13 * std::max(1.0, std::abs(vmean))) {
    out.limit = vmean;
    out.exact = true;
    out.note = "constant sequence";
    return out;
  }

  auto eval_fit = [&](double s) { return detail::linear_subfit(radii, vals, s); };

  // free s by golden-section on the SSE
  double a = 0.25, b = 8.0;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c1 = b - phi * (b - a), c2 = a + phi * (b - a);
  double f1 = eval_fit(c1).sse, f2 = eval_fit(c2).sse;
  for (int it = 0; it < 120; ++it) {
    if (f1 < f2) {
      b = c2; c2 = c1; f2 = f1;
      c1 = b - phi * (b - a);
      f1 = eval_fit(c1).sse;
    } else {
      a = c1; c1 = c2; f1 = f2;
      c2 = a + phi * (b - a);
      f2 = eval_fit(c2).sse;
    }
  }
  const double s_free = 0.5 * (a + b);
  const auto free_fit = eval_fit(s_free);

  double s_best = s_free;
  detail::LinSub best = free_fit;
  bool pinned_used = false;
  if (have_pin && pinned_s > 0.0) {
    const auto pin_fit = eval_fit(pinned_s);
    // prefer the pinned exponent unless it clearly fits worse
    if (pin_fit.sse <= 4.0 * free_fit.sse) {
      s_best = pinned_s;
      best = pin_fit;
      pinned_used = true;
      out.note = "s pinned from decay fit; free fit s=" + std::to_string(s_free);
    } else {
      out.note = "pinned s rejected (residual); pin=" + std::to_string(pinned_s);
    }
  }
  out.limit = best.q;
  out.c = best.c;
  out.s = s_best;
  out.s_pinned = pinned_used;
  out.rms = std::sqrt(best.sse / radii.size());
  out.cond = best.cond;
  out.warn = out.rms > std::max(1e-3 * std::abs(out.limit), 1e-8);
  // raw sequence should approach the limit monotonically; flag otherwise
  bool monotone = true;
  for (std::size_t i = 1; i < vals.size(); ++i)
    if (std::abs(vals[i] - out.limit) > std::abs(vals[i - 1] - out.limit) + 1e-13 * vmax)
      monotone = false;
  if (!monotone) {
    out.warn = true;
    out.note += (out.note.empty() ? "" : "; ");
    out.note += "non-monotone raw sequence";
  }
  return out;
}

// ---------------------------------------------------------------------------
// planar-end charges
// ---------------------------------------------------------------------------

struct ChargeValue {
  double value = 0.0;
  std::vector<double> raw;  // per-radius values
  PowerLawFit fit;
};

struct BarCharges {
  ChargeValue E;
  std::array<ChargeValue, 3> P;
  std::array<ChargeValue, 3> J;
  std::vector<double> radii;
  DataDecayFits decay;
};

// Ebar = (1/16pi) lim int (d_j gbar_ij - d_i gbar_jj) n^i r^2 dOmega
// Pbar_k = (1/8pi) lim int (hbar_ki - gbar_ki tr hbar) n^i r^2 dOmega
// Jbar_k = (1/8pi) lim int htilde^z_ki n^i r^2 dOmega
// with the flat area element and outward Euclidean normal. The psi interval
// may depend on the radius (shifted Kerr convention).
inline BarCharges adm_charges_bar(const InitialDataSet& d,
                                  const std::function<QuadratureSpec(double)>& quad_at,
                                  const ExtrapolationSpec& e = {},
                                  EpsilonConvention eps = EpsilonConvention::Flat) {
  if (d.conformal.kind != ConformalClass::Planar)
    throw parameter_error("adm_charges_bar: planar-type data set required");
  if (!d.has_end) throw parameter_error("adm_charges_bar: data set has no asymptotic end");
  if (d.g.coords != CoordSystem::Cartesian)
    throw parameter_error("adm_charges_bar: Cartesian end coordinates required");

  const auto dec = conformal_decompose(d);
  BarCharges out;
  out.radii = e.planar_radii(d.lambda);
  out.decay = decay_fit(d, out.radii);

  DerivativeConfig cfg;
  for (double r : out.radii) {
    const QuadratureSpec q = quad_at(r);
    const auto nodes = sphere_rule(q);
    const double r2 = r * r;

    std::array<std::vector<double>, 7> acc;
    for (auto& v : acc) v.resize(nodes.size());
    parallel_sum(nodes.size(), [&](std::size_t i) {
      const Vec3& n = nodes[i].n;
      const Vec3 x = r * n;
      const double w = nodes[i].weight * r2;

      // energy integrand from the deviation field (background is constant)
      std::array<Mat3, 3> da;
      for (int k = 0; k < 3; ++k) da[k] = dec.gbar_deviation.deriv(x, k, cfg);
      double de = 0.0;
      for (int i2 = 0; i2 < 3; ++i2) {
        double term = 0.0;
        for (int j = 0; j < 3; ++j) term += da[j][i2][j] - da[i2][j][j];
        de += term * n[i2];
      }
      acc[0][i] = de * w;

      const Mat3 hb = dec.hbar.eval(x);
      const Mat3 gb = dec.gbar.eval(x);
      const Mat3 gbi = inv3(gb);
      double trh = 0.0;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) trh += gbi[a][b] * hb[a][b];
      for (int k = 0; k < 3; ++k) {
        double pk = 0.0;
        for (int i2 = 0; i2 < 3; ++i2) pk += (hb[k][i2] - gb[k][i2] * trh) * n[i2];
        acc[1 + k][i] = pk * w;
      }
      const Mat3 ht = angular_density(d, x, eps);
      for (int k = 0; k < 3; ++k) {
        double jk = 0.0;
        for (int i2 = 0; i2 < 3; ++i2) jk += ht[k][i2] * n[i2];
        acc[4 + k][i] = jk * w;
      }
      return 0.0;
    });

    out.E.raw.push_back(pairwise_sum(acc[0]) / (16.0 * kPi));
    for (int k = 0; k < 3; ++k) {
      out.P[k].raw.push_back(pairwise_sum(acc[1 + k]) / (8.0 * kPi));
      out.J[k].raw.push_back(pairwise_sum(acc[4 + k]) / (8.0 * kPi));
    }
  }

  const bool pinE = !out.decay.metric.exact && !out.decay.metric.fit_failed &&
                    out.decay.metric.residual < e.pin_confidence;
  const bool pinH = !out.decay.momentum.exact && !out.decay.momentum.fit_failed &&
                    out.decay.momentum.residual < e.pin_confidence;
  out.E.fit = fit_power_tail(out.radii, out.E.raw, out.decay.metric.tau_hat, pinE);
  out.E.value = out.E.fit.limit;
  for (int k = 0; k < 3; ++k) {
    out.P[k].fit = fit_power_tail(out.radii, out.P[k].raw, out.decay.momentum.tau_hat, pinH);
    out.P[k].value = out.P[k].fit.limit;
    out.J[k].fit = fit_power_tail(out.radii, out.J[k].raw, out.decay.momentum.tau_hat, pinH);
    out.J[k].value = out.J[k].fit.limit;
  }
  return out;
}

inline BarCharges adm_charges_bar(const InitialDataSet& d, const QuadratureSpec& q,
                                  const ExtrapolationSpec& e = {},
                                  EpsilonConvention eps = EpsilonConvention::Flat) {
  return adm_charges_bar(d, [q](double) { return q; }, e, eps);
}

// E = P Ebar, P_k = P^2 Pbar_k, J_k = P^2 Jbar_k
struct RescaledCharges {
  double E = 0.0;
  Vec3 P{};
  Vec3 J{};
};

inline RescaledCharges rescale_charges(double Ebar, const Vec3& Pbar, const Vec3& Jbar,
                                       double Pconf) {
  if (!(Pconf > 0.0)) throw parameter_error("rescale_charges: P must be positive");
  RescaledCharges out;
  out.E = Pconf * Ebar;
  out.P = (Pconf * Pconf) * Pbar;
  out.J = (Pconf * Pconf) * Jbar;
  return out;
}

// J = P^2 Jbar with Jbar integrated over the configured psi interval.
inline std::array<ChargeValue, 3> angular_momentum(const InitialDataSet& d,
                                                   const std::function<QuadratureSpec(double)>& quad_at,
                                                   const ExtrapolationSpec& e = {},
                                                   EpsilonConvention eps = EpsilonConvention::Flat) {
  BarCharges bars = adm_charges_bar(d, quad_at, e, eps);
  const double P2 = std::pow(d.conformal.factor(d.lambda), 2);
  std::array<ChargeValue, 3> out = bars.J;
  for (auto& cv : out) {
    cv.value *= P2;
    cv.fit.limit *= P2;
    cv.fit.c *= P2;
    for (auto& v : cv.raw) v *= P2;
  }
  return out;
}

// ---------------------------------------------------------------------------
// hyperbolic-end charges E^H_nu
// ---------------------------------------------------------------------------

struct HyperbolicCharges {
  std::array<ChargeValue, 4> EH;
  std::vector<double> radii;
};

namespace detail {

// E-density of the hyperbolic energy-momentum at (R, theta, psi):
//   del^j gbar_1j - del_1 tr gbar + (1/lambda)(a22 + a33) + 2 (hbar22 + hbar33)
// computed from the deviation a = gbar - gH (background-covariantly constant
// terms drop), frame components on the gH orthonormal frame.
inline double hyperbolic_energy_density(const ConformalDecomposition& dec, double lambda,
                                        const Vec3& x, const DerivativeConfig& cfg) {
  const double R = x[0], th = x[1];
  const double f = lambda * std::sinh(R / lambda);
  const double fp = std::cosh(R / lambda);
  const double sth = std::sin(th), cth = std::cos(th);

  const Mat3 a0 = dec.gbar_deviation.eval(x);
  std::array<Mat3, 3> da;
  for (int k = 0; k < 3; ++k) da[k] = dec.gbar_deviation.deriv(x, k, cfg);

  // gH inverse and Christoffels (closed form)
  const double if2 = 1.0 / (f * f);
  Mat3 gi{};
  gi[0][0] = 1.0;
  gi[1][1] = if2;
  gi[2][2] = if2 / (sth * sth);
  Arr3<3> G{};  // G[i][j][k] = Gamma^i_{jk}
  G[0][1][1] = -f * fp;
  G[0][2][2] = -f * fp * sth * sth;
  G[1][0][1] = G[1][1][0] = fp / f;
  G[2][0][2] = G[2][2][0] = fp / f;
  G[1][2][2] = -sth * cth;
  G[2][1][2] = G[2][2][1] = cth / sth;

  // del^j a_{Rj} = g^{jk} (d_k a_{Rj} - Gamma^m_{kR} a_{mj} - Gamma^m_{kj} a_{Rm})
  double div_R = 0.0;
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      if (gi[j][k] == 0.0) continue;
      double cov = da[k][0][j];
      for (int m = 0; m < 3; ++m) cov -= G[m][k][0] * a0[m][j] + G[m][k][j] * a0[0][m];
      div_R += gi[j][k] * cov;
    }
  // d_R tr_{gH}(a) = d_R (g^{ij} a_ij) = (d_R g^{ij}) a_ij + g^{ij} d_R a_ij
  const double dif2 = -2.0 * fp / (f * f * f);
  double dtr = dif2 * (a0[1][1] + a0[2][2] / (sth * sth)) +
               gi[0][0] * da[0][0][0] + gi[1][1] * da[0][1][1] + gi[2][2] * da[0][2][2];

  const double a22 = a0[1][1] * if2;
  const double a33 = a0[2][2] * if2 / (sth * sth);
  const Mat3 hb = dec.hbar.eval(x);
  const double hb22 = hb[1][1] * if2;
  const double hb33 = hb[2][2] * if2 / (sth * sth);

  return div_R - dtr + (a22 + a33) / lambda + 2.0 * (hb22 + hb33);
}

}  // namespace detail

// E^H_nu = (H^2/16pi) lim int E n^nu e^{R/lambda} e2^e3 with
// n = (1, sin th cos psi, sin th sin psi, cos th); extrapolation fits
// Q(R) = Q_inf + c e^{-s R/lambda}.
inline HyperbolicCharges hyperbolic_charges(const InitialDataSet& d, const QuadratureSpec& q,
                                            const ExtrapolationSpec& e = {}) {
  if (d.conformal.kind != ConformalClass::Hyperbolic)
    throw parameter_error("hyperbolic_charges: hyperbolic-type data set required");
  const double lam = d.lambda;
  const double H = d.conformal.factor(lam);
  const auto dec = conformal_decompose(d);
  DerivativeConfig cfg;

  HyperbolicCharges out;
  out.radii = e.hyperbolic_radii(lam);
  const auto nodes = sphere_rule(q);
  for (double R : out.radii) {
    const double f2 = std::pow(lam * std::sinh(R / lam), 2);
    const double weight_all = std::exp(R / lam) * f2 * H * H / (16.0 * kPi);
    std::array<std::vector<double>, 4> acc;
    for (auto& v : acc) v.resize(nodes.size());
    parallel_sum(nodes.size(), [&](std::size_t i) {
      const double th = nodes[i].theta, ps = nodes[i].psi;
      const double dens =
          detail::hyperbolic_energy_density(dec, lam, {R, th, ps}, cfg) * nodes[i].weight;
      const double sth = std::sin(th);
      acc[0][i] = dens;
      acc[1][i] = dens * sth * std::cos(ps);
      acc[2][i] = dens * sth * std::sin(ps);
      acc[3][i] = dens * std::cos(th);
      return 0.0;
    });
    for (int nu = 0; nu < 4; ++nu) out.EH[nu].raw.push_back(pairwise_sum(acc[nu]) * weight_all);
  }

  // substitute u = e^{R/lambda}: power-law tail in u
  std::vector<double> ur;
  for (double R : out.radii) ur.push_back(std::exp(R / lam));
  for (int nu = 0; nu < 4; ++nu) {
    out.EH[nu].fit = fit_power_tail(ur, out.EH[nu].raw);
    out.EH[nu].value = out.EH[nu].fit.limit;
    if (!out.EH[nu].fit.exact && out.EH[nu].fit.c != 0.0 && out.EH[nu].fit.s < 0.05) {
      out.EH[nu].fit.warn = true;
      out.EH[nu].fit.note += "; no decaying tail: limit may not exist";
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// mass inequality margins
// ---------------------------------------------------------------------------

struct InequalityMargins {
  // planar case; margins in the rescaled charges with the breve g_P norm:
  // E - |P| = P (Ebar - |Pbar|), E - |C1 P + C2 J| = P (Ebar - |C1 Pbar + C2 Jbar|)
  double energy_momentum = 0.0;
  double energy_momentum_angular = 0.0;
  double C1 = 1.0, C2 = 1.0;
  bool planar_valid = false;
  // hyperbolic case: EH_0 - |EH spatial|
  double hyperbolic = 0.0;
  bool hyperbolic_valid = false;
};

inline InequalityMargins mass_inequalities(double Ebar, const Vec3& Pbar, const Vec3& Jbar,
                                           double Pconf, double C1, double C2) {
  InequalityMargins out;
  out.C1 = C1;
  out.C2 = C2;
  out.energy_momentum = Pconf * (Ebar - norm(Pbar));
  Vec3 comb = {C1 * Pbar[0] + C2 * Jbar[0], C1 * Pbar[1] + C2 * Jbar[1],
               C1 * Pbar[2] + C2 * Jbar[2]};
  out.energy_momentum_angular = Pconf * (Ebar - norm(comb));
  out.planar_valid = true;
  return out;
}

inline InequalityMargins mass_inequalities(const std::array<ChargeValue, 4>& EH) {
  InequalityMargins out;
  Vec3 sp = {EH[1].value, EH[2].value, EH[3].value};
  out.hyperbolic = EH[0].value - norm(sp);
  out.hyperbolic_valid = true;
  return out;
}

// ---------------------------------------------------------------------------
// assembled report
// ---------------------------------------------------------------------------

struct ChargeReport {
  std::string model;
  double conformal_factor = 1.0;
  std::string conformal_kind = "planar";
  Vec3 z{};
  std::string psi_range = "standard";
  std::string epsilon = "flat";
  std::vector<double> radii;
  ChargeValue E;  // rescaled
  std::array<ChargeValue, 3> P;
  std::array<ChargeValue, 3> J;
  std::array<ChargeValue, 4> EH;
  bool has_planar = false;
  bool has_hyperbolic = false;
  InequalityMargins margins;
  DataDecayFits decay;
};

// Full planar-charge pipeline: bar charges, rescaling, margins.
inline ChargeReport charge_report_planar(const InitialDataSet& d,
                                         const std::function<QuadratureSpec(double)>& quad_at,
                                         const ExtrapolationSpec& e = {},
                                         EpsilonConvention eps = EpsilonConvention::Flat,
                                         double C1 = 1.0, double C2 = 1.0) {
  BarCharges bars = adm_charges_bar(d, quad_at, e, eps);
  const double P = d.conformal.factor(d.lambda);
  ChargeReport rep;
  rep.model = d.name;
  rep.conformal_factor = P;
  rep.z = d.z;
  rep.epsilon = eps == EpsilonConvention::Flat ? "flat" : "gbar-volume";
  rep.radii = bars.radii;
  rep.decay = bars.decay;
  rep.has_planar = true;

  rep.E = bars.E;
  rep.E.value *= P;
  rep.E.fit.limit *= P;
  rep.E.fit.c *= P;
  for (auto& v : rep.E.raw) v *= P;
  for (int k = 0; k < 3; ++k) {
    rep.P[k] = bars.P[k];
    rep.J[k] = bars.J[k];
    for (auto* cv : {&rep.P[k], &rep.J[k]}) {
      cv->value *= P * P;
      cv->fit.limit *= P * P;
      cv->fit.c *= P * P;
      for (auto& v : cv->raw) v *= P * P;
    }
  }
  rep.margins = mass_inequalities(bars.E.value, {bars.P[0].value, bars.P[1].value, bars.P[2].value},
                                  {bars.J[0].value, bars.J[1].value, bars.J[2].value}, P, C1, C2);
  return rep;
}

inline ChargeReport charge_report_hyperbolic(const InitialDataSet& d, const QuadratureSpec& q,
                                             const ExtrapolationSpec& e = {}) {
  HyperbolicCharges hc = hyperbolic_charges(d, q, e);
  ChargeReport rep;
  rep.model = d.name;
  rep.conformal_kind = "hyperbolic";
  rep.conformal_factor = d.conformal.factor(d.lambda);
  rep.radii = hc.radii;
  rep.EH = hc.EH;
  rep.has_hyperbolic = true;
  rep.margins = mass_inequalities(hc.EH);
  return rep;
}

}  // namespace dsc
