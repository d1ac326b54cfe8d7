#pragma once

#include <array>
#include <cmath>
#include <functional>

#include "dscharge/fields.hpp"
#include "dscharge/quadrature.hpp"

namespace dsc {

// ---------------------------------------------------------------------------
// curvature kernel, dimension-generic
// ---------------------------------------------------------------------------

template <std::size_t N>
using Arr3 = std::array<SqMat<N>, N>;  // X[i][j][k]

template <std::size_t N>
using Arr4 = std::array<Arr3<N>, N>;  // X[i][j][k][l]

template <std::size_t N>
struct MetricJets {
  SqMat<N> g;
  Arr3<N> dg;   // dg[k][i][j] = \partial_k g_ij
  Arr4<N> ddg;  // ddg[k][l][i][j] = \partial_k \partial_l g_ij (symmetric in k,l)
};

template <std::size_t N>
struct Curvature {
  SqMat<N> ginv;
  Arr3<N> gamma;  // gamma[i][j][k] = Gamma^i_{jk}
  Arr4<N> riem;   // riem[i][j][k][l] = Riem_{ijkl}, sign fixed so round spheres have R > 0
  SqMat<N> ricci;
  double scalar = 0.0;
};

template <std::size_t N>
Curvature<N> curvature_from_jets(const MetricJets<N>& J) {
  Curvature<N> out;
  out.ginv = inverse<N>(J.g);
  const SqMat<N>& gi = out.ginv;

  // Gamma^i_{jk} = (1/2) g^{im} (d_j g_mk + d_k g_mj - d_m g_jk)
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      for (std::size_t k = 0; k < N; ++k) {
        double s = 0.0;
        for (std::size_t m = 0; m < N; ++m)
          s += gi[i][m] * (J.dg[j][m][k] + J.dg[k][m][j] - J.dg[m][j][k]);
        out.gamma[i][j][k] = 0.5 * s;
      }

  // d_l g^{im} = - g^{ia} (d_l g_ab) g^{bm}
  Arr3<N> dginv;
  for (std::size_t l = 0; l < N; ++l)
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t m = 0; m < N; ++m) {
        double s = 0.0;
        for (std::size_t a = 0; a < N; ++a)
          for (std::size_t b = 0; b < N; ++b) s += gi[i][a] * J.dg[l][a][b] * gi[b][m];
        dginv[l][i][m] = -s;
      }

  // d_l Gamma^i_{jk}
  Arr4<N> dgamma;
  for (std::size_t l = 0; l < N; ++l)
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j)
        for (std::size_t k = 0; k < N; ++k) {
          double s = 0.0;
          for (std::size_t m = 0; m < N; ++m) {
            s += dginv[l][i][m] * (J.dg[j][m][k] + J.dg[k][m][j] - J.dg[m][j][k]);
            s += gi[i][m] *
                 (J.ddg[l][j][m][k] + J.ddg[l][k][m][j] - J.ddg[l][m][j][k]);
          }
          dgamma[l][i][j][k] = 0.5 * s;
        }

  // R^i_{jkl} = d_k Gamma^i_{lj} - d_l Gamma^i_{kj}
  //           + Gamma^i_{km} Gamma^m_{lj} - Gamma^i_{lm} Gamma^m_{kj}
  Arr4<N> riem_up;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      for (std::size_t k = 0; k < N; ++k)
        for (std::size_t l = 0; l < N; ++l) {
          double s = dgamma[k][i][l][j] - dgamma[l][i][k][j];
          for (std::size_t m = 0; m < N; ++m)
            s += out.gamma[i][k][m] * out.gamma[m][l][j] -
                 out.gamma[i][l][m] * out.gamma[m][k][j];
          riem_up[i][j][k][l] = s;
        }

  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      for (std::size_t k = 0; k < N; ++k)
        for (std::size_t l = 0; l < N; ++l) {
          double s = 0.0;
          for (std::size_t m = 0; m < N; ++m) s += J.g[i][m] * riem_up[m][j][k][l];
          out.riem[i][j][k][l] = s;
        }

  for (std::size_t j = 0; j < N; ++j)
    for (std::size_t l = 0; l < N; ++l) {
      double s = 0.0;
      for (std::size_t k = 0; k < N; ++k) s += riem_up[k][j][k][l];
      out.ricci[j][l] = s;
    }

  out.scalar = 0.0;
  for (std::size_t j = 0; j < N; ++j)
    for (std::size_t l = 0; l < N; ++l) out.scalar += gi[j][l] * out.ricci[j][l];
  return out;
}

inline MetricJets<3> metric_jets(const MetricField3& g, const Vec3& x,
                                 const DerivativeConfig& cfg = {}) {
  MetricJets<3> J;
  J.g = g.value(x);
  for (int k = 0; k < 3; ++k) J.dg[k] = g.deriv(x, k, cfg);
  for (int k = 0; k < 3; ++k)
    for (int l = k; l < 3; ++l) {
      J.ddg[k][l] = g.deriv2(x, k, l, cfg);
      if (l != k) J.ddg[l][k] = J.ddg[k][l];
    }
  return J;
}

inline Curvature<3> curvature3(const MetricField3& g, const Vec3& x,
                               const DerivativeConfig& cfg = {}) {
  return curvature_from_jets<3>(metric_jets(g, x, cfg));
}

// 4D curvature of a spacetime metric. With analytic d1 registered the second
// derivatives differentiate d1 once; the pure-FD path uses fourth-order
// stencils, whose larger optimal steps keep the accuracy through the 1/sin^2
// and 1/lapse^2 amplification of curved charts.
inline Curvature<4> curvature4(const Metric4Field& gt, double t, const Vec3& x,
                               const DerivativeConfig& cfg = {}) {
  MetricJets<4> J;
  J.g = gt.value(t, x);
  auto coord = [&](int mu) { return mu == 0 ? t : x[mu - 1]; };
  auto at = [&](int mu, double s, int nu, double s2) {
    double tt = t;
    Vec3 xx = x;
    if (mu == 0) tt += s; else xx[mu - 1] += s;
    if (nu >= 0) {
      if (nu == 0) tt += s2; else xx[nu - 1] += s2;
    }
    return gt.value(tt, xx);
  };

  if (gt.d1) {
    for (int mu = 0; mu < 4; ++mu) J.dg[mu] = gt.d1(t, x, mu);
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = mu; nu < 4; ++nu) {
        const double h = cfg.step1(coord(mu), gt.noise);
        double tp = t, tm = t;
        Vec3 xp = x, xm = x;
        if (mu == 0) { tp += h; tm -= h; } else { xp[mu - 1] += h; xm[mu - 1] -= h; }
        Mat4 dd = scale(1.0 / (2.0 * h), sub<4>(gt.d1(tp, xp, nu), gt.d1(tm, xm, nu)));
        J.ddg[mu][nu] = dd;
        if (nu != mu) J.ddg[nu][mu] = dd;
      }
    return curvature_from_jets<4>(J);
  }

  // fourth-order first derivatives, step ~ noise^{1/5}
  for (int mu = 0; mu < 4; ++mu) {
    const double h = std::max(std::abs(coord(mu)), 1.0) * std::pow(gt.noise, 0.2);
    Mat4 f1 = sub<4>(at(mu, h, -1, 0), at(mu, -h, -1, 0));
    Mat4 f2 = sub<4>(at(mu, 2.0 * h, -1, 0), at(mu, -2.0 * h, -1, 0));
    J.dg[mu] = scale(1.0 / (12.0 * h), sub<4>(scale(8.0, f1), f2));
  }
  // fourth-order second derivatives, step ~ noise^{1/6}
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = mu; nu < 4; ++nu) {
      const double hm = std::max(std::abs(coord(mu)), 1.0) * std::pow(gt.noise, 1.0 / 6.0);
      Mat4 dd;
      if (mu == nu) {
        Mat4 s1 = add<4>(at(mu, hm, -1, 0), at(mu, -hm, -1, 0));
        Mat4 s2 = add<4>(at(mu, 2.0 * hm, -1, 0), at(mu, -2.0 * hm, -1, 0));
        // (-f(2h) + 16 f(h) - 30 f(0) + 16 f(-h) - f(-2h)) / (12 h^2)
        dd = scale(1.0 / (12.0 * hm * hm),
                   sub<4>(sub<4>(scale(16.0, s1), s2), scale(30.0, J.g)));
      } else {
        const double hn = std::max(std::abs(coord(nu)), 1.0) * std::pow(gt.noise, 1.0 / 6.0);
        // nested fourth-order first-derivative operators
        auto dnu_at = [&](double sm) {
          Mat4 f1 = sub<4>(at(mu, sm, nu, hn), at(mu, sm, nu, -hn));
          Mat4 f2 = sub<4>(at(mu, sm, nu, 2.0 * hn), at(mu, sm, nu, -2.0 * hn));
          return scale(1.0 / (12.0 * hn), sub<4>(scale(8.0, f1), f2));
        };
        Mat4 g1 = sub<4>(dnu_at(hm), dnu_at(-hm));
        Mat4 g2 = sub<4>(dnu_at(2.0 * hm), dnu_at(-2.0 * hm));
        dd = scale(1.0 / (12.0 * hm), sub<4>(scale(8.0, g1), g2));
      }
      J.ddg[mu][nu] = dd;
      if (nu != mu) J.ddg[nu][mu] = dd;
    }
  return curvature_from_jets<4>(J);
}

// ---------------------------------------------------------------------------
// constraint densities
// ---------------------------------------------------------------------------

struct ConstraintSample {
  double T00 = 0.0;
  Vec3 T0i{};          // coordinate covector components
  double T0i_norm = 0.0;  // |T0i|_g
  double dec_margin = 0.0;  // T00 - |T0i|_g
  double mc_margin = 0.0;   // sqrt(3 Lambda) - tr_g K
  double trK = 0.0;
};

namespace detail {

inline double trace_g(const Mat3& ginv, const Mat3& t) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += ginv[i][j] * t[i][j];
  return s;
}

inline double norm2_g(const Mat3& ginv, const Mat3& t) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          s += ginv[i][k] * ginv[j][l] * t[i][j] * t[k][l];
  return s;
}

// covector norm |w|_g = sqrt(g^{ij} w_i w_j)
inline double conorm_g(const Mat3& ginv, const Vec3& w) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += ginv[i][j] * w[i] * w[j];
  return std::sqrt(std::max(0.0, s));
}

// divergence del^j pi_{ij} of a (not necessarily symmetric) 2-tensor over the
// SECOND index: g^{jk} (d_k pi_{ij} - Gamma^m_{ki} pi_{mj} - Gamma^m_{kj} pi_{im})
inline Vec3 divergence_second(const Mat3& ginv, const Arr3<3>& gamma, const Mat3& pi,
                              const std::array<Mat3, 3>& dpi) {
  Vec3 out{};
  for (int i = 0; i < 3; ++i) {
    double s = 0.0;
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        double cov = dpi[k][i][j];
        for (int m = 0; m < 3; ++m)
          cov -= gamma[m][k][i] * pi[m][j] + gamma[m][k][j] * pi[i][m];
        s += ginv[j][k] * cov;
      }
    out[i] = s;
  }
  return out;
}

}  // namespace detail

// Gauss/Codazzi constraint densities:
//   T00 = (R + (tr K)^2 - |K|^2 - 2 Lambda) / 2,   T0i = del^j (K_ij - g_ij tr K)
inline ConstraintSample constraints(const MetricField3& g, const SymTensorField3& K,
                                    double Lambda, const Vec3& x,
                                    const DerivativeConfig& cfg = {}) {
  if (!(Lambda > 0.0)) throw parameter_error("constraints: Lambda must be positive");
  const Curvature<3> cur = curvature3(g, x, cfg);
  const Mat3 g0 = g.value(x);
  const Mat3& gi = cur.ginv;
  const Mat3 K0 = K.value(x);
  std::array<Mat3, 3> dK, dg;
  for (int k = 0; k < 3; ++k) {
    dK[k] = K.deriv(x, k, cfg);
    dg[k] = g.deriv(x, k, cfg);
  }
  const double trK = detail::trace_g(gi, K0);
  const double K2 = detail::norm2_g(gi, K0);

  ConstraintSample out;
  out.trK = trK;
  out.T00 = 0.5 * (cur.scalar + trK * trK - K2 - 2.0 * Lambda);

  // pi = K - g trK and its partials
  Mat3 pi = sub<3>(K0, scale(trK, g0));
  std::array<Mat3, 3> dpi;
  for (int k = 0; k < 3; ++k) {
    // d_k trK = -tr(g^-1 dg_k g^-1 K) + tr(g^-1 dK_k)
    double dtr = detail::trace_g(gi, dK[k]);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c)
          for (int d = 0; d < 3; ++d)
            dtr -= gi[a][b] * dg[k][b][c] * gi[c][d] * K0[d][a];
    dpi[k] = sub<3>(dK[k], add<3>(scale(trK, dg[k]), scale(dtr, g0)));
  }
  out.T0i = detail::divergence_second(gi, cur.gamma, pi, dpi);
  out.T0i_norm = detail::conorm_g(gi, out.T0i);
  out.dec_margin = out.T00 - out.T0i_norm;
  out.mc_margin = std::sqrt(3.0 * Lambda) - trK;
  return out;
}

// Same densities evaluated through the momentum tensor h = K - sqrt(Lambda/3) g.
// Algebraically identical; numerically cancellation-free when h is small:
//   T00 = (R + (4/lambda) tr h + (tr h)^2 - |h|^2) / 2,  T0i = del^j(h_ij - g_ij tr h)
inline ConstraintSample constraints_from_h(const MetricField3& g, const SymTensorField3& h,
                                           double Lambda, const Vec3& x,
                                           const DerivativeConfig& cfg = {}) {
  if (!(Lambda > 0.0)) throw parameter_error("constraints: Lambda must be positive");
  const double lambda = std::sqrt(3.0 / Lambda);
  const Curvature<3> cur = curvature3(g, x, cfg);
  const Mat3 g0 = g.value(x);
  const Mat3& gi = cur.ginv;
  const Mat3 h0 = h.value(x);
  std::array<Mat3, 3> dh, dg;
  for (int k = 0; k < 3; ++k) {
    dh[k] = h.deriv(x, k, cfg);
    dg[k] = g.deriv(x, k, cfg);
  }
  const double trh = detail::trace_g(gi, h0);
  const double h2 = detail::norm2_g(gi, h0);

  ConstraintSample out;
  out.trK = trh + 3.0 / lambda;
  out.T00 = 0.5 * (cur.scalar + (4.0 / lambda) * trh + trh * trh - h2);

  Mat3 pi = sub<3>(h0, scale(trh, g0));
  std::array<Mat3, 3> dpi;
  for (int k = 0; k < 3; ++k) {
    double dtr = detail::trace_g(gi, dh[k]);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c)
          for (int d = 0; d < 3; ++d)
            dtr -= gi[a][b] * dg[k][b][c] * gi[c][d] * h0[d][a];
    dpi[k] = sub<3>(dh[k], add<3>(scale(trh, dg[k]), scale(dtr, g0)));
  }
  out.T0i = detail::divergence_second(gi, cur.gamma, pi, dpi);
  out.T0i_norm = detail::conorm_g(gi, out.T0i);
  out.dec_margin = out.T00 - out.T0i_norm;
  out.mc_margin = std::sqrt(3.0 * Lambda) - out.trK;
  return out;
}

// ---------------------------------------------------------------------------
// momentum tensor h
// ---------------------------------------------------------------------------

struct MomentumVariant {
  enum Kind { Planar, Hyperbolic } kind = Planar;
  double T = 0.0;  // slice time, hyperbolic case only

  static MomentumVariant planar() { return {Planar, 0.0}; }
  static MomentumVariant hyperbolic(double T) { return {Hyperbolic, T}; }
};

// h = K - sqrt(Lambda/3) g (planar) or h = K - coth(T/lambda)/lambda g (hyperbolic).
inline Mat3 momentum_tensor_h(const MetricField3& g, const SymTensorField3& K, double Lambda,
                              const Vec3& x, const MomentumVariant& variant = {}) {
  if (!(Lambda > 0.0)) throw parameter_error("momentum_tensor_h: Lambda must be positive");
  const double lambda = std::sqrt(3.0 / Lambda);
  double factor;
  if (variant.kind == MomentumVariant::Planar) {
    factor = 1.0 / lambda;
  } else {
    if (variant.T == 0.0)
      throw singular_error("momentum_tensor_h: hyperbolic slice T = 0 (coth diverges)");
    factor = 1.0 / (lambda * std::tanh(variant.T / lambda));
  }
  return sub<3>(K.value(x), scale(factor, g.value(x)));
}

// ---------------------------------------------------------------------------
// generalized densities (mu, omega, chi)
// ---------------------------------------------------------------------------

struct GeneralizedDensities {
  double mu = 0.0;
  Vec3 omega{};
  Vec3 chi{};
  double gdec_margin = 0.0;  // mu - max(|omega|, |omega + chi|)
};

inline GeneralizedDensities generalized_densities(const MetricField3& gbar,
                                                  const SymTensorField3& p, const Vec3& x,
                                                  const DerivativeConfig& cfg = {}) {
  const Curvature<3> cur = curvature3(gbar, x, cfg);
  const Mat3& gi = cur.ginv;
  const Mat3 p0 = p.full(x);
  std::array<Mat3, 3> dp, dg;
  for (int k = 0; k < 3; ++k) {
    dp[k] = p.deriv_full(x, k, cfg);
    dg[k] = gbar.deriv(x, k, cfg);
  }
  const double trp = detail::trace_g(gi, p0);
  const double p2 = detail::norm2_g(gi, p0);

  GeneralizedDensities out;
  out.mu = 0.5 * (cur.scalar + trp * trp - p2);

  // omega_j = del^i p_{ji} - del_j tr p   (divergence over the second index)
  Vec3 divp = detail::divergence_second(gi, cur.gamma, p0, dp);
  for (int j = 0; j < 3; ++j) {
    double dtr = detail::trace_g(gi, dp[j]);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c)
          for (int d = 0; d < 3; ++d)
            dtr -= gi[a][b] * dg[j][b][c] * gi[c][d] * p0[d][a];
    out.omega[j] = divp[j] - dtr;
  }

  // chi_j = 2 del^i (p_ij - p_ji); identically zero for symmetric p
  if (p.antisym) {
    Mat3 q{};
    std::array<Mat3, 3> dq;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) q[i][j] = p0[i][j] - p0[j][i];
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) dq[k][i][j] = dp[k][i][j] - dp[k][j][i];
    // divergence over the FIRST index: del^i q_ij = g^{ik} cov_k q_{ij}
    Vec3 divq{};
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) {
          double cov = dq[k][i][j];
          for (int m = 0; m < 3; ++m)
            cov -= cur.gamma[m][k][i] * q[m][j] + cur.gamma[m][k][j] * q[i][m];
          s += gi[i][k] * cov;
        }
      divq[j] = s;
    }
    out.chi = {2.0 * divq[0], 2.0 * divq[1], 2.0 * divq[2]};
  }
  Vec3 wc = {out.omega[0] + out.chi[0], out.omega[1] + out.chi[1], out.omega[2] + out.chi[2]};
  out.gdec_margin = out.mu - std::max(detail::conorm_g(gi, out.omega), detail::conorm_g(gi, wc));
  return out;
}

// ---------------------------------------------------------------------------
// slice geometry
// ---------------------------------------------------------------------------

struct SliceGeometry {
  Mat3 g;
  Mat3 K;       // sign fixed so planar de Sitter slices give K = +g/lambda
  Mat3 h;       // K - sqrt(Lambda/3) g, filled by slice_momentum only
  double lapse = 1.0;
  Vec3 shift{};  // covariant shift N_i
};

namespace detail {

struct SpatialPieces {
  Mat3 g;
  Mat3 ginv;
  Arr3<3> gamma;
  Vec3 Ni;
  double N = 1.0;
  Mat3 symDN;  // D_i N_j + D_j N_i
};

inline SpatialPieces spatial_pieces(const Metric4Field& gt, double t, const Vec3& x,
                                    const DerivativeConfig& cfg) {
  const Mat4 g4 = gt.value(t, x);
  SpatialPieces sp;
  for (int i = 0; i < 3; ++i) {
    sp.Ni[i] = g4[0][i + 1];
    for (int j = 0; j < 3; ++j) sp.g[i][j] = g4[i + 1][j + 1];
  }
  if (!is_positive_definite(sp.g))
    throw singular_error("slice_geometry: spatial block not positive definite (signature)");
  sp.ginv = inv3(sp.g);
  const Vec3 Nup = mat_vec(sp.ginv, sp.Ni);
  const double N2 = dot(Nup, sp.Ni) - g4[0][0];
  if (!(N2 > 0.0))
    throw singular_error("slice_geometry: t-level set not spacelike (signature)");
  sp.N = std::sqrt(N2);

  std::array<Mat4, 3> d4;
  for (int k = 0; k < 3; ++k) d4[k] = gt.deriv(t, x, k + 1, cfg);
  Arr3<3> dg;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) dg[k][i][j] = d4[k][i + 1][j + 1];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        double s = 0.0;
        for (int m = 0; m < 3; ++m)
          s += sp.ginv[i][m] * (dg[j][m][k] + dg[k][m][j] - dg[m][j][k]);
        sp.gamma[i][j][k] = 0.5 * s;
      }
  Mat3 dN;  // dN[i][j] = d_i N_j
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) dN[i][j] = d4[i][0][j + 1];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double cov_ij = dN[i][j], cov_ji = dN[j][i];
      for (int m = 0; m < 3; ++m) {
        cov_ij -= sp.gamma[m][i][j] * sp.Ni[m];
        cov_ji -= sp.gamma[m][j][i] * sp.Ni[m];
      }
      sp.symDN[i][j] = cov_ij + cov_ji;
    }
  return sp;
}

}  // namespace detail

// (g, K, N, N_i) of the t-slice: K_ij = (d_t g_ij - D_i N_j - D_j N_i) / (2N),
// with respect to the future-pointing unit normal.
inline SliceGeometry slice_geometry(const Metric4Field& gt, double t, const Vec3& x,
                                    const DerivativeConfig& cfg = {}) {
  auto sp = detail::spatial_pieces(gt, t, x, cfg);
  const Mat4 dtg4 = gt.deriv(t, x, 0, cfg);
  SliceGeometry out;
  out.g = sp.g;
  out.lapse = sp.N;
  out.shift = sp.Ni;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      out.K[i][j] = (dtg4[i + 1][j + 1] - sp.symDN[i][j]) / (2.0 * sp.N);
  out.h = out.K;  // caller-facing h only meaningful from slice_momentum
  return out;
}

// Slice geometry plus the momentum tensor h = K - g/lambda. When the field
// carries an exact planar-de-Sitter background split (background must be
// -dt^2 + A(t)^2 * (flat spatial metric), A = e^{t/lambda}), h is assembled
// from the deviation only, with no large-background cancellation.
inline SliceGeometry slice_momentum(const Metric4Field& gt, double t, const Vec3& x,
                                    double lambda, const DerivativeConfig& cfg = {}) {
  if (!gt.has_split()) {
    SliceGeometry out = slice_geometry(gt, t, x, cfg);
    out.h = sub<3>(out.K, scale(1.0 / lambda, out.g));
    return out;
  }
  auto sp = detail::spatial_pieces(gt, t, x, cfg);
  const Mat4 G = gt.background(t, x);
  const Mat4 a0 = gt.deviation(t, x);
  // FD time derivative of the (small) deviation only
  const double ht = DerivativeConfig{}.step1(t, gt.noise);
  const Mat4 dta = scale(1.0 / (2.0 * ht), sub<4>(gt.deviation(t + ht, x), gt.deviation(t - ht, x)));

  const Vec3 Nup = mat_vec(sp.ginv, sp.Ni);
  const double one_minus_N = (a0[0][0] - dot(Nup, sp.Ni)) / (1.0 + sp.N);

  SliceGeometry out;
  out.g = sp.g;
  out.lapse = sp.N;
  out.shift = sp.Ni;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double Gij = G[i + 1][j + 1];
      const double num = (2.0 / lambda) * one_minus_N * Gij -
                         (2.0 * sp.N / lambda) * a0[i + 1][j + 1] + dta[i + 1][j + 1] -
                         sp.symDN[i][j];
      out.h[i][j] = num / (2.0 * sp.N);
      out.K[i][j] = out.h[i][j] + out.g[i][j] / lambda;
    }
  return out;
}

// ---------------------------------------------------------------------------
// prescribed-mean-curvature conformal deformation
// ---------------------------------------------------------------------------

struct DeformResult {
  double F = 0.0;      // conformal exponent at (t, x)
  Mat3 g_deformed{};   // e^{2F} g(t, x)
  double theta = 0.0;  // target mean curvature Theta(t, x)
  double trK_check = 0.0;  // tr K of the deformed slice, recomputed numerically
};

// F(t,x) = (1/3) int_0^t (Theta - tr_g k) a ds with k_ij = d_s g_ij / (2a);
// the deformed metric e^{2F} g has t-slice mean curvature Theta.
inline DeformResult mean_curvature_deform(
    const std::function<double(double, const Vec3&)>& lapse,
    const std::function<Mat3(double, const Vec3&)>& g,
    const std::function<double(double, const Vec3&)>& Theta, double t, const Vec3& x,
    double quad_tol = 1e-12, const DerivativeConfig& cfg = {}) {
  auto tr_gk = [&](double s) {
    // tr_g k = g^{ij} d_s g_ij / (2a)
    const double hs = cfg.step1(s, kMachineEps);
    Mat3 dg = scale(1.0 / (2.0 * hs), sub<3>(g(s + hs, x), g(s - hs, x)));
    Mat3 gi = inv3(g(s, x));
    double tr = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) tr += gi[i][j] * dg[i][j];
    return tr / (2.0 * lapse(s, x));
  };
  auto integrand = [&](double s) { return (Theta(s, x) - tr_gk(s)) * lapse(s, x); };

  auto F_at = [&](double tt, const Vec3& xx) {
    auto integ = [&](double s) {
      const double hs = cfg.step1(s, kMachineEps);
      Mat3 dg = scale(1.0 / (2.0 * hs), sub<3>(g(s + hs, xx), g(s - hs, xx)));
      Mat3 gi = inv3(g(s, xx));
      double tr = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) tr += gi[i][j] * dg[i][j];
      tr /= 2.0 * lapse(s, xx);
      return (Theta(s, xx) - tr) * lapse(s, xx);
    };
    return integrate_adaptive(integ, 0.0, tt, quad_tol) / 3.0;
  };

  DeformResult out;
  out.F = integrate_adaptive(integrand, 0.0, t, quad_tol) / 3.0;
  out.g_deformed = scale(std::exp(2.0 * out.F), g(t, x));
  out.theta = Theta(t, x);

  // Recompute tr K of the deformed slice through the generic 4-metric path.
  Metric4Field gl;
  gl.eval = [&, F_at](double tt, const Vec3& xx) {
    const double a = lapse(tt, xx);
    const double e2F = std::exp(2.0 * F_at(tt, xx));
    Mat3 gs = scale(e2F, g(tt, xx));
    Mat4 g4{};
    g4[0][0] = -a * a;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) g4[i + 1][j + 1] = gs[i][j];
    return g4;
  };
  gl.noise = std::max(10.0 * quad_tol, kMachineEps);
  SliceGeometry sg = slice_geometry(gl, t, x);
  Mat3 gi = inv3(sg.g);
  double tr = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) tr += gi[i][j] * sg.K[i][j];
  out.trK_check = tr;
  return out;
}

// ---------------------------------------------------------------------------
// orthonormal frames
// ---------------------------------------------------------------------------

// g-orthonormal frame from the coordinate basis by Gram-Schmidt; column i of
// the result is the frame vector e_i (so tensor components convert via
// T(e_i, e_j) = E^a_i E^b_j T_ab).
inline Mat3 orthonormal_frame(const Mat3& g) {
  Mat3 E{};
  Vec3 e[3];
  for (int i = 0; i < 3; ++i) {
    Vec3 v{};
    v[i] = 1.0;
    for (int j = 0; j < i; ++j) {
      double proj = 0.0;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) proj += g[a][b] * v[a] * e[j][b];
      v = v - proj * e[j];
    }
    double nn = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) nn += g[a][b] * v[a] * v[b];
    if (!(nn > 0.0)) throw singular_error("orthonormal_frame: metric not positive definite");
    e[i] = (1.0 / std::sqrt(nn)) * v;
  }
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < 3; ++i) E[a][i] = e[i][a];
  return E;
}

// ---------------------------------------------------------------------------
// coordinate-sphere sections: mean curvature and K-trace
// ---------------------------------------------------------------------------

struct SphereSection {
  double H = 0.0;         // mean curvature wrt the outward unit normal
  double trK_sigma = 0.0;  // (g^{ij} - n^i n^j) K_ij
  Vec3 normal_cov{};
};

namespace detail {

// level function F whose 0-set is the sphere: Cartesian |x-c| = r, polar x0 = r.
inline Vec3 level_gradient(CoordSystem cs, const Vec3& center, const Vec3& x) {
  if (cs == CoordSystem::PolarSpherical) return {1.0, 0.0, 0.0};
  Vec3 d = x - center;
  const double rr = norm(d);
  if (!(rr > 0.0)) throw domain_error("sphere section: point coincides with center");
  return (1.0 / rr) * d;
}

}  // namespace detail

// H = g^{ij} (d_i n_j - Gamma^k_{ij} n_k) for the outward unit conormal
// n_j = d_j F / |dF|_g of the coordinate sphere through x.
inline SphereSection sphere_section(const MetricField3& g, const SymTensorField3& K,
                                    const Vec3& center, const Vec3& x,
                                    const DerivativeConfig& cfg = {}) {
  auto n_cov = [&](const Vec3& y) {
    const Vec3 dF = detail::level_gradient(g.coords, center, y);
    const Mat3 gi = inv3(g.eval(y));
    double nn = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) nn += gi[i][j] * dF[i] * dF[j];
    return (1.0 / std::sqrt(nn)) * dF;
  };
  const Mat3 g0 = g.value(x);
  const Mat3 gi = inv3(g0);
  const Vec3 n0 = n_cov(x);

  // Christoffels of g at x
  Arr3<3> gamma;
  std::array<Mat3, 3> dg;
  for (int k = 0; k < 3; ++k) dg[k] = g.deriv(x, k, cfg);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        double s = 0.0;
        for (int m = 0; m < 3; ++m)
          s += gi[i][m] * (dg[j][m][k] + dg[k][m][j] - dg[m][j][k]);
        gamma[i][j][k] = 0.5 * s;
      }

  Mat3 dn;  // dn[i][j] = d_i n_j
  for (int i = 0; i < 3; ++i) {
    const double h = cfg.step1(x[i], g.noise);
    Vec3 xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const Vec3 np = n_cov(xp), nm = n_cov(xm);
    for (int j = 0; j < 3; ++j) dn[i][j] = (np[j] - nm[j]) / (2.0 * h);
  }

  SphereSection out;
  out.normal_cov = n0;
  double H = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double cov = dn[i][j];
      for (int k = 0; k < 3; ++k) cov -= gamma[k][i][j] * n0[k];
      H += gi[i][j] * cov;
    }
  out.H = H;

  const Vec3 nup = mat_vec(gi, n0);
  const Mat3 K0 = K.value(x);
  double tr = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) tr += (gi[i][j] - nup[i] * nup[j]) * K0[i][j];
  out.trK_sigma = tr;
  return out;
}

}  // namespace dsc
