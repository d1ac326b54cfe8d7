#pragma once

#include <functional>
#include <utility>

#include "dscharge/derivative.hpp"
#include "dscharge/linalg.hpp"

namespace dsc {

enum class CoordSystem {
  Cartesian,       // (x1, x2, x3)
  PolarSpherical,  // (r, theta, psi) or (R, theta, psi)
};

namespace detail {

template <class Eval>
Mat3 fd1_mat3(const Eval& f, const Vec3& x, int k, double h, bool richardson) {
  auto central = [&](double hh) {
    Vec3 xp = x, xm = x;
    xp[k] += hh;
    xm[k] -= hh;
    return scale(1.0 / (2.0 * hh), sub<3>(f(xp), f(xm)));
  };
  if (!richardson) return central(h);
  return sub<3>(scale(4.0 / 3.0, central(0.5 * h)), scale(1.0 / 3.0, central(h)));
}

template <class Eval>
Mat3 fd2_mat3(const Eval& f, const Vec3& x, int k, int l, double hk, double hl) {
  if (k == l) {
    Vec3 xp = x, xm = x;
    xp[k] += hk;
    xm[k] -= hk;
    Mat3 s = add<3>(f(xp), f(xm));
    return scale(1.0 / (hk * hk), sub<3>(s, scale(2.0, f(x))));
  }
  Vec3 xpp = x, xpm = x, xmp = x, xmm = x;
  xpp[k] += hk; xpp[l] += hl;
  xpm[k] += hk; xpm[l] -= hl;
  xmp[k] -= hk; xmp[l] += hl;
  xmm[k] -= hk; xmm[l] -= hl;
  Mat3 num = sub<3>(add<3>(f(xpp), f(xmm)), add<3>(f(xpm), f(xmp)));
  return scale(1.0 / (4.0 * hk * hl), num);
}

}  // namespace detail

// Spatial metric field g_ij(x). Symmetric positive definite at every queried
// point; evaluation checks definiteness and fails eagerly on degeneracy.
// Analytic derivative callbacks, when registered, are the primary path.
struct MetricField3 {
  std::function<Mat3(const Vec3&)> eval;
  std::function<Mat3(const Vec3&, int)> d1;       // optional: \partial_k g
  std::function<Mat3(const Vec3&, int, int)> d2;  // optional: \partial_k\partial_l g
  CoordSystem coords = CoordSystem::Cartesian;
  double noise = kMachineEps;
  bool check_positive_definite = true;

  Mat3 value(const Vec3& x) const {
    Mat3 g = eval(x);
    if (check_positive_definite && !is_positive_definite(g))
      throw singular_error("MetricField3: metric not positive definite at point");
    return g;
  }

  Mat3 deriv(const Vec3& x, int k, const DerivativeConfig& cfg = {}) const {
    if (cfg.mode != DerivMode::FiniteDifference && d1) return d1(x, k);
    if (cfg.mode == DerivMode::Analytic)
      throw parameter_error("MetricField3: analytic derivative requested but not registered");
    return detail::fd1_mat3(eval, x, k, cfg.step1(x[k], noise), cfg.richardson);
  }

  Mat3 deriv2(const Vec3& x, int k, int l, const DerivativeConfig& cfg = {}) const {
    if (cfg.mode != DerivMode::FiniteDifference && d2) return d2(x, k, l);
    if (cfg.mode == DerivMode::Analytic)
      throw parameter_error("MetricField3: analytic second derivative requested but not registered");
    if (d1 && cfg.mode != DerivMode::FiniteDifference) {
      // differentiate the analytic first derivative once
      auto f = [&](const Vec3& y) { return d1(y, l); };
      return detail::fd1_mat3(f, x, k, cfg.step1(x[k], noise), cfg.richardson);
    }
    return detail::fd2_mat3(eval, x, k, l, cfg.step2(x[k], noise), cfg.step2(x[l], noise));
  }
};

// Symmetric 2-tensor field (K, h, hbar, p, ...). The antisymmetric part, when
// modeling the generalized tensor p, is stored separately.
struct SymTensorField3 {
  std::function<Mat3(const Vec3&)> eval;
  std::function<Mat3(const Vec3&, int)> d1;                // optional
  std::function<Mat3(const Vec3&)> antisym;                // optional: p^a (antisymmetric matrix)
  std::function<Mat3(const Vec3&, int)> antisym_d1;        // optional
  CoordSystem coords = CoordSystem::Cartesian;
  double noise = kMachineEps;

  Mat3 value(const Vec3& x) const { return eval(x); }

  // full (possibly non-symmetric) tensor p = sym + antisym
  Mat3 full(const Vec3& x) const {
    Mat3 p = eval(x);
    if (antisym) p = add<3>(p, antisym(x));
    return p;
  }

  Mat3 deriv(const Vec3& x, int k, const DerivativeConfig& cfg = {}) const {
    if (cfg.mode != DerivMode::FiniteDifference && d1) return d1(x, k);
    if (cfg.mode == DerivMode::Analytic)
      throw parameter_error("SymTensorField3: analytic derivative requested but not registered");
    return detail::fd1_mat3(eval, x, k, cfg.step1(x[k], noise), cfg.richardson);
  }

  Mat3 deriv_full(const Vec3& x, int k, const DerivativeConfig& cfg = {}) const {
    Mat3 d = deriv(x, k, cfg);
    if (!antisym) return d;
    if (cfg.mode != DerivMode::FiniteDifference && antisym_d1)
      return add<3>(d, antisym_d1(x, k));
    return add<3>(d, detail::fd1_mat3(antisym, x, k, cfg.step1(x[k], noise), cfg.richardson));
  }
};

// Spacetime metric gt_{mu nu}(t, x), signature (-,+,+,+) on its domain.
// An optional exact background/deviation split (eval == background + deviation)
// lets slice extraction run cancellation-free when the slice is a small
// perturbation of the background; dt_background must then be analytic.
struct Metric4Field {
  std::function<Mat4(double, const Vec3&)> eval;
  std::function<Mat4(double, const Vec3&, int)> d1;  // optional: mu = 0..3 (t, x1, x2, x3)
  std::function<Mat4(double, const Vec3&)> background;     // optional split
  std::function<Mat4(double, const Vec3&)> deviation;      //   "
  std::function<Mat4(double, const Vec3&)> dt_background;  //   " (analytic)
  CoordSystem spatial_coords = CoordSystem::Cartesian;
  double noise = kMachineEps;

  bool has_split() const {
    return static_cast<bool>(background) && static_cast<bool>(deviation) &&
           static_cast<bool>(dt_background);
  }

  Mat4 value(double t, const Vec3& x) const { return eval(t, x); }

  Mat4 deriv(double t, const Vec3& x, int mu, const DerivativeConfig& cfg = {}) const {
    if (cfg.mode != DerivMode::FiniteDifference && d1) return d1(t, x, mu);
    if (cfg.mode == DerivMode::Analytic)
      throw parameter_error("Metric4Field: analytic derivative requested but not registered");
    const double c = (mu == 0) ? t : x[mu - 1];
    const double h = cfg.step1(c, noise);
    auto at = [&](double dt, double dx) {
      Vec3 y = x;
      if (mu > 0) y[mu - 1] += dx;
      return eval(t + dt, y);
    };
    Mat4 gp = (mu == 0) ? at(h, 0.0) : at(0.0, h);
    Mat4 gm = (mu == 0) ? at(-h, 0.0) : at(0.0, -h);
    return scale(1.0 / (2.0 * h), sub<4>(gp, gm));
  }
};

}  // namespace dsc
