#pragma once

#include <cmath>
#include <string>

#include "dscharge/fields.hpp"

namespace dsc {

// The de Sitter coordinate charts: embeddings into R^{1,4}, domain
// predicates, closed-form metrics and slice data, and the planar <-> static
// transition maps. Lambda = 3 / lambda^2 throughout.
enum class ChartId { Global, PlanarUpper, PlanarLower, StaticInner, StaticOuter, Hyperbolic };

inline const char* to_string(ChartId c) {
  switch (c) {
    case ChartId::Global: return "global";
    case ChartId::PlanarUpper: return "planar-upper";
    case ChartId::PlanarLower: return "planar-lower";
    case ChartId::StaticInner: return "static-inner";
    case ChartId::StaticOuter: return "static-outer";
    case ChartId::Hyperbolic: return "hyperbolic";
  }
  return "?";
}

inline ChartId chart_from_string(const std::string& s) {
  if (s == "global") return ChartId::Global;
  if (s == "planar-upper" || s == "planar") return ChartId::PlanarUpper;
  if (s == "planar-lower") return ChartId::PlanarLower;
  if (s == "static-inner" || s == "static") return ChartId::StaticInner;
  if (s == "static-outer") return ChartId::StaticOuter;
  if (s == "hyperbolic") return ChartId::Hyperbolic;
  throw parameter_error("unknown chart name: " + s);
}

// coords: Global (t, r, theta, psi) with r in [0, pi];
//         Planar (t, x1, x2, x3);  Static (t, r, theta, psi);
//         Hyperbolic (T, R, theta, psi) with R >= 0.
struct ChartPoint {
  ChartId chart = ChartId::PlanarUpper;
  double lambda = 1.0;
  Vec4 coords{};
};

struct AmbientPoint {
  Vec5 X{};

  // |-(X0)^2 + sum Xi^2 - lambda^2|
  double hyperboloid_residual(double lambda) const {
    double s = -X[0] * X[0];
    for (int i = 1; i < 5; ++i) s += X[i] * X[i];
    return std::abs(s - lambda * lambda);
  }
};

// Reflection (X0, X4) -> (-X0, -X4) taking the upper-half charts to the
// lower-half ones; matches Eq-level lower-half planar coordinates directly.
inline AmbientPoint reflect_ambient(const AmbientPoint& p) {
  AmbientPoint q = p;
  q.X[0] = -q.X[0];
  q.X[4] = -q.X[4];
  return q;
}

namespace detail {

inline void check_angles(double theta, double psi) {
  if (theta < 0.0 || theta > kPi)
    throw domain_error("chart domain: theta outside [0, pi]");
  if (psi < 0.0 || psi >= 2.0 * kPi)
    throw domain_error("chart domain: psi outside [0, 2 pi)");
}

}  // namespace detail

inline void chart_domain_check(const ChartPoint& p) {
  const double lam = p.lambda;
  if (!(lam > 0.0)) throw parameter_error("chart: lambda must be positive");
  switch (p.chart) {
    case ChartId::Global:
      if (p.coords[1] < 0.0 || p.coords[1] > kPi)
        throw domain_error("global chart: r outside [0, pi]");
      detail::check_angles(p.coords[2], p.coords[3]);
      break;
    case ChartId::PlanarUpper:
    case ChartId::PlanarLower:
      break;  // all of R x R^3
    case ChartId::StaticInner:
      if (!(p.coords[1] > 0.0 && p.coords[1] < lam))
        throw domain_error("static-inner chart: requires 0 < r < lambda");
      detail::check_angles(p.coords[2], p.coords[3]);
      break;
    case ChartId::StaticOuter:
      if (!(p.coords[1] > lam))
        throw domain_error("static-outer chart: requires r > lambda");
      detail::check_angles(p.coords[2], p.coords[3]);
      break;
    case ChartId::Hyperbolic:
      if (p.coords[1] < 0.0) throw domain_error("hyperbolic chart: requires R >= 0");
      detail::check_angles(p.coords[2], p.coords[3]);
      break;
  }
}

inline AmbientPoint embed(const ChartPoint& p) {
  chart_domain_check(p);
  const double lam = p.lambda;
  AmbientPoint out;
  switch (p.chart) {
    case ChartId::Global: {
      const double t = p.coords[0], r = p.coords[1], th = p.coords[2], ps = p.coords[3];
      const double C = lam * std::cosh(t / lam);
      out.X[0] = lam * std::sinh(t / lam);
      out.X[1] = C * std::sin(r) * std::sin(th) * std::cos(ps);
      out.X[2] = C * std::sin(r) * std::sin(th) * std::sin(ps);
      out.X[3] = C * std::sin(r) * std::cos(th);
      out.X[4] = C * std::cos(r);
      break;
    }
    case ChartId::PlanarUpper:
    case ChartId::PlanarLower: {
      const double t = p.coords[0];
      const double E = std::exp(t / lam);
      double q = 0.0;
      for (int i = 1; i <= 3; ++i) q += (p.coords[i] / lam) * (p.coords[i] / lam);
      out.X[0] = lam * std::sinh(t / lam) + 0.5 * lam * q * E;
      for (int i = 1; i <= 3; ++i) out.X[i] = p.coords[i] * E;
      out.X[4] = -lam * std::cosh(t / lam) + 0.5 * lam * q * E;
      if (p.chart == ChartId::PlanarLower) out = reflect_ambient(out);
      break;
    }
    case ChartId::StaticInner: {
      const double t = p.coords[0], r = p.coords[1], th = p.coords[2], ps = p.coords[3];
      const double s = std::sqrt(lam * lam - r * r);
      out.X[0] = s * std::sinh(t / lam);
      out.X[1] = r * std::sin(th) * std::cos(ps);
      out.X[2] = r * std::sin(th) * std::sin(ps);
      out.X[3] = r * std::cos(th);
      out.X[4] = -s * std::cosh(t / lam);
      break;
    }
    case ChartId::StaticOuter: {
      const double t = p.coords[0], r = p.coords[1], th = p.coords[2], ps = p.coords[3];
      const double s = std::sqrt(r * r - lam * lam);
      out.X[0] = s * std::cosh(t / lam);
      out.X[1] = r * std::sin(th) * std::cos(ps);
      out.X[2] = r * std::sin(th) * std::sin(ps);
      out.X[3] = r * std::cos(th);
      out.X[4] = -s * std::sinh(t / lam);
      break;
    }
    case ChartId::Hyperbolic: {
      const double T = p.coords[0], R = p.coords[1], th = p.coords[2], ps = p.coords[3];
      const double S = lam * std::sinh(T / lam);
      out.X[0] = S * std::cosh(R / lam);
      out.X[1] = S * std::sinh(R / lam) * std::sin(th) * std::cos(ps);
      out.X[2] = S * std::sinh(R / lam) * std::sin(th) * std::sin(ps);
      out.X[3] = S * std::sinh(R / lam) * std::cos(th);
      out.X[4] = -lam * std::cosh(T / lam);
      break;
    }
  }
  return out;
}

// Closed-form de Sitter metric components in the chart's own coordinates.
inline Mat4 chart_metric(const ChartPoint& p) {
  chart_domain_check(p);
  const double lam = p.lambda;
  Mat4 g{};
  switch (p.chart) {
    case ChartId::Global: {
      const double C2 = lam * lam * std::pow(std::cosh(p.coords[0] / lam), 2);
      const double sr = std::sin(p.coords[1]), sth = std::sin(p.coords[2]);
      g[0][0] = -1.0;
      g[1][1] = C2;
      g[2][2] = C2 * sr * sr;
      g[3][3] = C2 * sr * sr * sth * sth;
      break;
    }
    case ChartId::PlanarUpper:
    case ChartId::PlanarLower: {
      const double E2 = std::exp(2.0 * p.coords[0] / lam);
      g[0][0] = -1.0;
      g[1][1] = g[2][2] = g[3][3] = E2;
      break;
    }
    case ChartId::StaticInner:
    case ChartId::StaticOuter: {
      const double r = p.coords[1];
      if (std::abs(r - lam) <= 1e-8 * lam)
        throw singular_error("static chart: cosmological horizon r = lambda");
      const double f = 1.0 - r * r / (lam * lam);
      const double sth = std::sin(p.coords[2]);
      g[0][0] = -f;
      g[1][1] = 1.0 / f;
      g[2][2] = r * r;
      g[3][3] = r * r * sth * sth;
      break;
    }
    case ChartId::Hyperbolic: {
      const double T = p.coords[0], R = p.coords[1];
      if (T == 0.0) throw singular_error("hyperbolic chart: T = 0 slice is singular");
      const double S2 = std::pow(std::sinh(T / lam), 2);
      const double F2 = lam * lam * std::pow(std::sinh(R / lam), 2);
      const double sth = std::sin(p.coords[2]);
      g[0][0] = -1.0;
      g[1][1] = S2;
      g[2][2] = S2 * F2;
      g[3][3] = S2 * F2 * sth * sth;
      break;
    }
  }
  return g;
}

// The chart metric as a Metric4Field with analytic first derivatives
// (spatial coordinates = chart coords 1..3).
inline Metric4Field chart_metric_field(ChartId chart, double lambda) {
  Metric4Field f;
  f.spatial_coords = (chart == ChartId::PlanarUpper || chart == ChartId::PlanarLower)
                         ? CoordSystem::Cartesian
                         : CoordSystem::PolarSpherical;
  f.eval = [chart, lambda](double t, const Vec3& x) {
    return chart_metric({chart, lambda, {t, x[0], x[1], x[2]}});
  };
  f.d1 = [chart, lambda](double t, const Vec3& x, int mu) {
    const double lam = lambda;
    Mat4 d{};
    switch (chart) {
      case ChartId::Global: {
        const double ch = std::cosh(t / lam), sh = std::sinh(t / lam);
        const double sr = std::sin(x[0]), cr = std::cos(x[0]);
        const double sth = std::sin(x[1]), cth = std::cos(x[1]);
        const double C2 = lam * lam * ch * ch;
        if (mu == 0) {
          const double dC2 = 2.0 * lam * ch * sh;
          d[1][1] = dC2;
          d[2][2] = dC2 * sr * sr;
          d[3][3] = dC2 * sr * sr * sth * sth;
        } else if (mu == 1) {
          d[2][2] = C2 * 2.0 * sr * cr;
          d[3][3] = C2 * 2.0 * sr * cr * sth * sth;
        } else if (mu == 2) {
          d[3][3] = C2 * sr * sr * 2.0 * sth * cth;
        }
        break;
      }
      case ChartId::PlanarUpper:
      case ChartId::PlanarLower: {
        if (mu == 0) {
          const double dE2 = (2.0 / lam) * std::exp(2.0 * t / lam);
          d[1][1] = d[2][2] = d[3][3] = dE2;
        }
        break;
      }
      case ChartId::StaticInner:
      case ChartId::StaticOuter: {
        const double r = x[0];
        const double fK = 1.0 - r * r / (lam * lam);
        const double df = -2.0 * r / (lam * lam);
        const double sth = std::sin(x[1]), cth = std::cos(x[1]);
        if (mu == 1) {
          d[0][0] = -df;
          d[1][1] = -df / (fK * fK);
          d[2][2] = 2.0 * r;
          d[3][3] = 2.0 * r * sth * sth;
        } else if (mu == 2) {
          d[3][3] = r * r * 2.0 * sth * cth;
        }
        break;
      }
      case ChartId::Hyperbolic: {
        const double T = t, R = x[0];
        const double S = std::sinh(T / lam), dS2 = 2.0 * S * std::cosh(T / lam) / lam;
        const double F = lam * std::sinh(R / lam);
        const double F2 = F * F, dF2 = 2.0 * F * std::cosh(R / lam);
        const double sth = std::sin(x[1]), cth = std::cos(x[1]);
        if (mu == 0) {
          d[1][1] = dS2;
          d[2][2] = dS2 * F2;
          d[3][3] = dS2 * F2 * sth * sth;
        } else if (mu == 1) {
          d[2][2] = S * S * dF2;
          d[3][3] = S * S * dF2 * sth * sth;
        } else if (mu == 2) {
          d[3][3] = S * S * F2 * 2.0 * sth * cth;
        }
        break;
      }
    }
    return d;
  };
  return f;
}

// ---------------------------------------------------------------------------
// slice data (g, K) of constant-time slices
// ---------------------------------------------------------------------------

struct SliceData {
  MetricField3 g;
  SymTensorField3 K;
};

// Constant-time slice of a chart: spatial metric plus extrinsic curvature
// with the convention K = +g/lambda on planar slices. Static-outer t-level
// sets are timelike and have no slice data.
inline SliceData slice_data(ChartId chart, double time, double lambda) {
  if (!(lambda > 0.0)) throw parameter_error("slice_data: lambda must be positive");
  SliceData out;
  const double lam = lambda;
  switch (chart) {
    case ChartId::PlanarUpper:
    case ChartId::PlanarLower: {
      const double E2 = std::exp(2.0 * time / lam);
      out.g.coords = CoordSystem::Cartesian;
      out.g.eval = [E2](const Vec3&) { return scale(E2, identity<3>()); };
      out.g.d1 = [](const Vec3&, int) { return zero_mat<3>(); };
      out.g.d2 = [](const Vec3&, int, int) { return zero_mat<3>(); };
      out.K.coords = CoordSystem::Cartesian;
      out.K.eval = [E2, lam](const Vec3&) { return scale(E2 / lam, identity<3>()); };
      out.K.d1 = [](const Vec3&, int) { return zero_mat<3>(); };
      break;
    }
    case ChartId::Global: {
      const double C2 = lam * lam * std::pow(std::cosh(time / lam), 2);
      const double kfac = std::tanh(time / lam) / lam;
      auto gval = [C2](const Vec3& x) {
        const double sr = std::sin(x[0]), sth = std::sin(x[1]);
        Mat3 g{};
        g[0][0] = C2;
        g[1][1] = C2 * sr * sr;
        g[2][2] = C2 * sr * sr * sth * sth;
        return g;
      };
      auto gd1 = [C2](const Vec3& x, int k) {
        const double sr = std::sin(x[0]), cr = std::cos(x[0]);
        const double sth = std::sin(x[1]), cth = std::cos(x[1]);
        Mat3 d{};
        if (k == 0) {
          d[1][1] = C2 * 2.0 * sr * cr;
          d[2][2] = C2 * 2.0 * sr * cr * sth * sth;
        } else if (k == 1) {
          d[2][2] = C2 * sr * sr * 2.0 * sth * cth;
        }
        return d;
      };
      auto gd2 = [C2](const Vec3& x, int k, int l) {
        const double sr = std::sin(x[0]), cr = std::cos(x[0]);
        const double sth = std::sin(x[1]), cth = std::cos(x[1]);
        const double c2r = cr * cr - sr * sr, c2th = cth * cth - sth * sth;
        Mat3 d{};
        if (k > l) std::swap(k, l);
        if (k == 0 && l == 0) {
          d[1][1] = C2 * 2.0 * c2r;
          d[2][2] = C2 * 2.0 * c2r * sth * sth;
        } else if (k == 0 && l == 1) {
          d[2][2] = C2 * 2.0 * sr * cr * 2.0 * sth * cth;
        } else if (k == 1 && l == 1) {
          d[2][2] = C2 * sr * sr * 2.0 * c2th;
        }
        return d;
      };
      out.g.coords = CoordSystem::PolarSpherical;
      out.g.eval = gval;
      out.g.d1 = gd1;
      out.g.d2 = gd2;
      out.K.coords = CoordSystem::PolarSpherical;
      out.K.eval = [gval, kfac](const Vec3& x) { return scale(kfac, gval(x)); };
      out.K.d1 = [gd1, kfac](const Vec3& x, int k) { return scale(kfac, gd1(x, k)); };
      break;
    }
    case ChartId::StaticInner: {
      auto gval = [lam](const Vec3& x) {
        const double r = x[0];
        if (!(r > 0.0 && r < lam))
          throw domain_error("static-inner slice: requires 0 < r < lambda");
        const double fK = 1.0 - r * r / (lam * lam);
        const double sth = std::sin(x[1]);
        Mat3 g{};
        g[0][0] = 1.0 / fK;
        g[1][1] = r * r;
        g[2][2] = r * r * sth * sth;
        return g;
      };
      auto gd1 = [lam](const Vec3& x, int k) {
        const double r = x[0];
        const double fK = 1.0 - r * r / (lam * lam);
        const double sth = std::sin(x[1]), cth = std::cos(x[1]);
        Mat3 d{};
        if (k == 0) {
          d[0][0] = (2.0 * r / (lam * lam)) / (fK * fK);
          d[1][1] = 2.0 * r;
          d[2][2] = 2.0 * r * sth * sth;
        } else if (k == 1) {
          d[2][2] = r * r * 2.0 * sth * cth;
        }
        return d;
      };
      auto gd2 = [lam](const Vec3& x, int k, int l) {
        const double r = x[0];
        const double il2 = 1.0 / (lam * lam);
        const double fK = 1.0 - r * r * il2;
        const double sth = std::sin(x[1]), cth = std::cos(x[1]);
        const double c2th = cth * cth - sth * sth;
        Mat3 d{};
        if (k > l) std::swap(k, l);
        if (k == 0 && l == 0) {
          d[0][0] = 2.0 * il2 / (fK * fK) + 8.0 * r * r * il2 * il2 / (fK * fK * fK);
          d[1][1] = 2.0;
          d[2][2] = 2.0 * sth * sth;
        } else if (k == 0 && l == 1) {
          d[2][2] = 2.0 * r * 2.0 * sth * cth;
        } else if (k == 1 && l == 1) {
          d[2][2] = r * r * 2.0 * c2th;
        }
        return d;
      };
      out.g.coords = CoordSystem::PolarSpherical;
      out.g.eval = gval;
      out.g.d1 = gd1;
      out.g.d2 = gd2;
      out.K.coords = CoordSystem::PolarSpherical;
      out.K.eval = [](const Vec3&) { return zero_mat<3>(); };
      out.K.d1 = [](const Vec3&, int) { return zero_mat<3>(); };
      break;
    }
    case ChartId::StaticOuter:
      throw singular_error(
          "slice_data: static-outer t-level sets are timelike (r > lambda); no spacelike slice");
    case ChartId::Hyperbolic: {
      if (time == 0.0)
        throw singular_error("slice_data: hyperbolic T = 0 slice is singular");
      const double S2 = std::pow(std::sinh(time / lam), 2);
      const double kfac = 1.0 / (lam * std::tanh(time / lam));
      auto gval = [S2, lam](const Vec3& x) {
        const double F = lam * std::sinh(x[0] / lam);
        const double sth = std::sin(x[1]);
        Mat3 g{};
        g[0][0] = S2;
        g[1][1] = S2 * F * F;
        g[2][2] = S2 * F * F * sth * sth;
        return g;
      };
      auto gd1 = [S2, lam](const Vec3& x, int k) {
        const double F = lam * std::sinh(x[0] / lam);
        const double dF2 = 2.0 * F * std::cosh(x[0] / lam);
        const double sth = std::sin(x[1]), cth = std::cos(x[1]);
        Mat3 d{};
        if (k == 0) {
          d[1][1] = S2 * dF2;
          d[2][2] = S2 * dF2 * sth * sth;
        } else if (k == 1) {
          d[2][2] = S2 * F * F * 2.0 * sth * cth;
        }
        return d;
      };
      auto gd2 = [S2, lam](const Vec3& x, int k, int l) {
        const double sh = std::sinh(x[0] / lam), ch = std::cosh(x[0] / lam);
        const double F = lam * sh;
        const double dF2 = 2.0 * F * ch;
        const double ddF2 = 2.0 * ch * ch + 2.0 * sh * sh;  // d^2(F^2)/dR^2
        const double sth = std::sin(x[1]), cth = std::cos(x[1]);
        const double c2th = cth * cth - sth * sth;
        Mat3 d{};
        if (k > l) std::swap(k, l);
        if (k == 0 && l == 0) {
          d[1][1] = S2 * ddF2;
          d[2][2] = S2 * ddF2 * sth * sth;
        } else if (k == 0 && l == 1) {
          d[2][2] = S2 * dF2 * 2.0 * sth * cth;
        } else if (k == 1 && l == 1) {
          d[2][2] = S2 * F * F * 2.0 * c2th;
        }
        return d;
      };
      out.g.coords = CoordSystem::PolarSpherical;
      out.g.eval = gval;
      out.g.d1 = gd1;
      out.g.d2 = gd2;
      out.K.coords = CoordSystem::PolarSpherical;
      out.K.eval = [gval, kfac](const Vec3& x) { return scale(kfac, gval(x)); };
      out.K.d1 = [gd1, kfac](const Vec3& x, int k) { return scale(kfac, gd1(x, k)); };
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// planar <-> static transitions (upper half)
// ---------------------------------------------------------------------------

struct StaticCoords {
  double t_static;
  double r_static;
  enum Branch { Inner, Outer } branch;
};

// t_bar = t - (lambda/2) ln|1 - r^2 e^{2t/lambda}/lambda^2|, r_bar = r e^{t/lambda}.
// A guard band |r_bar - lambda| > 1e-8 lambda rejects near-horizon queries.
inline StaticCoords planar_to_static(double t, double r, double lambda) {
  if (!(lambda > 0.0)) throw parameter_error("planar_to_static: lambda must be positive");
  const double rbar = r * std::exp(t / lambda);
  if (std::abs(rbar - lambda) <= 1e-8 * lambda)
    throw singular_error("planar_to_static: cosmological horizon r e^{t/lambda} = lambda");
  const double w = (rbar / lambda) * (rbar / lambda);
  const double tbar = t - 0.5 * lambda * std::log(std::abs(1.0 - w));
  return {tbar, rbar, rbar < lambda ? StaticCoords::Inner : StaticCoords::Outer};
}

// closed-form inverse: t = t_bar + (lambda/2) ln|1 - r_bar^2/lambda^2|, r = r_bar e^{-t/lambda}
inline std::pair<double, double> static_to_planar(double tbar, double rbar, double lambda) {
  if (!(lambda > 0.0)) throw parameter_error("static_to_planar: lambda must be positive");
  if (std::abs(rbar - lambda) <= 1e-8 * lambda)
    throw singular_error("static_to_planar: cosmological horizon r = lambda");
  const double w = (rbar / lambda) * (rbar / lambda);
  const double t = tbar + 0.5 * lambda * std::log(std::abs(1.0 - w));
  return {t, rbar * std::exp(-t / lambda)};
}

}  // namespace dsc
