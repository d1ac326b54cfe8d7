#include <catch2/catch.hpp>
#include <cmath>
#include <random>

#include "dscharge/models.hpp"
#include "dscharge/tensor.hpp"

using namespace dsc;

namespace {

// covariant 3-tensor transform Cartesian -> planar polar components
Mat3 cart3_to_polar3(const Mat3& tc, const Vec3& x) {
  const double r = norm(x);
  const double th = std::acos(x[2] / r);
  const double ps = std::atan2(x[1], x[0]);
  const double s = std::sin(th), c = std::cos(th);
  const double sp = std::sin(ps), cp = std::cos(ps);
  Mat3 P;  // columns d x / d (r, theta, psi)
  P[0][0] = s * cp; P[0][1] = r * c * cp; P[0][2] = -r * s * sp;
  P[1][0] = s * sp; P[1][1] = r * c * sp; P[1][2] = r * s * cp;
  P[2][0] = c;      P[2][1] = -r * s;     P[2][2] = 0.0;
  return mul(transpose(P), mul(tc, P));
}

double max_ric_dev4(const Metric4Field& f, double Lambda, double t, const Vec3& x) {
  const auto cur = curvature4(f, t, x);
  const Mat4 g = f.value(t, x);
  double worst = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      worst = std::max(worst, std::abs(cur.ricci[i][j] - Lambda * g[i][j]));
  return worst;
}

}  // namespace

TEST_CASE("mcvittie: m = 0 is the planar de Sitter slice") {
  const double lam = 10.0, t = 0.7;
  const auto d = mcvittie_slice({0.0, lam, t});
  const double A2 = std::exp(2.0 * t / lam);
  const Vec3 x{1.0, -2.0, 0.5};
  CHECK(max_abs(sub<3>(d.g.value(x), scale(A2, identity<3>()))) < 1e-14);
  CHECK(max_abs(sub<3>(d.K.value(x), scale(A2 / lam, identity<3>()))) < 1e-15);
}

TEST_CASE("mcvittie: K = g/lambda exactly, verified against slice_geometry") {
  const double lam = 10.0;
  const McVittieParams p{1.0, lam, 0.0};
  const auto d = mcvittie_slice(p);
  const auto g4 = mcvittie_metric4(p);
  for (const Vec3& x : {Vec3{3.0, 0.0, 0.0}, Vec3{1.0, 1.0, -1.0}, Vec3{0.7, 0.2, 0.1}}) {
    CHECK(max_abs(sub<3>(d.K.value(x), scale(1.0 / lam, d.g.value(x)))) < 1e-14);
    // numeric K through the 4-metric (K_ij = d_t g_ij / (2N), zero shift)
    const auto sg = slice_geometry(g4, 0.0, x);
    CHECK(max_abs(sub<3>(sg.K, d.K.value(x))) / max_abs(d.K.value(x)) < 1e-7);
  }
}

TEST_CASE("mcvittie: 4-metric domain error inside the minimal sphere") {
  const McVittieParams p{1.0, 10.0, 0.0};
  const auto g4 = mcvittie_metric4(p);
  CHECK_THROWS_AS(g4.value(0.0, {0.3, 0.0, 0.0}), domain_error);
  CHECK_NOTHROW(g4.value(0.0, {0.6, 0.0, 0.0}));
  // slice fields stay regular on the double cover
  const auto d = mcvittie_slice(p);
  CHECK_NOTHROW(d.g.value({0.3, 0.0, 0.0}));
}

TEST_CASE("mcvittie: vacuum Einstein-Lambda equations, Ric = Lambda g") {
  const McVittieParams p{1.0, 10.0, 0.3};
  const auto g4 = mcvittie_metric4(p);
  const double Lam = 3.0 / (p.lambda * p.lambda);
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int it = 0; it < 10; ++it) {
    Vec3 x{2.0 + 10.0 * u(rng), 8.0 * u(rng) - 4.0, 8.0 * u(rng) - 4.0};
    CHECK(max_ric_dev4(g4, Lam, 0.2, x) < 1e-6);
  }
}

TEST_CASE("kerr-ds BL: a = 0 is Schwarzschild-de Sitter in static form") {
  const KerrDSParams p{1.0, 0.0, 10.0, 0.0, PsiRange::Standard};
  const double rb = 7.0, thb = 1.1;
  const Mat4 g = kerr_bl_metric_at(p, {0.0, rb, thb, 0.4});
  const double f = 1.0 - rb * rb / 100.0 - 2.0 * p.m / rb;
  CHECK(g[0][0] == Approx(-f).epsilon(1e-13));
  CHECK(g[1][1] == Approx(1.0 / f).epsilon(1e-13));
  CHECK(g[2][2] == Approx(rb * rb).epsilon(1e-13));
  CHECK(g[3][3] == Approx(rb * rb * std::sin(thb) * std::sin(thb)).epsilon(1e-13));
  CHECK(std::abs(g[0][3]) < 1e-15);
}

TEST_CASE("kerr-ds BL: vacuum Einstein-Lambda at random regular points") {
  const KerrDSParams p{1.0, 0.5, 10.0, 0.0, PsiRange::Standard};
  const auto g4 = kerr_bl_metric(p);
  const double Lam = 3.0 / 100.0;
  CHECK(max_ric_dev4(g4, Lam, 0.3, {20.0, kPi / 3.0, 0.7}) < 1e-6);
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int it = 0; it < 10; ++it) {
    const double rb = (it % 2 == 0) ? 3.0 + 5.0 * u(rng) : 12.0 + 30.0 * u(rng);
    Vec3 x{rb, 0.3 + 2.5 * u(rng), 2.0 * kPi * u(rng) * 0.9};
    CHECK(max_ric_dev4(g4, Lam, 0.5 * u(rng), x) < 1e-6);
  }
  CHECK_THROWS_AS(kerr_bl_metric_at(p, {0.0, 0.0, kPi / 2.0, 0.0}), singular_error);
}

TEST_CASE("kerr-ds hat map: closed form at the equator and roundtrips") {
  const KerrDSParams p{1.0, 0.5, 10.0, 0.0, PsiRange::Standard};
  {
    // a = 0: identity
    const KerrDSParams p0{1.0, 0.0, 10.0, 0.0, PsiRange::Standard};
    const auto [rh, thh] = kerr_hat_from_bl(p0, 7.0, 1.1);
    CHECK(rh == Approx(7.0).epsilon(1e-14));
    CHECK(thh == Approx(1.1).epsilon(1e-12));
  }
  {
    // theta = pi/2: r_hat^2 = (r_bar^2 + a^2)/xi
    const auto [rh, thh] = kerr_hat_from_bl(p, 20.0, kPi / 2.0);
    CHECK(rh == Approx(std::sqrt(400.25 / 1.0025)).epsilon(1e-14));
    CHECK(rh == Approx(19.98128).epsilon(1e-6));
    CHECK(thh == Approx(kPi / 2.0).epsilon(1e-12));
  }
  std::mt19937 rng(29);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int it = 0; it < 300; ++it) {
    const double rb = 2.0 + 200.0 * u(rng);
    const double thb = 0.05 + (kPi - 0.1) * u(rng);
    const auto [rh, thh] = kerr_hat_from_bl(p, rb, thb);
    const auto [rb2, thb2] = kerr_bl_from_hat(p, rh, thh);
    CHECK(std::abs(rb2 - rb) < 1e-10 * std::max(1.0, rb));
    CHECK(std::abs(thb2 - thb) < 1e-10);
  }
}

TEST_CASE("kerr-ds planar: m = 0 deviation vanishes identically") {
  const KerrDSParams p{0.0, 0.5, 10.0, 0.3, PsiRange::Standard};
  const auto g4 = kerr_planar_metric4(p);
  for (const Vec3& x : {Vec3{30.0, 5.0, 2.0}, Vec3{100.0, -40.0, 7.0}}) {
    CHECK(max_abs(g4.deviation(0.3, x)) < 1e-11);
  }
}

TEST_CASE("kerr-ds planar: decomposed evaluation equals the direct pullback") {
  const KerrDSParams p{1.0, 0.5, 10.0, 0.1, PsiRange::Standard};
  const double t = 0.1;
  for (double r : {30.0, 300.0}) {
    const double theta = 1.1;
    const auto ch = detail::kerr_chain(p, t, r, theta);
    const Mat4 gb = kerr_bl_metric_at(p, {ch.that, ch.rb, ch.thb, 0.0});
    const Mat4 direct = pullback<4>(gb, ch.J);
    // decomposed: planar dS + J^T a_hat J, in polar components
    const double A2 = std::exp(2.0 * t / p.lambda);
    Mat4 G{};
    G[0][0] = -1.0;
    G[1][1] = A2;
    G[2][2] = A2 * r * r;
    G[3][3] = A2 * r * r * std::pow(std::sin(theta), 2);
    const Mat4 dec = add<4>(G, detail::kerr_planar_deviation_polar(p, t, r, theta));
    CHECK(max_abs(sub<4>(direct, dec)) / std::max(1.0, max_abs(direct)) < 1e-11);
  }
}

TEST_CASE("kerr-ds planar: vacuum Einstein-Lambda in planar coordinates") {
  const KerrDSParams p{1.0, 0.5, 10.0, 0.0, PsiRange::Standard};
  const auto g4 = kerr_planar_metric4(p);
  const double Lam = 3.0 / 100.0;
  for (const Vec3& x : {Vec3{25.0, 13.0, 9.0}, Vec3{-40.0, 25.0, 30.0}}) {
    CHECK(max_ric_dev4(g4, Lam, 0.0, x) < 1e-6);
  }
}

TEST_CASE("kerr-ds planar slice: metric deviation matches the leading asymptotics") {
  const KerrDSParams p{1.0, 0.5, 10.0, 0.0, PsiRange::Standard};
  const double r = 1000.0, theta = kPi / 3.0;
  const Mat4 num = detail::kerr_planar_deviation_polar(p, p.t, r, theta);
  const auto oracle = kerr_asymptotic_oracle(p, r, theta);
  // closed form: a_rr ~ 2 m lambda^2 / (r^3 A B^{5/2})
  CHECK(oracle.a_leading[1][1] ==
        Approx(2.0 * 1.0 * 100.0 / (r * r * r * std::pow(p.B(theta), 2.5))).epsilon(1e-12));
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = mu; nu < 4; ++nu) {
      const double lead = oracle.a_leading[mu][nu];
      if (lead == 0.0) continue;
      CHECK(std::abs(num[mu][nu] - lead) / std::abs(lead) < 0.05);
    }
}

TEST_CASE("kerr-ds planar slice: hbar matches the leading asymptotics") {
  const KerrDSParams p{1.0, 0.5, 10.0, 0.0, PsiRange::Standard};
  const auto d = kerr_planar_slice(p);
  const double r = 1000.0, theta = kPi / 3.0;
  const Vec3 x = {r * std::sin(theta), 0.0, r * std::cos(theta)};  // psi = 0
  const Mat3 hb_polar = cart3_to_polar3(d.hbar_exact(x), x);
  const auto oracle = kerr_asymptotic_oracle(p, r, theta);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      const double lead = oracle.hbar_leading[i][j];
      if (lead == 0.0) continue;
      CHECK(std::abs(hb_polar[i][j] - lead) / std::abs(lead) < 0.05);
    }
  // pinned magnitude: |hbar_theta_theta| at theta = pi/2, r = 100
  const auto o2 = kerr_asymptotic_oracle(p, 100.0, kPi / 2.0);
  CHECK(std::abs(o2.hbar_leading[1][1]) ==
        Approx(10.0 / (std::pow(1.0025, 1.5) * 100.0)).epsilon(1e-10));
  CHECK(std::abs(o2.hbar_leading[1][1]) == Approx(0.0996261).epsilon(1e-5));
}

TEST_CASE("kerr-ds planar slice: vacuum constraints at moderate radius") {
  const KerrDSParams p{1.0, 0.5, 10.0, 0.0, PsiRange::Standard};
  const auto d = kerr_planar_slice(p);
  for (const Vec3& x : {Vec3{20.0, 8.0, 15.0}, Vec3{-30.0, 20.0, 12.0}}) {
    const auto s = constraints(d.g, d.K, d.Lambda(), x);
    CHECK(std::abs(s.T00) < 1e-6);
    CHECK(s.T0i_norm < 1e-6);
    // cancellation-free momentum path agrees
    SymTensorField3 hb;
    hb.coords = CoordSystem::Cartesian;
    hb.noise = 1e-10;
    const double A = p.A();
    auto hbe = d.hbar_exact;
    hb.eval = [hbe, A](const Vec3& y) { return scale(A, hbe(y)); };
    const auto s2 = constraints_from_h(d.g, hb, d.Lambda(), x);
    CHECK(std::abs(s2.T00) < 1e-7);
    CHECK(s2.T0i_norm < 1e-7);
    CHECK(s.T00 == Approx(s2.T00).margin(1e-6));
  }
}

TEST_CASE("kerr-ds planar slice: a = 0 matches McVittie invariantly (both are Schw-dS)") {
  // The two slicings of Schwarzschild-de Sitter are genuinely different (the
  // planar-chain slice is CMC with traceless h; McVittie has h = 0), so raw
  // fields at matched points differ by a boost. Boost-invariant data of the
  // centered sphere with equal areal radius must agree: tr K and the null
  // expansion product theta_+ theta_- = H^2 - (tr K|_Sigma)^2.
  const double lam = 10.0;
  const KerrDSParams pk{1.0, 0.0, lam, 0.0, PsiRange::Standard};
  const McVittieParams pm{1.0, lam, 0.0};
  const auto dk = kerr_planar_slice(pk);
  const auto dm = mcvittie_slice(pm);

  const double r_kerr = 1e3;
  const Vec3 xk{r_kerr, 0.0, 0.0};
  // areal radius of the coordinate sphere through xk (equator, psi = 0)
  const Mat3 gk_polar = cart3_to_polar3(dk.g.value(xk), xk);
  const double R_areal = std::sqrt(gk_polar[1][1]);
  // solve A phi(r)^2 r = R_areal for the McVittie radius
  double rm = R_areal;
  for (int it = 0; it < 50; ++it) {
    const double phi = 1.0 + 0.5 * pm.m / rm;
    const double fval = phi * phi * rm - R_areal;
    const double dphi = -0.5 * pm.m / (rm * rm);
    const double der = 2.0 * phi * dphi * rm + phi * phi;
    rm -= fval / der;
  }
  const Vec3 xm{rm, 0.0, 0.0};

  const auto sk = sphere_section(dk.g, dk.K, {0, 0, 0}, xk);
  const auto sm = sphere_section(dm.g, dm.K, {0, 0, 0}, xm);
  const double prod_k = sk.H * sk.H - sk.trK_sigma * sk.trK_sigma;
  const double prod_m = sm.H * sm.H - sm.trK_sigma * sm.trK_sigma;
  CHECK(std::abs(prod_k - prod_m) < 1e-8);
  const auto ck = constraints(dk.g, dk.K, dk.Lambda(), xk);
  const auto cm = constraints(dm.g, dm.K, dm.Lambda(), xm);
  CHECK(std::abs(ck.trK - cm.trK) < 1e-10);
  // both slicings are CMC at the mean-curvature bound
  CHECK(ck.trK == Approx(3.0 / lam).margin(1e-10));
}

TEST_CASE("kerr psi interval conventions") {
  KerrDSParams p{1.0, 0.5, 10.0, 0.0, PsiRange::Standard};
  auto [s0, e0] = kerr_psi_interval(p, 1000.0);
  CHECK(s0 == 0.0);
  CHECK(e0 == Approx(2.0 * kPi));
  p.psi_range = PsiRange::Shifted;
  auto [s1, e1] = kerr_psi_interval(p, 1000.0);
  CHECK(e1 - s1 == Approx(2.0 * kPi * p.xi()).epsilon(1e-14));
}

TEST_CASE("kerr-ds parameter validation") {
  CHECK_THROWS_AS((KerrDSParams{1.0, 11.0, 10.0, 0.0, PsiRange::Standard}.validate()),
                  parameter_error);
  CHECK_THROWS_AS((KerrDSParams{1.0, 0.5, -1.0, 0.0, PsiRange::Standard}.validate()),
                  parameter_error);
}

TEST_CASE("de_sitter_data wraps slice data with the right conformal class") {
  const auto dp = de_sitter_data(ChartId::PlanarUpper, 0.7, 10.0);
  CHECK(dp.conformal.kind == ConformalClass::Planar);
  CHECK(dp.conformal.value == Approx(std::exp(0.07)));
  const auto dh = de_sitter_data(ChartId::Hyperbolic, 5.0, 10.0);
  CHECK(dh.conformal.kind == ConformalClass::Hyperbolic);
  CHECK(dh.conformal.factor(10.0) == Approx(std::sinh(0.5)));
  const auto dg = de_sitter_data(ChartId::Global, 0.0, 10.0);
  CHECK_FALSE(dg.has_end);
}

TEST_CASE("kerr asymptotic oracle: spin terms vanish at a = 0") {
  const auto o = kerr_asymptotic_oracle({1.0, 0.0, 10.0, 0.0, PsiRange::Standard}, 100.0, 1.1);
  CHECK(o.htilde_frame[1][0] == 0.0);
  CHECK(o.hbar_leading[0][2] == 0.0);
  CHECK(o.a_leading[1][3] == 0.0);
  CHECK(o.a_leading[0][2] == 0.0);
}
