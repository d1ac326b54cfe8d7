#include <catch2/catch.hpp>
#include <cmath>
#include <random>

#include "dscharge/initial_data.hpp"
#include "dscharge/models.hpp"

using namespace dsc;

TEST_CASE("conformal decomposition: model slices") {
  const double lam = 10.0;
  {
    // planar dS, P = e^{t/lambda}: gbar = delta, hbar = 0
    const auto d = de_sitter_data(ChartId::PlanarUpper, 1.0, lam);
    const auto dec = conformal_decompose(d);
    const Vec3 x{1.0, 2.0, -0.5};
    CHECK(max_abs(sub<3>(dec.gbar.value(x), identity<3>())) < 1e-14);
    CHECK(max_abs(dec.hbar.value(x)) < 1e-15);
  }
  {
    // McVittie: gbar = (1 + 1/2r)^4 delta, hbar = 0
    const auto d = mcvittie_slice({1.0, lam, 0.0});
    const auto dec = conformal_decompose(d);
    const Vec3 x{3.0, 0.0, 0.0};
    const double p4 = std::pow(1.0 + 1.0 / 6.0, 4);
    CHECK(max_abs(sub<3>(dec.gbar.value(x), scale(p4, identity<3>()))) < 1e-14);
    CHECK(max_abs(dec.hbar.value(x)) < 1e-15);
  }
  {
    // hyperbolic dS T-slice: gbar = gH, hbar = 0, htilde = gH/lambda
    const double T = 5.0;
    const auto d = de_sitter_data(ChartId::Hyperbolic, T, lam);
    const auto dec = conformal_decompose(d);
    const Vec3 x{8.0, 1.1, 0.3};
    Mat3 gH{};
    const double F = lam * std::sinh(x[0] / lam);
    gH[0][0] = 1.0;
    gH[1][1] = F * F;
    gH[2][2] = F * F * std::pow(std::sin(x[1]), 2);
    CHECK(max_abs(sub<3>(dec.gbar.value(x), gH)) / max_abs(gH) < 1e-13);
    CHECK(max_abs(dec.hbar.value(x)) < 1e-14);
    CHECK(max_abs(sub<3>(dec.htilde.value(x), scale(1.0 / lam, gH))) / max_abs(gH) < 1e-13);
  }
}

TEST_CASE("conformal decomposition: reassembly is exact arithmetic") {
  const auto d = kerr_planar_slice({1.0, 0.5, 10.0, 0.4, PsiRange::Standard});
  const auto dec = conformal_decompose(d);
  const double P = d.conformal.factor(d.lambda);
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int it = 0; it < 20; ++it) {
    Vec3 x{30.0 + 10.0 * u(rng), 20.0 * u(rng), 20.0 * u(rng)};
    const Mat3 g = d.g.value(x);
    const Mat3 g_re = scale(P * P, dec.gbar.value(x));
    CHECK(max_abs(sub<3>(g, g_re)) / max_abs(g) < 1e-14);
    // K = sqrt(Lambda/3) g + P hbar
    const Mat3 K_re = add<3>(scale(1.0 / d.lambda, g), scale(P, dec.hbar.value(x)));
    const Mat3 K = d.K.value(x);
    CHECK(max_abs(sub<3>(K, K_re)) / max_abs(K) < 1e-9);
  }
}

TEST_CASE("decay_fit: synthetic power laws are recovered to 1e-3") {
  for (double s : {0.6, 1.0, 2.0, 3.0}) {
    InitialDataSet d;
    d.lambda = 10.0;
    d.conformal = ConformalClass::planar(1.0);
    d.g.eval = [s](const Vec3& x) {
      const double r = norm(x);
      Mat3 g = identity<3>();
      const double c = 0.7 * std::pow(r, -s);
      g[0][0] += c;
      g[0][1] = g[1][0] = 0.3 * c;
      return g;
    };
    const double lam = d.lambda;
    auto geval = d.g.eval;
    d.K.eval = [geval, lam](const Vec3& x) { return scale(1.0 / lam, geval(x)); };
    const auto fits = decay_fit(d, {100.0, 200.0, 400.0, 800.0, 1600.0});
    CHECK(fits.metric.tau_hat == Approx(s).margin(1e-3));
    CHECK(fits.metric.clears_threshold == (s > 0.5));
    CHECK(fits.momentum.exact);  // K = g/lambda exactly -> hbar = 0
  }
}

TEST_CASE("decay_fit: McVittie metric exponent and exact flats") {
  const auto d = mcvittie_slice({2.0, 10.0, 0.0});  // gbar = (1 + 1/r)^4 delta
  std::vector<double> radii = {200.0, 400.0, 800.0, 1600.0, 3200.0};
  const auto fits = decay_fit(d, radii);
  CHECK(fits.metric.tau_hat == Approx(1.0).margin(0.02));
  CHECK(fits.metric.clears_threshold);
  CHECK(fits.momentum.exact);

  const auto flat = de_sitter_data(ChartId::PlanarUpper, 0.0, 10.0);
  const auto f2 = decay_fit(flat, radii);
  CHECK(f2.metric.exact);
}

TEST_CASE("decay_fit: Kerr hbar sup-norm decays with the table's leading power") {
  const auto d = kerr_planar_slice({1.0, 0.5, 10.0, 0.0, PsiRange::Standard});
  const auto fits = decay_fit(d, {200.0, 400.0, 800.0});
  // frame components of hbar all fall off like r^-3
  CHECK(fits.momentum.tau_hat == Approx(3.0).margin(0.1));
  CHECK(fits.metric.tau_hat == Approx(3.0).margin(0.1));
}

TEST_CASE("decay_fit: input validation and failure flag") {
  const auto d = mcvittie_slice({1.0, 10.0, 0.0});
  CHECK_THROWS_AS(decay_fit(d, {100.0, 200.0}), parameter_error);
  CHECK_THROWS_AS(decay_fit(d, {100.0, 90.0, 200.0}), parameter_error);

  InitialDataSet grow;
  grow.lambda = 10.0;
  grow.conformal = ConformalClass::planar(1.0);
  grow.g.eval = [](const Vec3& x) {
    Mat3 g = identity<3>();
    g[0][0] += 1e-4 * norm(x);  // growing deviation
    return g;
  };
  grow.K.eval = [](const Vec3&) { return zero_mat<3>(); };
  const auto fits = decay_fit(grow, {100.0, 200.0, 400.0});
  CHECK(fits.metric.fit_failed);
}

TEST_CASE("horizon_residual: McVittie minimal sphere and planar dS signs") {
  const double lam = 10.0;
  {
    const auto d = mcvittie_slice({1.0, lam, 0.0});
    CHECK(std::abs(horizon_residual(d, {0, 0, 0}, 0.5, HorizonSign::Future)) < 1e-9);
    CHECK(std::abs(horizon_residual(d, {0, 0, 0}, 0.5, HorizonSign::Past)) < 1e-9);
  }
  {
    const auto d = de_sitter_data(ChartId::PlanarUpper, 0.5, lam);
    for (double r : {0.5, 2.0, 20.0}) {
      const double res_f = horizon_residual(d, {0, 0, 0}, r, HorizonSign::Future);
      CHECK(res_f < 0.0);  // expanding universe: -H < 0, tr h = 0
      const double H = 2.0 / (r * std::exp(0.05));
      CHECK(res_f == Approx(-H).epsilon(1e-8));
    }
  }
  {
    // hyperbolic dS T-slice: closed-form residual via H of geodesic spheres
    const double T = 5.0;
    const auto d = de_sitter_data(ChartId::Hyperbolic, T, lam);
    const double R = 5.0;
    const double S = std::sinh(T / lam);
    const double H = (2.0 / lam) / std::tanh(R / lam) / S;
    const double trK_sigma = 2.0 / (lam * std::tanh(T / lam));
    const double rhs = trK_sigma - (2.0 / lam) * std::tanh(T / (2.0 * lam));
    const double got_f = horizon_residual(d, {0, 0, 0}, R, HorizonSign::Future);
    CHECK(got_f == Approx(-H - rhs).epsilon(1e-8));
  }
}

TEST_CASE("horizon_residual: conformal covariance (Prop: H_g = P^{-1} H_gbar)") {
  // residual in (g, h) equals P^{-1} x residual in (gbar, hbar)
  std::mt19937 rng(37);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<InitialDataSet> models = {
      mcvittie_slice({1.0, 10.0, 0.7}),
      kerr_planar_slice({1.0, 0.5, 10.0, 0.3, PsiRange::Standard}),
      de_sitter_data(ChartId::PlanarUpper, 1.0, 10.0)};
  for (const auto& d : models) {
    const auto dec = conformal_decompose(d);
    const double P = d.conformal.factor(d.lambda);
    // data set for (gbar, hbar): K chosen so that its momentum tensor is hbar
    InitialDataSet db;
    db.lambda = d.lambda;
    db.conformal = ConformalClass::planar(1.0);
    db.g = dec.gbar;
    auto gb = dec.gbar.eval;
    auto hb = dec.hbar.eval;
    const double lam = d.lambda;
    db.K.eval = [gb, hb, lam](const Vec3& x) {
      return add<3>(scale(1.0 / lam, gb(x)), hb(x));
    };
    db.K.noise = 1e-10;
    const bool is_kerr = d.name == "kerr-ds";
    for (int it = 0; it < (is_kerr ? 5 : 30); ++it) {
      const double rad = is_kerr ? 25.0 + 20.0 * u(rng) : 2.0 + 4.0 * u(rng);
      for (auto sign : {HorizonSign::Future, HorizonSign::Past}) {
        const double res_g = horizon_residual(d, {0, 0, 0}, rad, sign);
        const double res_b = horizon_residual(db, {0, 0, 0}, rad, sign);
        CHECK(res_g == Approx(res_b / P).margin(1e-7 * std::max(1.0, std::abs(res_b / P))));
      }
    }
  }
}

TEST_CASE("null expansions: planar dS, time-symmetric, McVittie minimal sphere") {
  const double lam = 10.0;
  {
    const double t = 0.8;
    const auto d = de_sitter_data(ChartId::PlanarUpper, t, lam);
    const double r = 3.0;
    const auto ne = null_expansions(d, {0, 0, 0}, r);
    CHECK(ne.theta_plus == Approx(2.0 / (r * std::exp(t / lam)) + 2.0 / lam).epsilon(1e-8));
    CHECK(ne.theta_minus == Approx(2.0 / (r * std::exp(t / lam)) - 2.0 / lam).epsilon(1e-8));
  }
  {
    // time-symmetric data: K = 0 -> theta_+ = theta_- = H
    InitialDataSet d;
    d.lambda = lam;
    d.conformal = ConformalClass::planar(1.0);
    d.g.eval = [](const Vec3&) { return identity<3>(); };
    d.K.eval = [](const Vec3&) { return zero_mat<3>(); };
    const auto ne = null_expansions(d, {0, 0, 0}, 2.0);
    CHECK(ne.theta_plus == Approx(ne.theta_minus).margin(1e-12));
    CHECK(ne.theta_plus == Approx(1.0).epsilon(1e-9));
  }
  {
    const auto d = mcvittie_slice({1.0, lam, 0.0});
    const auto ne = null_expansions(d, {0, 0, 0}, 0.5);
    CHECK(ne.theta_plus == Approx(2.0 / lam).margin(1e-9));
    CHECK(ne.theta_plus - ne.theta_minus == Approx(4.0 / lam).margin(1e-9));
  }
}

TEST_CASE("find_horizon_spherical: McVittie minimal spheres") {
  const double lam = 10.0;
  {
    const auto d = mcvittie_slice({1.0, lam, 0.0});
    const double r = find_horizon_spherical(d, HorizonSign::Future, 0.3, 0.8);
    CHECK(r == Approx(0.5).epsilon(1e-9));
  }
  {
    const auto d = mcvittie_slice({2.0, lam, lam * std::log(2.0)});  // A = 2, m/(2A) = 0.5
    const double r = find_horizon_spherical(d, HorizonSign::Future, 0.3, 0.8);
    CHECK(r == Approx(0.5).epsilon(1e-9));
  }
  {
    const auto d = de_sitter_data(ChartId::PlanarUpper, 0.0, lam);
    CHECK_THROWS_AS(find_horizon_spherical(d, HorizonSign::Future, 0.5, 5.0), convergence_error);
  }
}

TEST_CASE("find_horizon_spherical: stable under derivative-resolution changes") {
  const auto d = mcvittie_slice({1.0, 10.0, 0.0});
  DerivativeConfig c1;  // analytic path (registered callbacks)
  DerivativeConfig c2;
  c2.mode = DerivMode::FiniteDifference;
  c2.richardson = true;
  const double r1 = find_horizon_spherical(d, HorizonSign::Future, 0.3, 0.8, c1);
  const double r2 = find_horizon_spherical(d, HorizonSign::Future, 0.3, 0.8, c2);
  CHECK(std::abs(r1 - r2) < 1e-9);
}

TEST_CASE("angular_density: zeros, trace, and the radial ansatz oracle") {
  const double lam = 10.0;
  {
    // hbar = 0 anywhere -> htilde^z = 0
    const auto d = mcvittie_slice({1.0, lam, 0.0});
    CHECK(max_abs(angular_density(d, {3.0, 1.0, -2.0})) < 1e-14);
    CHECK_THROWS_AS(angular_density(d, d.z), domain_error);
  }
  {
    // radial ansatz hbar = f(r) dr x dr on flat gbar, z at the origin:
    // htilde^z = -+ f eps_{iuj} x_u from the pure-trace part; its radial
    // contraction (and hence Jbar) vanishes.
    InitialDataSet d;
    d.lambda = lam;
    d.conformal = ConformalClass::planar(1.0);
    d.g.eval = [](const Vec3&) { return identity<3>(); };
    d.K.eval = [lam](const Vec3& x) {
      const double r = norm(x);
      const double f = 0.3 / (r * r);
      Mat3 K{};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          K[i][j] = (i == j ? 1.0 / lam : 0.0) + f * x[i] * x[j] / (r * r);
      return K;
    };
    const Vec3 x{1.0, 2.0, -0.5};
    const double f = 0.3 / dot(x, x);
    const Mat3 ht = angular_density(d, x);
    // independent contraction: htilde_ij = (1/2) eps_i^{uv} 2 x_u f (n_v n_j - delta_vj)
    static const int E[3][3][3] = {{{0, 0, 0}, {0, 0, 1}, {0, -1, 0}},
                                   {{0, 0, -1}, {0, 0, 0}, {1, 0, 0}},
                                   {{0, 1, 0}, {-1, 0, 0}, {0, 0, 0}}};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double expect = 0.0;
        for (int u = 0; u < 3; ++u) expect += -1.0 * E[i][u][j] * x[u] * (-f);
        CHECK(ht[i][j] == Approx(expect).margin(1e-12));
      }
    const Vec3 n = (1.0 / norm(x)) * x;
    const Vec3 rad = mat_vec(ht, n);
    CHECK(norm(rad) < 1e-13);
  }
}

TEST_CASE("angular_density: Kerr frame components match the oracle") {
  const KerrDSParams p{1.0, 0.5, 10.0, 0.0, PsiRange::Standard};
  const auto d = kerr_planar_slice(p);
  const double r = 1000.0, theta = kPi / 2.0;
  const Vec3 x{r * std::sin(theta), 0.0, r * std::cos(theta)};
  const Mat3 ht = angular_density(d, x);
  // frame vectors at psi = 0, theta = pi/2
  const Vec3 e1{1.0, 0.0, 0.0}, e2{0.0, 0.0, -1.0}, e3{0.0, 1.0, 0.0};
  auto comp = [&](const Vec3& a, const Vec3& b) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s += ht[i][j] * a[i] * b[j];
    return s;
  };
  const auto oracle = kerr_asymptotic_oracle(p, r, theta);
  CHECK(comp(e2, e1) == Approx(oracle.htilde_frame[1][0]).epsilon(0.05));
  CHECK(comp(e2, e3) == Approx(oracle.htilde_frame[1][2]).epsilon(0.05));
  CHECK(comp(e3, e2) == Approx(oracle.htilde_frame[2][1]).epsilon(0.05));
  // pinned magnitudes at theta = pi/2 (O(r^-1) relative truncation)
  const double B = p.B(theta);
  CHECK(comp(e3, e2) == Approx(-p.m * p.lambda / (std::pow(B, 1.5) * r * r)).epsilon(0.05));
  CHECK(comp(e2, e3) == Approx((p.m * p.lambda * p.lambda - 2.0 * p.m * p.a * p.a) /
                               (std::pow(B, 2.5) * p.lambda * r * r))
                            .epsilon(0.05));

  // trace-free in the flat convention; gbar-trace small
  double flat_tr = ht[0][0] + ht[1][1] + ht[2][2];
  CHECK(std::abs(flat_tr) < 1e-15);
  const auto dec = conformal_decompose(d);
  const Mat3 gbi = inv3(dec.gbar.value(x));
  double gtr = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) gtr += gbi[i][j] * ht[i][j];
  CHECK(std::abs(gtr) < 1e-8);

  // the gbar-volume epsilon variant is an O(deviation) perturbation
  const Mat3 ht2 = angular_density(d, x, EpsilonConvention::GbarVolume);
  CHECK(max_abs(sub<3>(ht2, ht)) / max_abs(ht) < 1e-4);
}

TEST_CASE("annulus integrability diagnostic") {
  {
    // McVittie: scalar-flat conformal data, hbar = 0: both integrals vanish
    const auto d = mcvittie_slice({1.0, 10.0, 0.0});
    const auto rep = annulus_integrability(d, {50.0, 100.0, 200.0, 400.0});
    CHECK(rep.cauchy);
    for (double v : rep.curvature) CHECK(v < 1e-8);
    for (double v : rep.momentum) CHECK(v < 1e-8);
  }
  {
    // Kerr: nonzero but decaying annulus contributions
    const auto d = kerr_planar_slice({1.0, 0.5, 10.0, 0.0, PsiRange::Standard});
    const auto rep = annulus_integrability(d, {100.0, 200.0, 400.0, 800.0}, 32, 3);
    CHECK(rep.cauchy);
    REQUIRE(rep.curvature.size() == 3);
    CHECK(rep.curvature[0] > rep.curvature[2]);
  }
  const auto d = mcvittie_slice({1.0, 10.0, 0.0});
  CHECK_THROWS_AS(annulus_integrability(d, {50.0, 100.0}), parameter_error);
}

TEST_CASE("decay_fit: hyperbolic-end exponential rates") {
  // frame a_11 = eps e^{-2R/lambda} on the hyperbolic background: tau_hat = 2
  const double lam = 10.0, T = 5.0;
  InitialDataSet d;
  d.lambda = lam;
  d.conformal = ConformalClass::hyperbolic(T);
  d.g.coords = CoordSystem::PolarSpherical;
  d.K.coords = CoordSystem::PolarSpherical;
  const double H = std::sinh(T / lam);
  const double kfac = 1.0 / (lam * std::tanh(T / lam));
  d.g.eval = [lam, H](const Vec3& x) {
    Mat3 g{};
    const double F = lam * std::sinh(x[0] / lam);
    g[0][0] = 1.0 + 1e-3 * std::exp(-2.0 * x[0] / lam);
    g[1][1] = F * F;
    g[2][2] = F * F * std::pow(std::sin(x[1]), 2);
    return scale(H * H, g);
  };
  auto geval = d.g.eval;
  d.K.eval = [geval, kfac](const Vec3& x) { return scale(kfac, geval(x)); };
  const auto fits = decay_fit(d, {20.0, 25.0, 30.0, 35.0});
  CHECK(fits.metric.tau_hat == Approx(2.0).margin(1e-3));
  CHECK(fits.metric.clears_threshold);  // tau > 3/2
  CHECK(fits.momentum.exact);
}
