#pragma once

#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

#include "dscharge/core.hpp"
#include "dscharge/linalg.hpp"

namespace dsc {

struct GaussLegendreRule {
  std::vector<double> nodes;    // on (-1, 1)
  std::vector<double> weights;  // sum = 2
};

// Nodes/weights by Newton iteration on P_n; computed in long double and cached.
inline const GaussLegendreRule& gauss_legendre(int n) {
  if (n < 1) throw parameter_error("gauss_legendre: n must be >= 1");
  static std::map<int, GaussLegendreRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Tricomi initial guess, then Newton on P_n
    long double x = std::cos(kPi * (i + 0.75L) / (n + 0.5L));
    long double pp = 0.0L;
    for (int iter = 0; iter < 100; ++iter) {
      long double p0 = 1.0L, p1 = x;
      for (int k = 2; k <= n; ++k) {
        long double p2 = ((2.0L * k - 1.0L) * x * p1 - (k - 1.0L) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0L);
      const long double dx = p1 / pp;
      x -= dx;
      if (std::abs((double)dx) < 1e-19) {
        // one polishing pass after convergence
        p0 = 1.0L; p1 = x;
        for (int k = 2; k <= n; ++k) {
          long double p2 = ((2.0L * k - 1.0L) * x * p1 - (k - 1.0L) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        pp = n * (x * p1 - p0) / (x * x - 1.0L);
        break;
      }
    }
    const long double w = 2.0L / ((1.0L - x * x) * pp * pp);
    rule.nodes[i] = (double)(-x);
    rule.nodes[n - 1 - i] = (double)x;
    rule.weights[i] = (double)w;
    rule.weights[n - 1 - i] = (double)w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  auto [pos, _] = cache.emplace(n, std::move(rule));
  return pos->second;
}

// Product quadrature on coordinate spheres: Gauss-Legendre in cos(theta),
// equispaced periodic nodes in psi. The psi interval supports the shifted
// range of length 2*pi*xi used for Kerr-de Sitter angular momentum; intervals
// whose length is not a full period fall back to composite Gauss-Legendre in
// psi (the periodic trapezoid rule loses spectral accuracy off a full period).
struct QuadratureSpec {
  int n_theta = 64;
  int n_psi = 128;
  double psi_start = 0.0;
  double psi_end = 2.0 * kPi;

  void validate() const {
    if (n_theta < 8) throw parameter_error("QuadratureSpec: n_theta must be >= 8");
    if (n_psi < 16) throw parameter_error("QuadratureSpec: n_psi must be >= 16");
    if (!(psi_end > psi_start)) throw parameter_error("QuadratureSpec: psi interval length must be > 0");
  }
  double psi_length() const { return psi_end - psi_start; }
  bool full_period() const { return std::abs(psi_length() - 2.0 * kPi) < 1e-12; }
};

struct SphereNode {
  double theta, psi, weight;  // weight integrates f over the UNIT sphere patch
  Vec3 n;                     // unit direction
};

inline std::vector<SphereNode> sphere_rule(const QuadratureSpec& q) {
  q.validate();
  const GaussLegendreRule& gl = gauss_legendre(q.n_theta);
  std::vector<double> psis, wpsis;
  if (q.full_period()) {
    psis.reserve(q.n_psi);
    const double dpsi = q.psi_length() / q.n_psi;
    for (int j = 0; j < q.n_psi; ++j) {
      psis.push_back(q.psi_start + j * dpsi);
      wpsis.push_back(dpsi);
    }
  } else {
    const GaussLegendreRule& glp = gauss_legendre(q.n_psi);
    const double mid = 0.5 * (q.psi_start + q.psi_end);
    const double half = 0.5 * q.psi_length();
    for (int j = 0; j < q.n_psi; ++j) {
      psis.push_back(mid + half * glp.nodes[j]);
      wpsis.push_back(half * glp.weights[j]);
    }
  }
  std::vector<SphereNode> nodes;
  nodes.reserve(static_cast<std::size_t>(q.n_theta) * q.n_psi);
  for (int i = 0; i < q.n_theta; ++i) {
    const double u = gl.nodes[i];  // cos(theta)
    const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
    const double th = std::acos(u);
    for (int j = 0; j < (int)psis.size(); ++j) {
      SphereNode nd;
      nd.theta = th;
      nd.psi = psis[j];
      nd.weight = gl.weights[i] * wpsis[j];
      nd.n = {s * std::cos(nd.psi), s * std::sin(nd.psi), u};
      nodes.push_back(nd);
    }
  }
  return nodes;
}

namespace detail {

inline int& max_threads_ref() {
  static int n = 0;  // 0 = hardware concurrency
  return n;
}

}  // namespace detail

inline void set_max_threads(int n) { detail::max_threads_ref() = n; }

// Evaluates fn(i) for i in [0, n) into a vector (parallel over index blocks)
// and pairwise-sums it in index order; bit-identical for any thread count.
// Exceptions thrown by fn are captured and rethrown on the calling thread.
inline double parallel_sum(std::size_t n, const std::function<double(std::size_t)>& fn) {
  std::vector<double> vals(n);
  int nt = detail::max_threads_ref();
  if (nt <= 0) nt = (int)std::thread::hardware_concurrency();
  if (nt < 1) nt = 1;
  nt = std::min<int>(nt, 16);
  if (nt == 1 || n < 64) {
    for (std::size_t i = 0; i < n; ++i) vals[i] = fn(i);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(nt));
    const std::size_t chunk = (n + nt - 1) / nt;
    for (int t = 0; t < nt; ++t) {
      const std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back([&, lo, hi, t] {
        try {
          for (std::size_t i = lo; i < hi; ++i) vals[i] = fn(i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  return pairwise_sum(vals);
}

// Integral of a scalar field over the coordinate sphere |x| = r with the flat
// area element r^2 sin(theta) dtheta dpsi. Exact for integrands polynomial of
// degree <= 2 n_theta - 1 in the direction components and bandlimited below
// n_psi/2 in psi (full-period case).
inline double surface_integral(const std::function<double(const Vec3&)>& f, double r,
                               const QuadratureSpec& q = {}) {
  const auto nodes = sphere_rule(q);
  const double r2 = r * r;
  return parallel_sum(nodes.size(), [&](std::size_t i) {
    const double v = f(r * nodes[i].n);
    if (!std::isfinite(v))
      throw convergence_error("surface_integral: non-finite sample at theta=" +
                              std::to_string(nodes[i].theta) + " psi=" + std::to_string(nodes[i].psi));
    return v * nodes[i].weight * r2;
  });
}

namespace detail {

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double tol,
                                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0) throw convergence_error("adaptive quadrature: max depth reached");
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson on [a, b] to absolute tolerance tol.
inline double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                 double tol = 1e-12) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  if (!std::isfinite(fa) || !std::isfinite(fb) || !std::isfinite(fm))
    throw convergence_error("integrate_adaptive: non-finite integrand");
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace dsc
