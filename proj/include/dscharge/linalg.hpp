#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "dscharge/core.hpp"

namespace dsc {

using Vec3 = std::array<double, 3>;
using Vec4 = std::array<double, 4>;
using Vec5 = std::array<double, 5>;

template <std::size_t N>
using SqMat = std::array<std::array<double, N>, N>;

using Mat2 = SqMat<2>;
using Mat3 = SqMat<3>;
using Mat4 = SqMat<4>;

template <std::size_t N>
constexpr SqMat<N> zero_mat() {
  SqMat<N> m{};
  return m;
}

template <std::size_t N>
constexpr SqMat<N> identity() {
  SqMat<N> m{};
  for (std::size_t i = 0; i < N; ++i) m[i][i] = 1.0;
  return m;
}

inline Vec3 operator+(const Vec3& a, const Vec3& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec3 operator-(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec3 operator*(double s, const Vec3& a) {
  return {s * a[0], s * a[1], s * a[2]};
}

inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

template <std::size_t N>
SqMat<N> add(const SqMat<N>& a, const SqMat<N>& b) {
  SqMat<N> c;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) c[i][j] = a[i][j] + b[i][j];
  return c;
}

template <std::size_t N>
SqMat<N> sub(const SqMat<N>& a, const SqMat<N>& b) {
  SqMat<N> c;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) c[i][j] = a[i][j] - b[i][j];
  return c;
}

template <std::size_t N>
SqMat<N> scale(double s, const SqMat<N>& a) {
  SqMat<N> c;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) c[i][j] = s * a[i][j];
  return c;
}

template <std::size_t N>
SqMat<N> mul(const SqMat<N>& a, const SqMat<N>& b) {
  SqMat<N> c{};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t k = 0; k < N; ++k) {
      const double aik = a[i][k];
      for (std::size_t j = 0; j < N; ++j) c[i][j] += aik * b[k][j];
    }
  return c;
}

template <std::size_t N>
SqMat<N> transpose(const SqMat<N>& a) {
  SqMat<N> c;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) c[i][j] = a[j][i];
  return c;
}

// congruence pullback J^T a J
template <std::size_t N>
SqMat<N> pullback(const SqMat<N>& a, const SqMat<N>& J) {
  return mul(transpose(J), mul(a, J));
}

inline Vec3 mat_vec(const Mat3& m, const Vec3& v) {
  Vec3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i] += m[i][j] * v[j];
  return r;
}

inline double det2(double a, double b, double c, double d) {
  return a * d - b * c;
}

inline double det3(const Mat3& m) {
  return m[0][0] * det2(m[1][1], m[1][2], m[2][1], m[2][2]) -
         m[0][1] * det2(m[1][0], m[1][2], m[2][0], m[2][2]) +
         m[0][2] * det2(m[1][0], m[1][1], m[2][0], m[2][1]);
}

inline Mat3 inv3(const Mat3& m) {
  const double d = det3(m);
  if (!(std::abs(d) > 0.0) || !std::isfinite(d))
    throw singular_error("inv3: non-invertible 3x3 matrix");
  const double id = 1.0 / d;
  Mat3 r;
  r[0][0] = det2(m[1][1], m[1][2], m[2][1], m[2][2]) * id;
  r[0][1] = -det2(m[0][1], m[0][2], m[2][1], m[2][2]) * id;
  r[0][2] = det2(m[0][1], m[0][2], m[1][1], m[1][2]) * id;
  r[1][0] = -det2(m[1][0], m[1][2], m[2][0], m[2][2]) * id;
  r[1][1] = det2(m[0][0], m[0][2], m[2][0], m[2][2]) * id;
  r[1][2] = -det2(m[0][0], m[0][2], m[1][0], m[1][2]) * id;
  r[2][0] = det2(m[1][0], m[1][1], m[2][0], m[2][1]) * id;
  r[2][1] = -det2(m[0][0], m[0][1], m[2][0], m[2][1]) * id;
  r[2][2] = det2(m[0][0], m[0][1], m[1][0], m[1][1]) * id;
  return r;
}

// Gauss-Jordan with partial pivoting; throws on (near-)singular input.
template <std::size_t N>
SqMat<N> inverse(const SqMat<N>& m) {
  SqMat<N> a = m;
  SqMat<N> inv = identity<N>();
  for (std::size_t col = 0; col < N; ++col) {
    int piv = col;
    for (std::size_t r = col + 1; r < N; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (!(std::abs(a[piv][col]) > 0.0))
      throw singular_error("inverse: singular matrix");
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    const double s = 1.0 / a[col][col];
    for (std::size_t j = 0; j < N; ++j) {
      a[col][j] *= s;
      inv[col][j] *= s;
    }
    for (std::size_t r = 0; r < N; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < N; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

// Sylvester criterion on the symmetric part.
inline bool is_positive_definite(const Mat3& g) {
  const double m1 = g[0][0];
  const double m2 = det2(g[0][0], g[0][1], g[1][0], g[1][1]);
  const double m3 = det3(g);
  return m1 > 0.0 && m2 > 0.0 && m3 > 0.0 && std::isfinite(m3);
}

inline double max_abs(const Mat3& m) {
  double v = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) v = std::max(v, std::abs(m[i][j]));
  return v;
}

inline double max_abs(const Mat4& m) {
  double v = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) v = std::max(v, std::abs(m[i][j]));
  return v;
}

// Deterministic pairwise summation; order is independent of how the values
// were produced, so results are bit-stable across thread counts.
inline double pairwise_sum(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

inline double pairwise_sum(const std::vector<double>& v) {
  return pairwise_sum(std::span<const double>(v.data(), v.size()));
}

}  // namespace dsc
