#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace patchflow {

inline constexpr double pi = std::numbers::pi;

/// Planar vector; also used for points z = (x, y) identified with x + iy.
struct Vec2 {
  double x{0.0};
  double y{0.0};

  constexpr Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
  constexpr double operator[](int i) const { return i == 0 ? x : y; }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

using Point2 = Vec2;

constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
constexpr double norm2(const Vec2& a) { return a.x * a.x + a.y * a.y; }
inline bool isfinite(const Vec2& a) { return std::isfinite(a.x) && std::isfinite(a.y); }

inline std::complex<double> to_complex(const Vec2& v) { return {v.x, v.y}; }
inline Vec2 from_complex(const std::complex<double>& z) { return {z.real(), z.imag()}; }

/// 2x2 matrix, m(i, j) is row i, column j.
struct Mat2 {
  double m[2][2]{{0.0, 0.0}, {0.0, 0.0}};

  static constexpr Mat2 identity() { return Mat2{{{1.0, 0.0}, {0.0, 1.0}}}; }

  constexpr double& operator()(int i, int j) { return m[i][j]; }
  constexpr double operator()(int i, int j) const { return m[i][j]; }
  constexpr double trace() const { return m[0][0] + m[1][1]; }
  constexpr double det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
  constexpr Mat2 transposed() const { return Mat2{{{m[0][0], m[1][0]}, {m[0][1], m[1][1]}}}; }

  constexpr Mat2& operator+=(const Mat2& o) {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m[i][j] += o.m[i][j];
    return *this;
  }
  constexpr Mat2& operator*=(double s) {
    for (auto& row : m)
      for (auto& e : row) e *= s;
    return *this;
  }
};

constexpr Vec2 operator*(const Mat2& a, const Vec2& v) {
  return {a(0, 0) * v.x + a(0, 1) * v.y, a(1, 0) * v.x + a(1, 1) * v.y};
}
constexpr Mat2 operator*(const Mat2& a, const Mat2& b) {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
  return r;
}
constexpr Mat2 operator*(double s, Mat2 a) { return a *= s; }
constexpr Mat2 operator+(Mat2 a, const Mat2& b) { return a += b; }
constexpr Mat2 operator-(Mat2 a, const Mat2& b) { return a += (-1.0) * b; }

inline double max_abs(const Mat2& a) {
  return std::max(std::max(std::abs(a(0, 0)), std::abs(a(0, 1))),
                  std::max(std::abs(a(1, 0)), std::abs(a(1, 1))));
}

/// Third-order tensor t(i, j, l) = d_l d_j v_i.
struct Tensor222 {
  double t[2][2][2]{};
  constexpr double& operator()(int i, int j, int l) { return t[i][j][l]; }
  constexpr double operator()(int i, int j, int l) const { return t[i][j][l]; }
  double max_abs() const {
    double m = 0.0;
    for (const auto& a : t)
      for (const auto& b : a)
        for (double e : b) m = std::max(m, std::abs(e));
    return m;
  }
};

/// Invalid construction parameters or malformed geometry.
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Kernel evaluated at its singularity.
class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace patchflow
