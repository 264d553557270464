#pragma once

// Odd kernels homogeneous of degree -1 in the plane.  Every built-in kernel is
// a linear image of grad N, N = log|x| / (2 pi), so it is stored as
// k(x) = A x / |x|^2 with a constant matrix A.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "patchflow/types.hpp"

namespace patchflow {

enum class KernelVariant { cauchy, euler_vorticity, aggregation_newtonian, linear_map_of_grad_n };

class KernelSpec {
 public:
  /// 1/(pi z) under the (Re, Im) identification: (x, -y) / (pi |x|^2).
  static KernelSpec cauchy(double scale = 1.0) {
    return {KernelVariant::cauchy, Mat2{{{1.0, 0.0}, {0.0, -1.0}}}, scale / pi};
  }
  /// grad-perp N = (-y, x) / (2 pi |x|^2); the 2-D Biot-Savart kernel.
  static KernelSpec euler_vorticity(double scale = 1.0) {
    return {KernelVariant::euler_vorticity, Mat2{{{0.0, -1.0}, {1.0, 0.0}}}, scale / (2.0 * pi)};
  }
  /// -grad N = -(x, y) / (2 pi |x|^2).
  static KernelSpec aggregation_newtonian(double scale = 1.0) {
    return {KernelVariant::aggregation_newtonian, Mat2{{{-1.0, 0.0}, {0.0, -1.0}}},
            scale / (2.0 * pi)};
  }
  /// L grad N for a user matrix L.
  static KernelSpec linear_map(const Mat2& l, double scale = 1.0) {
    return {KernelVariant::linear_map_of_grad_n, l, scale / (2.0 * pi)};
  }

  KernelVariant variant() const { return variant_; }

  /// k(x) = matrix() * x / |x|^2.
  const Mat2& matrix() const { return a_; }

  Vec2 eval(const Point2& x) const {
    const double r2 = norm2(x);
    if (!(r2 > 0.0)) throw SingularityError("kernel evaluated at the origin");
    return (1.0 / r2) * (a_ * x);
  }

  /// g(i, j) = d_j k_i(x), pointwise off the origin.
  Mat2 grad(const Point2& x) const {
    const double r2 = norm2(x);
    if (!(r2 > 0.0)) throw SingularityError("kernel gradient evaluated at the origin");
    const double inv2 = 1.0 / r2, inv4 = inv2 * inv2;
    // d_j (x_l / |x|^2) = delta_lj / |x|^2 - 2 x_l x_j / |x|^4
    Mat2 p;
    for (int l = 0; l < 2; ++l)
      for (int j = 0; j < 2; ++j) p(l, j) = (l == j ? inv2 : 0.0) - 2.0 * x[l] * x[j] * inv4;
    return a_ * p;
  }

 private:
  KernelSpec(KernelVariant v, const Mat2& base, double factor) : variant_(v), a_(factor * base) {}

  KernelVariant variant_;
  Mat2 a_;
};

/// One scalar component k_i of a kernel.
struct KernelComponent {
  KernelSpec kernel;
  int index{0};

  double eval(const Point2& x) const { return kernel.eval(x)[index]; }
  Vec2 grad(const Point2& x) const {
    const Mat2 g = kernel.grad(x);
    return {g(index, 0), g(index, 1)};
  }
};

/// Coefficients of the Dirac masses in d_j k = p.v. d_j k + c_j delta_0:
/// c_j = int_{|xi|=1} k(xi) xi_j d sigma(xi).
struct DeltaConstants {
  Vec2 c1;
  Vec2 c2;
  /// c1[0] + c2[1]: the delta part of the divergence.
  double trace() const { return c1.x + c2.y; }
};

/// Unit-circle trapezoidal rule with 4096 nodes (exact for the trigonometric
/// integrands of the built-in kernels).
inline DeltaConstants delta_constants(const KernelSpec& k) {
  constexpr int n = 4096;
  DeltaConstants d{};
  const double w = 2.0 * pi / n;
  for (int i = 0; i < n; ++i) {
    const double phi = w * i;
    const Vec2 xi{std::cos(phi), std::sin(phi)};
    const Vec2 kv = k.eval(xi);
    d.c1 += (w * xi.x) * kv;
    d.c2 += (w * xi.y) * kv;
  }
  return d;
}

inline std::string_view kernel_name(KernelVariant v) {
  switch (v) {
    case KernelVariant::cauchy: return "cauchy";
    case KernelVariant::euler_vorticity: return "euler";
    case KernelVariant::aggregation_newtonian: return "aggregation";
    case KernelVariant::linear_map_of_grad_n: return "linear-map";
  }
  return "unknown";
}

/// Parses a configuration kernel name.  "linear-map" requires the matrix l.
inline std::optional<KernelSpec> kernel_from_name(std::string_view name,
                                                  const std::optional<Mat2>& l = std::nullopt) {
  if (name == "cauchy") return KernelSpec::cauchy();
  if (name == "euler") return KernelSpec::euler_vorticity();
  if (name == "aggregation") return KernelSpec::aggregation_newtonian();
  if (name == "linear-map" && l) return KernelSpec::linear_map(*l);
  return std::nullopt;
}

}  // namespace patchflow
