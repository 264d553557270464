#pragma once

// Velocity v = k * chi_D and its derivatives by boundary reduction:
//
//   v(x)            = - oint k(x - y) <x - y, n(y)> d sigma(y)
//   d_j v_i(x)      = - oint k_i(x - y) n_j(y) d sigma(y)          x off dD
//   d_l d_j v_i(x)  = - oint (d_l k_i)(x - y) n_j(y) d sigma(y)    x off dD
//
// discretised by the trapezoidal rule with the weights of FrameData.  Sums run
// in marker order so results do not depend on threading.

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "patchflow/geometry.hpp"
#include "patchflow/kernels.hpp"
#include "patchflow/parallel.hpp"
#include "patchflow/types.hpp"

namespace patchflow {

struct VelocitySample {
  Point2 location;
  Vec2 v;
  bool on_boundary{false};
};

struct GradSample {
  Point2 location;
  Mat2 grad_v;  // grad_v(i, j) = d_j v_i
  double divergence{0.0};
};

struct SecondGradSample {
  Point2 location;
  Tensor222 d2v;  // d2v(i, j, l) = d_l d_j v_i
  bool under_resolved{false};
};

namespace detail {

// S = sum_j d (d . nw_j) / |d|^2 with d = x - m_j; coincident markers skipped.
inline Vec2 layer_sum(std::span<const Point2> m, std::span<const Vec2> nw, const Point2& x,
                      bool* hit = nullptr) {
  double sx = 0.0, sy = 0.0;
  bool coincident = false;
  const std::size_t n = m.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double dx = x.x - m[j].x, dy = x.y - m[j].y;
    const double r2 = dx * dx + dy * dy;
    if (r2 == 0.0) {
      coincident = true;
      continue;
    }
    const double f = (dx * nw[j].x + dy * nw[j].y) / r2;
    sx += dx * f;
    sy += dy * f;
  }
  if (hit) *hit = coincident;
  return {sx, sy};
}

}  // namespace detail

/// Velocity at any point.  A marker coinciding with x contributes 0, the
/// limit of the integrand there.
inline Vec2 boundary_velocity(const Contour& c, const FrameData& fr, const KernelSpec& k,
                              const Point2& x) {
  return -1.0 * (k.matrix() * detail::layer_sum(c.markers(), fr.normal_weight, x));
}

inline Vec2 boundary_velocity(const Contour& c, const KernelSpec& k, const Point2& x) {
  return boundary_velocity(c, frames(c), k, x);
}

/// Same quadrature as boundary_velocity, reporting whether x sat on a marker.
/// Accuracy degrades as x approaches the contour between markers.
inline VelocitySample interior_exterior_velocity(const Contour& c, const FrameData& fr,
                                                 const KernelSpec& k, const Point2& x) {
  bool hit = false;
  const Vec2 s = detail::layer_sum(c.markers(), fr.normal_weight, x, &hit);
  return {x, -1.0 * (k.matrix() * s), hit};
}

inline VelocitySample interior_exterior_velocity(const Contour& c, const KernelSpec& k,
                                                 const Point2& x) {
  return interior_exterior_velocity(c, frames(c), k, x);
}

/// Velocity at every marker of c (the right-hand side of the contour
/// dynamics equation).
inline std::vector<Vec2> marker_velocities(const Contour& c, const FrameData& fr,
                                           const KernelSpec& k) {
  std::vector<Vec2> out(c.size());
  const auto m = c.markers();
  parallel_for(c.size(), [&](std::size_t i) {
    out[i] = -1.0 * (k.matrix() * detail::layer_sum(m, fr.normal_weight, m[i]));
  });
  return out;
}

inline GradSample grad_velocity(const Contour& c, const FrameData& fr, const KernelSpec& k,
                                const Point2& x) {
  Mat2 g;  // g(l, j) = sum d_l nw_j / |d|^2
  const std::size_t n = c.size();
  for (std::size_t j = 0; j < n; ++j) {
    const Vec2 d = x - c[j];
    const double r2 = norm2(d);
    if (r2 == 0.0) throw SingularityError("grad_velocity evaluated on a marker");
    const Vec2& w = fr.normal_weight[j];
    g(0, 0) += d.x * w.x / r2;
    g(0, 1) += d.x * w.y / r2;
    g(1, 0) += d.y * w.x / r2;
    g(1, 1) += d.y * w.y / r2;
  }
  GradSample s{x, -1.0 * (k.matrix() * g), 0.0};
  s.divergence = s.grad_v.trace();
  return s;
}

inline GradSample grad_velocity(const Contour& c, const KernelSpec& k, const Point2& x) {
  return grad_velocity(c, frames(c), k, x);
}

/// Distance from x to the marker polygon.
inline double distance_to_polygon(const Contour& c, const Point2& x) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = c.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& p = c[i];
    const Vec2 e = c[(i + 1) % n] - p;
    const double t = std::clamp(dot(x - p, e) / norm2(e), 0.0, 1.0);
    best = std::min(best, norm(x - (p + t * e)));
  }
  return best;
}

/// Second derivatives; flags under_resolved when N * dist(x, dD) < 10.
inline SecondGradSample second_grad_velocity(const Contour& c, const FrameData& fr,
                                             const KernelSpec& k, const Point2& x) {
  SecondGradSample s{x, {}, false};
  const std::size_t n = c.size();
  for (std::size_t j = 0; j < n; ++j) {
    const Vec2 d = x - c[j];
    if (norm2(d) == 0.0) throw SingularityError("second_grad_velocity evaluated on a marker");
    const Mat2 gk = k.grad(d);  // gk(i, l) = d_l k_i
    const Vec2& w = fr.normal_weight[j];
    for (int i = 0; i < 2; ++i)
      for (int jj = 0; jj < 2; ++jj)
        for (int l = 0; l < 2; ++l) s.d2v(i, jj, l) -= gk(i, l) * w[jj];
  }
  s.under_resolved = distance_to_polygon(c, x) < 5.0 * max_spacing(c);
  return s;
}

inline SecondGradSample second_grad_velocity(const Contour& c, const KernelSpec& k,
                                             const Point2& x) {
  return second_grad_velocity(c, frames(c), k, x);
}

}  // namespace patchflow
