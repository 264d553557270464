#pragma once

// Closed planar marker curves: construction, frames, integral quantities,
// ellipse fitting, resampling and validity checks.
//
// A contour is the sequence of markers X(alpha_k), alpha_k = 2 pi k / N, of a
// closed counterclockwise curve.  Integral quantities default to the periodic
// trapezoidal rule in alpha with spectrally differentiated markers, which is
// exact for trigonometric polynomials (ellipses in particular) and spectrally
// accurate for smooth curves.  The polygon scheme treats the markers as the
// vertices of a polygon and integrates that polygon exactly.

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "patchflow/ellipse_state.hpp"
#include "patchflow/spectral.hpp"
#include "patchflow/types.hpp"

namespace patchflow {

inline constexpr std::size_t min_markers = 16;

/// Signed area of the polygon through the markers (shoelace formula).
inline double polygon_signed_area(std::span<const Point2> pts) {
  const std::size_t n = pts.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += cross(pts[i], pts[(i + 1) % n]);
  return 0.5 * s;
}

/// Ordered closed marker curve.  Invariants checked on construction: at least
/// 16 finite markers, counterclockwise orientation.  Simplicity is O(N^2) to
/// verify and is left to is_simple().
class Contour {
 public:
  explicit Contour(std::vector<Point2> markers) : markers_(std::move(markers)) {
    if (markers_.size() < min_markers)
      throw GeometryError("contour needs at least " + std::to_string(min_markers) +
                          " markers, got " + std::to_string(markers_.size()));
    for (const auto& p : markers_)
      if (!isfinite(p)) throw GeometryError("contour marker is not finite");
    if (!(polygon_signed_area(markers_) > 0.0))
      throw GeometryError("contour must be counterclockwise (positive signed area)");
  }

  std::size_t size() const { return markers_.size(); }
  const Point2& operator[](std::size_t i) const { return markers_[i]; }
  std::span<const Point2> markers() const { return markers_; }
  auto begin() const { return markers_.begin(); }
  auto end() const { return markers_.end(); }

 private:
  std::vector<Point2> markers_;
};

/// Markers e^{i theta}(a cos s_k, b sin s_k), s_k = 2 pi k / N.
inline Contour make_ellipse_contour(double a, double b, double theta, std::size_t n) {
  if (!(a > 0.0) || !(b > 0.0)) throw GeometryError("ellipse semi-axes must be positive");
  if (n < min_markers) throw GeometryError("ellipse contour needs at least 16 markers");
  const double c = std::cos(theta), s = std::sin(theta);
  std::vector<Point2> pts(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = 2.0 * pi * static_cast<double>(k) / static_cast<double>(n);
    const double x = a * std::cos(t), y = b * std::sin(t);
    pts[k] = {c * x - s * y, s * x + c * y};
  }
  return Contour(std::move(pts));
}

namespace detail {

// C-infinity step: 0 for u <= 0, 1 for u >= 1.
inline double smooth_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double g0 = std::exp(-1.0 / u), g1 = std::exp(-1.0 / (1.0 - u));
  return g0 / (g0 + g1);
}

}  // namespace detail

/// Radial profile of the bump contour at parameter s.
inline double bump_radius(double gamma, double eps, double s) {
  const double sw = std::remainder(s, 2.0 * pi);  // (-pi, pi]
  const double inner = pi / 3.0, outer = 2.0 * pi / 3.0;
  const double window = detail::smooth_step((outer - std::abs(sw)) / (outer - inner));
  return 1.0 + eps * std::pow(std::abs(std::sin(0.5 * s)), 1.0 + gamma) * window;
}

/// Unit circle with a radial C^{1+gamma} (not C^2) bump centered at s = 0.
inline Contour make_bump_contour(double gamma, double eps, std::size_t n) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw GeometryError("bump exponent must lie in (0, 1)");
  if (!(eps >= 0.0 && eps <= 0.2)) throw GeometryError("bump amplitude must lie in [0, 0.2]");
  if (n < min_markers) throw GeometryError("bump contour needs at least 16 markers");
  std::vector<Point2> pts(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double s = 2.0 * pi * static_cast<double>(k) / static_cast<double>(n);
    const double r = bump_radius(gamma, eps, s);
    pts[k] = {r * std::cos(s), r * std::sin(s)};
  }
  return Contour(std::move(pts));
}

/// Star-shaped contour r(s) (cos s, sin s), s_k = 2 pi k / N.
template <class Radius>
Contour make_radial_contour(Radius&& r, std::size_t n) {
  if (n < min_markers) throw GeometryError("radial contour needs at least 16 markers");
  std::vector<Point2> pts(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double s = 2.0 * pi * static_cast<double>(k) / static_cast<double>(n);
    const double rho = r(s);
    if (!(rho > 0.0)) throw GeometryError("radial contour needs a positive radius");
    pts[k] = {rho * std::cos(s), rho * std::sin(s)};
  }
  return Contour(std::move(pts));
}

enum class DerivativeScheme { spectral, centered_difference };
enum class IntegralScheme { spectral, polygon };

/// Per-marker differential geometry.  normal_weight[i] = n_i w_i is the
/// discrete n d(sigma) used by every boundary integral.
struct FrameData {
  std::vector<Vec2> tangent;
  std::vector<Vec2> normal;
  std::vector<double> weight;
  std::vector<Vec2> normal_weight;
  std::vector<Vec2> derivative;  // dX/dalpha
};

inline FrameData frames(const Contour& c, DerivativeScheme scheme = DerivativeScheme::spectral) {
  const std::size_t n = c.size();
  const auto pts = c.markers();
  for (std::size_t i = 0; i < n; ++i)
    if (pts[i] == pts[(i + 1) % n])
      throw GeometryError("degenerate geometry: duplicate adjacent markers at index " +
                          std::to_string(i));

  FrameData f;
  f.derivative = scheme == DerivativeScheme::spectral ? spectral::derivative(pts)
                                                      : spectral::centered_difference(pts);
  f.tangent.resize(n);
  f.normal.resize(n);
  f.weight.resize(n);
  f.normal_weight.resize(n);
  const double dalpha = 2.0 * pi / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double speed = norm(f.derivative[i]);
    if (!(speed > 0.0))
      throw GeometryError("degenerate geometry: zero tangent at marker " + std::to_string(i));
    const Vec2 t = f.derivative[i] / speed;
    f.tangent[i] = t;
    f.normal[i] = {t.y, -t.x};
    if (scheme == DerivativeScheme::spectral) {
      f.weight[i] = speed * dalpha;
    } else {
      f.weight[i] = 0.5 * (norm(pts[(i + 1) % n] - pts[i]) + norm(pts[i] - pts[(i + n - 1) % n]));
    }
    f.normal_weight[i] = f.normal[i] * f.weight[i];
  }
  return f;
}

/// Chord lengths |m_{i+1} - m_i|.
inline std::vector<double> segment_lengths(const Contour& c) {
  const std::size_t n = c.size();
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) h[i] = norm(c[(i + 1) % n] - c[i]);
  return h;
}

/// max |segment| / min |segment|.
inline double spacing_ratio(const Contour& c) {
  const auto h = segment_lengths(c);
  const auto [lo, hi] = std::minmax_element(h.begin(), h.end());
  return *hi / *lo;
}

inline double max_spacing(const Contour& c) {
  const auto h = segment_lengths(c);
  return *std::max_element(h.begin(), h.end());
}

inline double perimeter(const Contour& c, IntegralScheme scheme = IntegralScheme::spectral) {
  double s = 0.0;
  if (scheme == IntegralScheme::polygon) {
    for (double h : segment_lengths(c)) s += h;
  } else {
    for (double w : frames(c).weight) s += w;
  }
  return s;
}

/// Raw area moments about a reference point: {A, Sx, Sy, Ixx, Iyy, Ixy}
/// with Sx = int (x - r.x) dA, Ixx = int (x - r.x)^2 dA, and so on.
struct AreaMoments {
  double area{0.0};
  double sx{0.0}, sy{0.0};
  double ixx{0.0}, iyy{0.0}, ixy{0.0};
};

inline AreaMoments area_moments(const Contour& c, Point2 ref, IntegralScheme scheme) {
  const std::size_t n = c.size();
  AreaMoments m;
  if (scheme == IntegralScheme::polygon) {
    for (std::size_t i = 0; i < n; ++i) {
      const Point2 p = c[i] - ref, q = c[(i + 1) % n] - ref;
      const double w = cross(p, q);
      m.area += 0.5 * w;
      m.sx += (p.x + q.x) * w / 6.0;
      m.sy += (p.y + q.y) * w / 6.0;
      m.ixx += (p.x * p.x + p.x * q.x + q.x * q.x) * w / 12.0;
      m.iyy += (p.y * p.y + p.y * q.y + q.y * q.y) * w / 12.0;
      m.ixy += (p.x * q.y + 2.0 * p.x * p.y + 2.0 * q.x * q.y + q.x * p.y) * w / 24.0;
    }
    return m;
  }
  // Green's theorem on the trigonometric interpolant of the markers.
  const auto d = spectral::derivative(c.markers());
  const double da = 2.0 * pi / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 p = c[i] - ref;
    const double xs = d[i].x * da, ys = d[i].y * da;
    m.area += 0.5 * (p.x * ys - p.y * xs);
    m.sx += 0.5 * p.x * p.x * ys;
    m.sy -= 0.5 * p.y * p.y * xs;
    m.ixx += p.x * p.x * p.x * ys / 3.0;
    m.iyy -= p.y * p.y * p.y * xs / 3.0;
    m.ixy += 0.5 * p.x * p.x * p.y * ys;
  }
  return m;
}

inline double area(const Contour& c, IntegralScheme scheme = IntegralScheme::spectral) {
  return area_moments(c, {}, scheme).area;
}

inline Point2 centroid(const Contour& c, IntegralScheme scheme = IntegralScheme::spectral) {
  // Moments are taken about the marker mean to limit cancellation.
  Point2 ref{};
  for (const auto& p : c) ref += p;
  ref = ref / static_cast<double>(c.size());
  const auto m = area_moments(c, ref, scheme);
  return ref + Vec2{m.sx / m.area, m.sy / m.area};
}

/// (1/A) int_D (x - c)(x - c)^T dA about the centroid c.
inline Mat2 second_moments(const Contour& c, IntegralScheme scheme = IntegralScheme::spectral) {
  const Point2 ctr = centroid(c, scheme);
  const auto m = area_moments(c, ctr, scheme);
  // First moments about the centroid vanish up to rounding; remove them anyway.
  const double ax = m.sx / m.area, ay = m.sy / m.area;
  Mat2 r;
  r(0, 0) = m.ixx / m.area - ax * ax;
  r(1, 1) = m.iyy / m.area - ay * ay;
  r(0, 1) = r(1, 0) = m.ixy / m.area - ax * ay;
  return r;
}

/// Eigenvalues (descending) of a symmetric 2x2 matrix and the angle of the
/// leading eigenvector in (-pi/2, pi/2].
struct SymmetricEigen {
  double lambda1{0.0};
  double lambda2{0.0};
  double angle{0.0};
};

inline SymmetricEigen symmetric_eigen(const Mat2& m) {
  const double mean = 0.5 * (m(0, 0) + m(1, 1));
  const double half_diff = 0.5 * (m(0, 0) - m(1, 1));
  const double rad = std::hypot(half_diff, m(0, 1));
  SymmetricEigen e{mean + rad, mean - rad, 0.0};
  e.angle = normalize_axis_angle(0.5 * std::atan2(2.0 * m(0, 1), m(0, 0) - m(1, 1)));
  return e;
}

/// Ellipse with the same area-normalised second moments: a = 2 sqrt(l1),
/// b = 2 sqrt(l2).  Equal eigenvalues (relative 1e-12) give theta = 0.
inline EllipseState fit_ellipse(const Contour& c, IntegralScheme scheme = IntegralScheme::spectral) {
  const auto e = symmetric_eigen(second_moments(c, scheme));
  if (!(e.lambda2 > 0.0)) throw GeometryError("ellipse fit failed: degenerate second moments");
  EllipseState s{2.0 * std::sqrt(e.lambda1), 2.0 * std::sqrt(e.lambda2), e.angle};
  if (e.lambda1 - e.lambda2 <= 1e-12 * e.lambda1) s.theta = 0.0;
  return s;
}

namespace detail {

inline int orientation(const Point2& a, const Point2& b, const Point2& c) {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

inline bool on_segment(const Point2& a, const Point2& b, const Point2& p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

inline bool segments_intersect(const Point2& p1, const Point2& p2, const Point2& q1,
                               const Point2& q2) {
  if (std::max(p1.x, p2.x) < std::min(q1.x, q2.x) || std::max(q1.x, q2.x) < std::min(p1.x, p2.x) ||
      std::max(p1.y, p2.y) < std::min(q1.y, q2.y) || std::max(q1.y, q2.y) < std::min(p1.y, p2.y))
    return false;
  const int o1 = orientation(p1, p2, q1), o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1), o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

}  // namespace detail

/// True iff no two non-adjacent polygon segments intersect.  O(N^2).
inline bool is_simple(std::span<const Point2> pts) {
  const std::size_t n = pts.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& p1 = pts[i];
    const Point2& p2 = pts[(i + 1) % n];
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // closing segment is adjacent to the first
      if (detail::segments_intersect(p1, p2, pts[j], pts[(j + 1) % n])) return false;
    }
  }
  return true;
}

inline bool is_simple(const Contour& c) { return is_simple(c.markers()); }

/// Mirror image across the horizontal axis, re-ordered to stay counterclockwise
/// with marker 0 fixed: m'_i = conj(m_{-i mod N}).
inline Contour reflect_conjugate(const Contour& c) {
  const std::size_t n = c.size();
  std::vector<Point2> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& p = c[(n - i) % n];
    pts[i] = {p.x, -p.y};
  }
  return Contour(std::move(pts));
}

namespace detail {

// Periodic cubic spline through closed data with knots t_0 < ... < t_{n-1}
// and period T = t_n.  Second derivatives solve the cyclic tridiagonal system
// via Sherman-Morrison.
class PeriodicCubicSpline {
 public:
  PeriodicCubicSpline(std::vector<double> knots, std::vector<Point2> values)
      : t_(std::move(knots)), p_(std::move(values)) {
    const std::size_t n = p_.size();
    h_.resize(n);
    for (std::size_t i = 0; i < n; ++i) h_[i] = t_[i + 1] - t_[i];
    std::vector<double> lower(n), diag(n), upper(n);
    std::vector<double> rx(n), ry(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t im = (i + n - 1) % n, ip = (i + 1) % n;
      lower[i] = h_[im];
      diag[i] = 2.0 * (h_[im] + h_[i]);
      upper[i] = h_[i];
      const Vec2 r = 6.0 * ((p_[ip] - p_[i]) / h_[i] - (p_[i] - p_[im]) / h_[im]);
      rx[i] = r.x;
      ry[i] = r.y;
    }
    const auto mx = solve_cyclic(lower, diag, upper, rx);
    const auto my = solve_cyclic(lower, diag, upper, ry);
    m_.resize(n);
    for (std::size_t i = 0; i < n; ++i) m_[i] = {mx[i], my[i]};
  }

  std::size_t segments() const { return p_.size(); }
  double segment_length_param(std::size_t i) const { return h_[i]; }

  /// Position on segment i at local parameter u in [0, h_i].
  Point2 position(std::size_t i, double u) const {
    const std::size_t ip = (i + 1) % p_.size();
    const double h = h_[i], a = (h - u) / h, b = u / h;
    return a * p_[i] + b * p_[ip] +
           ((a * a * a - a) * h * h / 6.0) * m_[i] + ((b * b * b - b) * h * h / 6.0) * m_[ip];
  }

  Vec2 derivative(std::size_t i, double u) const {
    const std::size_t ip = (i + 1) % p_.size();
    const double h = h_[i], a = (h - u) / h, b = u / h;
    return (p_[ip] - p_[i]) / h - ((3.0 * a * a - 1.0) * h / 6.0) * m_[i] +
           ((3.0 * b * b - 1.0) * h / 6.0) * m_[ip];
  }

  /// Arclength of segment i from 0 to u.
  double arclength(std::size_t i, double u) const {
    using boost::math::quadrature::gauss;
    return gauss<double, 10>::integrate([&](double s) { return norm(derivative(i, s)); }, 0.0, u);
  }

 private:
  static std::vector<double> solve_tridiagonal(std::vector<double> a, std::vector<double> b,
                                               std::vector<double> c, std::vector<double> d) {
    const std::size_t n = d.size();
    for (std::size_t i = 1; i < n; ++i) {
      const double w = a[i] / b[i - 1];
      b[i] -= w * c[i - 1];
      d[i] -= w * d[i - 1];
    }
    std::vector<double> x(n);
    x[n - 1] = d[n - 1] / b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (d[i] - c[i] * x[i + 1]) / b[i];
    return x;
  }

  static std::vector<double> solve_cyclic(const std::vector<double>& lower,
                                          const std::vector<double>& diag,
                                          const std::vector<double>& upper,
                                          const std::vector<double>& rhs) {
    const std::size_t n = rhs.size();
    const double alpha = upper[n - 1];  // A(n-1, 0)
    const double beta = lower[0];       // A(0, n-1)
    const double gamma = -diag[0];
    std::vector<double> a(lower), b(diag), c(upper);
    b[0] -= gamma;
    b[n - 1] -= alpha * beta / gamma;
    const auto x = solve_tridiagonal(a, b, c, rhs);
    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = alpha;
    const auto z = solve_tridiagonal(a, b, c, u);
    const double fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - fact * z[i];
    return out;
  }

  std::vector<double> t_;
  std::vector<Point2> p_;
  std::vector<double> h_;
  std::vector<Vec2> m_;
};

}  // namespace detail

/// Periodic cubic-spline (chord-length knots) reparametrisation to
/// n_target markers equally spaced in spline arclength, starting at marker 0.
inline Contour resample(const Contour& c, std::size_t n_target) {
  if (n_target < min_markers) throw GeometryError("resample target needs at least 16 markers");
  const std::size_t n = c.size();
  std::vector<double> knots(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) knots[i + 1] = knots[i] + norm(c[(i + 1) % n] - c[i]);
  detail::PeriodicCubicSpline spline(std::move(knots),
                                     std::vector<Point2>(c.markers().begin(), c.markers().end()));

  std::vector<double> cumulative(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    cumulative[i + 1] = cumulative[i] + spline.arclength(i, spline.segment_length_param(i));
  const double total = cumulative[n];

  std::vector<Point2> out(n_target);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < n_target; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(n_target);
    while (seg + 1 < n && cumulative[seg + 1] <= target) ++seg;
    const double local = target - cumulative[seg];
    const double h = spline.segment_length_param(seg);
    const double seg_len = cumulative[seg + 1] - cumulative[seg];
    if (local <= 0.0) {
      out[k] = spline.position(seg, 0.0);
      continue;
    }
    // Safeguarded Newton on s(u) = local within [0, h].
    double lo = 0.0, hi = h, u = h * local / seg_len;
    for (int it = 0; it < 60; ++it) {
      const double f = spline.arclength(seg, u) - local;
      if (std::abs(f) <= 1e-15 * total) break;
      if (f > 0.0) hi = u; else lo = u;
      const double speed = norm(spline.derivative(seg, u));
      double next = u - f / speed;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      u = next;
    }
    out[k] = spline.position(seg, u);
  }
  if (!is_simple(out)) throw GeometryError("resampled contour self-intersects");
  return Contour(std::move(out));
}

/// Strict convexity of the marker polygon: every turn is a left turn.
inline bool is_convex(const Contour& c) {
  const std::size_t n = c.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e0 = c[(i + 1) % n] - c[i];
    const Vec2 e1 = c[(i + 2) % n] - c[(i + 1) % n];
    if (!(cross(e0, e1) > 0.0)) return false;
  }
  return true;
}

/// Winding-number test against the marker polygon.
inline bool contains(const Contour& c, const Point2& x) {
  const std::size_t n = c.size();
  int wn = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& p = c[i];
    const Point2& q = c[(i + 1) % n];
    if (p.y <= x.y) {
      if (q.y > x.y && cross(q - p, x - p) > 0.0) ++wn;
    } else if (q.y <= x.y && cross(q - p, x - p) < 0.0) {
      --wn;
    }
  }
  return wn != 0;
}

}  // namespace patchflow
