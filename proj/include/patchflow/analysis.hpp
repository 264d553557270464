#pragma once

// Numerical checks of singular-integral statements on patches: principal
// values on the boundary, the distance scaling of second derivatives near a
// C^{1+gamma} boundary, interior Beurling constancy for ellipses, and the
// solid/boundary commutator identity.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "patchflow/diagnostics.hpp"
#include "patchflow/field.hpp"
#include "patchflow/geometry.hpp"
#include "patchflow/kernels.hpp"
#include "patchflow/parallel.hpp"
#include "patchflow/quadrature.hpp"
#include "patchflow/spectral.hpp"

namespace patchflow {

// ---------------------------------------------------------------------------
// Principal values

struct PvResult {
  Point2 location;
  std::vector<double> epsilons;  // decreasing, eps_{m+1} = eps_m / 2
  std::vector<double> truncated_values;
  double extrapolated_limit{0.0};
  double observed_order{0.0};  // convergence order used by the extrapolation

  /// |I(eps_m) - I(eps_{m+1})| for consecutive radii.
  std::vector<double> differences() const {
    std::vector<double> d;
    for (std::size_t m = 0; m + 1 < truncated_values.size(); ++m)
      d.push_back(std::abs(truncated_values[m] - truncated_values[m + 1]));
    return d;
  }
};

struct PvOptions {
  std::function<double(const Point2&)> weight;  // phi; empty means phi = 1
  bool subtract_at_x{false};                    // integrate phi(y) - phi(x)
  double eps_max{0.25};
  double fallback_order{1.0};  // used when the measured order is unusable
};

namespace detail {

struct Truncation {
  double value{0.0};
  double alpha_plus{0.0};   // forward crossing |X - x| = eps
  double alpha_minus{0.0};  // backward crossing, in (alpha_x - 2 pi, alpha_x)
};

// Parameter where |X(alpha) - x| = eps walking from marker i in direction dir.
inline double crossing(const Contour& c, const spectral::TrigInterpolant& X, std::size_t i,
                       int dir, double eps) {
  const std::size_t n = c.size();
  const double da = 2.0 * pi / static_cast<double>(n);
  const double ax = da * static_cast<double>(i);
  const Point2 x = c[i];
  for (std::size_t k = 1; k <= n / 2; ++k) {
    const std::size_t j = dir > 0 ? (i + k) % n : (i + n - k % n) % n;
    if (norm(c[j] - x) > eps) {
      double lo = ax + dir * da * static_cast<double>(k - 1);
      double hi = ax + dir * da * static_cast<double>(k);
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (norm(X.position(mid) - x) > eps) hi = mid; else lo = mid;
      }
      return 0.5 * (lo + hi);
    }
  }
  throw DomainError("truncation radius exceeds the contour");
}

// Gauss-Legendre nodes of every full grid panel [alpha_m, alpha_m+1], computed
// once per contour by shifted inverse DFTs.
struct PanelNodes {
  static constexpr int order = 8;
  std::vector<std::vector<Point2>> position;  // [node][panel]
  std::vector<std::vector<Vec2>> derivative;
  std::vector<double> weight;                 // per node, already scaled to the panel width

  explicit PanelNodes(const spectral::TrigInterpolant& X) {
    const auto& gl = gauss_legendre(order);
    const double da = 2.0 * pi / static_cast<double>(X.size());
    for (std::size_t q = 0; q < gl.size(); ++q) {
      const double shift = 0.5 * da * (1.0 + gl.nodes[q]);
      position.push_back(spectral::shifted_samples(X, shift, false));
      derivative.push_back(spectral::shifted_samples(X, shift, true));
      weight.push_back(0.5 * da * gl.weights[q]);
    }
  }
};

// int_{|X(alpha) - x| > eps} K(x - X) psi(X) N_j(alpha) d alpha, N = n |X'|.
template <class Psi>
Truncation truncated_boundary(const Contour& c, const spectral::TrigInterpolant& X,
                              const PanelNodes& nodes, std::size_t i, double eps,
                              const KernelComponent& kc, int j, Psi&& psi) {
  const std::size_t n = c.size();
  const double da = 2.0 * pi / static_cast<double>(n);
  const Point2 x = c[i];
  Truncation t;
  t.alpha_plus = crossing(c, X, i, +1, eps);
  t.alpha_minus = crossing(c, X, i, -1, eps);
  const double a0 = t.alpha_plus, a1 = t.alpha_minus + 2.0 * pi;
  const auto& gl = gauss_legendre(PanelNodes::order);
  auto term = [&](const Point2& y, const Vec2& d) {
    const Vec2 nn{d.y, -d.x};
    return kc.eval(x - y) * psi(y) * nn[j];
  };
  double sum = 0.0;
  auto partial = [&](double lo, double hi) {
    gl.apply(lo, hi, [&](double a, double w) { sum += w * term(X.position(a), X.derivative(a)); });
  };
  // Whole panels m0 .. m1-1 lie inside (a0, a1); the two ends are partial.
  const long m0 = static_cast<long>(std::ceil(a0 / da));
  const long m1 = static_cast<long>(std::floor(a1 / da));
  if (m1 <= m0) {
    partial(a0, a1);
  } else {
    partial(a0, da * static_cast<double>(m0));
    for (long m = m0; m < m1; ++m) {
      const std::size_t p = static_cast<std::size_t>(((m % static_cast<long>(n)) + static_cast<long>(n)) %
                                                     static_cast<long>(n));
      for (std::size_t q = 0; q < nodes.weight.size(); ++q)
        sum += nodes.weight[q] * term(nodes.position[q][p], nodes.derivative[q][p]);
    }
    partial(da * static_cast<double>(m1), a1);
  }
  t.value = sum;
  return t;
}

inline std::vector<double> pv_radii(const Contour& c, double eps_min, double eps_max) {
  if (!(eps_min > 0.0)) throw DomainError("eps_min must be positive");
  if (eps_min < 4.0 * max_spacing(c))
    throw DomainError("eps_min below resolution: need eps_min >= 4 * marker spacing");
  std::vector<double> eps;
  for (double e = eps_max; e >= eps_min * (1.0 - 1e-12); e *= 0.5) eps.push_back(e);
  if (eps.size() < 2) throw DomainError("need at least two truncation radii between eps_min and eps_max");
  return eps;
}

// Richardson on I(eps) = I0 + C eps^p with p measured from the last three radii.
inline void extrapolate(PvResult& r, double fallback) {
  const auto& v = r.truncated_values;
  const std::size_t m = v.size();
  double p = fallback;
  if (m >= 3) {
    const double d0 = v[m - 3] - v[m - 2], d1 = v[m - 2] - v[m - 1];
    if (d0 != 0.0 && d1 != 0.0 && (d0 > 0.0) == (d1 > 0.0)) {
      const double est = std::log2(d0 / d1);
      if (std::isfinite(est)) p = std::clamp(est, 0.1, 4.0);
    }
  }
  r.observed_order = p;
  const double d = v[m - 2] - v[m - 1];
  r.extrapolated_limit = v[m - 1] - d / (std::exp2(p) - 1.0);
}

}  // namespace detail

/// Truncated integrals  int_{dD, |y - x| > eps} K(x - y) phi(y) n_j(y) d sigma(y)
/// at marker x for eps = eps_max, eps_max / 2, ... >= eps_min, and their
/// extrapolated principal value.  The boundary is the trigonometric
/// interpolant of the markers and truncation is exact on it.
inline PvResult pv_boundary(const Contour& c, const KernelComponent& kc, int j, std::size_t marker,
                            double eps_min, const PvOptions& opt = {}) {
  if (marker >= c.size()) throw DomainError("marker index out of range");
  if (j < 0 || j > 1) throw DomainError("normal component must be 0 or 1");
  const spectral::TrigInterpolant X(c.markers());
  const detail::PanelNodes nodes(X);
  const Point2 x = c[marker];
  const double phi_x = opt.weight && opt.subtract_at_x ? opt.weight(x) : 0.0;
  auto psi = [&](const Point2& y) { return opt.weight ? opt.weight(y) - phi_x : 1.0; };

  PvResult r;
  r.location = x;
  r.epsilons = detail::pv_radii(c, eps_min, opt.eps_max);
  for (double e : r.epsilons)
    r.truncated_values.push_back(detail::truncated_boundary(c, X, nodes, marker, e, kc, j, psi).value);
  detail::extrapolate(r, opt.fallback_order);
  return r;
}

/// Principal value of the solid integral  int_D L(x - y) dA(y)  at marker x
/// for the even kernel L = d_j K.  Each truncation over D \ B(x, eps) is
/// reduced to the boundary and the interior arc of the circle |y - x| = eps:
///   -int_{dD, |y-x|>eps} K(x - y) n_j d sigma - int_arc K(w) w_j d phi.
inline PvResult pv_solid(const Contour& c, const KernelComponent& kc, int j, std::size_t marker,
                         double eps_min, const PvOptions& opt = {}) {
  if (marker >= c.size()) throw DomainError("marker index out of range");
  if (j < 0 || j > 1) throw DomainError("derivative index must be 0 or 1");
  const spectral::TrigInterpolant X(c.markers());
  const detail::PanelNodes nodes(X);
  const Point2 x = c[marker];
  const auto& gl = gauss_legendre(32);

  PvResult r;
  r.location = x;
  r.epsilons = detail::pv_radii(c, eps_min, opt.eps_max);
  for (double e : r.epsilons) {
    const auto t = detail::truncated_boundary(c, X, nodes, marker, e, kc, j,
                                                [](const Point2&) { return 1.0; });
    const Vec2 wp = X.position(t.alpha_plus) - x, wm = X.position(t.alpha_minus) - x;
    const double phi0 = std::atan2(wp.y, wp.x);
    double sweep = std::atan2(wm.y, wm.x) - phi0;
    while (sweep <= 0.0) sweep += 2.0 * pi;
    double arc = 0.0;
    gl.apply(phi0, phi0 + sweep, [&](double ph, double w) {
      const Vec2 om{std::cos(ph), std::sin(ph)};
      arc += w * kc.eval(om) * om[j];
    });
    r.truncated_values.push_back(-t.value - arc);
  }
  detail::extrapolate(r, opt.fallback_order);
  return r;
}

// ---------------------------------------------------------------------------
// Second-derivative scaling near the boundary

struct VasinSample {
  double d{0.0};
  double m{0.0};        // max |d_l d_j v_i| over probes and entries
  double product{0.0};  // m d^{1 - gamma}
};

struct VasinProfile {
  double gamma{0.0};
  std::vector<VasinSample> samples;
  double slope{0.0};  // least-squares slope of log m against log d

  double product_ratio() const {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& s : samples) {
      lo = std::min(lo, s.product);
      hi = std::max(hi, s.product);
    }
    return hi / lo;
  }
};

/// Marker 0 and its two neighbours on each side, plus 64 evenly spread markers.
inline std::vector<std::size_t> default_probe_markers(std::size_t n) {
  std::vector<std::size_t> idx{0, 1, 2, n - 1, n - 2};
  for (std::size_t k = 1; k < 64; ++k) idx.push_back(k * n / 64);
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

/// For each d, probes x = m_i +- d n_i at the given markers; records the
/// largest second-derivative entry.  Requires d in [1e-4, 1e-1] and
/// N d >= 10.
inline VasinProfile vasin_profile(const Contour& c, const KernelSpec& k, double gamma,
                                  const std::vector<double>& distances,
                                  std::vector<std::size_t> probe_markers = {}) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("gamma must lie in (0, 1)");
  if (distances.empty()) throw DomainError("no probe distances");
  const double n = static_cast<double>(c.size());
  for (double d : distances) {
    if (!(d >= 1e-4 && d <= 1e-1)) throw DomainError("probe distance outside [1e-4, 1e-1]");
    if (n * d < 10.0)
      throw DomainError("resolution violation: N * d = " + std::to_string(n * d) + " < 10");
  }
  if (probe_markers.empty()) probe_markers = default_probe_markers(c.size());
  for (auto i : probe_markers)
    if (i >= c.size()) throw DomainError("probe marker index out of range");

  const FrameData fr = frames(c);
  VasinProfile p;
  p.gamma = gamma;
  const std::size_t np = probe_markers.size();
  for (double d : distances) {
    std::vector<double> best(2 * np, 0.0);
    parallel_for(2 * np, [&](std::size_t q) {
      const std::size_t i = probe_markers[q / 2];
      const double side = q % 2 == 0 ? 1.0 : -1.0;
      const Point2 x = c[i] + (side * d) * fr.normal[i];
      best[q] = second_grad_velocity(c, fr, k, x).d2v.max_abs();
    });
    const double m = *std::max_element(best.begin(), best.end());
    p.samples.push_back({d, m, m * std::pow(d, 1.0 - gamma)});
  }
  if (p.samples.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& s : p.samples) {
      const double lx = std::log(s.d), ly = std::log(s.m);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    const double cnt = static_cast<double>(p.samples.size());
    p.slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Beurling transform inside a patch

struct BeurlingSample {
  Mat2 grad_v;  // grad_v(i, j) = d_j v_i for v = (1 / (pi z)) * chi_D
  std::complex<double> dv;      // d v      = (d_x - i d_y) v / 2
  std::complex<double> dbar_v;  // dbar v   = (d_x + i d_y) v / 2
};

inline double diameter(const Contour& c) {
  double best = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j) best = std::max(best, norm2(c[i] - c[j]));
  return std::sqrt(best);
}

/// Complex derivatives of the Cauchy field at an interior point at distance
/// more than 0.05 diam from the boundary.  With this normalisation
/// dbar v = 1 in D and dv is the Beurling transform of chi_D.
inline BeurlingSample beurling_interior(const Contour& c, const Point2& x) {
  if (!contains(c, x)) throw DomainError("beurling_interior needs an interior point");
  if (!(distance_to_polygon(c, x) > 0.05 * diameter(c)))
    throw DomainError("beurling_interior needs dist(x, boundary) > 0.05 diam");
  const Mat2 g = grad_velocity(c, KernelSpec::cauchy(), x).grad_v;
  BeurlingSample s;
  s.grad_v = g;
  s.dv = 0.5 * std::complex<double>(g(0, 0) + g(1, 1), g(1, 0) - g(0, 1));
  s.dbar_v = 0.5 * std::complex<double>(g(0, 0) - g(1, 1), g(1, 0) + g(0, 1));
  return s;
}

// ---------------------------------------------------------------------------
// Test fields and the commutator identity

struct TestField {
  std::string name;
  std::function<double(const Point2&)> value;
  std::function<Vec2(const Point2&)> gradient;
  std::function<Mat2(const Point2&)> hessian;
};

inline std::vector<TestField> test_fields() {
  return {
      {"linear", [](const Point2& p) { return 0.7 * p.x - 1.3 * p.y; },
       [](const Point2&) { return Vec2{0.7, -1.3}; }, [](const Point2&) { return Mat2{}; }},
      {"quadratic", [](const Point2& p) { return p.x * p.x + p.x * p.y; },
       [](const Point2& p) { return Vec2{2.0 * p.x + p.y, p.x}; },
       [](const Point2&) { return Mat2{{{2.0, 1.0}, {1.0, 0.0}}}; }},
      {"trig", [](const Point2& p) { return std::sin(p.x) * std::cos(p.y); },
       [](const Point2& p) {
         return Vec2{std::cos(p.x) * std::cos(p.y), -std::sin(p.x) * std::sin(p.y)};
       },
       [](const Point2& p) {
         const double sx = std::sin(p.x), cx = std::cos(p.x), sy = std::sin(p.y), cy = std::cos(p.y);
         return Mat2{{{-sx * cy, -cx * sy}, {-cx * sy, -sx * cy}}};
       }},
  };
}

inline std::optional<TestField> test_field(std::string_view name) {
  for (auto& f : test_fields())
    if (f.name == name) return f;
  return std::nullopt;
}

struct CommutatorOptions {
  int coordinate{0};  // c: derivative of Phi paired with d_m k_m
  int component{1};   // m: kernel component
  int angular_nodes{256};
  int radial_panels{16};
  int radial_order{8};
};

struct CommutatorResult {
  Point2 point;
  std::size_t marker{0};
  double ds{0.0};
  double db{0.0};
  double ds_error{0.0};
  double db_error{0.0};

  double difference() const { return std::abs(ds - db); }
  double tolerance() const { return ds_error + db_error; }
};

namespace detail {

// Angle of X(alpha) - x measured from the tangent t, in [0, pi] on a convex curve.
inline double relative_angle(const Vec2& t, const Vec2& d) {
  return std::atan2(cross(t, d), dot(t, d));
}

// Distance from x (marker i) to the boundary along direction angle delta
// from the tangent, delta in (0, pi).
inline double ray_length(const Contour& c, const spectral::TrigInterpolant& X, std::size_t i,
                         const Vec2& t, double delta) {
  const std::size_t n = c.size();
  const double da = 2.0 * pi / static_cast<double>(n);
  const Point2 x = c[i];
  auto ang = [&](std::size_t k) { return relative_angle(t, c[(i + k) % n] - x); };
  // Marker angles increase from 0 to pi along k = 1 .. n-1.
  std::size_t lo = 0, hi = n;  // ang(0) := 0, ang(n) := pi
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (ang(mid) < delta) lo = mid; else hi = mid;
  }
  double a = da * static_cast<double>(i + lo), b = da * static_cast<double>(i + hi);
  for (int it = 0; it < 55; ++it) {
    const double mid = 0.5 * (a + b);
    if (relative_angle(t, X.position(mid) - x) < delta) a = mid; else b = mid;
  }
  return norm(X.position(0.5 * (a + b)) - x);
}

struct SolidSums {
  double value{0.0};
  double magnitude{0.0};
};

inline SolidSums solid_commutator(const Contour& c, const spectral::TrigInterpolant& X,
                                  std::size_t i, const Vec2& t, const KernelSpec& k,
                                  const TestField& f, int cc, int mm, int angular, int panels,
                                  int order) {
  const Point2 x = c[i];
  const Vec2 gx = f.gradient(x);
  const auto& ga = gauss_legendre(angular);
  const auto& gr = gauss_legendre(order);
  std::vector<double> val(ga.size()), mag(ga.size());
  parallel_for(ga.size(), [&](std::size_t q) {
    const double delta = 0.5 * pi * (1.0 + ga.nodes[q]);
    const double wd = 0.5 * pi * ga.weights[q];
    const Vec2 om{t.x * std::cos(delta) - t.y * std::sin(delta),
                  t.x * std::sin(delta) + t.y * std::cos(delta)};
    const double r_max = ray_length(c, X, i, t, delta);
    const Mat2 g = k.grad(om);  // g(i, j) = d_j k_i at the unit direction
    const double gmm = g(mm, mm), gmc = g(mm, cc);
    double s = 0.0, a = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double u0 = static_cast<double>(p) / panels, u1 = static_cast<double>(p + 1) / panels;
      gr.apply(r_max * u0 * u0, r_max * u1 * u1, [&](double r, double w) {
        const Vec2 gy = f.gradient(x + r * om);
        const double h = (gmm * (gy[cc] - gx[cc]) - gmc * (gy[mm] - gx[mm])) / r;
        s += w * h;
        a += std::abs(w * h);
      });
    }
    val[q] = wd * s;
    mag[q] = wd * a;
  });
  SolidSums out;
  for (std::size_t q = 0; q < ga.size(); ++q) {
    out.value += val[q];
    out.magnitude += mag[q];
  }
  return out;
}

// Trapezoidal boundary commutator on markers i, i + stride, ... (weights scaled
// by stride).  The diagonal term is the limit of the integrand at y = x.
inline SolidSums boundary_commutator(const Contour& c, const FrameData& fr, std::size_t i,
                                     const KernelSpec& k, const TestField& f, int cc, int mm,
                                     std::size_t stride) {
  const std::size_t n = c.size();
  const Point2 x = c[i];
  const Vec2 gx = f.gradient(x);
  SolidSums out;
  const double sw = static_cast<double>(stride);
  for (std::size_t s = 0; s < n; s += stride) {
    const std::size_t j = (i + s) % n;
    double term;
    if (j == i) {
      const Vec2 t = fr.tangent[i];
      const Vec2 ht = f.hessian(x) * t;
      const double km = k.eval(t)[mm];
      term = km * (ht[cc] * fr.normal_weight[i][mm] - ht[mm] * fr.normal_weight[i][cc]);
    } else {
      const Vec2 gy = f.gradient(c[j]);
      const double km = k.eval(x - c[j])[mm];
      term = km * ((gx[cc] - gy[cc]) * fr.normal_weight[j][mm] -
                   (gx[mm] - gy[mm]) * fr.normal_weight[j][cc]);
    }
    out.value += sw * term;
    out.magnitude += std::abs(sw * term);
  }
  return out;
}

}  // namespace detail

/// Solid and boundary forms of the commutator difference at marker x of a
/// convex contour, with c = opt.coordinate and m = opt.component:
///   DS = int_D d_m k_m(x-y) (d_c Phi(y) - d_c Phi(x)) - d_c k_m(x-y) (d_m Phi(y) - d_m Phi(x)) dA
///   DB = oint k_m(x-y) [(d_c Phi(x) - d_c Phi(y)) n_m - (d_m Phi(x) - d_m Phi(y)) n_c] d sigma
/// Error estimates compare against a coarser rule and add a rounding floor.
inline CommutatorResult commutator_identity(const Contour& c, const KernelSpec& k,
                                            const TestField& f, std::size_t marker,
                                            const CommutatorOptions& opt = {}) {
  if (marker >= c.size()) throw DomainError("marker index out of range");
  if (!is_convex(c)) throw GeometryError("unsupported geometry: commutator check needs a convex contour");
  const int cc = opt.coordinate, mm = opt.component;
  if (cc < 0 || cc > 1 || mm < 0 || mm > 1) throw DomainError("coordinate indices must be 0 or 1");
  if (opt.angular_nodes < 4 || opt.radial_panels < 2 || opt.radial_order < 2)
    throw DomainError("commutator quadrature too coarse");

  const spectral::TrigInterpolant X(c.markers());
  const FrameData fr = frames(c);
  const Vec2 t = fr.tangent[marker];
  constexpr double floor_factor = 64.0 * std::numeric_limits<double>::epsilon();

  CommutatorResult r;
  r.point = c[marker];
  r.marker = marker;

  const auto fine = detail::solid_commutator(c, X, marker, t, k, f, cc, mm, opt.angular_nodes,
                                             opt.radial_panels, opt.radial_order);
  const auto coarse = detail::solid_commutator(c, X, marker, t, k, f, cc, mm,
                                               opt.angular_nodes / 2, opt.radial_panels / 2,
                                               opt.radial_order);
  r.ds = fine.value;
  r.ds_error = std::abs(fine.value - coarse.value) + floor_factor * fine.magnitude;

  const auto full = detail::boundary_commutator(c, fr, marker, k, f, cc, mm, 1);
  const auto half = detail::boundary_commutator(c, fr, marker, k, f, cc, mm, 2);
  r.db = full.value;
  r.db_error = std::abs(full.value - half.value) + floor_factor * full.magnitude;
  return r;
}

}  // namespace patchflow
