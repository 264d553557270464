#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "patchflow/ellipse_oracle.hpp"
#include "patchflow/geometry.hpp"
#include "patchflow/parallel.hpp"

namespace patchflow {

/// Discrete Hoelder-gamma seminorm of the unit normal:
///   max |n_i - n_j| / |m_i - m_j|^gamma
/// over marker pairs with 2 h <= |m_i - m_j| <= max_separation, h the mean
/// marker spacing.
inline double holder_normal(const Contour& c, double gamma,
                            double max_separation = std::numeric_limits<double>::infinity(),
                            DerivativeScheme scheme = DerivativeScheme::spectral) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("Hoelder exponent must lie in (0, 1]");
  const FrameData fr = frames(c, scheme);
  const std::size_t n = c.size();
  double spacing = 0.0;
  for (double h : segment_lengths(c)) spacing += h;
  spacing /= static_cast<double>(n);
  const double lo2 = 4.0 * spacing * spacing;
  const double hi2 = max_separation * max_separation;

  std::vector<double> row(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    double best = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double r2 = norm2(c[i] - c[j]);
      if (r2 < lo2 || r2 > hi2) continue;
      const double num = norm(fr.normal[i] - fr.normal[j]);
      best = std::max(best, num * std::exp(-0.5 * gamma * std::log(r2)));
    }
    row[i] = best;
  });
  double m = 0.0;
  for (double v : row) m = std::max(m, v);
  return m;
}

struct DiagnosticsRecord {
  double t{0.0};
  double area{0.0};
  double perimeter{0.0};
  Point2 centroid;
  EllipseState fit;
  double sum_ab{0.0};
  double skew_inv{0.0};
  double holder_normal{0.0};
};

inline constexpr double diagnostics_holder_exponent = 0.5;

inline DiagnosticsRecord diagnostics(const Contour& c, double t) {
  DiagnosticsRecord r;
  r.t = t;
  r.area = area(c);
  r.perimeter = perimeter(c);
  r.centroid = centroid(c);
  r.fit = fit_ellipse(c);
  const auto inv = ellipse::conserved(r.fit);
  r.sum_ab = inv.sum;
  r.skew_inv = inv.skew;
  r.holder_normal = holder_normal(c, diagnostics_holder_exponent);
  return r;
}

}  // namespace patchflow
