#pragma once

#include <cmath>

#include "patchflow/types.hpp"

namespace patchflow {

/// Centered tilted ellipse E(a, b, theta) = e^{i theta} {x^2/a^2 + y^2/b^2 < 1}.
struct EllipseState {
  double a{1.0};
  double b{1.0};
  double theta{0.0};

  /// Eccentricity parameter q = (a - b) / (a + b) of the interior Cauchy field.
  double q() const { return (a - b) / (a + b); }
  double area() const { return pi * a * b; }
};

/// Maps an angle onto (-pi/2, pi/2]; E(a, b, theta) is pi-periodic in theta.
inline double normalize_axis_angle(double theta) {
  double t = std::remainder(theta, pi);  // [-pi/2, pi/2]
  if (t <= -pi / 2) t += pi;
  return t;
}

/// Signed distance between two axis angles modulo pi.
inline double axis_angle_difference(double a, double b) { return std::remainder(a - b, pi); }

}  // namespace patchflow
