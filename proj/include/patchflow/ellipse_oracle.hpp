#pragma once

// Exact dynamics of elliptical patches under the Cauchy kernel 1/(pi z).
// A centered ellipse E(a, b, theta) stays elliptical with
//
//   a' =  (2/S) a b cos 2theta
//   b' = -(2/S) a b cos 2theta
//   theta' = -(2/S) a b / (a - b) sin 2theta,      S = a0 + b0,
//
// and interior velocity v(z) = conj(z) - q e^{-2 i theta} z.

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "patchflow/ellipse_state.hpp"
#include "patchflow/types.hpp"

namespace patchflow::ellipse {

/// Axis-aligned solution from (a0, b0); valid for all real t.
inline EllipseState closed_form_axis_aligned(double a0, double b0, double t) {
  if (!(a0 > 0.0) || !(b0 > 0.0)) throw DomainError("semi-axes must be positive");
  const double e2t = std::exp(2.0 * t);
  const double den = b0 + a0 * e2t;
  return {a0 * (a0 + b0) * e2t / den, b0 * (a0 + b0) / den, 0.0};
}

struct Rates {
  double da{0.0};
  double db{0.0};
  double dtheta{0.0};
};

inline Rates ode_rhs(const EllipseState& s, double sum_ab) {
  const double c2 = std::cos(2.0 * s.theta), s2 = std::sin(2.0 * s.theta);
  const double g = 2.0 / sum_ab * s.a * s.b;
  Rates r{g * c2, -g * c2, 0.0};
  if (s2 != 0.0) {
    if (std::abs(s.a - s.b) < 1e-12)
      throw DomainError("singular ellipse state: a == b with sin(2 theta) != 0");
    r.dtheta = -g / (s.a - s.b) * s2;
  }
  return r;
}

/// First integrals a + b and (a - b) sin 2theta.
struct Conserved {
  double sum{0.0};
  double skew{0.0};
};

inline Conserved conserved(const EllipseState& s) {
  return {s.a + s.b, (s.a - s.b) * std::sin(2.0 * s.theta)};
}

struct EllipseTrajectory {
  std::vector<double> t;
  std::vector<EllipseState> states;
  double sum_ab{0.0};  // S = a0 + b0
  double skew{0.0};    // K = (a0 - b0) sin 2theta0
};

/// Classical RK4 on the ellipse system with S frozen at a0 + b0.  Negative
/// t_end integrates backward.  Every record_every-th step is stored, plus the
/// final state.  A disc initial state follows the axis-aligned closed form.
inline EllipseTrajectory integrate(const EllipseState& s0, double t_end, double dt,
                                   std::size_t record_every = 1) {
  if (!(s0.a > 0.0) || !(s0.b > 0.0)) throw DomainError("semi-axes must be positive");
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  if (record_every == 0) record_every = 1;

  EllipseTrajectory tr;
  const auto c0 = conserved(s0);
  tr.sum_ab = c0.sum;
  tr.skew = c0.skew;

  const std::size_t steps =
      t_end == 0.0 ? 0 : static_cast<std::size_t>(std::ceil(std::abs(t_end) / dt - 1e-9));
  const double h = steps == 0 ? 0.0 : t_end / static_cast<double>(steps);
  const bool disc = std::abs(s0.a - s0.b) < 1e-12;

  auto record = [&](std::size_t step, const EllipseState& s) {
    tr.t.push_back(static_cast<double>(step) * h);
    tr.states.push_back(s);
  };

  EllipseState s = s0;
  if (disc) s.theta = 0.0;
  record(0, s0);
  const double S = tr.sum_ab;
  for (std::size_t n = 1; n <= steps; ++n) {
    if (disc) {
      s = closed_form_axis_aligned(s0.a, s0.b, static_cast<double>(n) * h);
    } else {
      auto shift = [](const EllipseState& x, const Rates& r, double f) {
        return EllipseState{x.a + f * r.da, x.b + f * r.db, x.theta + f * r.dtheta};
      };
      const Rates k1 = ode_rhs(s, S);
      const Rates k2 = ode_rhs(shift(s, k1, 0.5 * h), S);
      const Rates k3 = ode_rhs(shift(s, k2, 0.5 * h), S);
      const Rates k4 = ode_rhs(shift(s, k3, h), S);
      s.a += h / 6.0 * (k1.da + 2.0 * k2.da + 2.0 * k3.da + k4.da);
      s.b += h / 6.0 * (k1.db + 2.0 * k2.db + 2.0 * k3.db + k4.db);
      s.theta += h / 6.0 * (k1.dtheta + 2.0 * k2.dtheta + 2.0 * k3.dtheta + k4.dtheta);
    }
    if (n % record_every == 0 || n == steps) record(n, s);
  }
  return tr;
}

/// Linear interior field as a matrix: v(z) = M z inside E(a, b, theta).
inline Mat2 interior_velocity_matrix(const EllipseState& s) {
  const double q = s.q(), c2 = std::cos(2.0 * s.theta), s2 = std::sin(2.0 * s.theta);
  return Mat2{{{1.0 - q * c2, -q * s2}, {q * s2, -(1.0 + q * c2)}}};
}

/// conj(z) - q e^{-2 i theta} z; meaningful for z inside the ellipse.
inline Vec2 interior_velocity(const EllipseState& s, const Point2& z) {
  const std::complex<double> w = to_complex(z);
  return from_complex(std::conj(w) - s.q() * std::polar(1.0, -2.0 * s.theta) * w);
}

/// theta_infinity in (0, pi/4) with sin 2theta_inf = (a0-b0)/(a0+b0) sin 2theta0.
inline double limit_angle(double a0, double b0, double theta0) {
  if (!(a0 > b0 && b0 > 0.0)) throw DomainError("limit_angle requires a0 > b0 > 0");
  if (!(theta0 > 0.0 && theta0 < pi / 2)) throw DomainError("limit_angle requires 0 < theta0 < pi/2");
  return 0.5 * std::asin((a0 - b0) / (a0 + b0) * std::sin(2.0 * theta0));
}

}  // namespace patchflow::ellipse
