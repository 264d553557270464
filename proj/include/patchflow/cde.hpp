#pragma once

// Time integration of the contour dynamics equation.  Markers are material
// points moved by the boundary-integral velocity of the current contour.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "patchflow/diagnostics.hpp"
#include "patchflow/field.hpp"
#include "patchflow/geometry.hpp"
#include "patchflow/kernels.hpp"

namespace patchflow {

enum class Integrator { rk4, heun };

struct SimConfig {
  double dt{1e-3};
  double t_end{1.0};
  Integrator integrator{Integrator::rk4};
  std::size_t n_markers{512};
  std::size_t resample_every{50};  // 0 disables resampling
  double resample_trigger{3.0};    // spacing ratio that allows a resample
  std::size_t diagnostics_every{10};
};

/// The contour self-intersected; carries the time at which it happened.
class BreakdownError : public GeometryError {
 public:
  BreakdownError(const std::string& what, double t) : GeometryError(what), time_(t) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// Velocity of every marker.
inline std::vector<Vec2> rhs(const Contour& c, const KernelSpec& k) {
  return marker_velocities(c, frames(c), k);
}

namespace detail {

inline Contour displaced(const Contour& c, const std::vector<Vec2>& v, double h) {
  std::vector<Point2> pts(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) pts[i] = c[i] + h * v[i];
  return Contour(std::move(pts));
}

}  // namespace detail

/// One explicit step.  Throws BreakdownError (time 0 relative to the step)
/// when the result is not a simple curve.
inline Contour step(const Contour& c, const KernelSpec& k, double dt,
                    Integrator integrator = Integrator::rk4) {
  if (dt < 0.0 || !std::isfinite(dt)) throw DomainError("time step must be finite and >= 0");
  if (dt == 0.0) return c;
  const std::size_t n = c.size();
  std::vector<Point2> next(c.begin(), c.end());
  try {
    if (integrator == Integrator::rk4) {
      const auto k1 = rhs(c, k);
      const auto k2 = rhs(detail::displaced(c, k1, 0.5 * dt), k);
      const auto k3 = rhs(detail::displaced(c, k2, 0.5 * dt), k);
      const auto k4 = rhs(detail::displaced(c, k3, dt), k);
      for (std::size_t i = 0; i < n; ++i)
        next[i] += (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    } else {
      const auto k1 = rhs(c, k);
      const auto k2 = rhs(detail::displaced(c, k1, dt), k);
      for (std::size_t i = 0; i < n; ++i) next[i] += (0.5 * dt) * (k1[i] + k2[i]);
    }
  } catch (const GeometryError& e) {
    throw BreakdownError(std::string("geometry breakdown during step: ") + e.what(), 0.0);
  }
  if (!is_simple(next)) throw BreakdownError("geometry breakdown: contour self-intersects", 0.0);
  try {
    return Contour(std::move(next));
  } catch (const GeometryError& e) {
    throw BreakdownError(std::string("geometry breakdown: ") + e.what(), 0.0);
  }
}

struct Snapshot {
  double t{0.0};
  Contour contour;
  DiagnosticsRecord diagnostics;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;  // strictly increasing t
  bool breakdown{false};
  double breakdown_time{0.0};
  std::string message;
  std::size_t resamples{0};
};

/// Repeated steps from c0 to cfg.t_end.  The number of steps is
/// ceil(t_end / dt) with the step shortened to land on t_end exactly.
/// Diagnostics are recorded at t = 0, every diagnostics_every steps and at the
/// final time.  A breakdown ends the run and is reported in the result.
/// on_snapshot, when given, sees each snapshot as it is recorded.
template <class OnSnapshot>
Trajectory evolve(const Contour& c0, const KernelSpec& k, const SimConfig& cfg,
                  OnSnapshot&& on_snapshot) {
  if (!(cfg.dt > 0.0)) throw DomainError("dt must be positive");
  if (!std::isfinite(cfg.t_end) || cfg.t_end < 0.0) throw DomainError("t_end must be finite and >= 0");
  const std::size_t every = cfg.diagnostics_every == 0 ? 1 : cfg.diagnostics_every;
  const std::size_t steps =
      cfg.t_end == 0.0 ? 0 : static_cast<std::size_t>(std::ceil(cfg.t_end / cfg.dt - 1e-9));
  const double h = steps == 0 ? 0.0 : cfg.t_end / static_cast<double>(steps);

  Trajectory tr;
  auto record = [&](double t, const Contour& c) {
    tr.snapshots.push_back({t, c, diagnostics(c, t)});
    on_snapshot(tr.snapshots.back());
  };

  Contour c = c0;
  record(0.0, c);
  for (std::size_t n = 1; n <= steps; ++n) {
    const double t_prev = static_cast<double>(n - 1) * h;
    try {
      c = step(c, k, h, cfg.integrator);
      if (cfg.resample_every > 0 && n % cfg.resample_every == 0 &&
          spacing_ratio(c) > cfg.resample_trigger) {
        c = resample(c, cfg.n_markers);
        ++tr.resamples;
      }
    } catch (const GeometryError& e) {
      tr.breakdown = true;
      tr.breakdown_time = t_prev + h;
      tr.message = e.what();
      return tr;
    }
    const double t = n == steps ? cfg.t_end : static_cast<double>(n) * h;
    if (n % every == 0 || n == steps) record(t, c);
  }
  return tr;
}

inline Trajectory evolve(const Contour& c0, const KernelSpec& k, const SimConfig& cfg) {
  return evolve(c0, k, cfg, [](const Snapshot&) {});
}

}  // namespace patchflow
