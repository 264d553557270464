#pragma once

// Batch runs shared by the command-line tool and the acceptance suite.  The
// plain functions compute a result from a RunConfig; write_* emit the CSV.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "patchflow/analysis.hpp"
#include "patchflow/cde.hpp"
#include "patchflow/config.hpp"
#include "patchflow/ellipse_oracle.hpp"
#include "patchflow/field.hpp"
#include "patchflow/io.hpp"

namespace patchflow::run {

// ---------------------------------------------------------------------------
// simulate

inline const std::vector<std::string>& diagnostics_header() {
  static const std::vector<std::string> h{"t",     "area",      "perimeter", "cx",     "cy",
                                          "a_fit", "b_fit",     "theta_fit", "sum_ab", "skew_inv",
                                          "holder_normal"};
  return h;
}

inline std::vector<double> diagnostics_row(const DiagnosticsRecord& d) {
  return {d.t,     d.area,      d.perimeter,          d.centroid.x, d.centroid.y, d.fit.a,
          d.fit.b, d.fit.theta, d.sum_ab,             d.skew_inv,   d.holder_normal};
}

/// Runs the contour dynamics for cfg and writes diagnostics.csv (plus frames
/// when enabled) into dir.  Pass an empty dir to skip all output.
inline Trajectory simulate(const RunConfig& cfg, const std::filesystem::path& dir) {
  const Contour c0 = make_shape(cfg.shape(), cfg.sim.n_markers);
  std::optional<io::CsvWriter> csv;
  const bool frames = cfg.emit_frames && !dir.empty();
  const std::size_t every = cfg.sim.diagnostics_every == 0 ? 1 : cfg.sim.diagnostics_every;
  if (frames && (cfg.frame_every == 0 || cfg.frame_every % every != 0))
    throw ConfigError("key 'frame_every': must be a positive multiple of diagnostics_every");
  if (!dir.empty()) {
    std::filesystem::create_directories(dir);
    csv.emplace(dir / "diagnostics.csv", diagnostics_header());
  }
  const io::ViewBox view = io::ViewBox::around(c0, 0.8);
  const double h = cfg.sim.t_end == 0.0
                       ? cfg.sim.dt
                       : cfg.sim.t_end / std::ceil(cfg.sim.t_end / cfg.sim.dt - 1e-9);
  std::size_t frame = 0;
  auto on_snapshot = [&](const Snapshot& s) {
    if (csv) csv->row(diagnostics_row(s.diagnostics));
    if (!frames) return;
    const auto step = static_cast<std::size_t>(std::llround(s.t / h));
    const bool final = std::abs(s.t - cfg.sim.t_end) < 1e-12;
    if (step % cfg.frame_every == 0 || final) {
      io::write_svg_frame(dir / io::frame_name(frame), s.contour, view, s.t);
      io::write_contour_csv(dir / io::frame_name(frame, "csv"), s.contour);
      ++frame;
    }
  };
  return evolve(c0, cfg.kernel, cfg.sim, on_snapshot);
}

// ---------------------------------------------------------------------------
// ellipse-ode

inline EllipseState initial_ellipse(const RunConfig& cfg) {
  const ShapeSpec s = cfg.shape();
  if (s.kind != ShapeKind::ellipse)
    throw ConfigError("this subcommand needs an ellipse initial shape (a0, b0, theta0)");
  return {s.params[0], s.params[1], s.params[2]};
}

inline ellipse::EllipseTrajectory ellipse_ode(const RunConfig& cfg) {
  return ellipse::integrate(initial_ellipse(cfg), cfg.sim.t_end, cfg.sim.dt, cfg.record_every);
}

inline void write_ellipse_ode(const std::filesystem::path& file, const ellipse::EllipseTrajectory& tr) {
  io::CsvWriter w(file, {"t", "a", "b", "theta", "sum_ab", "skew_inv"});
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    const auto& s = tr.states[i];
    const auto inv = ellipse::conserved(s);
    w.row({tr.t[i], s.a, s.b, s.theta, inv.sum, inv.skew});
  }
}

/// Largest deviation of a + b and (a - b) sin 2 theta from their initial values.
inline double conservation_drift(const ellipse::EllipseTrajectory& tr) {
  double d = 0.0;
  for (const auto& s : tr.states) {
    const auto c = ellipse::conserved(s);
    d = std::max({d, std::abs(c.sum - tr.sum_ab), std::abs(c.skew - tr.skew)});
  }
  return d;
}

// ---------------------------------------------------------------------------
// compare

struct CompareRow {
  double t{0.0};
  EllipseState sim, ref;
  double err_a{0.0}, err_b{0.0}, err_theta{0.0};
  double err_max() const { return std::max({err_a, err_b, err_theta}); }
};

struct CompareResult {
  std::vector<CompareRow> rows;
  Trajectory trajectory;
  double max_error() const {
    double m = 0.0;
    for (const auto& r : rows) m = std::max(m, r.err_max());
    return m;
  }
  double terminal_error() const { return rows.empty() ? 0.0 : rows.back().err_max(); }
};

/// Oracle states at the given increasing times: the closed form for an
/// axis-aligned start, RK4 on the ellipse system otherwise.
inline std::vector<EllipseState> reference_states(const EllipseState& s0,
                                                  const std::vector<double>& times, double ode_dt) {
  std::vector<EllipseState> out;
  if (s0.theta == 0.0) {
    for (double t : times) out.push_back(ellipse::closed_form_axis_aligned(s0.a, s0.b, t));
    return out;
  }
  EllipseState s = s0;
  double t_prev = 0.0;
  // S and K stay those of s0: each leg restarts from a state with the same invariants.
  for (double t : times) {
    if (t > t_prev) {
      s = ellipse::integrate(s, t - t_prev, ode_dt, std::numeric_limits<std::size_t>::max()).states.back();
      t_prev = t;
    }
    out.push_back(s);
  }
  return out;
}

/// Contour dynamics against the ellipse oracle, per recorded time.
inline CompareResult compare(const RunConfig& cfg) {
  if (cfg.kernel.variant() != KernelVariant::cauchy)
    throw ConfigError("key 'kernel': compare needs the cauchy kernel (the ellipse oracle is Cauchy-specific)");
  const EllipseState s0 = initial_ellipse(cfg);
  CompareResult res;
  res.trajectory = evolve(make_shape(cfg.shape(), cfg.sim.n_markers), cfg.kernel, cfg.sim);
  std::vector<double> times;
  for (const auto& s : res.trajectory.snapshots) times.push_back(s.t);
  const auto ref = reference_states(s0, times, cfg.ode_dt);
  for (std::size_t i = 0; i < times.size(); ++i) {
    CompareRow r;
    r.t = times[i];
    r.sim = res.trajectory.snapshots[i].diagnostics.fit;
    r.ref = ref[i];
    r.err_a = std::abs(r.sim.a - r.ref.a);
    r.err_b = std::abs(r.sim.b - r.ref.b);
    r.err_theta = std::abs(axis_angle_difference(r.sim.theta, r.ref.theta));
    res.rows.push_back(r);
  }
  return res;
}

inline void write_compare(const std::filesystem::path& file, const CompareResult& res) {
  io::CsvWriter w(file, {"t", "a_sim", "b_sim", "theta_sim", "a_ref", "b_ref", "theta_ref", "err_a",
                         "err_b", "err_theta", "err_max"});
  for (const auto& r : res.rows)
    w.row({r.t, r.sim.a, r.sim.b, r.sim.theta, r.ref.a, r.ref.b, r.ref.theta, r.err_a, r.err_b,
           r.err_theta, r.err_max()});
}

struct SweepRow {
  std::string sweep;  // "dt" or "n_markers"
  double value{0.0};
  double terminal_error{0.0};
  bool breakdown{false};
};

/// Terminal compare error for each entry of dt_sweep and n_markers_sweep.
inline std::vector<SweepRow> sweeps(const RunConfig& cfg) {
  std::vector<SweepRow> rows;
  for (double dt : cfg.dt_sweep) {
    RunConfig c = cfg;
    c.sim.dt = dt;
    if (cfg.dt_sweep_shape) c.shape_override = cfg.dt_sweep_shape;
    if (cfg.dt_sweep_resample_every) c.sim.resample_every = *cfg.dt_sweep_resample_every;
    const auto r = compare(c);
    rows.push_back({"dt", dt, r.terminal_error(), r.trajectory.breakdown});
  }
  for (std::size_t n : cfg.n_markers_sweep) {
    RunConfig c = cfg;
    c.sim.n_markers = n;
    const auto r = compare(c);
    rows.push_back({"n_markers", static_cast<double>(n), r.terminal_error(), r.trajectory.breakdown});
  }
  return rows;
}

inline void write_sweeps(const std::filesystem::path& file, const std::vector<SweepRow>& rows) {
  io::CsvWriter w(file, {"sweep", "value", "terminal_error"});
  for (const auto& r : rows) w.row(r.sweep, {r.value, r.terminal_error});
}

// ---------------------------------------------------------------------------
// field

struct FieldPoint {
  Point2 x;
  Vec2 v;
  double div{0.0};
};

inline std::vector<FieldPoint> field(const RunConfig& cfg) {
  if (cfg.field_nx < 2 || cfg.field_ny < 2) throw ConfigError("keys 'field_nx'/'field_ny': need at least 2");
  const Contour c = make_shape(cfg.shape(), cfg.sim.n_markers);
  const FrameData fr = frames(c);
  const auto& b = cfg.field_box;
  const std::size_t nx = cfg.field_nx, ny = cfg.field_ny;
  std::vector<FieldPoint> out(nx * ny);
  parallel_for(out.size(), [&](std::size_t idx) {
    const std::size_t i = idx % nx, j = idx / nx;
    const Point2 x{b[0] + (b[1] - b[0]) * static_cast<double>(i) / static_cast<double>(nx - 1),
                   b[2] + (b[3] - b[2]) * static_cast<double>(j) / static_cast<double>(ny - 1)};
    FieldPoint p{x, interior_exterior_velocity(c, fr, cfg.kernel, x).v, 0.0};
    try {
      p.div = grad_velocity(c, fr, cfg.kernel, x).divergence;
    } catch (const SingularityError&) {
      p.div = std::numeric_limits<double>::quiet_NaN();
    }
    out[idx] = p;
  });
  return out;
}

inline void write_field(const std::filesystem::path& file, const std::vector<FieldPoint>& pts) {
  io::CsvWriter w(file, {"x", "y", "vx", "vy", "div"});
  for (const auto& p : pts) w.row({p.x.x, p.x.y, p.v.x, p.v.y, p.div});
}

// ---------------------------------------------------------------------------
// vasin

inline VasinProfile vasin(const RunConfig& cfg) {
  const Contour c = make_shape(cfg.shape(), cfg.sim.n_markers);
  return vasin_profile(c, cfg.kernel, cfg.vasin_gamma, cfg.distances());
}

inline void write_vasin(const std::filesystem::path& file, const VasinProfile& p) {
  io::CsvWriter w(file, {"d", "m", "product"});
  for (const auto& s : p.samples) w.row({s.d, s.m, s.product});
}

// ---------------------------------------------------------------------------
// pv

struct PvRun {
  std::string shape;
  std::string mode;  // "boundary" or "solid"
  std::size_t marker{0};
  PvResult result;
};

/// eps_min of 0 picks the smallest power of two >= 4.01 * max spacing.
inline double pv_eps_min(const RunConfig& cfg, const Contour& c) {
  if (cfg.pv_eps_min > 0.0) return cfg.pv_eps_min;
  const double need = 4.01 * max_spacing(c);
  return std::exp2(std::ceil(std::log2(need)));
}

/// Principal values over shape_list (or the configured shape) and pv_markers.
inline std::vector<PvRun> pv(const RunConfig& cfg) {
  std::vector<ShapeSpec> shapes = cfg.shape_list;
  if (shapes.empty()) shapes.push_back(cfg.shape());
  std::vector<std::string> modes;
  if (cfg.pv_mode == "both") modes = {"boundary", "solid"};
  else modes = {cfg.pv_mode};
  const KernelComponent kc{cfg.kernel, cfg.pv_component - 1};
  std::vector<PvRun> out;
  for (const auto& s : shapes) {
    const Contour c = make_shape(s, cfg.sim.n_markers);
    const double eps_min = pv_eps_min(cfg, c);
    for (const auto& mode : modes)
      for (std::size_t m : cfg.pv_markers) {
        if (m >= c.size()) throw ConfigError("key 'pv_markers': marker " + std::to_string(m) + " out of range");
        PvRun r{shape_label(s), mode, m, {}};
        r.result = mode == "boundary" ? pv_boundary(c, kc, cfg.pv_normal - 1, m, eps_min)
                                      : pv_solid(c, kc, cfg.pv_normal - 1, m, eps_min);
        out.push_back(std::move(r));
      }
  }
  return out;
}

inline void write_pv(const std::filesystem::path& file, const PvResult& r) {
  io::CsvWriter w(file, {"eps", "value"});
  for (std::size_t i = 0; i < r.epsilons.size(); ++i) w.row({r.epsilons[i], r.truncated_values[i]});
}

/// True when the last `count` truncation differences strictly decrease.
inline bool tail_monotone(const PvResult& r, std::size_t count) {
  const auto d = r.differences();
  if (d.size() < count || count < 2) return false;
  for (std::size_t i = d.size() - count; i + 1 < d.size(); ++i)
    if (!(d[i + 1] < d[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// commutator

struct CommutatorRun {
  std::string shape, kernel, field;
  int coordinate{0}, component{1};
  CommutatorResult result;
  std::string label() const {
    return shape + "|" + kernel + "|" + field + "|c" + std::to_string(coordinate + 1) + "m" +
           std::to_string(component + 1) + "|" + std::to_string(result.marker);
  }
};

/// Commutator identity over shapes x kernels x fields x markers, and the
/// exchanged (c, m) pair when commutator_exchange is set.
inline std::vector<CommutatorRun> commutator(const RunConfig& cfg) {
  std::vector<ShapeSpec> shapes = cfg.shape_list;
  if (shapes.empty()) shapes.push_back(cfg.shape());
  std::vector<std::string> kernels = cfg.kernel_list;
  if (kernels.empty()) kernels.push_back(cfg.kernel_name);
  std::vector<std::pair<int, int>> pairs{{cfg.commutator_coordinate - 1, cfg.commutator_component - 1}};
  if (cfg.commutator_exchange) pairs.emplace_back(pairs[0].second, pairs[0].first);

  std::vector<CommutatorRun> out;
  for (const auto& s : shapes) {
    const Contour c = make_shape(s, cfg.sim.n_markers);
    for (const auto& kn : kernels) {
      const KernelSpec k = *kernel_from_name(kn, cfg.l_matrix);
      for (const auto& fname : cfg.commutator_fields) {
        const TestField f = *test_field(fname);
        for (const auto& [cc, mm] : pairs)
          for (std::size_t marker : cfg.commutator_markers) {
            if (marker >= c.size())
              throw ConfigError("key 'commutator_markers': marker " + std::to_string(marker) + " out of range");
            CommutatorOptions opt;
            opt.coordinate = cc;
            opt.component = mm;
            out.push_back({shape_label(s), kn, fname, cc, mm, commutator_identity(c, k, f, marker, opt)});
          }
      }
    }
  }
  return out;
}

inline void write_commutator(const std::filesystem::path& file, const std::vector<CommutatorRun>& runs) {
  io::CsvWriter w(file, {"point", "DS", "DB", "absdiff", "tol"});
  for (const auto& r : runs)
    w.row(r.label(), {r.result.ds, r.result.db, r.result.difference(), r.result.tolerance()});
}

// ---------------------------------------------------------------------------
// Interior probes

/// Deterministic points of the ellipse e at scaled radius <= 0.7.
inline std::vector<Point2> ellipse_probes(const EllipseState& e, std::size_t count, unsigned seed) {
  std::uint64_t state = 0x9e3779b97f4a7c15ULL ^ seed;
  auto uniform = [&state] {  // splitmix64
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
  };
  std::vector<Point2> pts;
  const double c = std::cos(e.theta), s = std::sin(e.theta);
  for (std::size_t i = 0; i < count; ++i) {
    const double r = 0.7 * std::sqrt(uniform()), phi = 2.0 * pi * uniform();
    const double x = e.a * r * std::cos(phi), y = e.b * r * std::sin(phi);
    pts.push_back({c * x - s * y, s * x + c * y});
  }
  return pts;
}

}  // namespace patchflow::run
