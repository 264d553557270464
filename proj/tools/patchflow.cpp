// patchflow <subcommand> --config <file> [--out <dir>] [--assert]

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "patchflow/run.hpp"

namespace fs = std::filesystem;
using namespace patchflow;

namespace {

enum Exit { ok = 0, failure = 1, config_error = 2, breakdown = 3, assertion = 4 };

struct Options {
  std::string config;
  std::string out;
  bool check{false};
  std::optional<std::string> kernel;
  std::optional<double> a0, b0, theta0, t_end, dt;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "JSON configuration file")->check(CLI::ExistingFile);
  sub->add_option("--out", o.out, "output directory (ellipse-ode also accepts a .csv path)");
  sub->add_flag("--assert", o.check, "exit 4 when the run's tolerance check fails");
  sub->add_option("--kernel", o.kernel, "cauchy | euler | aggregation | linear-map");
  sub->add_option("--a0", o.a0, "initial major semi-axis");
  sub->add_option("--b0", o.b0, "initial minor semi-axis");
  sub->add_option("--theta0", o.theta0, "initial axis angle");
  sub->add_option("--t-end", o.t_end, "final time");
  sub->add_option("--dt", o.dt, "time step");
}

RunConfig load(const Options& o) {
  RunConfig cfg = o.config.empty() ? parse_config_text(R"({"kernel": "cauchy"})") : parse_config(o.config);
  if (o.kernel) {
    cfg.kernel_name = *o.kernel;
    resolve_kernel(cfg);
  }
  if (o.a0 || o.b0 || o.theta0) {
    if (cfg.shape_override) throw ConfigError("--a0/--b0/--theta0 conflict with key 'shape'");
    if (o.a0) cfg.a0 = *o.a0;
    if (o.b0) cfg.b0 = *o.b0;
    if (o.theta0) cfg.theta0 = *o.theta0;
    if (!(cfg.a0 > 0.0) || !(cfg.b0 > 0.0)) throw ConfigError("--a0/--b0 must be positive");
  }
  if (o.t_end) cfg.sim.t_end = *o.t_end;
  if (o.dt) {
    if (!(*o.dt > 0.0)) throw ConfigError("--dt must be positive");
    cfg.sim.dt = *o.dt;
  }
  if (!o.out.empty()) cfg.output_dir = o.out;
  return cfg;
}

fs::path prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("output directory " + dir.string() + " is not writable");
  return dir;
}

/// A --out ending in .csv names the file itself; anything else is a directory.
fs::path table_path(const fs::path& out, const char* name) {
  if (out.extension() == ".csv") {
    if (out.has_parent_path()) prepare_dir(out.parent_path());
    return out;
  }
  return prepare_dir(out) / name;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

int verdict(bool check, bool passed, const std::string& what) {
  if (!check) return ok;
  std::printf("assert: %s %s\n", what.c_str(), passed ? "ok" : "FAILED");
  return passed ? ok : assertion;
}

int cmd_simulate(const RunConfig& cfg, bool check) {
  const auto dir = prepare_dir(cfg.output_dir);
  const auto tr = run::simulate(cfg, dir);
  std::printf("simulate: %zu snapshots, %zu resamples -> %s\n", tr.snapshots.size(), tr.resamples,
              (dir / "diagnostics.csv").string().c_str());
  if (tr.breakdown) {
    std::fprintf(stderr, "geometry breakdown at t = %s: %s\n", num(tr.breakdown_time).c_str(),
                 tr.message.c_str());
    return breakdown;
  }
  const auto& first = tr.snapshots.front().diagnostics;
  double sum_drift = 0.0, skew_drift = 0.0, area_drift = 0.0;
  for (const auto& s : tr.snapshots) {
    sum_drift = std::max(sum_drift, std::abs(s.diagnostics.sum_ab - first.sum_ab) / first.sum_ab);
    skew_drift = std::max(skew_drift, std::abs(s.diagnostics.skew_inv - first.skew_inv));
    area_drift = std::max(area_drift, std::abs(s.diagnostics.area - first.area) / first.area);
  }
  std::printf("drift: a+b %s, (a-b)sin2theta %s, area %s\n", num(sum_drift).c_str(),
              num(skew_drift).c_str(), num(area_drift).c_str());
  switch (cfg.kernel.variant()) {
    case KernelVariant::cauchy:
      return verdict(check, sum_drift <= 1e-4 && skew_drift <= 1e-4, "ellipse invariants within 1e-4");
    case KernelVariant::euler_vorticity:
      return verdict(check, area_drift <= 1e-5, "area conserved within 1e-5");
    default: return verdict(check, true, "no breakdown");
  }
}

int cmd_ellipse_ode(const RunConfig& cfg, bool check) {
  const auto tr = run::ellipse_ode(cfg);
  const auto file = table_path(cfg.output_dir, "ellipse_ode.csv");
  run::write_ellipse_ode(file, tr);
  const auto& s = tr.states.back();
  std::printf("ellipse-ode: t = %s a = %s b = %s theta = %s sin2theta = %s -> %s\n", num(tr.t.back()).c_str(),
              num(s.a).c_str(), num(s.b).c_str(), num(s.theta).c_str(), num(std::sin(2.0 * s.theta)).c_str(),
              file.string().c_str());
  const double drift = run::conservation_drift(tr);
  return verdict(check, drift <= cfg.conservation_tolerance * std::max(1.0, tr.sum_ab),
                 "invariant drift " + num(drift));
}

int cmd_compare(const RunConfig& cfg, bool check) {
  const auto dir = prepare_dir(cfg.output_dir);
  const auto res = run::compare(cfg);
  run::write_compare(dir / "compare.csv", res);
  if (res.trajectory.breakdown) {
    std::fprintf(stderr, "geometry breakdown at t = %s: %s\n", num(res.trajectory.breakdown_time).c_str(),
                 res.trajectory.message.c_str());
    return breakdown;
  }
  std::printf("compare: max error %s, terminal error %s -> %s\n", num(res.max_error()).c_str(),
              num(res.terminal_error()).c_str(), (dir / "compare.csv").string().c_str());
  if (!cfg.dt_sweep.empty() || !cfg.n_markers_sweep.empty()) {
    const auto rows = run::sweeps(cfg);
    run::write_sweeps(dir / "sweep.csv", rows);
    for (const auto& r : rows)
      std::printf("  sweep %s = %g: terminal error %s%s\n", r.sweep.c_str(), r.value,
                  num(r.terminal_error).c_str(), r.breakdown ? " (breakdown)" : "");
  }
  return verdict(check, res.max_error() <= cfg.compare_tolerance,
                 "max error <= " + num(cfg.compare_tolerance));
}

int cmd_field(const RunConfig& cfg, bool check) {
  const auto pts = run::field(cfg);
  const auto file = table_path(cfg.output_dir, "field.csv");
  run::write_field(file, pts);
  std::printf("field: %zu points -> %s\n", pts.size(), file.string().c_str());
  bool finite = true;
  for (const auto& p : pts) finite = finite && isfinite(p.v);
  return verdict(check, finite, "velocity finite everywhere");
}

int cmd_vasin(const RunConfig& cfg, bool check) {
  const auto p = run::vasin(cfg);
  const auto file = table_path(cfg.output_dir, "vasin.csv");
  run::write_vasin(file, p);
  std::printf("vasin: slope %s, product ratio %s -> %s\n", num(p.slope).c_str(),
              num(p.product_ratio()).c_str(), file.string().c_str());
  return verdict(check, p.slope >= -(1.0 - cfg.vasin_gamma) - 0.1 && p.product_ratio() <= 20.0,
                 "slope >= -(1 - gamma) - 0.1 and product ratio <= 20");
}

int cmd_pv(const RunConfig& cfg, bool check) {
  const auto dir = prepare_dir(cfg.output_dir);
  const auto runs = run::pv(cfg);
  bool monotone = true;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    char name[96];
    std::snprintf(name, sizeof name, "pv_%s_%02zu_m%zu.csv", r.mode.c_str(), i, r.marker);
    run::write_pv(dir / name, r.result);
    const bool m = run::tail_monotone(r.result, 4);
    monotone = monotone && m;
    std::printf("pv %s %s marker %zu: limit %s (order %.3f)%s -> %s\n", r.shape.c_str(), r.mode.c_str(),
                r.marker, num(r.result.extrapolated_limit).c_str(), r.result.observed_order,
                m ? "" : " [differences not monotone]", name);
  }
  return verdict(check, monotone, "truncation differences decrease monotonically");
}

int cmd_commutator(const RunConfig& cfg, bool check) {
  const auto runs = run::commutator(cfg);
  const auto file = table_path(cfg.output_dir, "commutator.csv");
  run::write_commutator(file, runs);
  bool within = true;
  double worst = 0.0;
  for (const auto& r : runs) {
    const double d = r.result.difference(), tol = r.result.tolerance();
    worst = std::max(worst, tol > 0.0 ? d / tol : (d > 0.0 ? INFINITY : 0.0));
    within = within && d <= 3.0 * tol && (r.field != "linear" || d <= 1e-14);
  }
  std::printf("commutator: %zu points, worst |DS-DB|/tol %s -> %s\n", runs.size(), num(worst).c_str(),
              file.string().c_str());
  return verdict(check, within, "|DS - DB| <= 3 tol");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contour dynamics for patches under odd degree -1 kernels"};
  app.require_subcommand(1);
  Options o;
  using Command = std::function<int(const RunConfig&, bool)>;
  const std::vector<std::tuple<const char*, const char*, Command>> table{
      {"simulate", "evolve a patch and write diagnostics.csv (and frames)", cmd_simulate},
      {"ellipse-ode", "integrate the ellipse ODE; columns t,a,b,theta,sum_ab,skew_inv", cmd_ellipse_ode},
      {"compare", "contour dynamics against the ellipse oracle, per-time errors", cmd_compare},
      {"field", "velocity and divergence on a grid", cmd_field},
      {"vasin", "second-derivative growth near the boundary", cmd_vasin},
      {"pv", "truncated principal-value integrals", cmd_pv},
      {"commutator", "solid versus boundary commutator forms", cmd_commutator},
  };
  std::vector<std::pair<CLI::App*, Command>> subs;
  for (const auto& [name, help, fn] : table) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub, o);
    subs.emplace_back(sub, fn);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return config_error;
  }

  try {
    const RunConfig cfg = load(o);
    for (const auto& [sub, fn] : subs)
      if (sub->parsed()) return fn(cfg, o.check);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return config_error;
  } catch (const io::IoError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return config_error;
  } catch (const BreakdownError& e) {
    std::fprintf(stderr, "geometry breakdown: %s\n", e.what());
    return breakdown;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return config_error;
  } catch (const GeometryError& e) {
    std::fprintf(stderr, "invalid geometry: %s\n", e.what());
    return config_error;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return failure;
  }
  return failure;
}
