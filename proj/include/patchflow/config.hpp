#pragma once

// Run configuration: a flat JSON object.  Unknown keys are rejected, every
// error names the offending key.  Shapes are written as
//   ellipse(a,b,theta)   bump(gamma,amplitude)   rose(k,amplitude)   file(path)
// where rose is r(s) = 1 + amplitude cos(k s).

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "patchflow/cde.hpp"
#include "patchflow/geometry.hpp"
#include "patchflow/io.hpp"
#include "patchflow/kernels.hpp"

namespace patchflow {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ShapeKind { ellipse, bump, rose, file };

struct ShapeSpec {
  ShapeKind kind{ShapeKind::ellipse};
  std::vector<double> params{2.0, 1.0, 0.0};
  std::filesystem::path path;
  std::string text;  // as written
};

/// Parses "name(p1,p2,...)".
inline ShapeSpec parse_shape(const std::string& s, const std::filesystem::path& base = {}) {
  const auto open = s.find('('), close = s.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open || close + 1 != s.size())
    throw ConfigError("shape '" + s + "': expected name(arguments)");
  const std::string name = s.substr(0, open), args = s.substr(open + 1, close - open - 1);
  ShapeSpec sp;
  sp.text = s;
  if (name == "file") {
    sp.kind = ShapeKind::file;
    sp.path = base.empty() ? std::filesystem::path(args) : base / args;
    sp.params.clear();
    if (!std::filesystem::exists(sp.path))
      throw ConfigError("shape '" + s + "': contour file " + sp.path.string() + " does not exist");
    return sp;
  }
  std::vector<double> p;
  std::stringstream ss(args);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      p.push_back(std::stod(item, &used));
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("shape '" + s + "': malformed number '" + item + "'");
    }
  }
  std::size_t want = 0;
  if (name == "ellipse") {
    sp.kind = ShapeKind::ellipse;
    want = 3;
  } else if (name == "bump") {
    sp.kind = ShapeKind::bump;
    want = 2;
  } else if (name == "rose") {
    sp.kind = ShapeKind::rose;
    want = 2;
  } else {
    throw ConfigError("shape '" + s + "': unknown shape (valid: ellipse, bump, rose, file)");
  }
  if (p.size() != want)
    throw ConfigError("shape '" + s + "': " + name + " takes " + std::to_string(want) + " arguments");
  sp.params = std::move(p);
  return sp;
}

inline Contour make_shape(const ShapeSpec& s, std::size_t n) {
  switch (s.kind) {
    case ShapeKind::ellipse: return make_ellipse_contour(s.params[0], s.params[1], s.params[2], n);
    case ShapeKind::bump: return make_bump_contour(s.params[0], s.params[1], n);
    case ShapeKind::rose: {
      const double k = s.params[0], amp = s.params[1];
      return make_radial_contour([k, amp](double t) { return 1.0 + amp * std::cos(k * t); }, n);
    }
    case ShapeKind::file: return io::read_contour_csv(s.path);
  }
  throw ConfigError("unknown shape kind");
}

inline std::string shape_label(const ShapeSpec& s) { return s.text; }

struct RunConfig {
  std::string kernel_name{"cauchy"};
  std::optional<Mat2> l_matrix;
  KernelSpec kernel{KernelSpec::cauchy()};

  // Initial shape: a0, b0, theta0 describe an ellipse unless `shape` is given.
  double a0{2.0}, b0{1.0}, theta0{0.0};
  std::optional<ShapeSpec> shape_override;

  SimConfig sim;
  std::filesystem::path output_dir{"out"};
  bool emit_frames{false};
  std::size_t frame_every{100};

  double ode_dt{1e-6};
  std::size_t record_every{1};
  double compare_tolerance{1e-3};
  double conservation_tolerance{1e-10};

  std::vector<double> field_box{-3.0, 3.0, -3.0, 3.0};
  std::size_t field_nx{61}, field_ny{61};

  double vasin_gamma{0.5};
  std::vector<double> vasin_distances;

  std::vector<std::size_t> pv_markers{0};
  double pv_eps_min{0.0};  // 0: smallest power of two >= 4 * marker spacing
  std::string pv_mode{"boundary"};
  int pv_component{2};  // kernel component K = k_i, 1-based
  int pv_normal{2};     // weight n_j (boundary) or derivative d_j (solid), 1-based

  std::vector<std::string> commutator_fields{"linear", "quadratic", "trig"};
  std::vector<std::size_t> commutator_markers{0};
  int commutator_coordinate{1};
  int commutator_component{2};
  bool commutator_exchange{false};

  std::vector<ShapeSpec> shape_list;
  std::vector<std::string> kernel_list;
  std::size_t probe_count{10};
  unsigned probe_seed{1};

  std::vector<double> dt_sweep;
  std::optional<ShapeSpec> dt_sweep_shape;
  std::optional<std::size_t> dt_sweep_resample_every;
  std::vector<std::size_t> n_markers_sweep;

  ShapeSpec shape() const {
    if (shape_override) return *shape_override;
    ShapeSpec s;
    s.kind = ShapeKind::ellipse;
    s.params = {a0, b0, theta0};
    std::ostringstream t;
    t.precision(17);
    t << "ellipse(" << a0 << ',' << b0 << ',' << theta0 << ')';
    s.text = t.str();
    return s;
  }

  std::vector<double> distances() const {
    if (!vasin_distances.empty()) return vasin_distances;
    std::vector<double> d;
    for (int i = 0; i < 10; ++i) d.push_back(std::pow(10.0, -3.0 + 2.0 * i / 9.0));
    return d;
  }
};

inline const char* valid_kernels() { return "cauchy, euler, aggregation, linear-map"; }

/// Resolves kernel_name and l_matrix into cfg.kernel.
inline void resolve_kernel(RunConfig& cfg) {
  if (cfg.kernel_name == "linear-map" && !cfg.l_matrix)
    throw ConfigError("kernel 'linear-map' requires key 'L' (2x2 matrix [[l11,l12],[l21,l22]])");
  const auto k = kernel_from_name(cfg.kernel_name, cfg.l_matrix);
  if (!k)
    throw ConfigError("key 'kernel': unknown kernel '" + cfg.kernel_name + "' (valid: " +
                      valid_kernels() + ")");
  cfg.kernel = *k;
}

namespace detail {

using nlohmann::json;

inline double get_real(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("key '" + key + "': expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError("key '" + key + "': must be finite");
  return x;
}

inline double get_positive(const json& v, const std::string& key) {
  const double x = get_real(v, key);
  if (!(x > 0.0)) throw ConfigError("key '" + key + "': must be positive");
  return x;
}

inline std::size_t get_count(const json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ConfigError("key '" + key + "': expected a nonnegative integer");
  return static_cast<std::size_t>(v.get<long long>());
}

inline int get_index(const json& v, const std::string& key) {
  if (!v.is_number_integer() || (v.get<int>() != 1 && v.get<int>() != 2))
    throw ConfigError("key '" + key + "': expected 1 or 2");
  return v.get<int>();
}

inline bool get_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) throw ConfigError("key '" + key + "': expected true or false");
  return v.get<bool>();
}

inline std::string get_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError("key '" + key + "': expected a string");
  return v.get<std::string>();
}

inline std::vector<double> get_reals(const json& v, const std::string& key) {
  if (!v.is_array()) throw ConfigError("key '" + key + "': expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(get_real(e, key));
  return out;
}

inline std::vector<std::size_t> get_counts(const json& v, const std::string& key) {
  if (!v.is_array()) throw ConfigError("key '" + key + "': expected an array of integers");
  std::vector<std::size_t> out;
  for (const auto& e : v) out.push_back(get_count(e, key));
  return out;
}

inline std::vector<std::string> get_strings(const json& v, const std::string& key) {
  if (!v.is_array()) throw ConfigError("key '" + key + "': expected an array of strings");
  std::vector<std::string> out;
  for (const auto& e : v) out.push_back(get_string(e, key));
  return out;
}

inline Mat2 get_matrix(const json& v, const std::string& key) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_array() || !v[1].is_array() || v[0].size() != 2 ||
      v[1].size() != 2)
    throw ConfigError("key '" + key + "': expected a 2x2 matrix [[l11,l12],[l21,l22]]");
  Mat2 m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m(i, j) = get_real(v[i][j], key);
  return m;
}

}  // namespace detail

/// Parses configuration text.  Relative contour paths resolve against base.
inline RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base = {}) {
  using detail::json;
  json doc;
  try {
    doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
  if (!doc.contains("kernel")) throw ConfigError("missing required key 'kernel'");

  RunConfig cfg;
  bool ellipse_keys = false;
  using Handler = std::function<void(const json&, const std::string&)>;
  const std::map<std::string, Handler> handlers{
      {"kernel", [&](const json& v, const std::string& k) { cfg.kernel_name = detail::get_string(v, k); }},
      {"L", [&](const json& v, const std::string& k) { cfg.l_matrix = detail::get_matrix(v, k); }},
      {"a0", [&](const json& v, const std::string& k) { cfg.a0 = detail::get_positive(v, k); ellipse_keys = true; }},
      {"b0", [&](const json& v, const std::string& k) { cfg.b0 = detail::get_positive(v, k); ellipse_keys = true; }},
      {"theta0", [&](const json& v, const std::string& k) { cfg.theta0 = detail::get_real(v, k); ellipse_keys = true; }},
      {"shape", [&](const json& v, const std::string& k) { cfg.shape_override = parse_shape(detail::get_string(v, k), base); }},
      {"contour_file", [&](const json& v, const std::string& k) {
         cfg.shape_override = parse_shape("file(" + detail::get_string(v, k) + ")", base);
       }},
      {"dt", [&](const json& v, const std::string& k) { cfg.sim.dt = detail::get_positive(v, k); }},
      {"t_end", [&](const json& v, const std::string& k) { cfg.sim.t_end = detail::get_real(v, k); }},
      {"integrator", [&](const json& v, const std::string& k) {
         const auto s = detail::get_string(v, k);
         if (s == "rk4") cfg.sim.integrator = Integrator::rk4;
         else if (s == "heun") cfg.sim.integrator = Integrator::heun;
         else throw ConfigError("key 'integrator': expected 'rk4' or 'heun'");
       }},
      {"n_markers", [&](const json& v, const std::string& k) { cfg.sim.n_markers = detail::get_count(v, k); }},
      {"resample_every", [&](const json& v, const std::string& k) { cfg.sim.resample_every = detail::get_count(v, k); }},
      {"resample_trigger", [&](const json& v, const std::string& k) { cfg.sim.resample_trigger = detail::get_positive(v, k); }},
      {"diagnostics_every", [&](const json& v, const std::string& k) { cfg.sim.diagnostics_every = detail::get_count(v, k); }},
      {"output_dir", [&](const json& v, const std::string& k) { cfg.output_dir = detail::get_string(v, k); }},
      {"emit_frames", [&](const json& v, const std::string& k) { cfg.emit_frames = detail::get_bool(v, k); }},
      {"frame_every", [&](const json& v, const std::string& k) { cfg.frame_every = detail::get_count(v, k); }},
      {"ode_dt", [&](const json& v, const std::string& k) { cfg.ode_dt = detail::get_positive(v, k); }},
      {"record_every", [&](const json& v, const std::string& k) { cfg.record_every = detail::get_count(v, k); }},
      {"compare_tolerance", [&](const json& v, const std::string& k) { cfg.compare_tolerance = detail::get_positive(v, k); }},
      {"conservation_tolerance", [&](const json& v, const std::string& k) { cfg.conservation_tolerance = detail::get_positive(v, k); }},
      {"field_box", [&](const json& v, const std::string& k) {
         cfg.field_box = detail::get_reals(v, k);
         if (cfg.field_box.size() != 4 || !(cfg.field_box[0] < cfg.field_box[1]) ||
             !(cfg.field_box[2] < cfg.field_box[3]))
           throw ConfigError("key 'field_box': expected [xmin, xmax, ymin, ymax] with min < max");
       }},
      {"field_nx", [&](const json& v, const std::string& k) { cfg.field_nx = detail::get_count(v, k); }},
      {"field_ny", [&](const json& v, const std::string& k) { cfg.field_ny = detail::get_count(v, k); }},
      {"vasin_gamma", [&](const json& v, const std::string& k) { cfg.vasin_gamma = detail::get_positive(v, k); }},
      {"vasin_distances", [&](const json& v, const std::string& k) { cfg.vasin_distances = detail::get_reals(v, k); }},
      {"pv_markers", [&](const json& v, const std::string& k) { cfg.pv_markers = detail::get_counts(v, k); }},
      {"pv_eps_min", [&](const json& v, const std::string& k) { cfg.pv_eps_min = detail::get_positive(v, k); }},
      {"pv_mode", [&](const json& v, const std::string& k) {
         cfg.pv_mode = detail::get_string(v, k);
         if (cfg.pv_mode != "boundary" && cfg.pv_mode != "solid" && cfg.pv_mode != "both")
           throw ConfigError("key 'pv_mode': expected 'boundary', 'solid' or 'both'");
       }},
      {"pv_component", [&](const json& v, const std::string& k) { cfg.pv_component = detail::get_index(v, k); }},
      {"pv_normal", [&](const json& v, const std::string& k) { cfg.pv_normal = detail::get_index(v, k); }},
      {"commutator_fields", [&](const json& v, const std::string& k) { cfg.commutator_fields = detail::get_strings(v, k); }},
      {"commutator_markers", [&](const json& v, const std::string& k) { cfg.commutator_markers = detail::get_counts(v, k); }},
      {"commutator_coordinate", [&](const json& v, const std::string& k) { cfg.commutator_coordinate = detail::get_index(v, k); }},
      {"commutator_component", [&](const json& v, const std::string& k) { cfg.commutator_component = detail::get_index(v, k); }},
      {"commutator_exchange", [&](const json& v, const std::string& k) { cfg.commutator_exchange = detail::get_bool(v, k); }},
      {"shape_list", [&](const json& v, const std::string& k) {
         for (const auto& s : detail::get_strings(v, k)) cfg.shape_list.push_back(parse_shape(s, base));
       }},
      {"kernel_list", [&](const json& v, const std::string& k) { cfg.kernel_list = detail::get_strings(v, k); }},
      {"probe_count", [&](const json& v, const std::string& k) { cfg.probe_count = detail::get_count(v, k); }},
      {"probe_seed", [&](const json& v, const std::string& k) { cfg.probe_seed = static_cast<unsigned>(detail::get_count(v, k)); }},
      {"dt_sweep", [&](const json& v, const std::string& k) {
         cfg.dt_sweep = detail::get_reals(v, k);
         for (double d : cfg.dt_sweep)
           if (!(d > 0.0)) throw ConfigError("key 'dt_sweep': entries must be positive");
       }},
      {"dt_sweep_shape", [&](const json& v, const std::string& k) { cfg.dt_sweep_shape = parse_shape(detail::get_string(v, k), base); }},
      {"dt_sweep_resample_every", [&](const json& v, const std::string& k) { cfg.dt_sweep_resample_every = detail::get_count(v, k); }},
      {"n_markers_sweep", [&](const json& v, const std::string& k) { cfg.n_markers_sweep = detail::get_counts(v, k); }},
      {"description", [&](const json& v, const std::string& k) { (void)detail::get_string(v, k); }},
  };

  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const auto h = handlers.find(it.key());
    if (h == handlers.end()) throw ConfigError("unknown key '" + it.key() + "'");
    h->second(it.value(), it.key());
  }
  if (ellipse_keys && cfg.shape_override)
    throw ConfigError("key 'shape' conflicts with a0/b0/theta0; give one or the other");
  if (cfg.sim.n_markers < min_markers) throw ConfigError("key 'n_markers': must be at least 16");
  for (auto n : cfg.n_markers_sweep)
    if (n < min_markers) throw ConfigError("key 'n_markers_sweep': entries must be at least 16");
  for (const auto& k : cfg.kernel_list)
    if (!kernel_from_name(k, cfg.l_matrix))
      throw ConfigError("key 'kernel_list': unknown kernel '" + k + "' (valid: " + valid_kernels() + ")");
  for (const auto& f : cfg.commutator_fields)
    if (f != "linear" && f != "quadratic" && f != "trig")
      throw ConfigError("key 'commutator_fields': unknown field '" + f + "' (valid: linear, quadratic, trig)");
  resolve_kernel(cfg);
  return cfg;
}

inline RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.parent_path());
}

}  // namespace patchflow
