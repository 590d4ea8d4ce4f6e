#include "kslab/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "kslab/errors.hpp"

#ifndef KSLAB_PRESET_DIR
#define KSLAB_PRESET_DIR "configs"
#endif

namespace kslab {

std::vector<double> RunConfig::radial_grid() const {
  return geometric_nodes(radial_intervals, radial_ratio);
}

std::vector<double> RunConfig::xi_grid() const {
  return geometric_nodes_min_spacing(xi_intervals, xi_min_spacing);
}

void RunConfig::validate() const {
  try {
    params.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  ctrl.validate();
  if (radial_intervals < 8) throw ConfigError("radial_intervals must be >= 8");
  if (!(radial_ratio >= 1.0)) throw ConfigError("radial_ratio must be >= 1");
  if (xi_intervals < 8) throw ConfigError("xi_intervals must be >= 8");
  if (!(xi_min_spacing > 0.0 && xi_min_spacing * xi_intervals < 1.0))
    throw ConfigError("xi_min_spacing must lie in (0, 1/xi_intervals)");
  for (double p : energy_ps)
    if (!(p > 0.0)) throw ConfigError("energy_p entries must be positive");
  if (monitor_p && !(*monitor_p > 1.0)) throw ConfigError("monitor_p must exceed 1");
  if (monitor_k && !(*monitor_k > 0.0)) throw ConfigError("monitor_k must be positive");
  if (!(bump_radius > 0.0 && bump_radius < 1.0)) throw ConfigError("bump_radius must lie in (0,1)");
  if (!(bump_height >= 0.0)) throw ConfigError("bump_height must be >= 0");
  if (!(eta > 0.0)) throw ConfigError("eta must be positive");
  if (!(T_cert > 0.0)) throw ConfigError("T_cert must be positive");
  for (double m : sweep_m)
    if (!(m >= 1.0)) throw ConfigError("sweep_m entries must be >= 1");
  for (double M : sweep_M)
    if (!(M > 0.0)) throw ConfigError("sweep_M entries must be positive");
}

std::filesystem::path preset_dir() {
  if (const char* env = std::getenv("KSLAB_PRESET_DIR")) return env;
  return KSLAB_PRESET_DIR;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("key '" + key + "': not a number: '" + v + "'");
  return x;
}

long to_long(const std::string& key, const std::string& v) {
  long x = 0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("key '" + key + "': not an integer: '" + v + "'");
  return x;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

template <class F>
Setter num(F f) {
  return [f](RunConfig& c, const std::string& k, const std::string& v) {
    f(c, to_double(k, v));
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"scenario", [](RunConfig& c, const std::string&, const std::string& v) { c.scenario = v; }},
      {"n", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.params.n = static_cast<int>(to_long(k, v));
       }},
      {"m", num([](RunConfig& c, double x) { c.params.m = x; })},
      {"M", num([](RunConfig& c, double x) { c.params.M = x; })},
      {"M_per_omega", num([](RunConfig& c, double x) { c.params.M = x * omega_n(c.params.n); })},
      {"dt_init", num([](RunConfig& c, double x) { c.ctrl.dt_init = x; })},
      {"dt_min", num([](RunConfig& c, double x) { c.ctrl.dt_min = x; })},
      {"dt_max", num([](RunConfig& c, double x) { c.ctrl.dt_max = x; })},
      {"cfl_safety", num([](RunConfig& c, double x) { c.ctrl.cfl_safety = x; })},
      {"blowup_linf_threshold", num([](RunConfig& c, double x) { c.ctrl.blowup_linf_threshold = x; })},
      {"blowup_factor", num([](RunConfig& c, double x) { c.ctrl.blowup_factor = x; })},
      {"t_end", num([](RunConfig& c, double x) { c.ctrl.t_end = x; })},
      {"record_interval", num([](RunConfig& c, double x) { c.ctrl.record_interval = x; })},
      {"change_target", num([](RunConfig& c, double x) { c.ctrl.change_target = x; })},
      {"positivity_tol", num([](RunConfig& c, double x) { c.ctrl.positivity_tol = x; })},
      {"max_steps", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.ctrl.max_steps = to_long(k, v);
       }},
      {"advection", [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "implicit") c.ctrl.advection = AdvectionScheme::kImplicit;
         else if (v == "explicit") c.ctrl.advection = AdvectionScheme::kExplicit;
         else throw ConfigError("key '" + k + "': expected implicit or explicit");
       }},
      {"source_average", [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "trapezoid") c.ctrl.source_average = SourceAverage::kTrapezoid;
         else if (v == "left") c.ctrl.source_average = SourceAverage::kLeft;
         else throw ConfigError("key '" + k + "': expected trapezoid or left");
       }},
      {"fit_start", num([](RunConfig& c, double x) { c.ctrl.fit_start = x; })},
      {"fit_end", num([](RunConfig& c, double x) { c.ctrl.fit_end = x; })},
      {"fit_fraction", num([](RunConfig& c, double x) { c.ctrl.fit_fraction = x; })},
      {"alpha_min_detect", num([](RunConfig& c, double x) { c.ctrl.alpha_min_detect = x; })},
      {"fit_residual_max", num([](RunConfig& c, double x) { c.ctrl.fit_residual_max = x; })},
      {"radial_intervals", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.radial_intervals = static_cast<int>(to_long(k, v));
       }},
      {"radial_ratio", num([](RunConfig& c, double x) { c.radial_ratio = x; })},
      {"xi_intervals", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.xi_intervals = static_cast<int>(to_long(k, v));
       }},
      {"xi_min_spacing", num([](RunConfig& c, double x) { c.xi_min_spacing = x; })},
      {"energy_p", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.energy_ps = to_list(k, v);
       }},
      {"monitor_p", num([](RunConfig& c, double x) { c.monitor_p = x; })},
      {"monitor_k", num([](RunConfig& c, double x) { c.monitor_k = x; })},
      {"data", [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "certified") c.data = DataKind::kCertified;
         else if (v == "bump") c.data = DataKind::kBump;
         else if (v == "homogeneous") c.data = DataKind::kHomogeneous;
         else throw ConfigError("key '" + k + "': expected certified, bump or homogeneous");
       }},
      {"bump_radius", num([](RunConfig& c, double x) { c.bump_radius = x; })},
      {"bump_height", num([](RunConfig& c, double x) { c.bump_height = x; })},
      {"eta", num([](RunConfig& c, double x) { c.eta = x; })},
      {"epsilon", num([](RunConfig& c, double x) { c.select.epsilon = x; })},
      {"xi0", num([](RunConfig& c, double x) { c.select.xi0 = x; })},
      {"b0_fraction", num([](RunConfig& c, double x) { c.select.b0_fraction = x; })},
      {"alpha_fraction", num([](RunConfig& c, double x) { c.select.alpha_fraction = x; })},
      {"tail_share", num([](RunConfig& c, double x) { c.data_spec.tail_share_of_gamma = x; })},
      {"data_margin", num([](RunConfig& c, double x) { c.data_spec.margin = x; })},
      {"w0_baseline", num([](RunConfig& c, double x) { c.data_spec.w0_baseline = x; })},
      {"T_cert", num([](RunConfig& c, double x) { c.T_cert = x; })},
      {"cert_n_xi", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.cert_grid.n_xi_inner = c.cert_grid.n_xi_outer = static_cast<int>(to_long(k, v));
       }},
      {"cert_n_t", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.cert_grid.n_t = static_cast<int>(to_long(k, v));
       }},
      {"cert_xi_min", num([](RunConfig& c, double x) { c.cert_grid.xi_min = x; })},
      {"cert_max_halvings", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.cert_grid.max_alpha_halvings = static_cast<int>(to_long(k, v));
       }},
      {"p", num([](RunConfig& c, double x) { c.p = x; })},
      {"c1", num([](RunConfig& c, double x) { c.c1 = x; })},
      {"sweep_m", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.sweep_m = to_list(k, v);
       }},
      {"sweep_M", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.sweep_M = to_list(k, v);
       }},
  };
  return table;
}

std::filesystem::path resolve_include(const std::string& name,
                                      const std::filesystem::path& base_dir) {
  for (const auto& dir : {base_dir, preset_dir()}) {
    for (const std::string& cand : {name, name + ".cfg"}) {
      const auto p = dir / cand;
      if (std::filesystem::is_regular_file(p)) return p;
    }
  }
  throw ConfigError("include: preset '" + name + "' not found");
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot open config file " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  const auto& t = setters();
  const auto it = t.find(key);
  if (it == t.end()) throw ConfigError("unknown config key '" + key + "'");
  if (value.empty()) throw ConfigError("key '" + key + "' has an empty value");
  it->second(cfg, key, value);
}

void apply_config_text(RunConfig& cfg, const std::string& text,
                       const std::filesystem::path& base_dir, int depth) {
  if (depth > 8) throw ConfigError("include nesting too deep");
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "include") {
      const auto p = resolve_include(value, base_dir);
      apply_config_text(cfg, read_file(p), p.parent_path(), depth + 1);
      continue;
    }
    try {
      apply_setting(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

namespace {

void apply_overrides(RunConfig& cfg, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + o + "': expected key=value");
    const std::string key = trim(o.substr(0, eq));
    const std::string value = trim(o.substr(eq + 1));
    if (key == "include") {
      const auto p = resolve_include(value, std::filesystem::current_path());
      apply_config_text(cfg, read_file(p), p.parent_path(), 1);
    } else {
      apply_setting(cfg, key, value);
    }
  }
}

}  // namespace

RunConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::string>& overrides) {
  RunConfig cfg;
  apply_config_text(cfg, read_file(path), path.parent_path());
  apply_overrides(cfg, overrides);
  cfg.validate();
  return cfg;
}

RunConfig config_from_settings(const std::vector<std::string>& settings) {
  RunConfig cfg;
  apply_overrides(cfg, settings);
  cfg.validate();
  return cfg;
}

}  // namespace kslab
