#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kslab/initdata.hpp"
#include "kslab/model.hpp"
#include "kslab/radial_solver.hpp"
#include "kslab/subsolution.hpp"

namespace kslab {

/// Initial data families for simulate / sweep.
enum class DataKind { kCertified, kBump, kHomogeneous };

struct RunConfig {
  std::string scenario;
  ModelParams params;
  StepControl ctrl;

  int radial_intervals = 512;
  double radial_ratio = 1.02;
  int xi_intervals = 1023;
  double xi_min_spacing = 1e-8;

  std::vector<double> energy_ps{2.0};
  std::optional<double> monitor_p;
  std::optional<double> monitor_k;

  DataKind data = DataKind::kCertified;
  double bump_radius = 0.1;
  double bump_height = 100.0;

  double eta = 1.0;
  SelectOptions select;
  DataSpec data_spec;
  double T_cert = 40.0;
  CertifyGrid cert_grid;

  /// constants mode
  double p = 2.0;
  double c1 = 1.0;

  std::vector<double> sweep_m;
  std::vector<double> sweep_M;

  [[nodiscard]] std::vector<double> radial_grid() const;
  [[nodiscard]] std::vector<double> xi_grid() const;
  /// Type invariants of every embedded structure.
  void validate() const;
};

/// Directory searched for `include = <name>` presets (compiled-in default,
/// overridden by the KSLAB_PRESET_DIR environment variable).
std::filesystem::path preset_dir();

/// Parses `key = value` lines ('#' starts a comment). `include = name` pulls
/// in name or name.cfg, resolved against base_dir and then the preset
/// directory. Unknown keys and malformed values throw ConfigError.
void apply_config_text(RunConfig& cfg, const std::string& text,
                       const std::filesystem::path& base_dir, int depth = 0);

/// Applies a single `key=value` assignment.
void apply_setting(RunConfig& cfg, const std::string& key,
                   const std::string& value);

/// Reads the file, then the overrides (`key=value` each), then validates.
RunConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::string>& overrides = {});

/// Config from overrides only (defaults otherwise).
RunConfig config_from_settings(const std::vector<std::string>& settings);

}  // namespace kslab
