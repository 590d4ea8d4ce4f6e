#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kslab/config.hpp"
#include "kslab/initdata.hpp"
#include "kslab/io.hpp"
#include "kslab/mass_solver.hpp"
#include "kslab/radial_solver.hpp"
#include "kslab/subsolution.hpp"

namespace kslab {

/// Exit codes shared by every command.
enum ExitCode : int { kExitOk = 0, kExitInternal = 1, kExitConfig = 2, kExitOutOfTheory = 3 };

struct InitialData {
  RadialProfile u0;
  RadialProfile w0;
  /// Set for certified data.
  std::optional<SubsolutionParams> sp;
  std::optional<ConditionReport> report;
  DataKind kind = DataKind::kBump;
};

/// Builds (u0, w0) on the configured radial grid. Certified data needs m in
/// [1, 2-2/n]; with fallback_to_bump an OutOfTheory there switches to bump
/// data instead of propagating.
InitialData make_initial_data(const RunConfig& cfg, bool fallback_to_bump = false);

struct SimulateOutcome {
  InitialData data;
  RunResult result;
  std::vector<EnergyReport> monitor;
  double mass_drift = 0.0;
  double wall_seconds = 0.0;
};
SimulateOutcome simulate(const RunConfig& cfg, bool fallback_to_bump = false);

struct MassSimulateOutcome {
  InitialData data;
  MassRunResult result;
  double wall_seconds = 0.0;
};
MassSimulateOutcome simulate_mass(const RunConfig& cfg);

struct CertifyOutcome {
  SubsolutionParams selected;
  BuiltProfile w0;
  Certificate cert;
};
/// select_parameters -> build_w0 -> certify over [0, T_cert].
CertifyOutcome certify_pipeline(const RunConfig& cfg);

struct SweepRow {
  double m = 0.0;
  double M = 0.0;
  std::string verdict;
  double alpha_hat = 0.0;
};
/// One simulate per (m, M) pair on `threads` workers; rows sorted by (m, M).
/// Failures give verdict "error".
std::vector<SweepRow> sweep(const RunConfig& cfg, int threads);
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Worker count from KSLAB_THREADS (default: hardware concurrency).
int sweep_threads();

/// Labeled rows of the analytic constants for (n, m, p, c1).
KeyValues constants_table(const RunConfig& cfg);

KeyValues subsolution_params_table(const SubsolutionParams& sp);

/// Each command writes its artifacts into out_dir (created if needed) when
/// given and a short report to `os`. Exceptions propagate.
int cmd_constants(const RunConfig& cfg, const std::optional<std::filesystem::path>& out_dir,
                  std::ostream& os);
int cmd_simulate(const RunConfig& cfg, const std::optional<std::filesystem::path>& out_dir,
                 std::ostream& os);
int cmd_simulate_mass(const RunConfig& cfg,
                      const std::optional<std::filesystem::path>& out_dir, std::ostream& os);
int cmd_certify(const RunConfig& cfg, const std::optional<std::filesystem::path>& out_dir,
                std::ostream& os);
int cmd_build_data(const RunConfig& cfg, const std::optional<std::filesystem::path>& out_dir,
                   std::ostream& os);
int cmd_sweep(const RunConfig& cfg, const std::optional<std::filesystem::path>& out_dir,
              std::ostream& os);

/// Parses the config (file plus `key=value` overrides), dispatches on mode,
/// and maps exceptions to exit codes with a diagnostic on `es`.
int run_command(const std::string& mode, const std::optional<std::filesystem::path>& config,
                const std::vector<std::string>& overrides,
                const std::optional<std::filesystem::path>& out_dir, std::ostream& os,
                std::ostream& es);

}  // namespace kslab
