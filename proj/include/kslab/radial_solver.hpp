#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "kslab/functionals.hpp"
#include "kslab/grid.hpp"
#include "kslab/model.hpp"

namespace kslab {

/// How the chemotactic flux u v_r enters a step. Both use first-order
/// upwinding; the implicit variant puts it in the tridiagonal system.
enum class AdvectionScheme { kExplicit, kImplicit };

/// Which u feeds the w update over a step: u at the start of the step, or
/// the average of the start and end values.
enum class SourceAverage { kLeft, kTrapezoid };

struct StepControl {
  double dt_init = 1e-4;
  double dt_min = 1e-13;
  double dt_max = 0.05;
  /// Fraction of the positivity-preserving advective limit (explicit scheme).
  double cfl_safety = 0.9;
  /// Absolute stop level for max u; <= 0 means blowup_factor * initial max.
  double blowup_linf_threshold = 0.0;
  double blowup_factor = 1e6;
  double t_end = 1.0;
  double record_interval = 0.1;
  /// Target relative max-norm change of u per step; steps above twice the
  /// target are rejected and retried with half the step.
  double change_target = 0.02;
  double positivity_tol = 1e-12;
  AdvectionScheme advection = AdvectionScheme::kImplicit;
  SourceAverage source_average = SourceAverage::kTrapezoid;
  long max_steps = 100'000'000;

  /// Growth classification: least-squares fit of log(linf_u) over
  /// [fit_start, fit_end]. Negative fit_start means the last fit_fraction of
  /// the run; negative fit_end means the stop time.
  double fit_start = -1.0;
  double fit_end = -1.0;
  double fit_fraction = 0.3;
  double alpha_min_detect = 1e-3;
  double fit_residual_max = 0.25;

  void validate() const;
};

struct TrajectoryRecord {
  double t = 0.0;
  double linf_u = 0.0;
  double mass_u = 0.0;
  double mass_w = 0.0;
  double mu = 0.0;
  double min_u = 0.0;
  double min_w = 0.0;
  double u_origin = 0.0;
  /// E_p for each configured p.
  std::vector<double> energy_p;
  /// Energy-inequality terms for the monitored p, if enabled.
  std::optional<EnergyReport> energy;
  /// Mass solver only: max |P U| over interior nodes.
  double p_residual_max = std::numeric_limits<double>::quiet_NaN();
};

struct Bounded {};
struct Growing {
  double alpha_hat = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
};
struct BlowupSuspected {
  double t_stop = 0.0;
  std::string reason;
};
using Verdict = std::variant<Bounded, Growing, BlowupSuspected>;

std::string verdict_name(const Verdict& v);

/// Slope and RMS residual of a least-squares line fit of log(linf_u) vs t
/// over records with t in [t0, t1].
struct GrowthFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
  std::size_t samples = 0;
};
GrowthFit fit_log_growth(std::span<const TrajectoryRecord> records, double t0,
                         double t1);

/// Why a run ended.
enum class StopReason { kHorizon, kThreshold, kDtUnderflow, kMaxSteps };

/// Classifies a finished trajectory. stopped_early marks a run that ended on
/// the blow-up threshold or a step-size underflow. Needs >= 10 records.
Verdict classify_growth(std::span<const TrajectoryRecord> records,
                        const StepControl& ctrl, bool stopped_early = false,
                        const std::string& stop_reason = {});

struct SimState {
  double t = 0.0;
  RadialProfile u;
  RadialProfile w;
};

/// Signal gradient v_r(r) = r^{1-n} int_0^r s^{n-1} (mu - w(s)) ds, mu the
/// mean of w, at the nodes of w. v_r(0) = v_r(1) = 0.
RadialProfile solve_vr(const RadialProfile& w, int n);

/// The same quantity at every dual face of the mesh (what the flux uses).
std::vector<double> solve_vr_faces(const RadialMesh& mesh,
                                   std::span<const double> w);

/// w_new = e^{-dt} w + (1 - e^{-dt}) u_source.
RadialProfile step_w(const RadialProfile& w, const RadialProfile& u_source,
                     double dt);
void step_w_inplace(std::span<double> w, std::span<const double> u_source,
                    double dt);

/// One conservative finite-volume step of the u equation with face
/// velocities vr_faces: diffusion (u+1)^{m-1} u_r implicit with its
/// coefficient frozen at the old state, advection u v_r upwinded (explicit or
/// implicit). Zero flux at r = 0 and r = 1, so sum_i u_i vol_i is conserved.
/// Throws StepFailure if any value drops below -positivity_tol.
std::vector<double> step_u(const RadialMesh& mesh, std::span<const double> u,
                           std::span<const double> vr_faces, double dt,
                           const ModelParams& params, AdvectionScheme scheme,
                           double positivity_tol = 1e-12);

/// Profile form; v_r given at the nodes is evaluated at the dual faces by
/// linear interpolation.
RadialProfile step_u(const SimState& state, const RadialProfile& v_r,
                     double dt, const ModelParams& params,
                     AdvectionScheme scheme = AdvectionScheme::kImplicit);

/// Positivity-preserving step limit for explicit upwind advection.
double advective_dt_limit(const RadialMesh& mesh,
                          std::span<const double> vr_faces);

/// Options for what each record contains.
struct RecordOptions {
  std::vector<double> energy_ps;
  /// When set, records carry an EnergyReport for this p with k = monitor_k.
  std::optional<double> monitor_p;
  std::optional<double> monitor_k;
};

/// Accepted-step notification: state before and after.
struct StepEvent {
  double t_old = 0.0;
  double dt = 0.0;
  std::span<const double> u_old;
  std::span<const double> u_new;
  std::span<const double> w_new;
};

struct RunHooks {
  std::function<void(const StepEvent&)> on_step;
  std::function<void(const SimState&, const TrajectoryRecord&)> on_record;
};

struct RunResult {
  std::vector<TrajectoryRecord> records;
  Verdict verdict;
  SimState final_state;
  StopReason stop_reason = StopReason::kHorizon;
  long steps_accepted = 0;
  long steps_rejected = 0;
};

/// Advances (u0, w0) to ctrl.t_end, or until max u exceeds the blow-up
/// threshold, or until the step size falls below dt_min. Throws ConfigError
/// if int u0 differs from params.M by more than 1e-8 relative.
RunResult run(const RadialProfile& u0, const RadialProfile& w0,
              const ModelParams& params, const StepControl& ctrl,
              const RecordOptions& rec = {}, const RunHooks& hooks = {});

}  // namespace kslab
