#include "kslab/radial_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kslab/errors.hpp"

namespace kslab {

void StepControl::validate() const {
  if (!(dt_min > 0.0 && dt_min <= dt_init && dt_init <= dt_max))
    throw ConfigError("step control requires 0 < dt_min <= dt_init <= dt_max");
  if (!(cfl_safety > 0.0 && cfl_safety < 1.0))
    throw ConfigError("cfl_safety must lie in (0,1)");
  if (!(t_end > 0.0)) throw ConfigError("t_end must be positive");
  if (!(record_interval > 0.0)) throw ConfigError("record_interval must be positive");
  if (t_end / record_interval < 9.0 - 1e-9)
    throw ConfigError("t_end / record_interval must be >= 9 (>= 10 records)");
  if (!(change_target > 0.0)) throw ConfigError("change_target must be positive");
  if (!(blowup_factor > 1.0)) throw ConfigError("blowup_factor must exceed 1");
  if (!(fit_fraction > 0.0 && fit_fraction <= 1.0))
    throw ConfigError("fit_fraction must lie in (0,1]");
  if (fit_start >= 0.0 && fit_end >= 0.0 && !(fit_end > fit_start))
    throw ConfigError("fit window must have fit_end > fit_start");
}

std::string verdict_name(const Verdict& v) {
  struct Visitor {
    std::string operator()(const Bounded&) const { return "Bounded"; }
    std::string operator()(const Growing&) const { return "Growing"; }
    std::string operator()(const BlowupSuspected&) const {
      return "BlowupSuspected";
    }
  };
  return std::visit(Visitor{}, v);
}

GrowthFit fit_log_growth(std::span<const TrajectoryRecord> records, double t0,
                         double t1) {
  double st = 0, sy = 0, stt = 0, sty = 0;
  std::size_t k = 0;
  for (const auto& r : records) {
    if (r.t < t0 - 1e-12 || r.t > t1 + 1e-12) continue;
    if (!(r.linf_u > 0.0)) throw InvalidArgument("fit_log_growth: linf_u <= 0");
    const double y = std::log(r.linf_u);
    st += r.t;
    sy += y;
    stt += r.t * r.t;
    sty += r.t * y;
    ++k;
  }
  if (k < 2) throw InvalidArgument("fit_log_growth: fewer than 2 samples in window");
  GrowthFit fit;
  fit.samples = k;
  const double kd = static_cast<double>(k);
  const double det = kd * stt - st * st;
  fit.slope = (det > 0.0) ? (kd * sty - st * sy) / det : 0.0;
  fit.intercept = (sy - fit.slope * st) / kd;
  double ss = 0.0;
  for (const auto& r : records) {
    if (r.t < t0 - 1e-12 || r.t > t1 + 1e-12) continue;
    const double e = std::log(r.linf_u) - (fit.intercept + fit.slope * r.t);
    ss += e * e;
  }
  fit.rms_residual = std::sqrt(ss / kd);
  return fit;
}

Verdict classify_growth(std::span<const TrajectoryRecord> records,
                        const StepControl& ctrl, bool stopped_early,
                        const std::string& stop_reason) {
  if (records.size() < 10)
    throw InvalidArgument("classify_growth: insufficient data (need >= 10 records)");
  const double t_first = records.front().t;
  const double t_last = records.back().t;
  if (stopped_early) return BlowupSuspected{t_last, stop_reason};
  const double t1 = ctrl.fit_end < 0.0 ? t_last : std::min(ctrl.fit_end, t_last);
  const double t0 = ctrl.fit_start < 0.0
                        ? t_last - ctrl.fit_fraction * (t_last - t_first)
                        : ctrl.fit_start;
  const GrowthFit fit = fit_log_growth(records, t0, t1);
  if (fit.slope >= ctrl.alpha_min_detect &&
      fit.rms_residual <= ctrl.fit_residual_max)
    return Growing{fit.slope, t0, t1};
  return Bounded{};
}

std::vector<double> solve_vr_faces(const RadialMesh& mesh,
                                   std::span<const double> w) {
  const int n = mesh.dim();
  const auto G = mesh.face_moments(w);
  const double total = G.back();
  const auto& f = mesh.faces();
  std::vector<double> vr(f.size(), 0.0);
  for (std::size_t k = 1; k + 1 < f.size(); ++k)
    vr[k] = std::pow(f[k], 1 - n) * (total * std::pow(f[k], n) - G[k]);
  return vr;
}

RadialProfile solve_vr(const RadialProfile& w, int n) {
  w.validate(true, 1e-12);
  const RadialMesh mesh(w.radii, n);
  const auto G = mesh.face_moments(w.values);
  const double total = G.back();
  const auto& r = mesh.nodes();
  const auto& f = mesh.faces();
  std::vector<double> vr(r.size(), 0.0);
  for (std::size_t i = 1; i + 1 < r.size(); ++i) {
    const double Wi = G[i] + w.values[i] * (std::pow(r[i], n) - std::pow(f[i], n)) / n;
    vr[i] = std::pow(r[i], 1 - n) * (total * std::pow(r[i], n) - Wi);
  }
  return RadialProfile{r, std::move(vr)};
}

void step_w_inplace(std::span<double> w, std::span<const double> u_source,
                    double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("step_w: dt must be positive");
  if (w.size() != u_source.size()) throw InvalidArgument("step_w: size mismatch");
  const double decay = std::exp(-dt);
  const double gain = -std::expm1(-dt);
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = decay * w[i] + gain * u_source[i];
}

RadialProfile step_w(const RadialProfile& w, const RadialProfile& u_source,
                     double dt) {
  if (w.radii != u_source.radii) throw InvalidArgument("step_w: grids differ");
  RadialProfile out = w;
  step_w_inplace(out.values, u_source.values, dt);
  return out;
}

std::vector<double> step_u(const RadialMesh& mesh, std::span<const double> u,
                           std::span<const double> vr_faces, double dt,
                           const ModelParams& params, AdvectionScheme scheme,
                           double positivity_tol) {
  if (!(dt > 0.0)) throw InvalidArgument("step_u: dt must be positive");
  const std::size_t N = mesh.size();
  if (u.size() != N || vr_faces.size() != N + 1)
    throw InvalidArgument("step_u: size mismatch");
  const auto& vol = mesh.volumes();
  const auto& area = mesh.face_areas();
  const bool implicit = scheme == AdvectionScheme::kImplicit;
  const double mexp = params.m - 1.0;

  std::vector<double> lower(N, 0.0), diag(N), upper(N, 0.0), rhs(N, 0.0);
  for (std::size_t i = 0; i < N; ++i) diag[i] = vol[i] / dt;

  // Increment form: (vol/dt - L_impl) du = L(u_old).
  for (std::size_t k = 1; k < N; ++k) {
    const double A = area[k];
    const double D =
        mexp == 0.0 ? 1.0 : std::pow(0.5 * (u[k - 1] + u[k]) + 1.0, mexp);
    const double g = A * D / mesh.spacing(k - 1);
    diag[k - 1] += g;
    upper[k - 1] -= g;
    diag[k] += g;
    lower[k] -= g;
    const double fd = g * (u[k] - u[k - 1]);
    rhs[k - 1] += fd;
    rhs[k] -= fd;

    const double v = vr_faces[k];
    const double u_up = v > 0.0 ? u[k - 1] : u[k];
    const double fa = -A * v * u_up;
    rhs[k - 1] += fa;
    rhs[k] -= fa;
    if (implicit) {
      if (v > 0.0) {
        diag[k - 1] += A * v;
        lower[k] -= A * v;
      } else {
        upper[k - 1] += A * v;
        diag[k] -= A * v;
      }
    }
  }
  solve_tridiagonal(lower, diag, upper, rhs);
  std::vector<double> out(N);
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = u[i] + rhs[i];
    if (!(out[i] >= -positivity_tol)) {
      std::ostringstream os;
      os << "positivity failure: u[" << i << "] = " << out[i]
         << " after step dt = " << dt;
      throw StepFailure(os.str());
    }
  }
  return out;
}

RadialProfile step_u(const SimState& state, const RadialProfile& v_r,
                     double dt, const ModelParams& params,
                     AdvectionScheme scheme) {
  state.u.validate(true, 1e-12);
  if (v_r.radii != state.u.radii) throw InvalidArgument("step_u: grids differ");
  const RadialMesh mesh(state.u.radii, params.n);
  const auto& f = mesh.faces();
  std::vector<double> vf(f.size(), 0.0);
  for (std::size_t k = 1; k + 1 < f.size(); ++k) vf[k] = v_r.at(f[k]);
  return mesh.make_profile(step_u(mesh, state.u.values, vf, dt, params, scheme));
}

double advective_dt_limit(const RadialMesh& mesh,
                          std::span<const double> vr_faces) {
  const auto& vol = mesh.volumes();
  const auto& area = mesh.face_areas();
  double limit = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const double out = area[i + 1] * std::max(vr_faces[i + 1], 0.0) +
                       area[i] * std::max(-vr_faces[i], 0.0);
    if (out > 0.0) limit = std::min(limit, vol[i] / out);
  }
  return limit;
}

namespace {

TrajectoryRecord make_record(const RadialMesh& mesh, double t,
                             std::span<const double> u,
                             std::span<const double> w,
                             const ModelParams& params,
                             const RecordOptions& opt) {
  TrajectoryRecord rec;
  rec.t = t;
  rec.linf_u = *std::max_element(u.begin(), u.end());
  rec.min_u = *std::min_element(u.begin(), u.end());
  rec.min_w = *std::min_element(w.begin(), w.end());
  rec.mass_u = mesh.integrate(u);
  rec.mass_w = mesh.integrate(w);
  rec.mu = rec.mass_w / unit_ball_volume(mesh.dim());
  rec.u_origin = u[0];
  for (double p : opt.energy_ps) rec.energy_p.push_back(energy_p(mesh, u, w, p));
  if (opt.monitor_p) {
    const double p = *opt.monitor_p;
    const double k = opt.monitor_k.value_or(default_k(p));
    rec.energy = energy_report(mesh, t, u, w, p, k, params);
  }
  return rec;
}

}  // namespace

RunResult run(const RadialProfile& u0, const RadialProfile& w0,
              const ModelParams& params, const StepControl& ctrl,
              const RecordOptions& rec_opt, const RunHooks& hooks) {
  params.validate();
  ctrl.validate();
  u0.validate(true);
  w0.validate(true);
  if (u0.radii != w0.radii) throw ConfigError("u0 and w0 must share a grid");
  const RadialMesh mesh(u0.radii, params.n);
  const double mass0 = mesh.integrate(u0.values);
  if (std::abs(mass0 - params.M) > 1e-8 * params.M) {
    std::ostringstream os;
    os.precision(17);
    os << "initial mass " << mass0 << " does not match M = " << params.M;
    throw ConfigError(os.str());
  }
  const double threshold = ctrl.blowup_linf_threshold > 0.0
                               ? ctrl.blowup_linf_threshold
                               : ctrl.blowup_factor * u0.max();

  std::vector<double> u = u0.values;
  std::vector<double> w = w0.values;
  std::vector<double> source(u.size());
  double t = 0.0;
  double dt = ctrl.dt_init;

  RunResult result;
  auto emit = [&] {
    result.records.push_back(make_record(mesh, t, u, w, params, rec_opt));
    if (hooks.on_record) {
      const SimState s{t, mesh.make_profile(u), mesh.make_profile(w)};
      hooks.on_record(s, result.records.back());
    }
  };
  emit();

  long record_index = 1;
  auto next_record = [&] {
    return std::min(ctrl.t_end, record_index * ctrl.record_interval);
  };
  StopReason stop = StopReason::kHorizon;

  while (t < ctrl.t_end) {
    if (result.steps_accepted + result.steps_rejected >= ctrl.max_steps) {
      stop = StopReason::kMaxSteps;
      break;
    }
    if (dt < ctrl.dt_min) {
      stop = StopReason::kDtUnderflow;
      break;
    }
    const auto vr = solve_vr_faces(mesh, w);
    double dt_try = std::min(dt, ctrl.dt_max);
    if (ctrl.advection == AdvectionScheme::kExplicit)
      dt_try = std::min(dt_try, ctrl.cfl_safety * advective_dt_limit(mesh, vr));
    const double t_target = next_record();
    bool lands = false;
    if (t + dt_try >= t_target - 1e-12 * std::max(1.0, t_target)) {
      dt_try = t_target - t;
      lands = true;
    }

    std::vector<double> u_new;
    try {
      u_new = step_u(mesh, u, vr, dt_try, params, ctrl.advection,
                     ctrl.positivity_tol);
    } catch (const StepFailure&) {
      ++result.steps_rejected;
      dt = 0.5 * dt_try;
      continue;
    }
    double du = 0.0;
    double umax = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      du = std::max(du, std::abs(u_new[i] - u[i]));
      umax = std::max(umax, std::abs(u[i]));
    }
    const double change = umax > 0.0 ? du / umax : du;
    if (change > 2.0 * ctrl.change_target) {
      ++result.steps_rejected;
      dt = 0.5 * dt_try;
      continue;
    }

    if (ctrl.source_average == SourceAverage::kTrapezoid) {
      for (std::size_t i = 0; i < u.size(); ++i)
        source[i] = 0.5 * (u[i] + u_new[i]);
    } else {
      source = u;
    }
    step_w_inplace(w, source, dt_try);
    if (hooks.on_step) hooks.on_step(StepEvent{t, dt_try, u, u_new, w});
    u.swap(u_new);
    t = lands ? t_target : t + dt_try;
    ++result.steps_accepted;

    const double factor =
        change > 0.0 ? std::clamp(0.9 * ctrl.change_target / change, 0.5, 2.0)
                     : 2.0;
    const double dt_next = std::min(ctrl.dt_max, dt_try * factor);
    dt = lands ? std::max(dt_next, std::min(dt, ctrl.dt_max)) : dt_next;

    const double linf = *std::max_element(u.begin(), u.end());
    if (lands) {
      emit();
      ++record_index;
    }
    if (!(linf <= threshold)) {
      if (!lands) emit();
      stop = StopReason::kThreshold;
      break;
    }
  }
  if (stop == StopReason::kDtUnderflow || stop == StopReason::kMaxSteps) {
    if (result.records.back().t < t) emit();
  }

  result.stop_reason = stop;
  const bool early = stop != StopReason::kHorizon;
  std::string reason;
  switch (stop) {
    case StopReason::kThreshold: reason = "linf threshold exceeded"; break;
    case StopReason::kDtUnderflow: reason = "time step underflow"; break;
    case StopReason::kMaxSteps: reason = "step budget exhausted"; break;
    case StopReason::kHorizon: break;
  }
  if (result.records.size() >= 10) {
    result.verdict = classify_growth(result.records, ctrl, early, reason);
  } else {
    result.verdict = BlowupSuspected{t, reason};
  }
  result.final_state = SimState{t, mesh.make_profile(u), mesh.make_profile(w)};
  return result;
}

}  // namespace kslab
