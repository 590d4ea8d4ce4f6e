#include "kslab/mass_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kslab/errors.hpp"

namespace kslab {

void MassProfile::validate(double tol) const {
  if (xis.size() < 3 || xis.size() != values.size())
    throw InvalidArgument("mass profile needs >= 3 nodes and matching sizes");
  if (xis.front() != 0.0 || xis.back() != 1.0)
    throw InvalidArgument("mass profile grid must run from 0 to 1");
  for (std::size_t j = 1; j < xis.size(); ++j) {
    if (!(xis[j] > xis[j - 1]))
      throw InvalidArgument("mass profile grid must be strictly increasing");
    if (values[j] < values[j - 1] - tol) {
      std::ostringstream os;
      os << "mass profile decreases at xi = " << xis[j] << " by "
         << values[j - 1] - values[j];
      throw InvalidArgument(os.str());
    }
  }
  if (std::abs(values.front()) > tol)
    throw InvalidArgument("mass profile must vanish at xi = 0");
}

std::vector<double> default_xi_grid() {
  return geometric_nodes_min_spacing(1023, 1e-8);
}

MassProfile to_mass_variable(const RadialProfile& u, int n,
                             std::span<const double> xi_grid) {
  u.validate(true, 1e-12);
  const RadialMesh mesh(u.radii, n);
  MassProfile U;
  U.xis.assign(xi_grid.begin(), xi_grid.end());
  U.values.resize(U.xis.size());
  for (std::size_t j = 0; j < U.xis.size(); ++j)
    U.values[j] = mesh.moment_at(u.values, std::pow(U.xis[j], 1.0 / n));
  return U;
}

namespace {

/// First derivative at every node, three-point (one-sided at the ends).
std::vector<double> node_derivative(std::span<const double> x,
                                    std::span<const double> f) {
  const std::size_t N = x.size();
  std::vector<double> d(N);
  {
    const double h1 = x[1] - x[0], h2 = x[2] - x[1];
    d[0] = -(2 * h1 + h2) / (h1 * (h1 + h2)) * f[0] +
           (h1 + h2) / (h1 * h2) * f[1] - h1 / (h2 * (h1 + h2)) * f[2];
  }
  for (std::size_t j = 1; j + 1 < N; ++j) {
    const double hl = x[j] - x[j - 1], hr = x[j + 1] - x[j];
    d[j] = -hr / (hl * (hl + hr)) * f[j - 1] + (hr - hl) / (hl * hr) * f[j] +
           hl / (hr * (hl + hr)) * f[j + 1];
  }
  {
    const double h1 = x[N - 1] - x[N - 2], h2 = x[N - 2] - x[N - 3];
    d[N - 1] = (2 * h1 + h2) / (h1 * (h1 + h2)) * f[N - 1] -
               (h1 + h2) / (h1 * h2) * f[N - 2] +
               h1 / (h2 * (h1 + h2)) * f[N - 3];
  }
  return d;
}

double second_derivative(std::span<const double> x, std::span<const double> f,
                         std::size_t j) {
  const double hl = x[j] - x[j - 1], hr = x[j + 1] - x[j];
  return 2.0 * (f[j - 1] / (hl * (hl + hr)) - f[j] / (hl * hr) +
                f[j + 1] / (hr * (hl + hr)));
}

}  // namespace

double origin_density(const MassProfile& U, int n) {
  const auto& x = U.xis;
  const auto& f = U.values;
  const double h1 = x[1] - x[0], h2 = x[2] - x[1];
  return n * (-(2 * h1 + h2) / (h1 * (h1 + h2)) * f[0] +
              (h1 + h2) / (h1 * h2) * f[1] - h1 / (h2 * (h1 + h2)) * f[2]);
}

RadialProfile from_mass_variable(const MassProfile& U, int n,
                                 std::span<const double> r_grid, double tol) {
  U.validate(tol);
  const auto d = node_derivative(U.xis, U.values);
  RadialProfile out;
  out.radii.assign(r_grid.begin(), r_grid.end());
  out.values.resize(out.radii.size());
  for (std::size_t i = 0; i < out.radii.size(); ++i) {
    const double xi = std::pow(out.radii[i], n);
    auto it = std::upper_bound(U.xis.begin(), U.xis.end(), xi);
    std::size_t j = it == U.xis.begin() ? 0 : static_cast<std::size_t>(it - U.xis.begin()) - 1;
    j = std::min(j, U.xis.size() - 2);
    const double s = (xi - U.xis[j]) / (U.xis[j + 1] - U.xis[j]);
    const double v = n * ((1.0 - s) * d[j] + s * d[j + 1]);
    out.values[i] = std::max(v, 0.0);
  }
  return out;
}

std::vector<double> update_memory(std::span<const double> I,
                                  const MassProfile& U_src,
                                  const ModelParams& params, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("update_memory: dt must be positive");
  if (I.size() != U_src.size()) throw InvalidArgument("update_memory: size mismatch");
  const double mw = params.mass_per_omega();
  const double decay = std::exp(-dt);
  const double gain = -std::expm1(-dt);
  std::vector<double> out(I.size());
  for (std::size_t j = 0; j < I.size(); ++j)
    out[j] = decay * I[j] + gain * (U_src.values[j] - mw * U_src.xis[j]);
  return out;
}

std::vector<double> p_residual(const MassState& s, std::span<const double> U_t,
                               const ModelParams& params) {
  const auto& x = s.U.xis;
  const auto& U = s.U.values;
  const std::size_t N = x.size();
  if (U_t.size() != N || s.I.size() != N || s.W0.size() != N)
    throw InvalidArgument("p_residual: size mismatch");
  const int n = params.n;
  const double e = std::exp(-s.t);
  const auto d = node_derivative(x, U);
  std::vector<double> res(N, 0.0);
  for (std::size_t j = 1; j + 1 < N; ++j) {
    const double diff = n * n * std::pow(x[j], 2.0 - 2.0 / n) *
                        std::pow(n * d[j] + 1.0, params.m - 1.0);
    const double drift = n * (s.I[j] + (s.W0[j] - s.K0 * x[j]) * e);
    res[j] = U_t[j] - diff * second_derivative(x, U, j) - drift * d[j];
  }
  return res;
}

namespace {

struct Diagnostics {
  double linf_u, min_u, min_w, u_origin;
};

Diagnostics diagnose(const MassState& s, const ModelParams& params) {
  const int n = params.n;
  const auto& x = s.U.xis;
  const auto du = node_derivative(x, s.U.values);
  const double e = std::exp(-s.t);
  const double K = s.K0 * e - std::expm1(-s.t) * params.mass_per_omega();
  std::vector<double> W(x.size());
  for (std::size_t j = 0; j < x.size(); ++j)
    W[j] = K * x[j] + (s.W0[j] - s.K0 * x[j]) * e + s.I[j];
  const auto dw = node_derivative(x, W);
  Diagnostics out;
  out.linf_u = n * *std::max_element(du.begin(), du.end());
  out.min_u = n * *std::min_element(du.begin(), du.end());
  out.min_w = n * *std::min_element(dw.begin(), dw.end());
  out.u_origin = n * du[0];
  return out;
}

TrajectoryRecord mass_record(const MassState& s, const ModelParams& params,
                             double p_res_max) {
  const auto d = diagnose(s, params);
  TrajectoryRecord rec;
  rec.t = s.t;
  rec.linf_u = d.linf_u;
  rec.min_u = d.min_u;
  rec.min_w = d.min_w;
  rec.u_origin = d.u_origin;
  const double wn = omega_n(params.n);
  rec.mass_u = wn * s.U.values.back();
  const double K = s.K0 * std::exp(-s.t) - std::expm1(-s.t) * params.mass_per_omega();
  rec.mass_w = wn * K;
  rec.mu = rec.mass_w / unit_ball_volume(params.n);
  rec.p_residual_max = p_res_max;
  return rec;
}

}  // namespace

MassRunResult run_mass(const MassProfile& U0, std::span<const double> W0,
                       double K0, const ModelParams& params,
                       const StepControl& ctrl, const MassRunHooks& hooks) {
  params.validate();
  ctrl.validate();
  const double mw = params.mass_per_omega();
  const double mono_tol = 1e-10 * std::max(1.0, mw);
  U0.validate(mono_tol);
  if (W0.size() != U0.size()) throw ConfigError("W0 must share the xi grid of U0");
  if (std::abs(U0.values.back() - mw) > 1e-8 * mw)
    throw ConfigError("U0(1) must equal M/omega_n");

  const int n = params.n;
  const auto& x = U0.xis;
  const std::size_t N = x.size();
  const bool implicit = ctrl.advection == AdvectionScheme::kImplicit;

  MassState s;
  s.U = U0;
  s.U.values.front() = 0.0;
  s.U.values.back() = mw;
  s.I.assign(N, 0.0);
  s.W0.assign(W0.begin(), W0.end());
  s.K0 = K0;

  std::vector<double> xpow(N);
  for (std::size_t j = 0; j < N; ++j) xpow[j] = n * n * std::pow(x[j], 2.0 - 2.0 / n);

  const double threshold = ctrl.blowup_linf_threshold > 0.0
                               ? ctrl.blowup_linf_threshold
                               : ctrl.blowup_factor * diagnose(s, params).linf_u;

  MassRunResult result;
  double p_res_max = 0.0;
  auto emit = [&] {
    result.records.push_back(mass_record(s, params, p_res_max));
    if (hooks.on_record) hooks.on_record(s, result.records.back());
  };
  emit();

  std::vector<double> lower(N), diag(N), upper(N), rhs(N), Unew(N), Usrc(N);
  double dt = ctrl.dt_init;
  long record_index = 1;
  StopReason stop = StopReason::kHorizon;

  while (s.t < ctrl.t_end) {
    if (result.steps_accepted + result.steps_rejected >= ctrl.max_steps) {
      stop = StopReason::kMaxSteps;
      break;
    }
    if (dt < ctrl.dt_min) {
      stop = StopReason::kDtUnderflow;
      break;
    }
    const auto& U = s.U.values;
    const auto dU = node_derivative(x, U);
    const double e = std::exp(-s.t);

    double dt_try = std::min(dt, ctrl.dt_max);
    // Drift and diffusion coefficients at the old state.
    std::vector<double> D(N, 0.0), c(N, 0.0);
    double cfl = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j + 1 < N; ++j) {
      D[j] = xpow[j] * std::pow(std::max(n * dU[j], 0.0) + 1.0, params.m - 1.0);
      c[j] = n * (s.I[j] + (s.W0[j] - s.K0 * x[j]) * e);
      const double h = c[j] > 0.0 ? x[j + 1] - x[j] : x[j] - x[j - 1];
      if (c[j] != 0.0) cfl = std::min(cfl, h / std::abs(c[j]));
    }
    if (!implicit) dt_try = std::min(dt_try, ctrl.cfl_safety * cfl);
    const double t_target = std::min(ctrl.t_end, record_index * ctrl.record_interval);
    bool lands = false;
    if (s.t + dt_try >= t_target - 1e-12 * std::max(1.0, t_target)) {
      dt_try = t_target - s.t;
      lands = true;
    }

    // Increment form (1/dt - A_impl) dU = A U.
    lower[0] = upper[0] = 0.0;
    diag[0] = 1.0;
    rhs[0] = 0.0;
    lower[N - 1] = upper[N - 1] = 0.0;
    diag[N - 1] = 1.0;
    rhs[N - 1] = 0.0;
    for (std::size_t j = 1; j + 1 < N; ++j) {
      const double hl = x[j] - x[j - 1], hr = x[j + 1] - x[j];
      double al = D[j] * 2.0 / (hl * (hl + hr));
      double ar = D[j] * 2.0 / (hr * (hl + hr));
      const double bl = c[j] < 0.0 ? -c[j] / hl : 0.0;
      const double br = c[j] > 0.0 ? c[j] / hr : 0.0;
      rhs[j] = al * (U[j - 1] - U[j]) + ar * (U[j + 1] - U[j]) +
               bl * (U[j - 1] - U[j]) + br * (U[j + 1] - U[j]);
      if (implicit) {
        al += bl;
        ar += br;
      }
      lower[j] = -al;
      upper[j] = -ar;
      diag[j] = 1.0 / dt_try + al + ar;
    }
    solve_tridiagonal(lower, diag, upper, rhs);

    bool ok = true;
    for (std::size_t j = 0; j < N; ++j) Unew[j] = U[j] + rhs[j];
    Unew[0] = 0.0;
    Unew[N - 1] = mw;
    for (std::size_t j = 1; j < N; ++j) {
      if (!(Unew[j] >= Unew[j - 1] - mono_tol)) {
        ok = false;
        break;
      }
    }
    if (!ok) {
      ++result.steps_rejected;
      dt = 0.5 * dt_try;
      continue;
    }
    double dsmax = 0.0, smax = 0.0;
    for (std::size_t j = 0; j + 1 < N; ++j) {
      const double h = x[j + 1] - x[j];
      const double so = (U[j + 1] - U[j]) / h;
      const double sn = (Unew[j + 1] - Unew[j]) / h;
      dsmax = std::max(dsmax, std::abs(sn - so));
      smax = std::max(smax, std::abs(so));
    }
    const double change = smax > 0.0 ? dsmax / smax : dsmax;
    if (change > 2.0 * ctrl.change_target) {
      ++result.steps_rejected;
      dt = 0.5 * dt_try;
      continue;
    }

    MassProfile src{x, {}};
    src.values.resize(N);
    for (std::size_t j = 0; j < N; ++j)
      src.values[j] = ctrl.source_average == SourceAverage::kTrapezoid
                          ? 0.5 * (U[j] + Unew[j])
                          : U[j];
    s.I = update_memory(s.I, src, params, dt_try);

    std::vector<double> Ut(N);
    for (std::size_t j = 0; j < N; ++j) Ut[j] = (Unew[j] - U[j]) / dt_try;
    s.U.values = Unew;
    s.t = lands ? t_target : s.t + dt_try;
    ++result.steps_accepted;

    const double factor =
        change > 0.0 ? std::clamp(0.9 * ctrl.change_target / change, 0.5, 2.0)
                     : 2.0;
    const double dt_next = std::min(ctrl.dt_max, dt_try * factor);
    dt = lands ? std::max(dt_next, std::min(dt, ctrl.dt_max)) : dt_next;

    const double linf = diagnose(s, params).linf_u;
    if (lands || !(linf <= threshold)) {
      const auto res = p_residual(s, Ut, params);
      p_res_max = 0.0;
      for (double r : res) p_res_max = std::max(p_res_max, std::abs(r));
    }
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
  if ((stop == StopReason::kDtUnderflow || stop == StopReason::kMaxSteps) &&
      result.records.back().t < s.t)
    emit();

  result.stop_reason = stop;
  std::string reason;
  switch (stop) {
    case StopReason::kThreshold: reason = "linf threshold exceeded"; break;
    case StopReason::kDtUnderflow: reason = "time step underflow"; break;
    case StopReason::kMaxSteps: reason = "step budget exhausted"; break;
    case StopReason::kHorizon: break;
  }
  const bool early = stop != StopReason::kHorizon;
  if (result.records.size() >= 10)
    result.verdict = classify_growth(result.records, ctrl, early, reason);
  else
    result.verdict = BlowupSuspected{s.t, reason};
  result.final_state = s;
  return result;
}

}  // namespace kslab
