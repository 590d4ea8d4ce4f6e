#include "kslab/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <thread>

#include "kslab/errors.hpp"
#include "kslab/functionals.hpp"
#include "kslab/model.hpp"

namespace kslab {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::kHorizon: return "horizon";
    case StopReason::kThreshold: return "threshold";
    case StopReason::kDtUnderflow: return "dt_underflow";
    case StopReason::kMaxSteps: return "max_steps";
  }
  return "unknown";
}

double alpha_hat_of(const Verdict& v) {
  if (const auto* g = std::get_if<Growing>(&v)) return g->alpha_hat;
  return std::numeric_limits<double>::quiet_NaN();
}

void add_verdict(KeyValues& kv, const Verdict& v) {
  kv.emplace_back("verdict", verdict_name(v));
  kv.emplace_back("alpha_hat", format_double(alpha_hat_of(v)));
  if (const auto* g = std::get_if<Growing>(&v)) {
    kv.emplace_back("fit_window_start", format_double(g->window_start));
    kv.emplace_back("fit_window_end", format_double(g->window_end));
  } else if (const auto* b = std::get_if<BlowupSuspected>(&v)) {
    kv.emplace_back("blowup_t_stop", format_double(b->t_stop));
    kv.emplace_back("blowup_reason", b->reason);
  }
}

void add_params(KeyValues& kv, const RunConfig& cfg) {
  kv.emplace_back("scenario", cfg.scenario);
  kv.emplace_back("n", std::to_string(cfg.params.n));
  kv.emplace_back("m", format_double(cfg.params.m));
  kv.emplace_back("M", format_double(cfg.params.M));
}

const char* data_name(DataKind k) {
  switch (k) {
    case DataKind::kCertified: return "certified";
    case DataKind::kBump: return "bump";
    case DataKind::kHomogeneous: return "homogeneous";
  }
  return "unknown";
}

std::filesystem::path prepare(const std::optional<std::filesystem::path>& out_dir) {
  std::filesystem::create_directories(*out_dir);
  return *out_dir;
}

}  // namespace

InitialData make_initial_data(const RunConfig& cfg, bool fallback_to_bump) {
  const auto radii = cfg.radial_grid();
  InitialData d;
  d.kind = cfg.data;
  if (d.kind == DataKind::kCertified) {
    try {
      const auto sp = select_parameters(cfg.params, cfg.eta, cfg.select);
      auto u = build_u0(cfg.params, sp, cfg.data_spec, radii);
      auto w = build_w0(cfg.params, sp, cfg.data_spec, radii);
      d.report = check_conditions(u.profile, w.profile, cfg.params, sp);
      d.u0 = std::move(u.profile);
      d.w0 = std::move(w.profile);
      d.sp = sp;
      return d;
    } catch (const OutOfTheory&) {
      if (!fallback_to_bump) throw;
      d.kind = DataKind::kBump;
    }
  }
  if (d.kind == DataKind::kBump) {
    d.u0 = generic_bump(cfg.params, cfg.bump_radius, cfg.bump_height, radii);
  } else {
    const RadialMesh mesh(radii, cfg.params.n);
    d.u0 = mesh.make_profile(
        std::vector<double>(radii.size(), cfg.params.M / unit_ball_volume(cfg.params.n)));
  }
  d.w0 = d.u0;
  return d;
}

SimulateOutcome simulate(const RunConfig& cfg, bool fallback_to_bump) {
  const auto t0 = Clock::now();
  SimulateOutcome out;
  out.data = make_initial_data(cfg, fallback_to_bump);
  RecordOptions rec;
  rec.energy_ps = cfg.energy_ps;
  rec.monitor_p = cfg.monitor_p;
  rec.monitor_k = cfg.monitor_k;
  out.result = run(out.data.u0, out.data.w0, cfg.params, cfg.ctrl, rec);
  for (const auto& r : out.result.records) {
    out.mass_drift = std::max(out.mass_drift, std::abs(r.mass_u - cfg.params.M) / cfg.params.M);
    if (r.energy) out.monitor.push_back(*r.energy);
  }
  out.wall_seconds = seconds_since(t0);
  return out;
}

MassSimulateOutcome simulate_mass(const RunConfig& cfg) {
  const auto t0 = Clock::now();
  MassSimulateOutcome out;
  out.data = make_initial_data(cfg);
  const auto xis = cfg.xi_grid();
  const auto U0 = to_mass_variable(out.data.u0, cfg.params.n, xis);
  const auto W = w0_moments(out.data.w0, cfg.params.n, xis);
  out.result = run_mass(U0, W.W0, W.K0, cfg.params, cfg.ctrl);
  out.wall_seconds = seconds_since(t0);
  return out;
}

CertifyOutcome certify_pipeline(const RunConfig& cfg) {
  CertifyOutcome out;
  out.selected = select_parameters(cfg.params, cfg.eta, cfg.select);
  out.w0 = build_w0(cfg.params, out.selected, cfg.data_spec, cfg.radial_grid());
  const auto W = w0_moments(out.w0.profile, cfg.params.n, cfg.xi_grid());
  out.cert = certify(out.selected, cfg.params, W, cfg.T_cert, cfg.cert_grid);
  return out;
}

std::vector<SweepRow> sweep(const RunConfig& cfg, int threads) {
  std::vector<SweepRow> rows;
  for (double m : cfg.sweep_m)
    for (double M : cfg.sweep_M) rows.push_back({m, M, "", 0.0});
  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return a.m != b.m ? a.m < b.m : a.M < b.M;
  });
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      auto& row = rows[i];
      try {
        RunConfig c = cfg;
        c.params.m = row.m;
        c.params.M = row.M;
        c.validate();
        const auto s = simulate(c, true);
        row.verdict = verdict_name(s.result.verdict);
        row.alpha_hat = alpha_hat_of(s.result.verdict);
      } catch (const std::exception&) {
        row.verdict = "error";
        row.alpha_hat = std::numeric_limits<double>::quiet_NaN();
      }
    }
  };
  const int k = std::max(1, std::min<int>(threads, static_cast<int>(rows.size())));
  std::vector<std::thread> pool;
  for (int j = 1; j < k; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "m,M,verdict,alpha_hat\n";
  for (const auto& r : rows)
    out += format_double(r.m) + "," + format_double(r.M) + "," + r.verdict + "," +
           format_double(r.alpha_hat) + "\n";
  return out;
}

int sweep_threads() {
  if (const char* env = std::getenv("KSLAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) throw ConfigError("KSLAB_THREADS must be a positive integer");
    return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

KeyValues constants_table(const RunConfig& cfg) {
  const int n = cfg.params.n;
  if (n < 3) throw ConfigError("constants: n must be >= 3");
  KeyValues kv;
  kv.emplace_back("n", std::to_string(n));
  kv.emplace_back("m", format_double(cfg.params.m));
  kv.emplace_back("p", format_double(cfg.p));
  kv.emplace_back("c1", format_double(cfg.c1));
  kv.emplace_back("omega_n", format_double(omega_n(n)));
  kv.emplace_back("unit_ball_volume", format_double(unit_ball_volume(n)));
  kv.emplace_back("critical_exponent", format_double(cfg.params.critical_exponent()));
  kv.emplace_back("blowup_mass_threshold", format_double(blowup_mass_threshold(n)));
  kv.emplace_back("theta", format_double(theta(cfg.p, cfg.params.m, n)));
  const auto mc = critical_mass(cfg.p, cfg.params.m, n, cfg.c1);
  kv.emplace_back("critical_mass", format_double(mc.value));
  if (mc.warning) kv.emplace_back("critical_mass_warning", *mc.warning);
  return kv;
}

KeyValues subsolution_params_table(const SubsolutionParams& sp) {
  return {{"epsilon", format_double(sp.epsilon)},   {"xi0", format_double(sp.xi0)},
          {"alpha_star", format_double(sp.alpha_star)}, {"alpha", format_double(sp.alpha)},
          {"b0", format_double(sp.b0)},             {"t0", format_double(sp.t0)},
          {"c1", format_double(sp.margin_c1)},      {"c1_prime", format_double(sp.c1_prime)},
          {"c2", format_double(sp.c2)},             {"Gamma0", format_double(sp.Gamma0)},
          {"Gamma_u", format_double(sp.Gamma_u)},   {"gamma", format_double(sp.gamma)},
          {"Gamma_w", format_double(sp.Gamma_w)},   {"eta", format_double(sp.eta)},
          {"eta0", format_double(sp.eta0)}};
}

int cmd_constants(const RunConfig& cfg, const std::optional<std::filesystem::path>& out_dir,
                  std::ostream& os) {
  const auto text = key_values_to_text(constants_table(cfg));
  if (out_dir) write_text(prepare(out_dir) / "constants.txt", text);
  os << text;
  return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, const std::optional<std::filesystem::path>& out_dir,
                 std::ostream& os) {
  const auto s = simulate(cfg);
  KeyValues kv;
  add_params(kv, cfg);
  kv.emplace_back("data", data_name(s.data.kind));
  add_verdict(kv, s.result.verdict);
  kv.emplace_back("stop_reason", stop_reason_name(s.result.stop_reason));
  kv.emplace_back("t_final", format_double(s.result.final_state.t));
  kv.emplace_back("steps_accepted", std::to_string(s.result.steps_accepted));
  kv.emplace_back("steps_rejected", std::to_string(s.result.steps_rejected));
  kv.emplace_back("max_relative_mass_drift", format_double(s.mass_drift));
  kv.emplace_back("wall_time_s", format_double(s.wall_seconds));
  const auto text = key_values_to_text(kv);
  if (out_dir) {
    const auto dir = prepare(out_dir);
    write_text(dir / "trajectory.csv", trajectory_csv(s.result.records, cfg.energy_ps));
    write_text(dir / "final_u.csv", profile_csv(s.result.final_state.u, "u"));
    write_text(dir / "final_w.csv", profile_csv(s.result.final_state.w, "w"));
    if (!s.monitor.empty()) write_text(dir / "monitor.csv", monitor_csv(s.monitor));
    write_text(dir / "summary.txt", text);
  }
  os << text;
  return kExitOk;
}

int cmd_simulate_mass(const RunConfig& cfg,
                      const std::optional<std::filesystem::path>& out_dir, std::ostream& os) {
  const auto s = simulate_mass(cfg);
  KeyValues kv;
  add_params(kv, cfg);
  kv.emplace_back("data", data_name(s.data.kind));
  add_verdict(kv, s.result.verdict);
  kv.emplace_back("stop_reason", stop_reason_name(s.result.stop_reason));
  kv.emplace_back("t_final", format_double(s.result.final_state.t));
  kv.emplace_back("steps_accepted", std::to_string(s.result.steps_accepted));
  kv.emplace_back("steps_rejected", std::to_string(s.result.steps_rejected));
  kv.emplace_back("wall_time_s", format_double(s.wall_seconds));
  const auto text = key_values_to_text(kv);
  if (out_dir) {
    const auto dir = prepare(out_dir);
    write_text(dir / "trajectory.csv", trajectory_csv(s.result.records, {}, true));
    const auto& U = s.result.final_state.U;
    write_text(dir / "final_U.csv", columns_csv(U.xis, U.values, "xi", "U"));
    write_text(dir / "final_u.csv",
               profile_csv(from_mass_variable(U, cfg.params.n, cfg.radial_grid(), 1e-8), "u"));
    write_text(dir / "summary.txt", text);
  }
  os << text;
  return kExitOk;
}

int cmd_certify(const RunConfig& cfg, const std::optional<std::filesystem::path>& out_dir,
                std::ostream& os) {
  const auto c = certify_pipeline(cfg);
  const auto text = certificate_to_text(c.cert, cfg.params);
  if (out_dir) {
    const auto dir = prepare(out_dir);
    write_text(dir / "certificate.txt", text);
    write_text(dir / "w0.csv", profile_csv(c.w0.profile, "w0"));
  }
  os << text;
  return c.cert.pass ? kExitOk : kExitInternal;
}

int cmd_build_data(const RunConfig& cfg, const std::optional<std::filesystem::path>& out_dir,
                   std::ostream& os) {
  const auto sp = select_parameters(cfg.params, cfg.eta, cfg.select);
  const auto radii = cfg.radial_grid();
  const auto u = build_u0(cfg.params, sp, cfg.data_spec, radii);
  const auto w = build_w0(cfg.params, sp, cfg.data_spec, radii);
  const auto rep = check_conditions(u.profile, w.profile, cfg.params, sp);
  KeyValues kv = subsolution_params_table(sp);
  kv.emplace_back("u0.rho", format_double(u.rho));
  kv.emplace_back("u0.height", format_double(u.height));
  kv.emplace_back("u0.tail", format_double(u.tail));
  kv.emplace_back("w0.height", format_double(w.height));
  kv.emplace_back("w0.baseline", format_double(w.tail));
  kv.emplace_back("contract_ok", rep.contract_ok() ? "true" : "false");
  const auto text = key_values_to_text(kv) + rep.to_text();
  if (out_dir) {
    const auto dir = prepare(out_dir);
    write_text(dir / "u0.csv", profile_csv(u.profile, "u0"));
    write_text(dir / "w0.csv", profile_csv(w.profile, "w0"));
    write_text(dir / "conditions.txt", text);
  }
  os << text;
  return rep.contract_ok() ? kExitOk : kExitInternal;
}

int cmd_sweep(const RunConfig& cfg, const std::optional<std::filesystem::path>& out_dir,
              std::ostream& os) {
  const auto text = sweep_csv(sweep(cfg, sweep_threads()));
  if (out_dir) write_text(prepare(out_dir) / "sweep.csv", text);
  os << text;
  return kExitOk;
}

int run_command(const std::string& mode, const std::optional<std::filesystem::path>& config,
                const std::vector<std::string>& overrides,
                const std::optional<std::filesystem::path>& out_dir, std::ostream& os,
                std::ostream& es) {
  using Cmd = int (*)(const RunConfig&, const std::optional<std::filesystem::path>&,
                      std::ostream&);
  Cmd cmd = nullptr;
  if (mode == "constants") cmd = cmd_constants;
  else if (mode == "simulate") cmd = cmd_simulate;
  else if (mode == "simulate-mass") cmd = cmd_simulate_mass;
  else if (mode == "certify") cmd = cmd_certify;
  else if (mode == "build-data") cmd = cmd_build_data;
  else if (mode == "sweep") cmd = cmd_sweep;
  else {
    es << "error: unknown mode '" << mode << "'\n";
    return kExitConfig;
  }
  RunConfig cfg;
  try {
    cfg = config ? load_config(*config, overrides) : config_from_settings(overrides);
    if (mode == "sweep") sweep_threads();
  } catch (const ConfigError& e) {
    es << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    es << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  try {
    return cmd(cfg, out_dir, os);
  } catch (const OutOfTheory& e) {
    es << "out of theory: " << e.what() << "\n";
    return kExitOutOfTheory;
  } catch (const ConfigError& e) {
    es << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    es << (mode == "constants" ? "config error: " : "invalid argument: ") << e.what() << "\n";
    return mode == "constants" ? kExitConfig : kExitInternal;
  } catch (const std::exception& e) {
    es << "error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace kslab
