#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kslab/errors.hpp"
#include "kslab/initdata.hpp"
#include "kslab/mass_solver.hpp"
#include "kslab/subsolution.hpp"
#include "oracles.hpp"

using namespace kslab;

using namespace kslab::oracle;

TEST_CASE("mass variable closed forms") {
  const auto xis = default_xi_grid();
  const auto r = uniform_nodes(400);
  RadialProfile c{r, std::vector<double>(r.size(), 2.0)};
  const auto U = to_mass_variable(c, 3, xis);
  for (std::size_t j = 0; j < xis.size(); ++j)
    CHECK(U.values[j] == doctest::Approx(2.0 * xis[j] / 3.0).epsilon(1e-12));

  double prev = 0.0;
  for (int N : {200, 400, 800}) {
    const auto rr = uniform_nodes(N);
    const auto L = to_mass_variable(RadialProfile{rr, rr}, 3, xis);
    double err = 0.0;
    for (std::size_t j = 0; j < xis.size(); ++j)
      err = std::max(err, std::abs(L.values[j] - std::pow(xis[j], 4.0 / 3.0) / 4.0));
    if (prev > 0.0) CHECK(prev / err > 1.8);
    prev = err;
  }

  const ModelParams params{3, 1.0, 25.0};
  const auto bump = generic_bump(params, 0.2, 5.0);
  const auto B = to_mass_variable(bump, 3, xis);
  CHECK(B.values.back() == doctest::Approx(params.mass_per_omega()).epsilon(1e-12));
  CHECK(B.values.front() == 0.0);
}

TEST_CASE("inverse map") {
  const auto xis = default_xi_grid();
  const auto r = uniform_nodes(200);
  MassProfile lin{xis, {}};
  for (double x : xis) lin.values.push_back(2.0 * x);
  for (double v : from_mass_variable(lin, 3, r).values) CHECK(v == doctest::Approx(6.0).epsilon(1e-10));

  auto bad = lin;
  bad.values[500] = bad.values[499] - 1e-3;
  CHECK_THROWS_AS(from_mass_variable(bad, 3, r), InvalidArgument);

  double prev = 0.0;
  for (int N : {100, 200, 400}) {
    const auto rr = uniform_nodes(N);
    RadialProfile u{rr, {}};
    for (double x : rr) u.values.push_back(1.0 + std::cos(3.0 * x));
    std::vector<double> xis3;
    for (double x : rr) xis3.push_back(x * x * x);
    const auto back = from_mass_variable(to_mass_variable(u, 3, xis3), 3, rr);
    double err = 0.0;
    for (std::size_t i = 1; i < rr.size(); ++i) err = std::max(err, std::abs(back.values[i] - u.values[i]));
    if (prev > 0.0) CHECK(prev / err > 3.5);
    prev = err;
  }
  CHECK(prev < 1e-4);
}

TEST_CASE("memory update") {
  const ModelParams params{3, 1.0, 4.0 * std::numbers::pi};
  const auto xis = uniform_nodes(20);
  MassProfile uni{xis, {}}, frozen{xis, {}};
  for (double x : xis) {
    uni.values.push_back(x);
    frozen.values.push_back(std::sqrt(x));
  }
  std::vector<double> I0(xis.size(), 0.0), Ia = I0, Ib = I0;
  for (int k = 0; k < 20; ++k) {
    Ia = update_memory(Ia, uni, params, 0.1);
    Ib = update_memory(Ib, frozen, params, 0.1);
  }
  for (std::size_t j = 0; j < xis.size(); ++j) {
    CHECK(std::abs(Ia[j]) < 1e-15);
    CHECK(Ib[j] == doctest::Approx((1 - std::exp(-2.0)) * (std::sqrt(xis[j]) - xis[j])).epsilon(1e-13));
  }
}

TEST_CASE("residual of P at and near the homogeneous state") {
  const auto xis = geometric_nodes_min_spacing(200, 1e-5);
  const std::size_t N = xis.size();
  for (double m : {1.0, 4.0 / 3.0, 2.0}) {
    const ModelParams params{3, m, 12.0};
    const double c = params.mass_per_omega();
    MassState s;
    s.t = 0.7;
    s.U.xis = xis;
    s.I.assign(N, 0.0);
    s.K0 = 2.0;
    for (double x : xis) {
      s.U.values.push_back(c * x);
      s.W0.push_back(s.K0 * x);
    }
    const std::vector<double> Ut(N, 0.0);
    for (double v : p_residual(s, Ut, params)) CHECK(std::abs(v) < 1e-9);

    const double delta = 1e-3;
    for (std::size_t j = 0; j < N; ++j) s.U.values[j] += delta * xis[j] * (1 - xis[j]);
    const auto res = p_residual(s, Ut, params);
    for (std::size_t j = 1; j + 1 < N; j += 17) {
      const double x = xis[j];
      const double slope = c + delta * (1 - 2 * x);
      const double expect = 2 * delta * 9 * std::pow(x, 4.0 / 3.0) * std::pow(3 * slope + 1, m - 1);
      CHECK(res[j] == doctest::Approx(expect).epsilon(1e-7));
    }
  }
}

TEST_CASE("homogeneous data is stationary") {
  const ModelParams params{3, 1.2, 30.0};
  const auto xis = geometric_nodes_min_spacing(255, 1e-6);
  const double c = params.mass_per_omega();
  MassProfile U{xis, {}};
  std::vector<double> W0;
  for (double x : xis) {
    U.values.push_back(c * x);
    W0.push_back(c * x);
  }
  StepControl ctrl;
  ctrl.t_end = 3.0;
  ctrl.record_interval = 0.25;
  const auto res = run_mass(U, W0, c, params, ctrl);
  CHECK(std::holds_alternative<Bounded>(res.verdict));
  for (std::size_t j = 0; j < xis.size(); ++j)
    CHECK(res.final_state.U.values[j] == doctest::Approx(c * xis[j]).epsilon(1e-10));
}

TEST_CASE("pinned ends and monotone profile") {
  const ModelParams params{3, 1.0, 40.0};
  const auto u0 = generic_bump(params, 0.2, 20.0);
  const auto xis = default_xi_grid();
  const auto W = w0_moments(u0, 3, xis);
  StepControl ctrl;
  ctrl.t_end = 1.0;
  ctrl.record_interval = 0.1;
  const auto res = run_mass(to_mass_variable(u0, 3, xis), W.W0, W.K0, params, ctrl,
                            {[&](const MassState& s, const TrajectoryRecord&) {
                              CHECK(s.U.values.front() == 0.0);
                              CHECK(s.U.values.back() == params.mass_per_omega());
                              for (std::size_t j = 1; j < s.U.size(); ++j)
                                CHECK(s.U.values[j] >= s.U.values[j - 1] - 1e-9);
                            }});
  CHECK(res.records.size() == 11);
}

TEST_CASE("cross-solver agreement improves under refinement") {
  const double coarse = cross_gap(256, 511, 0.04);
  const double fine = cross_gap(512, 1023, 0.02);
  MESSAGE("cross-solver relative gap: coarse " << coarse << ", default " << fine);
  CHECK(fine < 0.01);
  CHECK(fine < coarse);
}

TEST_CASE("drift matches the primitive w-moment") {
  const ModelParams params{3, 1.0, 10.0};
  const auto r = geometric_nodes(256, 1.02);
  const auto u0 = generic_bump(params, 0.3, 3.0, r);
  const auto w0 = generic_bump(params, 0.5, 1.0, r);
  const RadialMesh mesh(r, 3);
  const auto xis = geometric_nodes_min_spacing(200, 1e-5);
  const auto W = w0_moments(w0, 3, xis);
  std::vector<double> I(xis.size(), 0.0);
  StepControl ctrl;
  ctrl.t_end = 1.0;
  ctrl.record_interval = 0.1;
  double t = 0.0;
  double worst = 0.0;
  RunHooks hooks;
  hooks.on_step = [&](const StepEvent& ev) {
    MassProfile src{xis, {}};
    std::vector<double> avg(ev.u_old.size());
    for (std::size_t i = 0; i < avg.size(); ++i) avg[i] = 0.5 * (ev.u_old[i] + ev.u_new[i]);
    for (double x : xis) src.values.push_back(mesh.moment_at(avg, std::cbrt(x)));
    I = update_memory(I, src, params, ev.dt);
    t = ev.t_old + ev.dt;
    const double K = mesh.moment_at(ev.w_new, 1.0);
    for (std::size_t j = 1; j + 1 < xis.size(); ++j) {
      const double lhs = 3 * (I[j] + (W.W0[j] - W.K0 * xis[j]) * std::exp(-t));
      const double rhs = 3 * (mesh.moment_at(ev.w_new, std::cbrt(xis[j])) - K * xis[j]);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  };
  run(u0, w0, params, ctrl, {}, hooks);
  CHECK(t == doctest::Approx(1.0));
  CHECK(worst < 1e-10 * params.mass_per_omega());
}

TEST_CASE("origin density") {
  const auto xis = uniform_nodes(100);
  MassProfile U{xis, {}};
  for (double x : xis) U.values.push_back(2.0 * x + x * x);
  CHECK(origin_density(U, 3) == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("discrete residual decreases under joint refinement") {
  const ModelParams params{3, 1.0, 10.0};
  const auto u0 = generic_bump(params, 0.3, 2.0);
  std::vector<double> res;
  for (int k = 0; k < 3; ++k) {
    const auto xis = geometric_nodes_min_spacing((128 << k) - 1, 1e-4 / (1 << (2 * k)));
    const auto W = w0_moments(u0, 3, xis);
    StepControl ctrl;
    ctrl.t_end = 1.0;
    ctrl.record_interval = 0.1;
    ctrl.change_target = 0.04 / (1 << k);
    ctrl.dt_max = 0.05 / (1 << k);
    const auto run = run_mass(to_mass_variable(u0, 3, xis), W.W0, W.K0, params, ctrl);
    double worst = 0.0;
    for (const auto& r : run.records)
      if (r.t > 0.0) worst = std::max(worst, r.p_residual_max);
    res.push_back(worst);
  }
  MESSAGE("max |P U| under refinement: " << res[0] << ", " << res[1] << ", " << res[2]);
  CHECK(res[1] / res[0] < 0.6);
  CHECK(res[2] / res[1] < 0.6);
}
