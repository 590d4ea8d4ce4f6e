#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kslab/errors.hpp"
#include "kslab/initdata.hpp"
#include "kslab/radial_solver.hpp"

using namespace kslab;
using std::numbers::pi;

namespace {

std::vector<double> smooth_u(const std::vector<double>& r) {
  std::vector<double> u(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) u[i] = 1.0 + 4.0 * std::exp(-20.0 * r[i] * r[i]);
  return u;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

std::vector<TrajectoryRecord> series(int count, double dt, double rate) {
  std::vector<TrajectoryRecord> out(count);
  for (int j = 0; j < count; ++j) {
    out[j].t = j * dt;
    out[j].linf_u = std::exp(rate * j * dt);
  }
  return out;
}

}  // namespace

TEST_CASE("signal gradient closed forms") {
  const auto r = uniform_nodes(400);
  RadialProfile c{r, std::vector<double>(r.size(), 2.0)};
  for (double v : solve_vr(c, 3).values) CHECK(std::abs(v) < 1e-13);

  double prev = 0.0;
  for (int N : {200, 400, 800}) {
    const auto rr = uniform_nodes(N);
    const auto vr = solve_vr(RadialProfile{rr, rr}, 3);
    double err = 0.0;
    for (std::size_t i = 0; i < rr.size(); ++i)
      err = std::max(err, std::abs(vr.values[i] - rr[i] * (1 - rr[i]) / 4));
    if (prev > 0.0) CHECK(prev / err > 1.8);
    prev = err;
    CHECK(vr.values.back() == 0.0);
    CHECK(vr.values.front() == 0.0);
  }
  CHECK(prev < 1e-3);

  const RadialMesh mesh(r, 3);
  std::vector<double> w(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) w[i] = 1 + std::sin(5 * r[i]) * std::sin(5 * r[i]);
  const auto faces = solve_vr_faces(mesh, w);
  CHECK(faces.back() == 0.0);
}

TEST_CASE("w update") {
  const auto r = uniform_nodes(10);
  RadialProfile w0{r, std::vector<double>(r.size(), 3.0)};
  RadialProfile zero{r, std::vector<double>(r.size(), 0.0)};
  RadialProfile c{r, std::vector<double>(r.size(), 1.5)};
  auto a = w0, b = w0;
  for (int j = 0; j < 10; ++j) {
    a = step_w(a, zero, 0.1);
    b = step_w(b, c, 0.1);
  }
  for (std::size_t i = 0; i < r.size(); ++i) {
    CHECK(a.values[i] == doctest::Approx(3.0 * std::exp(-1.0)).epsilon(1e-14));
    CHECK(b.values[i] == doctest::Approx(1.5 + 1.5 * std::exp(-1.0)).epsilon(1e-14));
  }
  const double dt = 1e-8;
  const auto s = step_w(w0, c, dt);
  CHECK((s.values[0] - 3.0) / dt == doctest::Approx(1.5 - 3.0).epsilon(1e-6));
}

TEST_CASE("u step: steady state and conservation") {
  const auto r = geometric_nodes(128, 1.02);
  const RadialMesh mesh(r, 3);
  const ModelParams params{3, 1.5, 1.0};
  std::vector<double> c(r.size(), 2.0), vr0(r.size() + 1, 0.0);
  for (auto scheme : {AdvectionScheme::kImplicit, AdvectionScheme::kExplicit}) {
    const auto out = step_u(mesh, c, vr0, 0.01, params, scheme);
    CHECK(max_diff(out, c) < 1e-14);
  }

  std::mt19937 gen(11);
  std::uniform_real_distribution<double> d(0.0, 5.0);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> u(r.size()), w(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      u[i] = d(gen);
      w[i] = d(gen);
    }
    const auto vr = solve_vr_faces(mesh, w);
    for (double m : {1.0, 1.3, 2.0}) {
      const ModelParams p{3, m, 1.0};
      const double before = mesh.integrate(u);
      const double dt = 0.5 * advective_dt_limit(mesh, vr);
      for (auto scheme : {AdvectionScheme::kImplicit, AdvectionScheme::kExplicit}) {
        const auto out = step_u(mesh, u, vr, dt, p, scheme);
        CHECK(std::abs(mesh.integrate(out) - before) / before < 1e-12);
        for (double x : out) CHECK(x >= -1e-12);
      }
    }
  }
}

TEST_CASE("u step: local error shrinks like dt^2") {
  const auto r = geometric_nodes(128, 1.02);
  const RadialMesh mesh(r, 3);
  const ModelParams params{3, 1.2, 1.0};
  const auto u = smooth_u(r);
  std::vector<double> w(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) w[i] = 1.0 + r[i] * r[i];
  const auto vr = solve_vr_faces(mesh, w);
  std::vector<double> gaps;
  for (double dt : {4e-4, 2e-4, 1e-4}) {
    const auto one = step_u(mesh, u, vr, dt, params, AdvectionScheme::kImplicit);
    auto half = step_u(mesh, u, vr, dt / 2, params, AdvectionScheme::kImplicit);
    half = step_u(mesh, half, vr, dt / 2, params, AdvectionScheme::kImplicit);
    gaps.push_back(max_diff(one, half));
  }
  CHECK(gaps[0] / gaps[1] == doctest::Approx(4.0).epsilon(0.15));
  CHECK(gaps[1] / gaps[2] == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("growth classification") {
  StepControl ctrl;
  std::vector<TrajectoryRecord> flat(50);
  for (int j = 0; j < 50; ++j) {
    flat[j].t = 0.1 * j;
    flat[j].linf_u = 3.0;
  }
  CHECK(std::holds_alternative<Bounded>(classify_growth(flat, ctrl)));

  const auto grow = series(200, 0.1, 0.05);
  const auto v = classify_growth(grow, ctrl);
  REQUIRE(std::holds_alternative<Growing>(v));
  CHECK(std::abs(std::get<Growing>(v).alpha_hat - 0.05) < 1e-6);
  CHECK(std::abs(fit_log_growth(grow, 0.0, 19.9).slope - 0.05) < 1e-12);

  const auto stop = classify_growth(grow, ctrl, true, "linf threshold exceeded");
  REQUIRE(std::holds_alternative<BlowupSuspected>(stop));
  CHECK(std::get<BlowupSuspected>(stop).t_stop == grow.back().t);

  CHECK_THROWS_AS(classify_growth(std::span(grow).first(5), ctrl), InvalidArgument);
  CHECK(verdict_name(Bounded{}) == "Bounded");
}

TEST_CASE("homogeneous data stays homogeneous") {
  const ModelParams params{3, 1.0, 50.0};
  const auto r = geometric_nodes(128, 1.02);
  const double c = params.M / unit_ball_volume(3);
  RadialProfile u{r, std::vector<double>(r.size(), c)};
  StepControl ctrl;
  ctrl.t_end = 5.0;
  ctrl.record_interval = 0.25;
  const auto res = run(u, u, params, ctrl);
  CHECK(std::holds_alternative<Bounded>(res.verdict));
  for (double x : res.final_state.u.values) CHECK(x == doctest::Approx(c).epsilon(1e-10));
  CHECK(res.records.size() == 21);
}

TEST_CASE("run rejects inconsistent mass") {
  const ModelParams params{3, 1.0, 50.0};
  const auto r = geometric_nodes(64, 1.02);
  RadialProfile u{r, std::vector<double>(r.size(), 1.0)};
  CHECK_THROWS_AS(run(u, u, params, StepControl{}), ConfigError);
}

TEST_CASE("supercritical bump run") {
  const ModelParams params{3, 1.5, 400.0};
  const auto r = geometric_nodes(256, 1.02);
  const auto u0 = generic_bump(params, 0.1, 100.0, r);
  StepControl ctrl;
  ctrl.t_end = 20.0;
  ctrl.record_interval = 0.5;
  RecordOptions rec;
  rec.energy_ps = {2.0, 3.0};
  const auto res = run(u0, u0, params, ctrl, rec);
  CHECK(std::holds_alternative<Bounded>(res.verdict));
  for (const auto& rr : res.records) {
    CHECK(std::abs(rr.mass_u - params.M) / params.M < 1e-10);
    CHECK(rr.min_u >= -1e-12);
    CHECK(rr.min_w >= -1e-12);
    CHECK(rr.mu >= 0.0);
    CHECK(rr.energy_p.size() == 2);
  }
}
