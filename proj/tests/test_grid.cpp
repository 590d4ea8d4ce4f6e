#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kslab/errors.hpp"
#include "kslab/grid.hpp"
#include "kslab/model.hpp"

using namespace kslab;

TEST_CASE("node sets") {
  const auto u = uniform_nodes(10);
  REQUIRE(u.size() == 11);
  CHECK(u.front() == 0.0);
  CHECK(u.back() == 1.0);
  const auto g = geometric_nodes(100, 1.03);
  CHECK(g.back() == 1.0);
  CHECK((g[2] - g[1]) / (g[1] - g[0]) == doctest::Approx(1.03));
  const auto s = geometric_nodes_min_spacing(200, 1e-6);
  CHECK(s[1] - s[0] == doctest::Approx(1e-6).epsilon(1e-8));
  CHECK(s.back() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("mesh integrates constants exactly") {
  for (int n : {3, 4}) {
    const RadialMesh mesh(geometric_nodes(64, 1.05), n);
    std::vector<double> one(mesh.size(), 1.0);
    CHECK(mesh.integrate(one) == doctest::Approx(unit_ball_volume(n)).epsilon(1e-14));
    CHECK(mesh.moment_at(one, 0.37) == doctest::Approx(std::pow(0.37, n) / n).epsilon(1e-13));
  }
}

TEST_CASE("mesh integrates r with second-order error") {
  double prev = 0.0;
  for (int N : {100, 200, 400}) {
    const RadialMesh mesh(uniform_nodes(N), 3);
    std::vector<double> r(mesh.nodes().begin(), mesh.nodes().end());
    const double err = std::abs(mesh.integrate(r) - std::numbers::pi);
    if (prev > 0.0) CHECK(prev / err > 3.0);
    prev = err;
  }
  CHECK(prev < 1e-4);
}

TEST_CASE("plateau shape") {
  CHECK(plateau_shape(0.05, 0.1, 0.1) == 1.0);
  CHECK(plateau_shape(0.25, 0.1, 0.1) == 0.0);
  CHECK(plateau_shape(0.15, 0.1, 0.1) == doctest::Approx(0.5));
  const double h = 1e-7;
  for (double r : {0.1, 0.2}) {
    const double left = (plateau_shape(r, 0.1, 0.1) - plateau_shape(r - h, 0.1, 0.1)) / h;
    const double right = (plateau_shape(r + h, 0.1, 0.1) - plateau_shape(r, 0.1, 0.1)) / h;
    CHECK(std::abs(left - right) < 1e-3);
  }
}

TEST_CASE("tridiagonal solve against dense product") {
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  const int N = 50;
  std::vector<double> lo(N), di(N), up(N), x(N), rhs(N);
  for (int i = 0; i < N; ++i) {
    lo[i] = i ? d(gen) : 0.0;
    up[i] = i + 1 < N ? d(gen) : 0.0;
    di[i] = 3.0 + d(gen);
    x[i] = d(gen);
  }
  for (int i = 0; i < N; ++i)
    rhs[i] = di[i] * x[i] + (i ? lo[i] * x[i - 1] : 0.0) + (i + 1 < N ? up[i] * x[i + 1] : 0.0);
  auto diag = di;
  solve_tridiagonal(lo, diag, up, rhs);
  for (int i = 0; i < N; ++i) CHECK(rhs[i] == doctest::Approx(x[i]).epsilon(1e-12));
}

TEST_CASE("profile validation") {
  RadialProfile f{{0.0, 0.5, 1.0}, {1.0, -1.0, 2.0}};
  CHECK_NOTHROW(f.validate(false));
  CHECK_THROWS_AS(f.validate(true), InvalidArgument);
  RadialProfile bad{{0.0, 0.6, 0.5, 1.0}, {1, 1, 1, 1}};
  CHECK_THROWS_AS(bad.validate(false), InvalidArgument);
  CHECK(f.at(0.25) == doctest::Approx(0.0));
  CHECK(f.max() == 2.0);
  CHECK(f.min() == -1.0);
}
