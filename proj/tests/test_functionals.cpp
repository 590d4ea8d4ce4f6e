#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kslab/errors.hpp"
#include "kslab/functionals.hpp"

using namespace kslab;
using std::numbers::pi;

namespace {

RadialProfile constant(const std::vector<double>& r, double c) {
  return {r, std::vector<double>(r.size(), c)};
}

}  // namespace

TEST_CASE("mass and mean") {
  const auto r = uniform_nodes(800);
  CHECK(total_mass(constant(r, 1.0), 3) == doctest::Approx(4 * pi / 3).epsilon(1e-14));
  RadialProfile lin{r, r};
  CHECK(total_mass(lin, 3) == doctest::Approx(pi).epsilon(1e-5));
  CHECK(mean_w(constant(r, 2.5), 3) == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(mean_w(lin, 3) == doctest::Approx(0.75).epsilon(1e-5));
}

TEST_CASE("energy of constants") {
  const auto r = geometric_nodes(200, 1.01);
  const ModelParams params{3, 4.0 / 3.0, 4 * pi / 3};
  const auto one = constant(r, 1.0);
  const auto rep = energy_report(0.0, one, one, 2.0, default_k(2.0), params);
  CHECK(rep.E_p == doctest::Approx(10 * pi / 9).epsilon(1e-13));
  CHECK(rep.dissipation == doctest::Approx(0.0));

  const auto zero = constant(r, 0.0);
  const auto w = constant(r, 2.0);
  const auto rz = energy_report(0.0, zero, w, 2.0, default_k(2.0), params);
  CHECK(rz.E_p == doctest::Approx(8.0 / 3.0 * 4 * pi / 3).epsilon(1e-13));
  CHECK(rz.dissipation == 0.0);
}

TEST_CASE("homogeneity of the rhs term") {
  const auto r = geometric_nodes(200, 1.01);
  const RadialMesh mesh(r, 3);
  const ModelParams params{3, 1.0, 1.0};
  std::vector<double> u(r.size()), u2(r.size()), w(r.size(), 0.0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    u[i] = 1.0 + std::cos(r[i]);
    u2[i] = 2.0 * u[i];
  }
  const double k = default_k(2.0);
  const auto a = energy_report(mesh, 0.0, u, w, 2.0, k, params);
  const auto b = energy_report(mesh, 0.0, u2, w, 2.0, k, params);
  CHECK(b.rhs_k / a.rhs_k == doctest::Approx(8.0).epsilon(1e-13));
}

TEST_CASE("monitor at the homogeneous steady state") {
  const auto r = geometric_nodes(200, 1.01);
  const double c = 3.0;
  const ModelParams params{3, 1.5, c * 4 * pi / 3};
  const double p = 2.0, k = default_k(p);
  const auto f = constant(r, c);
  std::vector<EnergyReport> reps{energy_report(0.0, f, f, p, k, params),
                                 energy_report(1.0, f, f, p, k, params),
                                 energy_report(2.0, f, f, p, k, params)};
  const auto res = inequality_monitor(reps);
  const double vol = 4 * pi / 3;
  const double W = std::pow(c, p + 1) * vol;
  const double expected = (1 - std::pow(k, -p) - std::pow(k, -1 / p)) * W - 2 * k * W;
  for (double x : res) {
    CHECK(x == doctest::Approx(expected).epsilon(1e-12));
    CHECK(x <= 0.0);
  }
  CHECK(std::pow(k, -p) + std::pow(k, -1 / p) < 1.0);
}

TEST_CASE("monitor rejects mixed exponents") {
  const auto r = geometric_nodes(50, 1.01);
  const ModelParams params{3, 1.5, 4 * pi / 3};
  const auto f = constant(r, 1.0);
  std::vector<EnergyReport> reps{energy_report(0.0, f, f, 2.0, 8.0, params),
                                 energy_report(1.0, f, f, 3.0, 8.0, params)};
  CHECK_THROWS_AS(inequality_monitor(reps), InvalidArgument);
}
