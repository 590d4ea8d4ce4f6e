#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kslab/errors.hpp"
#include "kslab/model.hpp"

using namespace kslab;
using std::numbers::pi;

TEST_CASE("sphere measure") {
  CHECK(omega_n(3) == doctest::Approx(4 * pi).epsilon(1e-15));
  CHECK(omega_n(2) == doctest::Approx(2 * pi).epsilon(1e-15));
  CHECK(omega_n(4) == doctest::Approx(2 * pi * pi).epsilon(1e-15));
  CHECK(unit_ball_volume(3) == doctest::Approx(4 * pi / 3).epsilon(1e-15));
}

TEST_CASE("blow-up mass threshold") {
  CHECK(std::abs(blowup_mass_threshold(3) - 72 * std::sqrt(2.0) * pi) < 1e-9);
  CHECK(blowup_mass_threshold(4) == doctest::Approx(512 * pi * pi).epsilon(1e-14));
  CHECK_THROWS_AS(blowup_mass_threshold(2), OutOfTheory);
  const double thr = blowup_mass_threshold(3);
  CHECK_FALSE(thr > thr);
}

TEST_CASE("params validation") {
  CHECK_THROWS_AS((ModelParams{2, 1.0, 1.0}.validate()), InvalidArgument);
  CHECK_THROWS_AS((ModelParams{3, 0.5, 1.0}.validate()), InvalidArgument);
  CHECK_THROWS_AS((ModelParams{3, 1.0, 0.0}.validate()), InvalidArgument);
  ModelParams p{3, 4.0 / 3.0, 10.0};
  CHECK(p.is_critical());
  CHECK(p.mass_per_omega() == doctest::Approx(10.0 / (4 * pi)));
}

TEST_CASE("theta exact and floating") {
  CHECK(theta_exact(Rational(2), Rational(4, 3), 3) == Rational(7, 9));
  CHECK(std::abs(theta(2.0, 4.0 / 3.0, 3) - 7.0 / 9.0) < 1e-15);
  CHECK_THROWS_AS(theta(1.0, 1.0, 3), InvalidArgument);
}

TEST_CASE("critical exponent identity") {
  for (int n : {3, 4, 5}) {
    const double m = 2.0 - 2.0 / n;
    for (double p : {1.5, 2.0, 3.0, 7.0}) {
      if (p <= theta_min_p(m, n)) continue;
      const double th = theta(p, m, n);
      CHECK(2 * (p + 1) * th / (p + m - 1) == doctest::Approx(2.0).epsilon(1e-13));
    }
  }
  for (int k = 0; k < 3; ++k) {
    const int n = 3;
    const double m = 1.34 + 0.3 * k;
    for (double p : {2.0, 4.0}) CHECK((p + 1) * theta(p, m, n) / (p + m - 1) < 1.0);
  }
  for (std::int64_t p = 2; p <= 5; ++p) {
    const Rational th = theta_exact(Rational(p), Rational(4, 3), 3);
    CHECK(Rational(2) * Rational(p + 1) * th / (Rational(p) + Rational(1, 3)) == Rational(2));
  }
}

TEST_CASE("critical mass") {
  const auto r = critical_mass(2.0, 4.0 / 3.0, 3, 1.0);
  CHECK(std::abs(r.value - 27.0 / 2744.0) < 1e-12);
  CHECK_FALSE(r.warning.has_value());
  CHECK(critical_mass_bracket_exact(2, Rational(4, 3), 3, Rational(1)) == Rational(9, 196));
  CHECK(critical_mass(2.0, 4.0 / 3.0, 3, 2.0).value / r.value ==
        doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-13));
  CHECK(critical_mass(2.0, 1.5, 3, 1.0).warning.has_value());
  CHECK_THROWS_AS(critical_mass(1.0, 4.0 / 3.0, 3, 1.0), InvalidArgument);
  CHECK_THROWS_AS(critical_mass(2.0, 4.0 / 3.0, 3, 0.0), InvalidArgument);
}

TEST_CASE("Gagliardo-Nirenberg estimate") {
  const double p = 2.0, m = 4.0 / 3.0;
  const int n = 3;
  const double floor = std::pow(unit_ball_volume(n), -p);
  CHECK(gn_quotient(p, m, n, 0.0, 0.5) == doctest::Approx(floor).epsilon(1e-10));
  double prev = 0.0;
  for (int size : {1, 4, 16, 64}) {
    const auto e = gn_constant_estimate(p, m, n, size);
    CHECK(e.c1 >= floor * (1 - 1e-12));
    CHECK(e.c1 >= prev);
    CHECK(e.is_lower_bound);
    prev = e.c1;
  }
  const double a = gn_constant_estimate(p, m, n, 512).c1;
  const double b = gn_constant_estimate(p, m, n, 1024).c1;
  CHECK(std::abs(b - a) / b < 1e-3);
}
