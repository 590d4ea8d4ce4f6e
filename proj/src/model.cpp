#include "kslab/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kslab/errors.hpp"
#include "kslab/grid.hpp"

namespace kslab {

void ModelParams::validate() const {
  if (n < 3)
    throw InvalidArgument("dimension n must be >= 3 (got " +
                          std::to_string(n) + ")");
  if (!(m >= 1.0) || !std::isfinite(m))
    throw InvalidArgument("diffusion exponent m must be >= 1");
  if (!(M > 0.0) || !std::isfinite(M))
    throw InvalidArgument("total mass M must be positive");
}

bool ModelParams::is_critical(double tol) const {
  return std::abs(m - critical_exponent()) <= tol;
}

double ModelParams::mass_per_omega() const { return M / omega_n(n); }

double omega_n(int n) {
  if (n < 1) throw InvalidArgument("omega_n: dimension must be >= 1");
  const double half = 0.5 * n;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double unit_ball_volume(int n) { return omega_n(n) / n; }

double blowup_mass_threshold(int n) {
  if (n < 3)
    throw OutOfTheory("blow-up mass threshold requires n >= 3 (got " +
                      std::to_string(n) + ")");
  return std::pow(2.0, 0.5 * n) * std::pow(static_cast<double>(n), n - 1) *
         omega_n(n);
}

double theta_min_p(double m, int n) {
  return std::max(1.0, 0.5 * n * (2.0 - 2.0 / n - m));
}

namespace {

void check_theta_domain(double p, double m, int n) {
  if (n < 3) throw InvalidArgument("theta: n must be >= 3");
  if (!(m >= 1.0)) throw InvalidArgument("theta: m must be >= 1");
  if (!(p > 1.0)) throw InvalidArgument("theta: exponent p must exceed 1");
  const double bound = 0.5 * n * (2.0 - 2.0 / n - m);
  if (!(p > bound)) {
    std::ostringstream os;
    os << "theta: exponent p = " << p << " must exceed (n/2)(2-2/n-m) = "
       << bound;
    throw InvalidArgument(os.str());
  }
}

}  // namespace

double theta(double p, double m, int n) {
  check_theta_domain(p, m, n);
  const double q = 0.5 * (p + m - 1.0);
  return (q - q / (p + 1.0)) / (q + 1.0 / n - 0.5);
}

Rational theta_exact(Rational p, Rational m, int n) {
  check_theta_domain(p.to_double(), m.to_double(), n);
  const Rational q = (p + m - 1) / 2;
  return (q - q / (p + 1)) / (q + Rational(1, n) - Rational(1, 2));
}

CriticalMassResult critical_mass(double p, double m, int n, double c1) {
  if (!(c1 > 0.0)) throw InvalidArgument("critical_mass: c1 must be positive");
  CriticalMassResult out;
  out.theta = theta(p, m, n);
  const double bracket = 1.0 / (4.0 * std::pow(2.0, p) * c1) * 4.0 * (p - 1.0) /
                         ((p + m - 1.0) * (p + m - 1.0));
  out.value = std::pow(bracket, 1.0 / ((1.0 - out.theta) * (p + 1.0)));
  if (std::abs(m - (2.0 - 2.0 / n)) > 1e-12) {
    out.warning = "m differs from the critical exponent 2-2/n; M_c(p) is "
                  "only meaningful in the critical case";
  }
  return out;
}

Rational critical_mass_bracket_exact(std::int64_t p, Rational m, int n,
                                     Rational c1) {
  (void)theta_exact(Rational(p), m, n);  // domain check
  std::int64_t two_p = 1;
  for (std::int64_t i = 0; i < p; ++i) two_p *= 2;
  const Rational s = Rational(p) + m - 1;
  return Rational(1) / (Rational(4 * two_p) * c1) * Rational(4 * (p - 1)) /
         (s * s);
}

namespace {

double gn_quotient_on(const RadialMesh& mesh, double p, double m, double th,
                      double height, double radius) {
  const int n = mesh.dim();
  const double q = 0.5 * (p + m - 1.0);
  const auto& r = mesh.nodes();
  std::vector<double> phi(r.size()), phi_pow(r.size()), phi_q(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    phi[i] = 1.0 + height * plateau_shape(r[i], radius, 0.5 * radius);
    phi_pow[i] = std::pow(phi[i], p + 1.0);
    phi_q[i] = std::pow(phi[i], q);
  }
  const double lp1 = mesh.integrate(phi_pow);
  const double l1 = mesh.integrate(phi);
  double grad2 = 0.0;
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    const double d = (phi_q[i + 1] - phi_q[i]) / mesh.spacing(i);
    grad2 += d * d * (std::pow(r[i + 1], n) - std::pow(r[i], n)) / n;
  }
  grad2 *= omega_n(n);
  const double denom =
      std::pow(std::sqrt(grad2), 2.0 * (p + 1.0) * th / (p + m - 1.0)) *
          std::pow(l1, (p + 1.0) * (1.0 - th)) +
      std::pow(l1, p + 1.0);
  return lp1 / denom;
}

}  // namespace

double gn_quotient(double p, double m, int n, double height, double radius,
                   int quadrature_nodes) {
  const double th = theta(p, m, n);
  const RadialMesh mesh(uniform_nodes(quadrature_nodes), n);
  return gn_quotient_on(mesh, p, m, th, height, radius);
}

namespace {

double radical_inverse(int index, int base) {
  double f = 1.0;
  double x = 0.0;
  while (index > 0) {
    f /= base;
    x += f * (index % base);
    index /= base;
  }
  return x;
}

}  // namespace

GNEstimate gn_constant_estimate(double p, double m, int n,
                                int trial_family_size) {
  if (trial_family_size < 1)
    throw InvalidArgument("gn_constant_estimate: trial_family_size must be >= 1");
  // Trial family: heights 10^[-1,3], plateau radii [0.02, 0.98].
  constexpr double kLogHeightLo = -1.0;
  constexpr double kLogHeightHi = 3.0;
  constexpr double kRadiusLo = 0.02;
  constexpr double kRadiusHi = 0.98;

  GNEstimate est;
  est.p = p;
  est.trial_count = trial_family_size;
  const double th = theta(p, m, n);
  const RadialMesh mesh(uniform_nodes(2000), n);
  est.c1 = gn_quotient_on(mesh, p, m, th, 0.0, 0.5);
  for (int k = 1; k < trial_family_size; ++k) {
    const double h = std::pow(
        10.0, kLogHeightLo + (kLogHeightHi - kLogHeightLo) * radical_inverse(k, 2));
    const double rho = kRadiusLo + (kRadiusHi - kRadiusLo) * radical_inverse(k, 3);
    const double Q = gn_quotient_on(mesh, p, m, th, h, rho);
    if (Q > est.c1) {
      est.c1 = Q;
      est.best_height = h;
      est.best_radius = rho;
    }
  }
  return est;
}

}  // namespace kslab
