#pragma once

#include <optional>
#include <string>

#include "kslab/rational.hpp"

namespace kslab {

/// Parameters of the radial chemotaxis system on the unit ball of R^n:
///   u_t = div((u+1)^{m-1} grad u) - div(u grad v)
///   0   = lap v - mu(t) + w,      mu(t) = mean of w
///   w_t + w = u
/// with no-flux boundary conditions. M is the conserved total mass of u.
struct ModelParams {
  int n = 3;
  double m = 1.0;
  double M = 1.0;

  /// Throws InvalidArgument unless n >= 3, m >= 1, M > 0.
  void validate() const;

  [[nodiscard]] double critical_exponent() const { return 2.0 - 2.0 / n; }
  [[nodiscard]] bool is_critical(double tol = 1e-12) const;
  /// M / omega_n, the boundary value of the mass-accumulation variable.
  [[nodiscard]] double mass_per_omega() const;
};

/// Surface measure of the unit sphere in R^n, 2 pi^{n/2} / Gamma(n/2).
double omega_n(int n);

/// Volume of the unit ball, omega_n / n.
double unit_ball_volume(int n);

/// Mass above which critical-exponent data can be made to blow up:
/// 2^{n/2} n^{n-1} omega_n. Requires n >= 3.
double blowup_mass_threshold(int n);

/// Interpolation exponent of the Gagliardo-Nirenberg step,
///   theta = ((p+m-1)/2 - (p+m-1)/(2(p+1))) / ((p+m-1)/2 + 1/n - 1/2).
/// Requires p > max{1, (n/2)(2 - 2/n - m)}, m >= 1, n >= 3.
double theta(double p, double m, int n);

/// Same formula in exact arithmetic.
Rational theta_exact(Rational p, Rational m, int n);

/// Lower bound on p for which theta is defined and lies in (0,1).
double theta_min_p(double m, int n);

struct CriticalMassResult {
  double value = 0.0;
  double theta = 0.0;
  /// Set when m is not the critical exponent; the value is then only formal.
  std::optional<std::string> warning;
};

/// M_c(p) = [ 1/(4 2^p c1) * 4(p-1)/(p+m-1)^2 ]^{1/((1-theta)(p+1))}.
CriticalMassResult critical_mass(double p, double m, int n, double c1);

/// The bracket of critical_mass in exact arithmetic (integer p only).
Rational critical_mass_bracket_exact(std::int64_t p, Rational m, int n,
                                     Rational c1);

/// Numerical lower estimate of the Gagliardo-Nirenberg constant.
struct GNEstimate {
  double p = 0.0;
  double c1 = 0.0;
  int trial_count = 0;
  /// Parameters (plateau height, plateau radius) of the best trial.
  double best_height = 0.0;
  double best_radius = 0.0;
  bool is_lower_bound = true;
};

/// Gagliardo-Nirenberg quotient
///   Q(phi) = int phi^{p+1} / ( ||grad phi^q||_2^{2(p+1)theta/(p+m-1)}
///            ||phi||_1^{(p+1)(1-theta)} + ||phi||_1^{p+1} ),  q = (p+m-1)/2
/// for the radial trial profile phi = 1 + height * plateau(radius) on B_1.
double gn_quotient(double p, double m, int n, double height, double radius,
                   int quadrature_nodes = 2000);

/// Running maximum of gn_quotient over the first trial_family_size members of
/// a fixed (nested) Halton sequence in (log height, radius). Monotone
/// non-decreasing in trial_family_size. Trial 0 is phi = 1.
GNEstimate gn_constant_estimate(double p, double m, int n,
                                int trial_family_size);

}  // namespace kslab
