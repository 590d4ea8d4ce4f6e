#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kslab/grid.hpp"
#include "kslab/mass_solver.hpp"
#include "kslab/model.hpp"

namespace kslab {

/// Constants of the subsolution construction. margin_c1 is the positive
/// slack c1 of the large-time estimate; c1_prime and c2 are the short-time
/// bounds that feed Gamma0.
struct SubsolutionParams {
  double epsilon = 0.0;
  double xi0 = 0.0;
  double alpha_star = 0.0;
  double alpha = 0.0;
  double b0 = 0.0;
  double t0 = 0.0;
  double margin_c1 = 0.0;
  double c1_prime = 0.0;
  double c2 = 0.0;
  double Gamma0 = 0.0;
  double Gamma_u = 0.0;
  double gamma = 0.0;
  double Gamma_w = 0.0;
  double eta = 0.0;
  double eta0 = 0.0;

  /// R = xi0^{1/n}.
  [[nodiscard]] double R(int n) const;
  /// Throws InvalidArgument if a structural invariant is broken.
  void validate() const;
};

/// Initial w-moment W0(xi) = int_0^{xi^{1/n}} r^{n-1} w0 dr and K0 = W0(1).
struct WMoments {
  std::vector<double> xis;
  std::vector<double> W0;
  double K0 = 0.0;
  /// Linear interpolation in xi.
  [[nodiscard]] double at(double xi) const;
};

WMoments w0_moments(const RadialProfile& w0, int n,
                    std::span<const double> xi_grid);

struct AB {
  double a = 0.0;
  double b = 0.0;
  double a_prime = 0.0;
  double b_prime = 0.0;
};

/// a(t) = (M/omega_n)(b+xi0)^2/(b+xi0^2), b(t) = b0 e^{-alpha t}, with
/// their time derivatives.
AB ab_eval(double t, const ModelParams& params, const SubsolutionParams& sp);

/// The two-branch profile: a xi/(b+xi) on [0, xi0],
/// (a b xi + a xi0^2)/(b+xi0)^2 on (xi0, 1].
double underline_u(double xi, double t, const ModelParams& params,
                   const SubsolutionParams& sp);
/// d/dxi of underline_u (one-sided from the left at xi0; both sides agree).
double underline_u_xi(double xi, double t, const ModelParams& params,
                      const SubsolutionParams& sp);

/// int_0^t e^{-(t-s)} (underline_u(xi,s) - (M/omega_n) xi) ds by Gauss-Kronrod
/// on unit pieces, refined where b(s) crosses xi, xi0 and xi0^2.
double underline_memory(double xi, double t, const ModelParams& params,
                        const SubsolutionParams& sp);

/// a'(b+xi)/(a b): the first term of the scaled inner residual.
double inner_time_term(double xi, double t, const ModelParams& params,
                       const SubsolutionParams& sp);

/// Scaled residuals: inner is (b+xi)^2/(a b xi) P[underline_u], outer is
/// (b+xi0)^2/(a b) P[underline_u], evaluated term by term.
double p_underline_inner_scaled(double xi, double t, const ModelParams& params,
                                const SubsolutionParams& sp,
                                const WMoments& w);
double p_underline_outer_scaled(double xi, double t, const ModelParams& params,
                                const SubsolutionParams& sp,
                                const WMoments& w);

/// P applied to the subsolution for xi in (0, xi0) and (xi0, 1). Throw
/// InvalidArgument on the wrong branch.
double p_underline_inner(double xi, double t, const ModelParams& params,
                         const SubsolutionParams& sp, const WMoments& w);
double p_underline_outer(double xi, double t, const ModelParams& params,
                         const SubsolutionParams& sp, const WMoments& w);

/// The short- and large-time constants for the given epsilon, xi0, alpha,
/// b0 and t0 (fills margin_c1, alpha_star, c1_prime, c2, Gamma0, Gamma_u,
/// gamma, Gamma_w, eta0). Leaves alpha, b0, t0 as given.
void fill_constants(SubsolutionParams& sp, const ModelParams& params);

struct SelectOptions {
  /// Force epsilon (and optionally xi0) instead of scanning.
  std::optional<double> epsilon;
  std::optional<double> xi0;
  /// b0 = b0_fraction * epsilon * xi0^2.
  double b0_fraction = 0.5;
  /// alpha = alpha_fraction * alpha_star.
  double alpha_fraction = 0.5;
  /// Scan epsilon = 2^{-j}, j = 1..max_scan.
  int max_scan = 40;
};

/// Scans epsilon = 2^{-j}; for each, xi0 = min(eps/2, half the xi02 bound
/// when m < 2-2/n); keeps the epsilon with the largest alpha_star among
/// those with margin_c1 > 0. Then alpha = alpha_star/2, b0 = eps xi0^2/2,
/// t0 = log(1/(1-eps))/alpha and the remaining constants.
/// Errors: OutOfTheory for m outside [1, 2-2/n] or critical m with M at or
/// below blowup_mass_threshold(n); ConstructionFailed if no epsilon works.
SubsolutionParams select_parameters(const ModelParams& params, double eta,
                                    const SelectOptions& opt = {});

struct CertifyGrid {
  int n_xi_inner = 40;
  int n_xi_outer = 40;
  int n_t = 80;
  double xi_min = 1e-7;
  int max_alpha_halvings = 8;
};

struct Certificate {
  double T_cert = 0.0;
  CertifyGrid grid;
  double max_inner_residual = 0.0;
  double max_outer_residual = 0.0;
  /// Worst sample overall, and the lexicographically smallest offending one.
  double worst_xi = 0.0;
  double worst_t = 0.0;
  std::optional<double> first_offending_xi;
  std::optional<double> first_offending_t;
  bool w0_moment_inner_ok = false;
  bool w0_moment_outer_ok = false;
  double w0_moment_inner_margin = 0.0;
  double w0_moment_outer_margin = 0.0;
  int alpha_halvings = 0;
  SubsolutionParams params;  // final constants (alpha may be reduced)
  bool pass = false;
};

/// Minimum over xi in (0, xi0) of W0/xi - K0 - Gamma0, and over (xi0, 1)
/// of (W0 - K0 xi)/(1-xi) - eta0, on the moment grid.
std::pair<double, double> w0_moment_margins(const SubsolutionParams& sp,
                                          const WMoments& w);

/// Samples P[underline_u] on log-spaced xi in each branch times uniform
/// t in [0, T_cert]. pass iff every sample is <= 1e-12 in absolute terms
/// after scaling. When only the outer branch fails, alpha is halved (t0 and
/// the short-time constants recomputed) up to grid.max_alpha_halvings times.
Certificate certify(const SubsolutionParams& sp, const ModelParams& params,
                    const WMoments& w, double T_cert,
                    const CertifyGrid& grid = {});

std::string certificate_to_text(const Certificate& c,
                                const ModelParams& params);

struct ComparisonReport {
  bool ok = true;
  /// min over samples of U - underline_u, and where it occurred.
  double min_gap = 0.0;
  double min_gap_t = 0.0;
  double min_gap_xi = 0.0;
  std::optional<double> first_violation_t;
  std::optional<double> first_violation_xi;
  std::size_t states_checked = 0;
};

/// Pointwise U >= underline_u - tol on every state. Refuses (InvalidArgument)
/// without a passing certificate or when U(.,0) is not ordered above.
ComparisonReport compare_trajectory(std::span<const MassState> traj,
                                    const SubsolutionParams& sp,
                                    const ModelParams& params,
                                    const Certificate& cert, double tol);

/// n M/(2 omega_n b0) e^{alpha t}.
double growth_floor(double t, const ModelParams& params,
                    const SubsolutionParams& sp);

}  // namespace kslab
