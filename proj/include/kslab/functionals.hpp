#pragma once

#include <span>
#include <vector>

#include "kslab/grid.hpp"
#include "kslab/model.hpp"

namespace kslab {

/// int_Omega u, by the lumped finite-volume rule of RadialMesh.
double total_mass(const RadialProfile& u, int n);
double total_mass(const RadialMesh& mesh, std::span<const double> u);

/// mu = mean of w over the unit ball.
double mean_w(const RadialProfile& w, int n);
double mean_w(const RadialMesh& mesh, std::span<const double> w);

/// Terms of the L^p energy inequality
///   d/dt E_p + dissipation + sink <= rhs_k,
///   E_p         = (1/p) int u^p + 1/(p+1) int w^{p+1}
///   dissipation = 4(p-1)/(p+m-1)^2 int |grad u^{(p+m-1)/2}|^2
///   sink        = int w^{p+1}
///   rhs_k       = 2k int u^{p+1} + (k^{-p} + k^{-1/p}) int w^{p+1}
struct EnergyReport {
  double t = 0.0;
  double p = 0.0;
  double k = 0.0;
  double E_p = 0.0;
  double dissipation = 0.0;
  double sink = 0.0;
  double rhs_k = 0.0;
};

/// Default k = 2 * 2^p, which keeps k^{-p} + k^{-1/p} < 1.
double default_k(double p);

/// (1/p) int u^p + 1/(p+1) int w^{p+1}.
double energy_p(const RadialMesh& mesh, std::span<const double> u,
                std::span<const double> w, double p);

EnergyReport energy_report(const RadialMesh& mesh, double t,
                           std::span<const double> u, std::span<const double> w,
                           double p, double k, const ModelParams& params);

/// Convenience form on profiles (u and w must share radii).
EnergyReport energy_report(double t, const RadialProfile& u,
                           const RadialProfile& w, double p, double k,
                           const ModelParams& params);

/// residual_j = dE_p/dt + dissipation + sink - rhs_k at each report, with the
/// time derivative by centred differences (one-sided at the ends). On an
/// exact solution every residual is <= 0. Requires >= 2 reports sharing p, k.
std::vector<double> inequality_monitor(std::span<const EnergyReport> reports);

/// Acceptance bound for a monitor residual: rel * (|dissipation| + |rhs_k| + 1).
double monitor_threshold(const EnergyReport& report, double rel = 1e-3);

}  // namespace kslab
