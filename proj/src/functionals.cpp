#include "kslab/functionals.hpp"

#include <cmath>

#include "kslab/errors.hpp"

namespace kslab {

double total_mass(const RadialMesh& mesh, std::span<const double> u) {
  return mesh.integrate(u);
}

double total_mass(const RadialProfile& u, int n) {
  u.validate(false);
  return total_mass(RadialMesh(u.radii, n), u.values);
}

double mean_w(const RadialMesh& mesh, std::span<const double> w) {
  return mesh.integrate(w) / unit_ball_volume(mesh.dim());
}

double mean_w(const RadialProfile& w, int n) {
  w.validate(false);
  return mean_w(RadialMesh(w.radii, n), w.values);
}

double default_k(double p) { return 2.0 * std::pow(2.0, p); }

namespace {

double integral_of_power(const RadialMesh& mesh, std::span<const double> f,
                         double power) {
  std::vector<double> g(f.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    g[i] = std::pow(std::max(f[i], 0.0), power);
  return mesh.integrate(g);
}

}  // namespace

double energy_p(const RadialMesh& mesh, std::span<const double> u,
                std::span<const double> w, double p) {
  return integral_of_power(mesh, u, p) / p +
         integral_of_power(mesh, w, p + 1.0) / (p + 1.0);
}

EnergyReport energy_report(const RadialMesh& mesh, double t,
                           std::span<const double> u, std::span<const double> w,
                           double p, double k, const ModelParams& params) {
  if (!(p > 1.0)) throw InvalidArgument("energy_report: p must exceed 1");
  if (!(k > 0.0)) throw InvalidArgument("energy_report: k must be positive");
  if (u.size() != mesh.size() || w.size() != mesh.size())
    throw InvalidArgument("energy_report: size mismatch");
  const int n = mesh.dim();
  const double m = params.m;
  const double q = 0.5 * (p + m - 1.0);

  EnergyReport rep;
  rep.t = t;
  rep.p = p;
  rep.k = k;
  rep.E_p = energy_p(mesh, u, w, p);

  // int |grad phi|^2 for phi = u^q, piecewise linear between nodes.
  const auto& r = mesh.nodes();
  double grad2 = 0.0;
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    const double a = std::pow(std::max(u[i], 0.0), q);
    const double b = std::pow(std::max(u[i + 1], 0.0), q);
    const double d = (b - a) / mesh.spacing(i);
    grad2 += d * d * (std::pow(r[i + 1], n) - std::pow(r[i], n)) / n;
  }
  grad2 *= omega_n(n);
  rep.dissipation = 4.0 * (p - 1.0) / ((p + m - 1.0) * (p + m - 1.0)) * grad2;
  rep.sink = integral_of_power(mesh, w, p + 1.0);
  rep.rhs_k = 2.0 * k * integral_of_power(mesh, u, p + 1.0) +
              (std::pow(k, -p) + std::pow(k, -1.0 / p)) * rep.sink;
  return rep;
}

EnergyReport energy_report(double t, const RadialProfile& u,
                           const RadialProfile& w, double p, double k,
                           const ModelParams& params) {
  u.validate(false);
  if (u.radii != w.radii) throw InvalidArgument("u and w grids differ");
  return energy_report(RadialMesh(u.radii, params.n), t, u.values, w.values, p,
                       k, params);
}

std::vector<double> inequality_monitor(std::span<const EnergyReport> reports) {
  if (reports.size() < 2)
    throw InvalidArgument("inequality_monitor: need at least 2 reports");
  for (const auto& r : reports)
    if (r.p != reports.front().p || r.k != reports.front().k)
      throw InvalidArgument("inequality_monitor: reports mix different p or k");
  const std::size_t N = reports.size();
  std::vector<double> res(N);
  for (std::size_t j = 0; j < N; ++j) {
    const std::size_t lo = (j == 0) ? 0 : j - 1;
    const std::size_t hi = (j + 1 == N) ? j : j + 1;
    const double dt = reports[hi].t - reports[lo].t;
    if (!(dt > 0.0))
      throw InvalidArgument("inequality_monitor: report times must increase");
    const double dE = (reports[hi].E_p - reports[lo].E_p) / dt;
    res[j] = dE + reports[j].dissipation + reports[j].sink - reports[j].rhs_k;
  }
  return res;
}

double monitor_threshold(const EnergyReport& report, double rel) {
  return rel * (std::abs(report.dissipation) + std::abs(report.rhs_k) + 1.0);
}

}  // namespace kslab
