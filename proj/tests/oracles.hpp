#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <algorithm>
#include <cmath>
#include <vector>

#include "kslab/grid.hpp"
#include "kslab/initdata.hpp"
#include "kslab/mass_solver.hpp"
#include "kslab/radial_solver.hpp"
#include "kslab/subsolution.hpp"

/// Independent reference computations shared by the unit tests and the
/// acceptance runner.
namespace kslab::oracle {

struct Fixture {
  ModelParams params;
  SubsolutionParams sp;
  WMoments w;
};

inline Fixture certified(double m, double M) {
  Fixture f;
  f.params = {3, m, M};
  f.sp = select_parameters(f.params, 1.0);
  const auto w0 = build_w0(f.params, f.sp);
  f.w = w0_moments(w0.profile, 3, default_xi_grid());
  return f;
}

using Real = boost::multiprecision::cpp_bin_float_50;

/// The two-branch profile written out from a(t), b(t) in 50-digit arithmetic.
template <class T>
T profile(T xi, T t, const Fixture& f) {
  const T mw = f.params.M / omega_n(f.params.n);
  const T x0 = f.sp.xi0;
  const T b = T(f.sp.b0) * exp(-T(f.sp.alpha) * t);
  const T a = mw * (b + x0) * (b + x0) / (b + x0 * x0);
  if (xi <= x0) return a * xi / (b + xi);
  return (a * b * xi + a * x0 * x0) / ((b + x0) * (b + x0));
}

/// Composite Simpson on [0, t] for the memory term.
inline double memory_oracle(double xi, double t, const Fixture& f) {
  const int K = 4000;
  const double h = t / K, mw = f.params.mass_per_omega();
  auto g = [&](double s) {
    return std::exp(-(t - s)) * (profile<double>(xi, s, f) - mw * xi);
  };
  double acc = g(0.0) + g(t);
  for (int k = 1; k < K; ++k) acc += (k % 2 ? 4.0 : 2.0) * g(k * h);
  return acc * h / 3.0;
}

/// Richardson-extrapolated central differences.
template <class F>
Real d1(F f, Real x, Real h) {
  const Real a = (f(x + h) - f(x - h)) / (2 * h);
  const Real b = (f(x + h / 2) - f(x - h / 2)) / h;
  return (4 * b - a) / 3;
}
template <class F>
Real d2(F f, Real x, Real h) {
  const Real a = (f(x + h) - 2 * f(x) + f(x - h)) / (h * h);
  const Real b = (f(x + h / 2) - 2 * f(x) + f(x - h / 2)) / (h * h / 4);
  return (4 * b - a) / 3;
}

struct OracleValue {
  double value;
  double scale;
};

/// P applied to the subsolution by differencing it numerically.
inline OracleValue p_oracle(double xi, double t, const Fixture& f) {
  const int n = f.params.n;
  const Real X = xi, T = t;
  const Real hx = Real(1e-6) * std::min({xi, std::abs(f.sp.xi0 - xi), 1.0 - xi});
  const Real ht = Real(1e-6) * std::min(t, 1.0);
  auto in_xi = [&](Real x) { return profile<Real>(x, T, f); };
  auto in_t = [&](Real s) { return profile<Real>(X, s, f); };
  const double Ut = static_cast<double>(d1(in_t, T, ht));
  const double Ux = static_cast<double>(d1(in_xi, X, hx));
  const double Uxx = static_cast<double>(d2(in_xi, X, hx));
  const double diff = n * n * std::pow(xi, 2.0 - 2.0 / n) *
                      std::pow(n * Ux + 1.0, f.params.m - 1.0) * Uxx;
  const double drift =
      n * (memory_oracle(xi, t, f) + (f.w.at(xi) - f.w.K0 * xi) * std::exp(-t)) * Ux;
  return {Ut - diff - drift, std::abs(Ut) + std::abs(diff) + std::abs(drift)};
}

inline std::vector<double> log_grid(double lo, double hi, int k) {
  std::vector<double> v(k);
  for (int i = 0; i < k; ++i) v[i] = lo * std::pow(hi / lo, i / (k - 1.0));
  return v;
}


inline double rel_max_diff(const RadialProfile& a, const RadialProfile& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.values[i] - b.values[i]));
  return d / b.max();
}

/// u at t = 1 from both solvers on the same smooth data.
inline double cross_gap(int radial_intervals, int xi_intervals, double change_target) {
  const ModelParams params{3, 1.0, 10.0};
  const auto r = geometric_nodes(radial_intervals, std::pow(1.02, 512.0 / radial_intervals));
  const auto u0 = generic_bump(params, 0.3, 2.0, r);
  StepControl ctrl;
  ctrl.t_end = 1.0;
  ctrl.record_interval = 0.1;
  ctrl.change_target = change_target;
  const auto prim = run(u0, u0, params, ctrl);
  const auto xis = geometric_nodes_min_spacing(xi_intervals, 1e-8 * 1023.0 / xi_intervals);
  const auto W = w0_moments(u0, 3, xis);
  const auto mass = run_mass(to_mass_variable(u0, 3, xis), W.W0, W.K0, params, ctrl);
  const auto back = from_mass_variable(mass.final_state.U, 3, r, 1e-8);
  return rel_max_diff(back, prim.final_state.u);
}

}  // namespace kslab::oracle
