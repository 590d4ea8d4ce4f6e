#include "kslab/subsolution.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>

#include "kslab/errors.hpp"

namespace kslab {

double SubsolutionParams::R(int n) const { return std::pow(xi0, 1.0 / n); }

void SubsolutionParams::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw InvalidArgument("subsolution: epsilon must lie in (0,1)");
  if (!(xi0 > 0.0 && xi0 <= 0.5 * epsilon * (1.0 + 1e-12)))
    throw InvalidArgument("subsolution: need 0 < xi0 <= epsilon/2");
  if (!(b0 > 0.0 && b0 <= epsilon * xi0 * xi0 * (1.0 + 1e-12)))
    throw InvalidArgument("subsolution: need 0 < b0 <= epsilon xi0^2");
  if (!(alpha > 0.0 && alpha < alpha_star))
    throw InvalidArgument("subsolution: need 0 < alpha < alpha_star");
  if (!(t0 >= std::log(1.0 / (1.0 - epsilon)) / alpha * (1.0 - 1e-12)))
    throw InvalidArgument("subsolution: t0 below log(1/(1-eps))/alpha");
  if (!(margin_c1 > 0.0)) throw InvalidArgument("subsolution: margin_c1 <= 0");
  if (!(Gamma0 > 0.0 && std::isfinite(Gamma0)))
    throw InvalidArgument("subsolution: Gamma0 must be positive and finite");
}

double WMoments::at(double xi) const {
  auto it = std::upper_bound(xis.begin(), xis.end(), xi);
  std::size_t j = it == xis.begin() ? 0 : static_cast<std::size_t>(it - xis.begin()) - 1;
  j = std::min(j, xis.size() - 2);
  const double s = (xi - xis[j]) / (xis[j + 1] - xis[j]);
  return (1.0 - s) * W0[j] + s * W0[j + 1];
}

WMoments w0_moments(const RadialProfile& w0, int n,
                    std::span<const double> xi_grid) {
  const MassProfile m = to_mass_variable(w0, n, xi_grid);
  WMoments out;
  out.xis = m.xis;
  out.W0 = m.values;
  out.K0 = out.W0.back();
  return out;
}

AB ab_eval(double t, const ModelParams& params, const SubsolutionParams& sp) {
  const double mw = params.mass_per_omega();
  const double x0 = sp.xi0;
  AB r;
  r.b = sp.b0 * std::exp(-sp.alpha * t);
  r.b_prime = -sp.alpha * r.b;
  const double bp = r.b + x0, bq = r.b + x0 * x0;
  r.a = mw * bp * bp / bq;
  r.a_prime = mw * r.b_prime * bp * (r.b + 2.0 * x0 * x0 - x0) / (bq * bq);
  return r;
}

double underline_u(double xi, double t, const ModelParams& params,
                   const SubsolutionParams& sp) {
  const AB ab = ab_eval(t, params, sp);
  if (xi <= sp.xi0) return ab.a * xi / (ab.b + xi);
  const double d = ab.b + sp.xi0;
  return (ab.a * ab.b * xi + ab.a * sp.xi0 * sp.xi0) / (d * d);
}

double underline_u_xi(double xi, double t, const ModelParams& params,
                      const SubsolutionParams& sp) {
  const AB ab = ab_eval(t, params, sp);
  const double d = ab.b + std::min(xi, sp.xi0);
  return ab.a * ab.b / (d * d);
}

double underline_memory(double xi, double t, const ModelParams& params,
                        const SubsolutionParams& sp) {
  if (t <= 0.0) return 0.0;
  const double mw = params.mass_per_omega();
  auto f = [&](double s) {
    return std::exp(-(t - s)) * (underline_u(xi, s, params, sp) - mw * xi);
  };
  // Breakpoints at unit spacing and clustered where b(s) crosses xi, xi0, xi0^2.
  std::vector<double> cuts{0.0, t};
  for (double s = 1.0; s < t; s += 1.0) cuts.push_back(s);
  for (double x : {xi, sp.xi0, sp.xi0 * sp.xi0}) {
    if (!(x > 0.0) || x >= sp.b0) continue;
    const double s_cross = std::log(sp.b0 / x) / sp.alpha;
    for (int k = -8; k <= 8; ++k) {
      const double s = s_cross + k / sp.alpha;
      if (s > 0.0 && s < t) cuts.push_back(s);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  using boost::math::quadrature::gauss_kronrod;
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
    if (cuts[k + 1] > cuts[k])
      acc += gauss_kronrod<double, 31>::integrate(f, cuts[k], cuts[k + 1], 10, 1e-10);
  return acc;
}

double inner_time_term(double xi, double t, const ModelParams& params,
                       const SubsolutionParams& sp) {
  const AB ab = ab_eval(t, params, sp);
  return ab.a_prime * (ab.b + xi) / (ab.a * ab.b);
}

double p_underline_inner_scaled(double xi, double t, const ModelParams& params,
                                const SubsolutionParams& sp,
                                const WMoments& w) {
  const int n = params.n;
  const AB ab = ab_eval(t, params, sp);
  const double bx = ab.b + xi;
  const double j1 = ab.a_prime * bx / (ab.a * ab.b) - ab.b_prime / ab.b;
  const double diff = 2.0 * n * n *
                      std::pow(n * ab.a * ab.b / (bx * bx) + 1.0, params.m - 1.0) *
                      std::pow(xi, 1.0 - 2.0 / n) / bx;
  const double mem = n * underline_memory(xi, t, params, sp) / xi;
  const double data = n * (w.at(xi) / xi - w.K0) * std::exp(-t);
  return j1 + diff - mem - data;
}

double p_underline_outer_scaled(double xi, double t, const ModelParams& params,
                                const SubsolutionParams& sp,
                                const WMoments& w) {
  const int n = params.n;
  const AB ab = ab_eval(t, params, sp);
  const double x0 = sp.xi0;
  const double time = ab.a_prime * xi / ab.a + ab.b_prime * xi / ab.b +
                      ab.a_prime * x0 * x0 / (ab.a * ab.b) -
                      2.0 * (ab.b_prime * xi + ab.b_prime / ab.b * x0 * x0) /
                          (ab.b + x0);
  const double mem = n * underline_memory(xi, t, params, sp);
  const double data = n * (w.at(xi) - w.K0 * xi) * std::exp(-t);
  return time - mem - data;
}

double p_underline_inner(double xi, double t, const ModelParams& params,
                         const SubsolutionParams& sp, const WMoments& w) {
  if (!(xi > 0.0 && xi < sp.xi0))
    throw InvalidArgument("p_underline_inner: xi must lie in (0, xi0)");
  const AB ab = ab_eval(t, params, sp);
  const double bx = ab.b + xi;
  return ab.a * ab.b * xi / (bx * bx) *
         p_underline_inner_scaled(xi, t, params, sp, w);
}

double p_underline_outer(double xi, double t, const ModelParams& params,
                         const SubsolutionParams& sp, const WMoments& w) {
  if (!(xi > sp.xi0 && xi < 1.0))
    throw InvalidArgument("p_underline_outer: xi must lie in (xi0, 1)");
  const AB ab = ab_eval(t, params, sp);
  const double d = ab.b + sp.xi0;
  return ab.a * ab.b / (d * d) * p_underline_outer_scaled(xi, t, params, sp, w);
}

void fill_constants(SubsolutionParams& sp, const ModelParams& params) {
  const int n = params.n;
  const double m = params.m;
  const double mw = params.mass_per_omega();
  const double eps = sp.epsilon;
  sp.margin_c1 = std::pow(1.0 - eps, 3) * n * mw / (1.0 + eps) -
                 2.0 * n * n * std::pow((eps + 1.0) * (eps + 1.0) * n * mw + 0.5 * eps, m - 1.0) *
                     std::pow(sp.xi0, 2.0 - 2.0 / n - m);
  sp.alpha_star = std::min(std::log(1.0 / (1.0 - eps)) / std::log(1.0 / eps),
                           0.25 * sp.margin_c1);
  sp.c1_prime = n * mw * (sp.b0 + 1.0) * (sp.b0 + 1.0) *
                std::exp(2.0 * sp.alpha * sp.t0) / (sp.b0 * sp.b0);
  sp.c2 = 2.0 * n * n * std::pow(sp.c1_prime + 1.0, m - 1.0) *
          std::pow(sp.xi0, 1.0 - 2.0 / n) * std::exp(sp.alpha * sp.t0) / sp.b0;
  sp.Gamma0 = ((1.0 / sp.xi0 + 1.0) * sp.alpha + sp.c2) * std::exp(sp.t0) / n;
  const double bp = sp.b0 + sp.xi0, bq = sp.b0 + sp.xi0 * sp.xi0;
  sp.Gamma_u = n * mw * bp * bp / bq / sp.b0;
  sp.gamma = n * mw * sp.b0 / bq;
  sp.Gamma_w = n * sp.Gamma0;
  sp.eta0 = sp.eta / n;
}

namespace {

SubsolutionParams candidate(const ModelParams& params, double eps,
                            std::optional<double> xi0_force, double eta) {
  const int n = params.n;
  const double m = params.m;
  const double mw = params.mass_per_omega();
  SubsolutionParams sp;
  sp.epsilon = eps;
  sp.eta = eta;
  double xi0 = 0.5 * eps;
  const double kappa = 2.0 - 2.0 / n - m;
  if (!xi0_force && kappa > 1e-14) {
    const double X = std::pow(1.0 - eps, 3) * n * mw / (1.0 + eps) / (2.0 * n * n) *
                     std::pow((eps + 1.0) * (eps + 1.0) * n * mw + 0.5 * eps, -(m - 1.0));
    xi0 = std::min(xi0, std::pow(0.5 * X, 1.0 / kappa));
  }
  sp.xi0 = xi0_force.value_or(xi0);
  // alpha, b0, t0 are placeholders until alpha_star is known.
  sp.alpha = 1.0;
  sp.b0 = 0.5 * eps * sp.xi0 * sp.xi0;
  sp.t0 = 1.0;
  fill_constants(sp, params);
  return sp;
}

}  // namespace

SubsolutionParams select_parameters(const ModelParams& params, double eta,
                                    const SelectOptions& opt) {
  params.validate();
  const int n = params.n;
  const double mc = params.critical_exponent();
  if (params.m > mc + 1e-12) {
    std::ostringstream os;
    os << "m = " << params.m << " exceeds the critical exponent 2-2/n = " << mc
       << "; blow-up construction does not apply";
    throw OutOfTheory(os.str());
  }
  if (params.is_critical() && !(params.M > blowup_mass_threshold(n))) {
    std::ostringstream os;
    os.precision(10);
    os << "mass below threshold: at the critical exponent the blow-up "
          "construction needs M > 2^{n/2} n^{n-1} omega_n = "
       << blowup_mass_threshold(n) << " (got M = " << params.M << ")";
    throw OutOfTheory(os.str());
  }
  if (!(eta > 0.0)) throw InvalidArgument("select_parameters: eta must be positive");
  if (!(opt.b0_fraction > 0.0 && opt.b0_fraction <= 1.0))
    throw InvalidArgument("select_parameters: b0_fraction must lie in (0,1]");
  if (!(opt.alpha_fraction > 0.0 && opt.alpha_fraction < 1.0))
    throw InvalidArgument("select_parameters: alpha_fraction must lie in (0,1)");

  std::optional<SubsolutionParams> best;
  if (opt.epsilon) {
    if (!(*opt.epsilon > 0.0 && *opt.epsilon < 1.0))
      throw InvalidArgument("select_parameters: epsilon must lie in (0,1)");
    if (opt.xi0 && !(*opt.xi0 > 0.0 && *opt.xi0 <= 0.5 * *opt.epsilon))
      throw InvalidArgument("select_parameters: forced xi0 must lie in (0, eps/2]");
    SubsolutionParams sp = candidate(params, *opt.epsilon, opt.xi0, eta);
    if (sp.margin_c1 > 0.0) best = sp;
  } else {
    for (int j = 1; j <= opt.max_scan; ++j) {
      const SubsolutionParams sp = candidate(params, std::ldexp(1.0, -j), std::nullopt, eta);
      if (!(sp.margin_c1 > 0.0)) continue;
      if (!best || sp.alpha_star > best->alpha_star) best = sp;
    }
  }
  if (!best)
    throw ConstructionFailed(
        "select_parameters: no epsilon gives a positive margin c1");

  SubsolutionParams sp = *best;
  sp.alpha = opt.alpha_fraction * sp.alpha_star;
  sp.b0 = opt.b0_fraction * sp.epsilon * sp.xi0 * sp.xi0;
  sp.t0 = std::log(1.0 / (1.0 - sp.epsilon)) / sp.alpha;
  fill_constants(sp, params);
  sp.validate();
  return sp;
}

std::pair<double, double> w0_moment_margins(const SubsolutionParams& sp,
                                          const WMoments& w) {
  double inner = std::numeric_limits<double>::infinity();
  double outer = std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j + 1 < w.xis.size(); ++j) {
    const double xi = w.xis[j];
    if (xi < sp.xi0)
      inner = std::min(inner, w.W0[j] / xi - w.K0 - sp.Gamma0);
    else if (xi > sp.xi0)
      outer = std::min(outer, (w.W0[j] - w.K0 * xi) / (1.0 - xi) - sp.eta0);
  }
  return {inner, outer};
}

namespace {

std::vector<double> log_space(double lo, double hi, int k) {
  std::vector<double> v(k);
  for (int i = 0; i < k; ++i)
    v[i] = lo * std::pow(hi / lo, k == 1 ? 0.0 : static_cast<double>(i) / (k - 1));
  return v;
}

struct Scan {
  double max_inner = -std::numeric_limits<double>::infinity();
  double max_outer = -std::numeric_limits<double>::infinity();
  double worst_scaled = -std::numeric_limits<double>::infinity();
  double worst_xi = 0.0, worst_t = 0.0;
  std::optional<std::pair<double, double>> first;
  bool inner_ok = true, outer_ok = true;
};

Scan scan(const SubsolutionParams& sp, const ModelParams& params,
          const WMoments& w, double T, const CertifyGrid& g) {
  constexpr double kSlack = 1e-12;
  Scan s;
  const double x0 = sp.xi0;
  const auto xin = log_space(std::min(g.xi_min, 0.1 * x0), x0 * (1.0 - 1e-6), g.n_xi_inner);
  const auto xout = log_space(x0 * (1.0 + 1e-6), 1.0 - 1e-6, g.n_xi_outer);
  std::vector<double> ts(g.n_t);
  for (int k = 0; k < g.n_t; ++k) ts[k] = T * k / std::max(1, g.n_t - 1);
  auto consider = [&](double xi, double t, double scaled, double value, bool inner) {
    if (inner) s.max_inner = std::max(s.max_inner, value);
    else s.max_outer = std::max(s.max_outer, value);
    if (scaled > s.worst_scaled) {
      s.worst_scaled = scaled;
      s.worst_xi = xi;
      s.worst_t = t;
    }
    if (scaled > kSlack) {
      (inner ? s.inner_ok : s.outer_ok) = false;
      if (!s.first || std::make_pair(xi, t) < *s.first) s.first = std::make_pair(xi, t);
    }
  };
  for (double xi : xin)
    for (double t : ts) {
      const AB ab = ab_eval(t, params, sp);
      const double bx = ab.b + xi;
      const double sc = p_underline_inner_scaled(xi, t, params, sp, w);
      consider(xi, t, sc, ab.a * ab.b * xi / (bx * bx) * sc, true);
    }
  for (double xi : xout)
    for (double t : ts) {
      const AB ab = ab_eval(t, params, sp);
      const double d = ab.b + x0;
      const double sc = p_underline_outer_scaled(xi, t, params, sp, w);
      consider(xi, t, sc, ab.a * ab.b / (d * d) * sc, false);
    }
  return s;
}

}  // namespace

Certificate certify(const SubsolutionParams& sp_in, const ModelParams& params,
                    const WMoments& w, double T_cert, const CertifyGrid& grid) {
  if (!(T_cert > 0.0)) throw InvalidArgument("certify: T_cert must be positive");
  if (grid.n_xi_inner < 1 || grid.n_xi_outer < 1 || grid.n_t < 2)
    throw InvalidArgument("certify: grid too small");
  Certificate c;
  c.T_cert = T_cert;
  c.grid = grid;
  SubsolutionParams sp = sp_in;
  for (int h = 0;; ++h) {
    const auto [mi, mo] = w0_moment_margins(sp, w);
    c.w0_moment_inner_margin = mi;
    c.w0_moment_outer_margin = mo;
    c.w0_moment_inner_ok = mi >= 0.0;
    c.w0_moment_outer_ok = mo >= 0.0;
    const Scan s = scan(sp, params, w, T_cert, grid);
    c.max_inner_residual = s.max_inner;
    c.max_outer_residual = s.max_outer;
    c.worst_xi = s.worst_xi;
    c.worst_t = s.worst_t;
    c.first_offending_xi.reset();
    c.first_offending_t.reset();
    if (s.first) {
      c.first_offending_xi = s.first->first;
      c.first_offending_t = s.first->second;
    }
    c.alpha_halvings = h;
    c.params = sp;
    c.pass = s.inner_ok && s.outer_ok;
    if (c.pass || !s.inner_ok || h >= grid.max_alpha_halvings) break;
    sp.alpha *= 0.5;
    sp.t0 = std::log(1.0 / (1.0 - sp.epsilon)) / sp.alpha;
    fill_constants(sp, params);
  }
  return c;
}

std::string certificate_to_text(const Certificate& c, const ModelParams& params) {
  std::ostringstream os;
  os.precision(17);
  const auto& p = c.params;
  os << "n = " << params.n << "\n"
     << "m = " << params.m << "\n"
     << "M = " << params.M << "\n"
     << "epsilon = " << p.epsilon << "\n"
     << "xi0 = " << p.xi0 << "\n"
     << "alpha_star = " << p.alpha_star << "\n"
     << "alpha = " << p.alpha << "\n"
     << "b0 = " << p.b0 << "\n"
     << "t0 = " << p.t0 << "\n"
     << "margin_c1 = " << p.margin_c1 << "\n"
     << "c1_prime = " << p.c1_prime << "\n"
     << "c2 = " << p.c2 << "\n"
     << "Gamma0 = " << p.Gamma0 << "\n"
     << "Gamma_u = " << p.Gamma_u << "\n"
     << "gamma = " << p.gamma << "\n"
     << "Gamma_w = " << p.Gamma_w << "\n"
     << "eta = " << p.eta << "\n"
     << "eta0 = " << p.eta0 << "\n"
     << "T_cert = " << c.T_cert << "\n"
     << "grid_n_xi_inner = " << c.grid.n_xi_inner << "\n"
     << "grid_n_xi_outer = " << c.grid.n_xi_outer << "\n"
     << "grid_n_t = " << c.grid.n_t << "\n"
     << "grid_xi_min = " << c.grid.xi_min << "\n"
     << "w0_moment_inner_margin = " << c.w0_moment_inner_margin << "\n"
     << "w0_moment_outer_margin = " << c.w0_moment_outer_margin << "\n"
     << "max_inner_residual = " << c.max_inner_residual << "\n"
     << "max_outer_residual = " << c.max_outer_residual << "\n"
     << "worst_xi = " << c.worst_xi << "\n"
     << "worst_t = " << c.worst_t << "\n";
  if (c.first_offending_xi)
    os << "first_offending_xi = " << *c.first_offending_xi << "\n"
       << "first_offending_t = " << *c.first_offending_t << "\n";
  os << "alpha_halvings = " << c.alpha_halvings << "\n"
     << "pass = " << (c.pass ? "true" : "false") << "\n";
  return os.str();
}

ComparisonReport compare_trajectory(std::span<const MassState> traj,
                                    const SubsolutionParams& sp,
                                    const ModelParams& params,
                                    const Certificate& cert, double tol) {
  if (!cert.pass)
    throw InvalidArgument("compare_trajectory: requires a passing certificate");
  if (traj.empty()) throw InvalidArgument("compare_trajectory: empty trajectory");
  ComparisonReport rep;
  rep.min_gap = std::numeric_limits<double>::infinity();
  bool first_state = true;
  for (const auto& s : traj) {
    for (std::size_t j = 0; j < s.U.size(); ++j) {
      const double xi = s.U.xis[j];
      const double gap = s.U.values[j] - underline_u(xi, s.t, params, sp);
      if (first_state && gap < -tol) {
        std::ostringstream os;
        os << "compare_trajectory: initial data not ordered above the "
              "subsolution at xi = " << xi << " (gap " << gap << ")";
        throw InvalidArgument(os.str());
      }
      if (gap < rep.min_gap) {
        rep.min_gap = gap;
        rep.min_gap_t = s.t;
        rep.min_gap_xi = xi;
      }
      if (gap < -tol && !rep.first_violation_t) {
        rep.ok = false;
        rep.first_violation_t = s.t;
        rep.first_violation_xi = xi;
      }
    }
    first_state = false;
    ++rep.states_checked;
  }
  return rep;
}

double growth_floor(double t, const ModelParams& params,
                    const SubsolutionParams& sp) {
  return params.n * params.mass_per_omega() / (2.0 * sp.b0) * std::exp(sp.alpha * t);
}

}  // namespace kslab
