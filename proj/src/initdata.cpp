#include "kslab/initdata.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kslab/errors.hpp"
#include "kslab/mass_solver.hpp"

namespace kslab {

std::vector<double> default_radial_grid(int intervals, double ratio) {
  return geometric_nodes(intervals, ratio);
}

double ball_average(const RadialProfile& f, int n, double r) {
  if (!(r > 0.0 && r <= 1.0)) throw InvalidArgument("ball_average: r must lie in (0,1]");
  const RadialMesh mesh(f.radii, n);
  return n * mesh.moment_at(f.values, r) / std::pow(r, n);
}

double annulus_average(const RadialProfile& f, int n, double r) {
  if (!(r >= 0.0 && r < 1.0)) throw InvalidArgument("annulus_average: r must lie in [0,1)");
  const RadialMesh mesh(f.radii, n);
  const double total = mesh.moment_at(f.values, 1.0);
  return n * (total - mesh.moment_at(f.values, r)) / (1.0 - std::pow(r, n));
}

const ConditionLine& ConditionReport::find(const std::string& name) const {
  for (const auto& l : lines)
    if (l.name == name) return l;
  throw InvalidArgument("no condition named " + name);
}

bool ConditionReport::contract_ok() const {
  return find("initial_ordering").pass && find("w0_inner_moment").pass &&
         find("w0_outer_moment").pass;
}

std::string ConditionReport::to_text() const {
  std::ostringstream os;
  os.precision(17);
  for (const auto& l : lines) {
    os << l.name << ".pass = " << (l.pass ? "true" : "false") << "\n"
       << l.name << ".worst_margin = " << l.worst_margin << "\n"
       << l.name << ".samples = " << l.samples << "\n"
       << l.name << ".violations = " << l.violations << "\n";
  }
  return os.str();
}

namespace {

std::vector<double> log_space(double lo, double hi, int k) {
  std::vector<double> v(k);
  for (int i = 0; i < k; ++i) v[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (k - 1));
  return v;
}

std::vector<double> lin_space(double lo, double hi, int k) {
  std::vector<double> v(k);
  for (int i = 0; i < k; ++i) v[i] = lo + (hi - lo) * i / (k - 1);
  return v;
}

struct Accum {
  ConditionLine line;
  explicit Accum(std::string name) {
    line.name = std::move(name);
    line.worst_margin = std::numeric_limits<double>::infinity();
  }
  void add(double slack) {
    ++line.samples;
    line.worst_margin = std::min(line.worst_margin, slack);
    if (slack < 0.0) ++line.violations;
  }
  ConditionLine done() {
    line.pass = line.samples > 0 && line.violations == 0;
    return line;
  }
};

/// Samples in (0,1) for the initial ordering check.
std::vector<double> ordering_samples(const SubsolutionParams& sp) {
  auto a = log_space(std::min(1e-10, 1e-3 * sp.b0), 1.0 - 1e-9, 4000);
  auto b = lin_space(1e-3, 1.0 - 1e-6, 2000);
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  return a;
}

double ordering_gap(const RadialMesh& mesh, std::span<const double> u,
                    const ModelParams& params, const SubsolutionParams& sp,
                    const std::vector<double>& xis) {
  double g = std::numeric_limits<double>::infinity();
  const int n = params.n;
  for (double xi : xis) {
    const double U = mesh.moment_at(u, std::pow(xi, 1.0 / n));
    g = std::min(g, U - underline_u(xi, 0.0, params, sp));
  }
  return g;
}

void add_u_average_lines(ConditionReport& rep, const RadialProfile& u0,
                         const ModelParams& params, const SubsolutionParams& sp) {
  const int n = params.n;
  const double R = sp.R(n);
  const RadialMesh mesh(u0.radii, n);
  const double total = mesh.moment_at(u0.values, 1.0);
  Accum inner("u0_ball_average");
  for (double r : log_space(1e-3 * R, R * (1.0 - 1e-9), 200)) {
    const double avg = n * mesh.moment_at(u0.values, r) / std::pow(r, n);
    inner.add(avg - sp.Gamma_u);
  }
  rep.lines.push_back(inner.done());
  Accum outer("u0_annulus_average");
  for (double r : lin_space(R * (1.0 + 1e-9), 1.0 - 1e-6, 200)) {
    const double avg = n * (total - mesh.moment_at(u0.values, r)) / (1.0 - std::pow(r, n));
    outer.add(sp.gamma - avg);
  }
  rep.lines.push_back(outer.done());
}

void add_w_average_lines(ConditionReport& rep, const RadialProfile& w0,
                         const ModelParams& params, const SubsolutionParams& sp) {
  const int n = params.n;
  const double R = sp.R(n);
  const RadialMesh mesh(w0.radii, n);
  const double total = mesh.moment_at(w0.values, 1.0);
  const double mean = n * total;
  Accum inner("w0_ball_excess");
  for (double r : log_space(1e-3 * R, R * (1.0 - 1e-9), 200)) {
    const double avg = n * mesh.moment_at(w0.values, r) / std::pow(r, n);
    inner.add(avg - mean - sp.Gamma_w);
  }
  rep.lines.push_back(inner.done());
  Accum outer("w0_annulus_deficit");
  for (double r : lin_space(R * (1.0 + 1e-9), 1.0 - 1e-6, 200)) {
    const double avg = n * (total - mesh.moment_at(w0.values, r)) / (1.0 - std::pow(r, n));
    outer.add(mean - sp.eta - avg);
  }
  rep.lines.push_back(outer.done());
}

void add_w_moment_lines(ConditionReport& rep, const RadialProfile& w0,
                        const ModelParams& params, const SubsolutionParams& sp) {
  const WMoments w = w0_moments(w0, params.n, default_xi_grid());
  Accum inner("w0_inner_moment");
  Accum outer("w0_outer_moment");
  for (std::size_t j = 1; j + 1 < w.xis.size(); ++j) {
    const double xi = w.xis[j];
    if (xi < sp.xi0) inner.add(w.W0[j] / xi - w.K0 - sp.Gamma0);
    else if (xi > sp.xi0) outer.add((w.W0[j] - w.K0 * xi) / (1.0 - xi) - sp.eta0);
  }
  rep.lines.push_back(inner.done());
  rep.lines.push_back(outer.done());
}

}  // namespace

BuiltProfile build_u0(const ModelParams& params, const SubsolutionParams& sp,
                      const DataSpec& spec, const std::vector<double>& radii) {
  params.validate();
  const int n = params.n;
  const double R = sp.R(n);
  const RadialMesh mesh(radii, n);
  const double ball = unit_ball_volume(n);
  const double delta = spec.tail_level.value_or(spec.tail_share_of_gamma * sp.gamma);
  if (!(delta >= 0.0)) throw InvalidArgument("build_u0: tail level must be >= 0");
  if (delta * ball >= params.M)
    throw ConstructionFailed("build_u0: tail alone carries the whole mass; lower the tail level");
  const double wf = spec.transition_fraction;
  const auto samples = ordering_samples(sp);

  auto make = [&](double rho, double& height) {
    std::vector<double> shape(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i)
      shape[i] = plateau_shape(radii[i], rho, wf * rho);
    const double S = mesh.integrate(shape);
    height = delta + (params.M - delta * ball) / S;
    std::vector<double> v(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) v[i] = delta + (height - delta) * shape[i];
    const double mass = mesh.integrate(v);
    for (double& x : v) x *= params.M / mass;
    return v;
  };

  double min_rho = 4.0 * (radii[1] - radii[0]);
  std::vector<double> values;
  double height = 0.0;
  double rho = spec.rho.value_or(0.99 * R / (1.0 + wf));
  for (;;) {
    if (rho < min_rho) {
      std::ostringstream os;
      os << "build_u0: initial ordering not reached before the plateau radius hit "
            "the grid resolution; use a smaller tail level or a finer grid";
      throw ConstructionFailed(os.str());
    }
    values = make(rho, height);
    if (ordering_gap(mesh, values, params, sp, samples) >= 0.0) break;
    if (spec.rho) {
      throw ConstructionFailed(
          "build_u0: the requested plateau radius does not order u0 above the subsolution");
    }
    rho *= 0.9;
  }

  BuiltProfile out;
  out.profile = mesh.make_profile(std::move(values));
  out.rho = rho;
  out.height = height;
  out.tail = delta;
  Accum ord("initial_ordering");
  ord.add(ordering_gap(mesh, out.profile.values, params, sp, samples));
  out.report.lines.push_back(ord.done());
  add_u_average_lines(out.report, out.profile, params, sp);
  return out;
}

BuiltProfile build_w0(const ModelParams& params, const SubsolutionParams& sp,
                      const DataSpec& spec, const std::vector<double>& radii) {
  params.validate();
  const int n = params.n;
  const double R = sp.R(n);
  const RadialMesh mesh(radii, n);
  const double wf = spec.transition_fraction;
  const double rho = spec.w0_support_fraction * R / (1.0 + wf);
  if (!(spec.w0_baseline >= 0.0)) throw InvalidArgument("build_w0: baseline must be >= 0");

  std::vector<double> shape(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i)
    shape[i] = plateau_shape(radii[i], rho, wf * rho);
  const double S = mesh.moment_at(shape, 1.0);
  const double B = std::max(sp.Gamma0 * sp.xi0 / (1.0 - sp.xi0), sp.eta0) *
                   (1.0 + spec.margin);
  const double H = spec.w0_bump_height.value_or(B / S);

  std::vector<double> v(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) v[i] = spec.w0_baseline + H * shape[i];

  BuiltProfile out;
  out.profile = mesh.make_profile(std::move(v));
  out.rho = rho;
  out.height = H;
  out.tail = spec.w0_baseline;
  add_w_moment_lines(out.report, out.profile, params, sp);
  add_w_average_lines(out.report, out.profile, params, sp);
  const auto& in = out.report.find("w0_inner_moment");
  const auto& ou = out.report.find("w0_outer_moment");
  if (!in.pass || !ou.pass) {
    std::ostringstream os;
    os << "build_w0: moment bounds fail on the sample grid (inner margin "
       << in.worst_margin << ", outer margin " << ou.worst_margin << ")";
    throw ConstructionFailed(os.str());
  }
  return out;
}

ConditionReport check_conditions(const RadialProfile& u0, const RadialProfile& w0,
                                 const ModelParams& params,
                                 const SubsolutionParams& sp) {
  u0.validate(true, 1e-12);
  w0.validate(true, 1e-12);
  ConditionReport rep;
  const RadialMesh mesh(u0.radii, params.n);
  Accum ord("initial_ordering");
  ord.add(ordering_gap(mesh, u0.values, params, sp, ordering_samples(sp)));
  rep.lines.push_back(ord.done());
  add_u_average_lines(rep, u0, params, sp);
  add_w_moment_lines(rep, w0, params, sp);
  add_w_average_lines(rep, w0, params, sp);
  return rep;
}

RadialProfile generic_bump(const ModelParams& params, double radius,
                           double relative_height, const std::vector<double>& radii) {
  params.validate();
  if (!(radius > 0.0 && radius < 1.0)) throw InvalidArgument("generic_bump: radius in (0,1)");
  if (!(relative_height >= 0.0)) throw InvalidArgument("generic_bump: height must be >= 0");
  const RadialMesh mesh(radii, params.n);
  std::vector<double> v(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i)
    v[i] = 1.0 + relative_height * plateau_shape(radii[i], radius, radius);
  const double mass = mesh.integrate(v);
  for (double& x : v) x *= params.M / mass;
  return mesh.make_profile(std::move(v));
}

}  // namespace kslab
