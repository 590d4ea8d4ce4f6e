#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kslab/grid.hpp"
#include "kslab/model.hpp"
#include "kslab/subsolution.hpp"

namespace kslab {

/// Default radial grid: 512 intervals, spacing growing by 1.02 per interval
/// away from the origin.
std::vector<double> default_radial_grid(int intervals = 512, double ratio = 1.02);

/// Knobs for the data builders. Unset values are derived from the
/// subsolution constants.
struct DataSpec {
  /// u0: plateau radius (searched when unset), tail level delta (default
  /// tail_share_of_gamma * gamma), transition width as a fraction of rho.
  std::optional<double> rho;
  std::optional<double> tail_level;
  double tail_share_of_gamma = 0.5;
  double transition_fraction = 0.5;
  /// Relative safety margin on every sized quantity.
  double margin = 0.05;
  /// w0 = baseline + bump; the bump (plateau plus transition) ends at
  /// w0_support_fraction * R. Height derived unless given.
  double w0_baseline = 1.0;
  std::optional<double> w0_bump_height;
  double w0_support_fraction = 0.95;
};

/// Average of a profile over B_r and over B_1 \ B_r.
double ball_average(const RadialProfile& f, int n, double r);
double annulus_average(const RadialProfile& f, int n, double r);

struct ConditionLine {
  std::string name;
  bool pass = false;
  /// Smallest signed slack over the samples (>= 0 means satisfied).
  double worst_margin = 0.0;
  int samples = 0;
  int violations = 0;
};

struct ConditionReport {
  std::vector<ConditionLine> lines;
  [[nodiscard]] const ConditionLine& find(const std::string& name) const;
  /// The conditions the blow-up argument consumes: initial ordering and
  /// both w0 moment bounds.
  [[nodiscard]] bool contract_ok() const;
  [[nodiscard]] std::string to_text() const;
};

struct BuiltProfile {
  RadialProfile profile;
  ConditionReport report;
  double rho = 0.0;
  double height = 0.0;
  double tail = 0.0;
};

/// u0 = delta + (A - delta) * plateau(rho, transition_fraction * rho) with A
/// fixed by int u0 = M. rho is shrunk geometrically from just inside R until
/// U(xi,0) >= underline_u(xi,0) on dense samples. Throws ConstructionFailed
/// when rho reaches the grid resolution first. Reports the averaged u0
/// conditions per radius sample (informational).
BuiltProfile build_u0(const ModelParams& params, const SubsolutionParams& sp,
                      const DataSpec& spec = {},
                      const std::vector<double>& radii = default_radial_grid());

/// w0 = c + H * plateau: the bump moment B is sized to
/// max(Gamma0 xi0/(1-xi0), eta0)(1+margin), which makes both moment bounds
/// hold; checked on the default xi grid (ConstructionFailed otherwise).
BuiltProfile build_w0(const ModelParams& params, const SubsolutionParams& sp,
                      const DataSpec& spec = {},
                      const std::vector<double>& radii = default_radial_grid());

/// Evaluates the four averaged data conditions on radius samples, the two
/// w0 moment bounds, and the initial ordering U(.,0) >= underline_u(.,0).
ConditionReport check_conditions(const RadialProfile& u0, const RadialProfile& w0,
                                 const ModelParams& params,
                                 const SubsolutionParams& sp);

/// Smooth bump data for generic runs: u0 = base + h * plateau(radius),
/// normalized to mass M; w0 = u0.
RadialProfile generic_bump(const ModelParams& params, double radius,
                           double relative_height,
                           const std::vector<double>& radii = default_radial_grid());

}  // namespace kslab
