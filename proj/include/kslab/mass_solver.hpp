#pragma once

#include <functional>
#include <span>
#include <vector>

#include "kslab/grid.hpp"
#include "kslab/model.hpp"
#include "kslab/radial_solver.hpp"

namespace kslab {

/// U(xi) = int_0^{xi^{1/n}} r^{n-1} u(r) dr sampled on 0 = xi_0 < ... < xi_N = 1.
struct MassProfile {
  std::vector<double> xis;
  std::vector<double> values;

  [[nodiscard]] std::size_t size() const { return xis.size(); }
  /// Grid checks, U(0) = 0 and U non-decreasing up to tol.
  void validate(double tol = 1e-10) const;
};

/// Transformed state. I is the memory int_0^t e^{-(t-s)} (U - (M/omega_n) xi) ds,
/// W0 the initial w-moment on the same grid and K0 = W0(1).
struct MassState {
  double t = 0.0;
  MassProfile U;
  std::vector<double> I;
  std::vector<double> W0;
  double K0 = 0.0;
};

/// Default xi grid: 1024 nodes graded toward 0, smallest spacing 1e-8.
std::vector<double> default_xi_grid();

MassProfile to_mass_variable(const RadialProfile& u, int n,
                             std::span<const double> xi_grid);

/// u(r) = n U_xi(r^n). U_xi uses three-point differences at the xi nodes
/// (one-sided at the ends) and is interpolated linearly in xi. Small
/// negative values are clamped to 0. Throws InvalidArgument if U decreases
/// by more than tol anywhere.
RadialProfile from_mass_variable(const MassProfile& U, int n,
                                 std::span<const double> r_grid,
                                 double tol = 1e-10);

/// Exact step of I_t = -I + (U_src - (M/omega_n) xi).
std::vector<double> update_memory(std::span<const double> I,
                                  const MassProfile& U_src,
                                  const ModelParams& params, double dt);

/// P U = U_t - n^2 xi^{2-2/n} (nU_xi+1)^{m-1} U_xixi - n I U_xi
///       - n (W0 - K0 xi) e^{-t} U_xi
/// at interior nodes by three-point differences; the two end entries are 0.
std::vector<double> p_residual(const MassState& state,
                               std::span<const double> U_t,
                               const ModelParams& params);

/// n U_xi(0) from the one-sided three-point stencil.
double origin_density(const MassProfile& U, int n);

struct MassRunHooks {
  std::function<void(const MassState&, const TrajectoryRecord&)> on_record;
};

struct MassRunResult {
  std::vector<TrajectoryRecord> records;
  Verdict verdict;
  MassState final_state;
  StopReason stop_reason = StopReason::kHorizon;
  long steps_accepted = 0;
  long steps_rejected = 0;
};

/// Integrates U_t = n^2 xi^{2-2/n} (nU_xi+1)^{m-1} U_xixi
///                  + n [I + (W0 - K0 xi) e^{-t}] U_xi
/// with U(0) = 0, U(1) = M/omega_n pinned. Second-order term implicit with a
/// lagged coefficient; first-order term upwinded (implicit by default, as in
/// the primitive solver). A step that breaks monotonicity of U by more than
/// 1e-10 max(1, M/omega_n) is rejected and halved. Records carry linf_u,
/// u_origin and p_residual_max; energy_p is left empty.
MassRunResult run_mass(const MassProfile& U0, std::span<const double> W0,
                       double K0, const ModelParams& params,
                       const StepControl& ctrl, const MassRunHooks& hooks = {});

}  // namespace kslab
