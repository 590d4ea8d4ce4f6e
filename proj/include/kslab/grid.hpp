#pragma once

#include <span>
#include <vector>

namespace kslab {

/// A radially symmetric scalar field sampled at nodes 0 = r_0 < ... < r_N = 1.
struct RadialProfile {
  std::vector<double> radii;
  std::vector<double> values;

  [[nodiscard]] std::size_t size() const { return radii.size(); }
  [[nodiscard]] double max() const;
  [[nodiscard]] double min() const;

  /// Checks the grid invariants. With require_nonnegative, also values >= -tol.
  void validate(bool require_nonnegative, double tol = 0.0) const;

  /// Piecewise-linear interpolation (clamped to the end values).
  [[nodiscard]] double at(double r) const;
};

/// Node sets on [0,1].
std::vector<double> uniform_nodes(int intervals);
/// Spacing grows geometrically away from 0 by `ratio` per interval.
std::vector<double> geometric_nodes(int intervals, double ratio);
/// Geometric nodes with a prescribed smallest spacing; the ratio is solved for.
std::vector<double> geometric_nodes_min_spacing(int intervals,
                                                double min_spacing);

/// Node-centred finite-volume metric on the unit ball in R^n. Node i owns the
/// dual cell [f_i, f_{i+1}] with f_0 = 0, f_{N+1} = 1 and f_i the midpoint of
/// r_{i-1}, r_i otherwise. The face at r = 0 has zero area.
///
/// All integrals use the lumped rule int_Omega g = omega_n sum_i g_i vol_i
/// with vol_i = (f_{i+1}^n - f_i^n)/n. It is exact for constants and it is
/// the quantity the solver conserves.
class RadialMesh {
 public:
  RadialMesh(std::vector<double> nodes, int n);

  [[nodiscard]] int dim() const { return n_; }
  [[nodiscard]] std::size_t size() const { return nodes_.size(); }
  [[nodiscard]] const std::vector<double>& nodes() const { return nodes_; }
  /// Dual faces, size() + 1 entries.
  [[nodiscard]] const std::vector<double>& faces() const { return faces_; }
  /// Radial weight of each dual cell, int r^{n-1} dr over the cell.
  [[nodiscard]] const std::vector<double>& volumes() const { return vol_; }
  /// f^{n-1} for every dual face.
  [[nodiscard]] const std::vector<double>& face_areas() const { return area_; }
  /// r_{i+1} - r_i.
  [[nodiscard]] double spacing(std::size_t i) const {
    return nodes_[i + 1] - nodes_[i];
  }

  /// int_Omega g (includes the omega_n factor).
  [[nodiscard]] double integrate(std::span<const double> g) const;

  /// Radial moment G(f_k) = int_0^{f_k} r^{n-1} g dr at every dual face.
  [[nodiscard]] std::vector<double> face_moments(
      std::span<const double> g) const;

  /// Radial moment int_0^{rho} r^{n-1} g dr for arbitrary rho, using the
  /// piecewise-constant reconstruction on dual cells.
  [[nodiscard]] double moment_at(std::span<const double> g, double rho) const;

  [[nodiscard]] RadialProfile make_profile(std::vector<double> values) const;

 private:
  std::vector<double> nodes_;
  int n_;
  std::vector<double> faces_;
  std::vector<double> vol_;
  std::vector<double> area_;
};

/// Smooth plateau: 1 on [0, radius], cubic Hermite (C^1) decay to 0 on
/// [radius, radius + width], 0 beyond.
double plateau_shape(double r, double radius, double width);

/// Solves the tridiagonal system lower[i] x[i-1] + diag[i] x[i] +
/// upper[i] x[i+1] = rhs[i] in place (rhs becomes x). Thomas algorithm;
/// requires a diagonally dominant matrix.
void solve_tridiagonal(std::span<const double> lower, std::span<double> diag,
                       std::span<const double> upper, std::span<double> rhs);

}  // namespace kslab
