#include "kslab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kslab/errors.hpp"
#include "kslab/model.hpp"

namespace kslab {

double RadialProfile::max() const {
  if (values.empty()) throw InvalidArgument("empty profile");
  return *std::max_element(values.begin(), values.end());
}

double RadialProfile::min() const {
  if (values.empty()) throw InvalidArgument("empty profile");
  return *std::min_element(values.begin(), values.end());
}

void RadialProfile::validate(bool require_nonnegative, double tol) const {
  if (radii.size() < 2) throw InvalidArgument("profile needs at least 2 nodes");
  if (radii.size() != values.size())
    throw InvalidArgument("profile radii/values size mismatch");
  if (radii.front() != 0.0 || radii.back() != 1.0)
    throw InvalidArgument("profile radii must start at 0 and end at 1");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1]))
      throw InvalidArgument("profile radii must be strictly increasing");
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidArgument("profile has non-finite value");
    if (require_nonnegative && v < -tol)
      throw InvalidArgument("profile has negative value " + std::to_string(v));
  }
}

double RadialProfile::at(double r) const {
  if (r <= radii.front()) return values.front();
  if (r >= radii.back()) return values.back();
  const auto it = std::upper_bound(radii.begin(), radii.end(), r);
  const std::size_t k = static_cast<std::size_t>(it - radii.begin());
  const double s = (r - radii[k - 1]) / (radii[k] - radii[k - 1]);
  return (1.0 - s) * values[k - 1] + s * values[k];
}

std::vector<double> uniform_nodes(int intervals) {
  if (intervals < 1) throw InvalidArgument("need at least one interval");
  std::vector<double> r(static_cast<std::size_t>(intervals) + 1);
  for (int i = 0; i <= intervals; ++i) r[i] = static_cast<double>(i) / intervals;
  r.back() = 1.0;
  return r;
}

std::vector<double> geometric_nodes(int intervals, double ratio) {
  if (intervals < 1) throw InvalidArgument("need at least one interval");
  if (!(ratio >= 1.0)) throw InvalidArgument("grid ratio must be >= 1");
  if (ratio == 1.0) return uniform_nodes(intervals);
  std::vector<double> r(static_cast<std::size_t>(intervals) + 1, 0.0);
  double h = 1.0;
  for (int i = 1; i <= intervals; ++i) {
    r[i] = r[i - 1] + h;
    h *= ratio;
  }
  const double total = r.back();
  for (double& x : r) x /= total;
  r.back() = 1.0;
  return r;
}

std::vector<double> geometric_nodes_min_spacing(int intervals,
                                                double min_spacing) {
  if (intervals < 1) throw InvalidArgument("need at least one interval");
  if (!(min_spacing > 0.0) || min_spacing * intervals >= 1.0)
    throw InvalidArgument("min_spacing must lie in (0, 1/intervals)");
  // sum_{i<N} h q^i = 1  <=>  h (q^N - 1)/(q - 1) = 1, solved by bisection in q.
  auto total = [&](double q) {
    return min_spacing * (std::pow(q, intervals) - 1.0) / (q - 1.0);
  };
  double lo = 1.0 + 1e-15;
  double hi = 2.0;
  while (total(hi) < 1.0) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (total(mid) < 1.0 ? lo : hi) = mid;
  }
  return geometric_nodes(intervals, 0.5 * (lo + hi));
}

RadialMesh::RadialMesh(std::vector<double> nodes, int n)
    : nodes_(std::move(nodes)), n_(n) {
  if (n_ < 1) throw InvalidArgument("dimension must be >= 1");
  RadialProfile check{nodes_, std::vector<double>(nodes_.size(), 0.0)};
  check.validate(false);
  const std::size_t N = nodes_.size();
  faces_.resize(N + 1);
  faces_.front() = 0.0;
  faces_.back() = 1.0;
  for (std::size_t i = 1; i < N; ++i)
    faces_[i] = 0.5 * (nodes_[i - 1] + nodes_[i]);
  vol_.resize(N);
  for (std::size_t i = 0; i < N; ++i)
    vol_[i] = (std::pow(faces_[i + 1], n_) - std::pow(faces_[i], n_)) / n_;
  area_.resize(N + 1);
  for (std::size_t k = 0; k <= N; ++k)
    area_[k] = (k == 0) ? 0.0 : std::pow(faces_[k], n_ - 1);
}

double RadialMesh::integrate(std::span<const double> g) const {
  if (g.size() != size()) throw InvalidArgument("integrand size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * vol_[i];
  return omega_n(n_) * s;
}

std::vector<double> RadialMesh::face_moments(std::span<const double> g) const {
  if (g.size() != size()) throw InvalidArgument("integrand size mismatch");
  std::vector<double> G(size() + 1, 0.0);
  for (std::size_t i = 0; i < size(); ++i) G[i + 1] = G[i] + g[i] * vol_[i];
  return G;
}

double RadialMesh::moment_at(std::span<const double> g, double rho) const {
  if (g.size() != size()) throw InvalidArgument("integrand size mismatch");
  if (rho <= 0.0) return 0.0;
  rho = std::min(rho, 1.0);
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    if (faces_[i + 1] <= rho) {
      s += g[i] * vol_[i];
    } else {
      s += g[i] * (std::pow(rho, n_) - std::pow(faces_[i], n_)) / n_;
      break;
    }
  }
  return s;
}

RadialProfile RadialMesh::make_profile(std::vector<double> values) const {
  if (values.size() != size()) throw InvalidArgument("values size mismatch");
  return RadialProfile{nodes_, std::move(values)};
}

double plateau_shape(double r, double radius, double width) {
  if (r <= radius) return 1.0;
  if (width <= 0.0 || r >= radius + width) return 0.0;
  const double s = (r - radius) / width;
  return 1.0 - s * s * (3.0 - 2.0 * s);
}

void solve_tridiagonal(std::span<const double> lower, std::span<double> diag,
                       std::span<const double> upper, std::span<double> rhs) {
  const std::size_t N = diag.size();
  if (lower.size() != N || upper.size() != N || rhs.size() != N)
    throw InvalidArgument("tridiagonal size mismatch");
  for (std::size_t i = 1; i < N; ++i) {
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[N - 1] /= diag[N - 1];
  for (std::size_t i = N - 1; i-- > 0;)
    rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

}  // namespace kslab
