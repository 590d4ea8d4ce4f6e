#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kslab/functionals.hpp"
#include "kslab/grid.hpp"
#include "kslab/radial_solver.hpp"

namespace kslab {

/// Shortest-safe round-trip decimal (%.17g); "nan" / "inf" / "-inf" otherwise.
std::string format_double(double x);

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// `key = value` lines.
std::string key_values_to_text(const KeyValues& kv);

/// Trajectory table: t,linf_u,mass_u,mass_w,mu,min_u,min_w,u_origin, one
/// E_<p> column per energy p and, when with_residual, p_residual_max.
std::string trajectory_csv(std::span<const TrajectoryRecord> records,
                           std::span<const double> energy_ps,
                           bool with_residual = false);

/// Two columns, header "<x_name>,<y_name>".
std::string columns_csv(std::span<const double> x, std::span<const double> y,
                        const std::string& x_name, const std::string& y_name);
std::string profile_csv(const RadialProfile& f, const std::string& name = "value");

/// t,p,k,E_p,dissipation,sink,rhs_k,residual,threshold.
std::string monitor_csv(std::span<const EnergyReport> reports);

/// Reads a two-column CSV with a header line.
RadialProfile read_profile_csv(const std::filesystem::path& path);

/// Writes text to path; throws std::runtime_error on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace kslab
