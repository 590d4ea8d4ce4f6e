#include "kslab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "kslab/errors.hpp"

namespace kslab {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string key_values_to_text(const KeyValues& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::string trajectory_csv(std::span<const TrajectoryRecord> records,
                           std::span<const double> energy_ps, bool with_residual) {
  std::string out = "t,linf_u,mass_u,mass_w,mu,min_u,min_w,u_origin";
  for (double p : energy_ps) out += ",E_" + format_double(p);
  if (with_residual) out += ",p_residual_max";
  out += "\n";
  for (const auto& r : records) {
    out += format_double(r.t);
    for (double x : {r.linf_u, r.mass_u, r.mass_w, r.mu, r.min_u, r.min_w, r.u_origin})
      out += "," + format_double(x);
    for (std::size_t j = 0; j < energy_ps.size(); ++j)
      out += "," + (j < r.energy_p.size() ? format_double(r.energy_p[j]) : std::string("nan"));
    if (with_residual) out += "," + format_double(r.p_residual_max);
    out += "\n";
  }
  return out;
}

std::string columns_csv(std::span<const double> x, std::span<const double> y,
                        const std::string& x_name, const std::string& y_name) {
  if (x.size() != y.size()) throw InvalidArgument("columns_csv: size mismatch");
  std::string out = x_name + "," + y_name + "\n";
  for (std::size_t i = 0; i < x.size(); ++i)
    out += format_double(x[i]) + "," + format_double(y[i]) + "\n";
  return out;
}

std::string profile_csv(const RadialProfile& f, const std::string& name) {
  return columns_csv(f.radii, f.values, "r", name);
}

std::string monitor_csv(std::span<const EnergyReport> reports) {
  std::string out = "t,p,k,E_p,dissipation,sink,rhs_k,residual,threshold\n";
  if (reports.size() < 2) return out;
  const auto res = inequality_monitor(reports);
  for (std::size_t j = 0; j < reports.size(); ++j) {
    const auto& r = reports[j];
    for (double x : {r.t, r.p, r.k, r.E_p, r.dissipation, r.sink, r.rhs_k, res[j]})
      out += format_double(x) + ",";
    out += format_double(monitor_threshold(r)) + "\n";
  }
  return out;
}

RadialProfile read_profile_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  RadialProfile f;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = line.find(',');
    if (c == std::string::npos) throw InvalidArgument("malformed row in " + path.string());
    f.radii.push_back(std::stod(line.substr(0, c)));
    f.values.push_back(std::stod(line.substr(c + 1)));
  }
  return f;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace kslab
