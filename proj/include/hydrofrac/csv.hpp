#pragma once

#include <array>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hydrofrac/config.hpp"
#include "hydrofrac/diagnostics.hpp"

namespace hydrofrac {

inline constexpr std::array<const char*, 12> diagnostics_columns{
    "t",         "energy_u",   "diss_u_accum", "budget_residual_u",
    "energy_omega", "diss_omega_accum", "budget_residual_omega", "omega_linf",
    "omega_z_l2", "bkm_accum", "X", "Y"};

namespace detail {
inline std::array<double, 12> columns_of(const DiagnosticsRecord& r) {
  return {r.t,          r.energy_u,         r.diss_u_accum,          r.budget_residual_u,
          r.energy_omega, r.diss_omega_accum, r.budget_residual_omega, r.omega_linf,
          r.omega_z_l2, r.bkm_accum,        r.X,                     r.Y};
}
}  // namespace detail

/// Joins values with commas using the shortest round-trip form.
inline std::string csv_row(std::span<const double> values) {
  std::string line;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) line += ',';
    line += config_detail::format_double(values[i]);
  }
  return line;
}

inline void write_diagnostics_csv(std::ostream& out, std::span<const DiagnosticsRecord> records) {
  for (std::size_t i = 0; i < diagnostics_columns.size(); ++i) {
    if (i) out << ',';
    out << diagnostics_columns[i];
  }
  out << '\n';
  for (const auto& r : records) {
    const auto c = detail::columns_of(r);
    out << csv_row(c) << '\n';
  }
}

/// Reads a diagnostics CSV back. Only the CSV columns are restored.
inline std::vector<DiagnosticsRecord> read_diagnostics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty diagnostics file");
  const auto header = config_detail::split(line, ',');
  if (header.size() != diagnostics_columns.size())
    throw IoError("unexpected diagnostics header: " + line);
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] != diagnostics_columns[i]) throw IoError("unexpected diagnostics column '" + header[i] + "'");
  std::vector<DiagnosticsRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (config_detail::trim(line).empty()) continue;
    const auto cells = config_detail::split(line, ',');
    if (cells.size() != diagnostics_columns.size())
      throw IoError("diagnostics line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) + " cells");
    std::array<double, 12> v{};
    for (std::size_t i = 0; i < v.size(); ++i) {
      try {
        v[i] = config_detail::to_double(diagnostics_columns[i], cells[i]);
      } catch (const ConfigError&) {
        throw IoError("diagnostics line " + std::to_string(lineno) + ": bad number '" + cells[i] + "'");
      }
    }
    DiagnosticsRecord r;
    r.t = v[0];
    r.energy_u = v[1];
    r.diss_u_accum = v[2];
    r.budget_residual_u = v[3];
    r.energy_omega = v[4];
    r.diss_omega_accum = v[5];
    r.budget_residual_omega = v[6];
    r.omega_linf = v[7];
    r.omega_z_l2 = v[8];
    r.bkm_accum = v[9];
    r.X = v[10];
    r.Y = v[11];
    out.push_back(r);
  }
  return out;
}

}  // namespace hydrofrac
