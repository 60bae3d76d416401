#pragma once

#include <cstddef>
#include <numbers>

#include "hydrofrac/error.hpp"

namespace hydrofrac {

/// Uniform grid on the periodic channel [0,1) x [0,1].
///
/// x-nodes are x_i = i/n_x for i = 0..n_x-1 (periodic); z-nodes are
/// z_j = j/n_z for j = 0..n_z, both walls included. Row j of a field holds
/// the values at height z_j.
struct Grid {
  std::size_t n_x = 0;
  std::size_t n_z = 0;

  Grid() = default;
  Grid(std::size_t nx, std::size_t nz) : n_x(nx), n_z(nz) {
    if (n_x < 8 || n_x % 2 != 0) throw ConfigError("n_x", "must be even and >= 8");
    if (n_z < 8) throw ConfigError("n_z", "must be >= 8");
  }

  double dx() const { return 1.0 / static_cast<double>(n_x); }
  double dz() const { return 1.0 / static_cast<double>(n_z); }
  double x(std::size_t i) const { return static_cast<double>(i) * dx(); }
  double z(std::size_t j) const { return static_cast<double>(j) * dz(); }

  std::size_t rows() const { return n_z + 1; }
  /// Stored r2c modes per row: k = 0..n_x/2.
  std::size_t modes() const { return n_x / 2 + 1; }
  std::size_t physical_size() const { return rows() * n_x; }
  std::size_t spectral_size() const { return rows() * modes(); }

  /// Largest |k| kept by the 2/3 rule.
  std::size_t dealias_cutoff() const { return n_x / 3; }

  /// Angular wavenumber 2*pi*k of stored mode k.
  static double angular(std::size_t k) { return 2.0 * std::numbers::pi * static_cast<double>(k); }

  friend bool operator==(const Grid&, const Grid&) = default;
};

}  // namespace hydrofrac
