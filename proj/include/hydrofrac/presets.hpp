#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "hydrofrac/config.hpp"
#include "hydrofrac/spectral.hpp"

namespace hydrofrac {

/// Vertical profile by name; see Preset for the list.
inline std::function<double(double)> make_profile(const std::string& name) {
  using std::numbers::pi;
  if (name == "linear") return [](double z) { return z - 0.5; };
  if (name == "quadratic") return [](double z) { return z * z - 1.0 / 3.0; };
  if (name == "tanh") return [](double z) { return std::tanh((z - 0.5) / 0.1); };
  if (is_known_profile(name)) {
    const double m = std::stod(name.substr(3));
    if (name[0] == 'c') return [m](double z) { return std::cos(m * pi * z); };
    return [m](double z) { return std::sin(2.0 * m * pi * z); };
  }
  throw ConfigError("initial_data", "unknown profile '" + name + "'");
}

namespace detail {

// Uniform in [-1, 1) straight from the engine bits, so the sequence does not
// depend on the standard library's distribution implementation.
inline double symmetric_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

}  // namespace detail

/// Builds u_0 for a preset, projected onto the zero-vertical-mean space.
inline Field make_initial(const Grid& grid, const Preset& p, std::uint64_t default_seed = 0) {
  using std::numbers::pi;
  Field u(grid, Representation::physical, "u");
  switch (p.kind) {
    case Preset::Kind::zero:
      return u;
    case Preset::Kind::single_mode: {
      const auto prof = make_profile(p.profile);
      const double k = static_cast<double>(p.k);
      u = Field::sample(grid, [&](double x, double z) { return p.amplitude * std::cos(2.0 * pi * k * x) * prof(z); }, "u");
      return remove_vertical_mean(u);
    }
    case Preset::Kind::shear: {
      const auto prof = make_profile(p.profile);
      u = Field::sample(grid, [&](double x, double z) { return prof(z) * (1.0 + 0.5 * std::cos(2.0 * pi * x)); }, "u");
      u = remove_vertical_mean(u);
      const double wmax = dz_fd(u).max_abs();
      if (wmax > 0.0) u *= p.amplitude / wmax;
      return u;
    }
    case Preset::Kind::random_band: {
      std::mt19937_64 rng(p.seed.value_or(default_seed));
      for (long k = 1; k <= p.k_max; ++k) {
        for (long m = 1; m <= p.z_modes; ++m) {
          const double a = detail::symmetric_uniform(rng) / static_cast<double>(k * m);
          const double b = detail::symmetric_uniform(rng) / static_cast<double>(k * m);
          const double kk = static_cast<double>(k);
          const double mm = static_cast<double>(m);
          for (std::size_t j = 0; j < grid.rows(); ++j) {
            const double cz = std::cos(mm * pi * grid.z(j));
            for (std::size_t i = 0; i < grid.n_x; ++i) {
              const double ph = 2.0 * pi * kk * grid.x(i);
              u.at(j, i) += (a * std::cos(ph) + b * std::sin(ph)) * cz;
            }
          }
        }
      }
      u = remove_vertical_mean(u);
      const double umax = u.max_abs();
      if (umax > 0.0) u *= p.amplitude / umax;
      return u;
    }
  }
  return u;
}

}  // namespace hydrofrac
