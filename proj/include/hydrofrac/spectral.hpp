#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "hydrofrac/field.hpp"

namespace hydrofrac {

namespace detail {

// Second-order central differences inside, second-order one-sided at the walls.
template <class T>
void dz_rows(std::span<const T> in, std::span<T> out, std::size_t rows, std::size_t cols,
             double dz) {
  const double c = 1.0 / (2.0 * dz);
  const std::size_t last = rows - 1;
  auto at = [&](std::size_t j, std::size_t i) -> const T& { return in[j * cols + i]; };
  for (std::size_t i = 0; i < cols; ++i) {
    out[i] = c * (-3.0 * at(0, i) + 4.0 * at(1, i) - at(2, i));
    out[last * cols + i] = c * (3.0 * at(last, i) - 4.0 * at(last - 1, i) + at(last - 2, i));
  }
  for (std::size_t j = 1; j < last; ++j)
    for (std::size_t i = 0; i < cols; ++i) out[j * cols + i] = c * (at(j + 1, i) - at(j - 1, i));
}

// Cumulative trapezoid from z = 0.
template <class T>
void cumint_rows(std::span<const T> in, std::span<T> out, std::size_t rows, std::size_t cols,
                 double dz) {
  const double half = 0.5 * dz;
  for (std::size_t i = 0; i < cols; ++i) out[i] = T{};
  for (std::size_t j = 1; j < rows; ++j)
    for (std::size_t i = 0; i < cols; ++i)
      out[j * cols + i] = out[(j - 1) * cols + i] + half * (in[(j - 1) * cols + i] + in[j * cols + i]);
}

// Trapezoidal mean over z in [0,1]; same summation order as cumint_rows.
template <class T>
std::vector<T> mean_rows(std::span<const T> in, std::size_t rows, std::size_t cols, double dz) {
  const double half = 0.5 * dz;
  std::vector<T> acc(cols, T{});
  for (std::size_t j = 1; j < rows; ++j)
    for (std::size_t i = 0; i < cols; ++i)
      acc[i] = acc[i] + half * (in[(j - 1) * cols + i] + in[j * cols + i]);
  return acc;
}

template <class T>
void remove_mean_rows(std::span<T> data, std::size_t rows, std::size_t cols, double dz) {
  const auto mean = mean_rows<T>(data, rows, cols, dz);
  for (std::size_t j = 0; j < rows; ++j)
    for (std::size_t i = 0; i < cols; ++i) data[j * cols + i] -= mean[i];
}

// |2 pi k|^s for stored mode k; the k = 0 mode is annihilated.
inline double fractional_symbol(std::size_t k, double s) {
  if (k == 0) return 0.0;
  return std::pow(Grid::angular(k), s);
}

}  // namespace detail

/// d/dx by the multiplier i 2 pi k. The Nyquist mode has no real derivative
/// and is dropped. Output representation matches the input.
inline Field dx_spectral(const Field& f) {
  Field s = f.to_spectral();
  const Grid& g = s.grid();
  const std::size_t nyquist = g.n_x / 2;
  for (std::size_t j = 0; j < g.rows(); ++j) {
    auto row = s.spectral_row(j);
    for (std::size_t k = 0; k < row.size(); ++k)
      row[k] = (k == nyquist) ? Field::complex{} : row[k] * Field::complex{0.0, Grid::angular(k)};
  }
  return s.as(f.representation());
}

/// d/dz by finite differences; acts row-wise, so either representation works.
inline Field dz_fd(const Field& f) {
  Field out(f.grid(), f.representation(), f.role());
  const Grid& g = f.grid();
  if (f.is_physical())
    detail::dz_rows<double>(f.values(), out.values(), g.rows(), g.n_x, g.dz());
  else
    detail::dz_rows<Field::complex>(f.coefficients(), out.coefficients(), g.rows(), g.modes(),
                                    g.dz());
  return out;
}

/// Horizontal fractional Laplacian with symbol |2 pi k|^s.
inline Field fractional_power(const Field& f, double s) {
  if (!(s >= 0.0)) throw DomainError("fractional exponent must be >= 0");
  Field sp = f.to_spectral();
  const Grid& g = sp.grid();
  std::vector<double> symbol(g.modes());
  for (std::size_t k = 0; k < g.modes(); ++k) symbol[k] = detail::fractional_symbol(k, s);
  for (std::size_t j = 0; j < g.rows(); ++j) {
    auto row = sp.spectral_row(j);
    for (std::size_t k = 0; k < row.size(); ++k) row[k] *= symbol[k];
  }
  return sp.as(f.representation());
}

/// Lambda_h^s f with s defaulting to the dissipation exponent alpha.
inline Field apply_fractional(const Field& f, double alpha, std::optional<double> s = {}) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("alpha must lie in (0, 2]");
  return fractional_power(f, s.value_or(alpha));
}

/// 2/3 rule: zero every mode with |k| > n_x/3.
inline Field dealias(const Field& f) {
  Field sp = f.to_spectral();
  const Grid& g = sp.grid();
  const std::size_t cut = g.dealias_cutoff();
  for (std::size_t j = 0; j < g.rows(); ++j) {
    auto row = sp.spectral_row(j);
    for (std::size_t k = cut + 1; k < row.size(); ++k) row[k] = {};
  }
  return sp.as(f.representation());
}

/// F(x, z) = int_0^z f dz' by the cumulative trapezoid rule.
inline Field vertical_cumint(const Field& f) {
  Field out(f.grid(), f.representation(), f.role());
  const Grid& g = f.grid();
  if (f.is_physical())
    detail::cumint_rows<double>(f.values(), out.values(), g.rows(), g.n_x, g.dz());
  else
    detail::cumint_rows<Field::complex>(f.coefficients(), out.coefficients(), g.rows(), g.modes(),
                                        g.dz());
  return out;
}

/// Trapezoidal vertical mean at each x node.
inline std::vector<double> vertical_mean(const Field& f) {
  const Field p = f.to_physical();
  const Grid& g = p.grid();
  return detail::mean_rows<double>(p.values(), g.rows(), g.n_x, g.dz());
}

/// Subtracts the trapezoidal vertical mean, projecting onto the zero-mean space.
inline Field remove_vertical_mean(const Field& f) {
  Field out = f;
  const Grid& g = f.grid();
  if (out.is_physical())
    detail::remove_mean_rows<double>(out.values(), g.rows(), g.n_x, g.dz());
  else
    detail::remove_mean_rows<Field::complex>(out.coefficients(), g.rows(), g.modes(), g.dz());
  return out;
}

/// max_x |vertical mean|; the membership measure for the zero-mean space.
inline double max_vertical_mean(const Field& f) {
  double m = 0.0;
  for (double v : vertical_mean(f)) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace hydrofrac
