#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hydrofrac/fft.hpp"
#include "hydrofrac/grid.hpp"

namespace hydrofrac {

enum class Representation { physical, spectral };

/// A scalar on the channel grid, held either as nodal values or as the
/// x-Fourier coefficients of each z-row.
///
/// Physical storage is row-major (n_z+1) x n_x with x fastest. Spectral
/// storage keeps modes k = 0..n_x/2 of each row; negative modes follow from
/// conjugate symmetry. Coefficients are normalized so that
/// f(x, z_j) = sum_k c_k(z_j) exp(2 pi i k x).
class Field {
 public:
  using complex = std::complex<double>;

  Field() = default;
  Field(const Grid& grid, Representation rep, std::string role = {})
      : grid_(grid), rep_(rep), role_(std::move(role)) {
    if (rep_ == Representation::physical)
      phys_.assign(grid_.physical_size(), 0.0);
    else
      spec_.assign(grid_.spectral_size(), complex{});
  }

  /// Samples fn(x, z) at every node.
  template <class Fn>
  static Field sample(const Grid& grid, Fn&& fn, std::string role = {}) {
    Field f(grid, Representation::physical, std::move(role));
    for (std::size_t j = 0; j < grid.rows(); ++j)
      for (std::size_t i = 0; i < grid.n_x; ++i) f.at(j, i) = fn(grid.x(i), grid.z(j));
    return f;
  }

  const Grid& grid() const { return grid_; }
  Representation representation() const { return rep_; }
  bool is_physical() const { return rep_ == Representation::physical; }
  bool is_spectral() const { return rep_ == Representation::spectral; }

  const std::string& role() const { return role_; }
  void set_role(std::string role) { role_ = std::move(role); }

  std::span<double> values() { return phys_; }
  std::span<const double> values() const { return phys_; }
  std::span<complex> coefficients() { return spec_; }
  std::span<const complex> coefficients() const { return spec_; }

  std::span<double> row(std::size_t j) { return {phys_.data() + j * grid_.n_x, grid_.n_x}; }
  std::span<const double> row(std::size_t j) const {
    return {phys_.data() + j * grid_.n_x, grid_.n_x};
  }
  std::span<complex> spectral_row(std::size_t j) {
    return {spec_.data() + j * grid_.modes(), grid_.modes()};
  }
  std::span<const complex> spectral_row(std::size_t j) const {
    return {spec_.data() + j * grid_.modes(), grid_.modes()};
  }

  double& at(std::size_t j, std::size_t i) { return phys_[j * grid_.n_x + i]; }
  double at(std::size_t j, std::size_t i) const { return phys_[j * grid_.n_x + i]; }
  complex& mode(std::size_t j, std::size_t k) { return spec_[j * grid_.modes() + k]; }
  const complex& mode(std::size_t j, std::size_t k) const { return spec_[j * grid_.modes() + k]; }

  Field to_spectral() const {
    if (is_spectral()) return *this;
    Field out(grid_, Representation::spectral, role_);
    detail::RowFft::get(grid_.n_x, grid_.rows()).forward(phys_, out.spec_);
    return out;
  }

  Field to_physical() const {
    if (is_physical()) return *this;
    Field out(grid_, Representation::physical, role_);
    detail::RowFft::get(grid_.n_x, grid_.rows()).inverse(spec_, out.phys_);
    return out;
  }

  Field as(Representation rep) const {
    return rep == Representation::physical ? to_physical() : to_spectral();
  }

  /// Largest nodal magnitude; transforms first if needed.
  double max_abs() const {
    if (is_spectral()) return to_physical().max_abs();
    double m = 0.0;
    for (double v : phys_) m = std::max(m, std::abs(v));
    return m;
  }

  bool all_finite() const {
    if (is_physical())
      return std::all_of(phys_.begin(), phys_.end(), [](double v) { return std::isfinite(v); });
    return std::all_of(spec_.begin(), spec_.end(), [](const complex& c) {
      return std::isfinite(c.real()) && std::isfinite(c.imag());
    });
  }

  Field& operator+=(const Field& o) {
    require_same(o);
    if (is_physical())
      for (std::size_t n = 0; n < phys_.size(); ++n) phys_[n] += o.phys_[n];
    else
      for (std::size_t n = 0; n < spec_.size(); ++n) spec_[n] += o.spec_[n];
    return *this;
  }
  Field& operator-=(const Field& o) {
    require_same(o);
    if (is_physical())
      for (std::size_t n = 0; n < phys_.size(); ++n) phys_[n] -= o.phys_[n];
    else
      for (std::size_t n = 0; n < spec_.size(); ++n) spec_[n] -= o.spec_[n];
    return *this;
  }
  Field& operator*=(double a) {
    for (auto& v : phys_) v *= a;
    for (auto& c : spec_) c *= a;
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double s, Field a) { return a *= s; }
  friend Field operator*(Field a, double s) { return a *= s; }

 private:
  void require_same(const Field& o) const {
    if (!(grid_ == o.grid_) || rep_ != o.rep_)
      throw DomainError("field arithmetic needs matching grid and representation");
  }

  Grid grid_;
  Representation rep_ = Representation::physical;
  std::string role_;
  std::vector<double> phys_;
  std::vector<complex> spec_;
};

/// Pointwise product of two physical fields.
inline Field multiply(const Field& a, const Field& b) {
  Field pa = a.to_physical();
  const Field pb = b.to_physical();
  auto va = pa.values();
  auto vb = pb.values();
  for (std::size_t n = 0; n < va.size(); ++n) va[n] *= vb[n];
  return pa;
}

}  // namespace hydrofrac
