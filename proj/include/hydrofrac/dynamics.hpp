#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "hydrofrac/config.hpp"
#include "hydrofrac/spectral.hpp"

namespace hydrofrac {

/// Raised when the evolution produces non-finite values or the vorticity
/// leaves its admissible range.
class BlowupError : public Error {
 public:
  using Error::Error;
};

/// Horizontal velocity in the zero-vertical-mean space at time t.
struct State {
  Field u;
  double t = 0.0;
  long step_count = 0;
};

/// Hydrostatic vorticity omega = du/dz.
inline Field vorticity(const Field& u) {
  Field w = dz_fd(u);
  w.set_role("omega");
  return w;
}
inline Field vorticity(const State& s) { return vorticity(s.u); }

/// Vertical velocity from incompressibility and w(x, 0) = 0:
/// w(x, z) = -int_0^z du/dx dz'.
inline Field recover_w(const Field& u) {
  Field w = vertical_cumint(dx_spectral(u));
  w *= -1.0;
  w.set_role("w");
  return w;
}

/// Eliminates the hydrostatic pressure: removing the vertical mean of the
/// tendency is exactly the choice of -dp/dx that keeps the zero-mean
/// constraint.
inline Field pressure_project(const Field& tendency) { return remove_vertical_mean(tendency); }

/// u du/dx + w du/dz in convective form. Products are taken at the nodes and
/// the result is dealiased by the 2/3 rule. Returned in spectral form.
inline Field nonlinear_term(const Field& u, const Field& w) {
  const Field up = u.to_physical();
  const Field wp = w.to_physical();
  const Field ux = dx_spectral(up);
  const Field uz = dz_fd(up);
  Field n(up.grid(), Representation::physical, "advection");
  auto out = n.values();
  const auto a = up.values();
  const auto b = ux.values();
  const auto c = wp.values();
  const auto d = uz.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i] + c[i] * d[i];
  return dealias(n.to_spectral());
}

namespace detail {

// First derivative in z that is summation-by-parts for the trapezoid weights:
// central inside, first-order one-sided at the walls.
inline void sbp_dz_rows(std::span<const double> in, std::span<double> out, std::size_t rows,
                        std::size_t cols, double dz) {
  const std::size_t last = rows - 1;
  for (std::size_t i = 0; i < cols; ++i) {
    out[i] = (in[cols + i] - in[i]) / dz;
    out[last * cols + i] = (in[last * cols + i] - in[(last - 1) * cols + i]) / dz;
  }
  const double c = 0.5 / dz;
  for (std::size_t j = 1; j < last; ++j)
    for (std::size_t i = 0; i < cols; ++i) out[j * cols + i] = c * (in[(j + 1) * cols + i] - in[(j - 1) * cols + i]);
}

// Discrete L^2 product of two spectral fields: Parseval in x, trapezoid in z.
inline double h_inner(const Field& a, const Field& b) {
  const Grid& g = a.grid();
  const std::size_t nyquist = g.n_x / 2;
  double acc = 0.0;
  for (std::size_t j = 0; j < g.rows(); ++j) {
    const double wz = (j == 0 || j + 1 == g.rows()) ? 0.5 : 1.0;
    const auto ra = a.spectral_row(j);
    const auto rb = b.spectral_row(j);
    double row = 0.0;
    for (std::size_t k = 0; k < ra.size(); ++k)
      row += (k == 0 || k == nyquist ? 1.0 : 2.0) * (ra[k].real() * rb[k].real() + ra[k].imag() * rb[k].imag());
    acc += wz * row;
  }
  return acc * g.dz();
}

// H^{-1} D^T H y for D = dz_fd and H the trapezoid weights, on spectral rows.
inline Field dz_fd_adjoint(const Field& y) {
  const Grid& g = y.grid();
  const std::size_t cols = g.modes();
  const std::size_t last = g.rows() - 1;
  const double c = 1.0 / (2.0 * g.dz());
  auto w = [&](std::size_t j) { return (j == 0 || j == last) ? 0.5 : 1.0; };
  Field out(g, Representation::spectral);
  auto o = out.coefficients();
  const auto in = y.coefficients();
  for (std::size_t i = 0; i < cols; ++i) {
    const Field::complex y0 = w(0) * in[i];
    o[i] += -3.0 * c * y0;
    o[cols + i] += 4.0 * c * y0;
    o[2 * cols + i] += -c * y0;
    const Field::complex yn = w(last) * in[last * cols + i];
    o[(last - 2) * cols + i] += c * yn;
    o[(last - 1) * cols + i] += -4.0 * c * yn;
    o[last * cols + i] += 3.0 * c * yn;
  }
  for (std::size_t j = 1; j < last; ++j)
    for (std::size_t i = 0; i < cols; ++i) {
      const Field::complex yj = w(j) * in[j * cols + i];
      o[(j - 1) * cols + i] += -c * yj;
      o[(j + 1) * cols + i] += c * yj;
    }
  for (std::size_t j = 0; j <= last; ++j)
    for (std::size_t i = 0; i < cols; ++i) o[j * cols + i] /= w(j);
  return out;
}

// Removes from t its components along u and along H^{-1} D^T H D u, so that
// t is orthogonal to u and D t to D u in the discrete L^2 product.
inline void enforce_invariants(Field& t, const Field& u) {
  const Field v = remove_vertical_mean(dz_fd_adjoint(dz_fd(u)));
  const double uu = h_inner(u, u), uv = h_inner(u, v), vv = h_inner(v, v);
  const double tu = h_inner(t, u), tv = h_inner(t, v);
  const double det = uu * vv - uv * uv;
  if (det > 1e-12 * uu * vv) {
    const double a = (tu * vv - tv * uv) / det;
    const double b = (tv * uu - tu * uv) / det;
    Field cu = u;
    cu *= a;
    Field cv = v;
    cv *= b;
    t -= cu;
    t -= cv;
  } else if (uu > 0.0) {
    Field cu = u;
    cu *= tu / uu;
    t -= cu;
  }
}

}  // namespace detail

/// -P(u du/dx + w du/dz) for a spectral u; the stiff dissipation is excluded.
///
/// convective: the product form above, du/dz by dz_fd.
/// skew: 1/2 (u u_x + w u_z) + 1/2 ((u u)_x + (w u)_z) with the z-derivative
/// taken summation-by-parts; its discrete L^2 product with u vanishes.
/// conservative: skew, then corrected so that both ||u||^2 and ||dz_fd u||^2
/// are left unchanged, as the exact advection leaves them.
inline Field advective_tendency(const Field& u, AdvectionForm form = AdvectionForm::skew) {
  const Field us = u.to_spectral();
  const Grid& g = us.grid();
  // Derivatives and w are formed in spectral space and transformed once each.
  const Field ux_s = dx_spectral(us);
  Field w_s = vertical_cumint(ux_s);
  w_s *= -1.0;
  const Field up = us.to_physical();
  const Field ux = ux_s.to_physical();
  const Field wp = w_s.to_physical();
  Field n(g, Representation::physical, "advection");
  auto out = n.values();
  const auto a = up.values();
  const auto b = ux.values();
  const auto c = wp.values();
  Field t;
  if (form == AdvectionForm::convective) {
    const Field uz = dz_fd(us).to_physical();
    const auto d = uz.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i] + c[i] * d[i];
    t = n.to_spectral();
  } else {
    std::vector<double> uz(out.size()), wu(out.size()), wuz(out.size());
    detail::sbp_dz_rows(a, uz, g.rows(), g.n_x, g.dz());
    for (std::size_t i = 0; i < out.size(); ++i) wu[i] = c[i] * a[i];
    detail::sbp_dz_rows(wu, wuz, g.rows(), g.n_x, g.dz());
    Field uu(g, Representation::physical);
    auto q = uu.values();
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = 0.5 * (a[i] * b[i] + c[i] * uz[i] + wuz[i]);
      q[i] = 0.5 * a[i] * a[i];
    }
    t = n.to_spectral();
    t += dx_spectral(uu.to_spectral());
  }
  t = pressure_project(dealias(t));
  t *= -1.0;
  if (form == AdvectionForm::conservative) detail::enforce_invariants(t, us);
  return t;
}

/// Right-hand side of du/dt split into its advective part -P(N) and the
/// dissipation -nu Lambda^alpha u, which the stepper integrates exactly.
struct Tendency {
  Field advective;
  Field dissipative;
  Field total() const { return advective + dissipative; }
};

inline Tendency tendency(const State& s, const SimConfig& cfg) {
  const Field us = s.u.to_spectral();
  Tendency t;
  t.dissipative = fractional_power(us, cfg.alpha);
  t.dissipative *= -cfg.nu;
  if (cfg.nonlinear) {
    t.advective = advective_tendency(us, cfg.advection);
  } else {
    t.advective = Field(us.grid(), Representation::spectral, "advection");
  }
  return t;
}

namespace detail {

inline std::vector<double> decay_factors(const Grid& g, double alpha, double nu, double tau) {
  std::vector<double> e(g.modes());
  for (std::size_t k = 0; k < g.modes(); ++k) e[k] = std::exp(-nu * fractional_symbol(k, alpha) * tau);
  return e;
}

inline void scale_modes(Field& f, const std::vector<double>& factor) {
  const Grid& g = f.grid();
  for (std::size_t j = 0; j < g.rows(); ++j) {
    auto row = f.spectral_row(j);
    for (std::size_t k = 0; k < row.size(); ++k) row[k] *= factor[k];
  }
}

inline Field scaled(Field f, const std::vector<double>& factor) {
  scale_modes(f, factor);
  return f;
}

}  // namespace detail

/// Arguments of the four stage evaluations of the last step: u at the start,
/// two midpoint estimates and an end estimate. Used for high-order time
/// quadrature of the monitored integrals.
struct StepStages {
  Field start, mid1, mid2, end;
};

/// One step of classical RK4 in integrating-factor variables (Lawson form).
/// The dissipation enters only through exp(-nu |2 pi k|^alpha tau), so the
/// linear problem is advanced exactly. Returns the state in spectral form.
inline State step_ifrk4(const State& s, double dt, const SimConfig& cfg, StepStages* stages = nullptr) {
  if (!(dt >= 0.0)) throw DomainError("dt must be >= 0");
  State out{s.u.to_spectral(), s.t + dt, s.step_count + 1};
  if (dt == 0.0) {
    out.t = s.t;
    out.step_count = s.step_count;
    if (stages) *stages = {out.u, out.u, out.u, out.u};
    return out;
  }
  const Grid& g = out.u.grid();
  const auto full = detail::decay_factors(g, cfg.alpha, cfg.nu, dt);
  const auto half = detail::decay_factors(g, cfg.alpha, cfg.nu, 0.5 * dt);
  const Field u0 = out.u;

  if (!cfg.nonlinear) {
    detail::scale_modes(out.u, full);
    if (stages) {
      const Field mid = detail::scaled(u0, half);
      *stages = {u0, mid, mid, out.u};
    }
  } else {
    const Field k1 = advective_tendency(u0, cfg.advection);
    const Field u_half = detail::scaled(u0, half);
    const Field u_full = detail::scaled(u0, full);
    Field s2 = detail::scaled(u0 + (0.5 * dt) * k1, half);
    const Field k2 = advective_tendency(s2, cfg.advection);
    Field s3 = u_half + (0.5 * dt) * k2;
    const Field k3 = advective_tendency(s3, cfg.advection);
    Field s4 = u_full + dt * detail::scaled(k3, half);
    const Field k4 = advective_tendency(s4, cfg.advection);
    Field next = u_full;
    Field incr = detail::scaled(k1, full);
    incr += 2.0 * detail::scaled(k2 + k3, half);
    incr += k4;
    next += (dt / 6.0) * incr;
    out.u = std::move(next);
    if (stages) *stages = {u0, std::move(s2), std::move(s3), std::move(s4)};
  }
  out.u.set_role("u");
  if (!out.u.all_finite()) throw BlowupError("non-finite value at t = " + std::to_string(out.t));
  return out;
}

/// CFL time step safety * min(dx/max|u|, dz/max|w|), capped at dt_max.
inline double stable_dt(const State& s, const SimConfig& cfg) {
  const Grid& g = s.u.grid();
  const double umax = s.u.max_abs();
  const double wmax = recover_w(s.u).max_abs();
  double limit = cfg.dt_max;
  if (umax > 0.0) limit = std::min(limit, cfg.cfl_safety * g.dx() / umax);
  if (wmax > 0.0) limit = std::min(limit, cfg.cfl_safety * g.dz() / wmax);
  return limit;
}

}  // namespace hydrofrac
