#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "hydrofrac/dynamics.hpp"
#include "hydrofrac/exponents.hpp"

namespace hydrofrac {

// ---------------------------------------------------------------------------
// Norms

/// Per-wavenumber energy sum_z w_z |c_k(z)|^2 times the Parseval weight, so
/// that summing over k gives the squared L^2 norm on the unit cell.
inline std::vector<double> mode_energy(const Field& f) {
  const Field s = f.to_spectral();
  const Grid& g = s.grid();
  std::vector<double> e(g.modes(), 0.0);
  const double dz = g.dz();
  const std::size_t nyquist = g.n_x / 2;
  for (std::size_t j = 0; j < g.rows(); ++j) {
    const double wz = (j == 0 || j + 1 == g.rows()) ? 0.5 * dz : dz;
    const auto row = s.spectral_row(j);
    for (std::size_t k = 0; k < row.size(); ++k) e[k] += wz * std::norm(row[k]);
  }
  for (std::size_t k = 0; k < e.size(); ++k)
    if (k != 0 && k != nyquist) e[k] *= 2.0;
  return e;
}

/// Weight of mode k in ||Lambda^s f||^2. Lambda^0 is the identity.
inline double sobolev_weight(std::size_t k, double s) {
  if (s == 0.0) return 1.0;
  return std::pow(Grid::angular(k), 2.0 * s) * (k == 0 ? 0.0 : 1.0);
}

inline double sobolev_x_norm_sq(std::span<const double> energy, double s) {
  double acc = 0.0;
  for (std::size_t k = 0; k < energy.size(); ++k) acc += sobolev_weight(k, s) * energy[k];
  return acc;
}

inline double l2_norm(const Field& f) {
  const auto e = mode_energy(f);
  return std::sqrt(sobolev_x_norm_sq(e, 0.0));
}

inline double linf_norm(const Field& f) { return f.to_physical().max_abs(); }

/// ||Lambda_h^s f||_{L^2}: exact Fourier sum in x, trapezoid in z.
inline double sobolev_x_norm(const Field& f, double s) {
  if (!(s >= 0.0)) throw DomainError("Sobolev exponent must be >= 0");
  const auto e = mode_energy(f);
  return std::sqrt(sobolev_x_norm_sq(e, s));
}

// ---------------------------------------------------------------------------
// Time integration of the accumulators

/// Logarithmic mean (a - b)/(ln a - ln b). Integrating a per-mode rate by
/// dt * L(a, b) is exact when the rate decays exponentially over the step.
inline double log_mean(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) return 0.5 * (a + b);
  const double e = b / a - 1.0;
  if (std::abs(e) < 1e-4) return a * (1.0 + e * (0.5 + e * (-1.0 / 12.0 + e / 24.0)));
  return (a - b) / (std::log(a) - std::log(b));
}

/// Per-mode integrand samples of one state, for the three accumulators.
struct RateSample {
  std::vector<double> diss_u;      // 2 nu |2 pi k|^alpha |u_k|^2
  std::vector<double> diss_omega;  // 2 nu |2 pi k|^alpha |omega_k|^2
  std::vector<double> bkm;         // |2 pi k|^{3 - alpha} |omega_k|^2
};

inline RateSample rate_sample(const std::vector<double>& eu, const std::vector<double>& ew,
                              double alpha, double nu) {
  RateSample r;
  const std::size_t n = eu.size();
  r.diss_u.resize(n);
  r.diss_omega.resize(n);
  r.bkm.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double d = 2.0 * nu * sobolev_weight(k, alpha / 2.0) * (k == 0 ? 0.0 : 1.0);
    r.diss_u[k] = d * eu[k];
    r.diss_omega[k] = d * ew[k];
    r.bkm[k] = sobolev_weight(k, (3.0 - alpha) / 2.0) * (k == 0 ? 0.0 : 1.0) * ew[k];
  }
  return r;
}

inline double integrate_step(const std::vector<double>& a, const std::vector<double>& b, double dt) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += log_mean(a[k], b[k]);
  return dt * acc;
}

/// Weights (in units of h) of the rule on nodes 0, h/2, h that is exact for
/// exp(-beta s) times any quadratic; x = beta h, intended for x <= 1.
inline std::array<double, 3> fitted_simpson_weights(double x) {
  // m_n = int_0^1 tau^n exp(-x tau) dtau, by its series.
  std::array<double, 3> m{};
  double term = 1.0;
  for (int j = 0; j < 40; ++j) {
    for (int n = 0; n < 3; ++n) m[n] += term / static_cast<double>(n + j + 1);
    term *= -x / static_cast<double>(j + 1);
  }
  return {m[0] - 3.0 * m[1] + 2.0 * m[2], std::exp(0.5 * x) * (4.0 * m[1] - 4.0 * m[2]),
          std::exp(x) * (2.0 * m[2] - m[1])};
}

/// Integral over one step of per-mode rates sampled at the start, the
/// midpoint and the end. Modes whose linear decay rate beta_k is slow on the
/// step use the fitted rule; stiff ones fall back to the logarithmic mean.
inline double integrate_step(const std::vector<double>& f0, const std::vector<double>& fm,
                             const std::vector<double>& f1, const std::vector<double>& beta,
                             double dt) {
  double acc = 0.0;
  for (std::size_t k = 0; k < f0.size(); ++k) {
    const double x = beta[k] * dt;
    if (x <= 1.0) {
      const auto w = fitted_simpson_weights(x);
      acc += w[0] * f0[k] + w[1] * fm[k] + w[2] * f1[k];
    } else {
      acc += log_mean(f0[k], f1[k]);
    }
  }
  return dt * acc;
}

// ---------------------------------------------------------------------------
// Records

struct DiagnosticsRecord {
  double t = 0;
  double energy_u = 0;
  double diss_u_accum = 0;
  double budget_residual_u = 0;
  double energy_omega = 0;
  double diss_omega_accum = 0;
  double budget_residual_omega = 0;
  double omega_linf = 0;
  double omega_z_l2 = 0;
  double bkm_accum = 0;
  double X = 0;
  double Y = 0;
  double max_principle_margin = 0;
  // Structural checks, not part of the CSV.
  double mean_defect = 0;  // max_x |vertical mean of u|
  double w_bottom = 0;     // max_x |w(x, 0)|
  double w_top = 0;        // max_x |w(x, 1)|
  double ux_max = 0;       // max |du/dx|
};

/// (delta, rho) used by X and Y. Defaults to (delta_dstar, rho_star); both
/// are clamped at 0 where the closed forms go negative (alpha > 3/2).
inline std::pair<double, double> xy_exponents(const SimConfig& cfg) {
  const double d = cfg.delta.value_or(std::max(0.0, exponents::delta_dstar(cfg.alpha)));
  const double r = cfg.rho.value_or(std::max(0.0, exponents::rho_star(cfg.alpha)));
  return {d, r};
}

namespace detail {
inline double xy_part(std::span<const double> eu, std::span<const double> ew,
                      std::span<const double> ewz, double d, double r, double shift) {
  return sobolev_x_norm_sq(eu, d + shift) + sobolev_x_norm_sq(ew, r + shift) +
         sobolev_x_norm_sq(ewz, shift);
}
}  // namespace detail

/// X = |L^d u|^2 + |L^r w|^2 + |dz w|^2 and Y the same with a/2 added to
/// every exponent (w = omega, L = Lambda_h).
inline std::pair<double, double> xy_functionals(const State& s, const SimConfig& cfg) {
  const auto [d, r] = xy_exponents(cfg);
  const Field u = s.u.to_spectral();
  const Field w = dz_fd(u);
  const auto eu = mode_energy(u);
  const auto ew = mode_energy(w);
  const auto ewz = mode_energy(dz_fd(w));
  return {detail::xy_part(eu, ew, ewz, d, r, 0.0), detail::xy_part(eu, ew, ewz, d, r, cfg.alpha / 2.0)};
}

enum class BlowupVerdict { proceed, non_finite, vorticity_growth };

inline const char* to_string(BlowupVerdict v) {
  switch (v) {
    case BlowupVerdict::proceed: return "proceed";
    case BlowupVerdict::non_finite: return "non-finite values";
    case BlowupVerdict::vorticity_growth: return "vorticity growth beyond threshold";
  }
  return "?";
}

/// Halts on non-finite values or ||omega||_inf > factor * ||omega_0||_inf.
inline BlowupVerdict blowup_check(double omega_linf, double omega0_linf, bool finite,
                                  double factor) {
  if (!finite || !std::isfinite(omega_linf)) return BlowupVerdict::non_finite;
  if (omega_linf > factor * omega0_linf && omega_linf > 0.0) return BlowupVerdict::vorticity_growth;
  return BlowupVerdict::proceed;
}

inline BlowupVerdict blowup_check(const State& s, const SimConfig& cfg, double omega0_linf) {
  if (!s.u.all_finite()) return BlowupVerdict::non_finite;
  return blowup_check(linf_norm(vorticity(s.u)), omega0_linf, true, cfg.blowup_factor);
}

/// Streams the monitored quantities along a run. advance() must see every
/// solver step so the accumulators integrate per step; record() snapshots.
class Monitor {
 public:
  Monitor(const SimConfig& cfg, const State& initial) : cfg_(cfg) {
    const Grid& g = initial.u.grid();
    beta_.resize(g.modes());
    for (std::size_t k = 0; k < g.modes(); ++k) beta_[k] = 2.0 * cfg.nu * detail::fractional_symbol(k, cfg.alpha);
    sample(initial);
    e0_u_ = energy_u_;
    e0_omega_ = energy_omega_;
    omega0_linf_ = linf_norm(vorticity(initial.u));
    t_ = initial.t;
  }

  /// Integrates over the step that ended in `s` from the start and end samples.
  void advance(const State& s) {
    const RateSample prev = rates_;
    sample(s);
    const double dt = s.t - t_;
    diss_u_ += integrate_step(prev.diss_u, rates_.diss_u, dt);
    diss_omega_ += integrate_step(prev.diss_omega, rates_.diss_omega, dt);
    bkm_ += integrate_step(prev.bkm, rates_.bkm, dt);
    t_ = s.t;
  }

  /// Same, using the stage states of the step for a high-order rule.
  void advance(const State& s, const StepStages& st) {
    const double dt = s.t - t_;
    const RateSample a = rates_;
    const RateSample m1 = rates_of(st.mid1);
    const RateSample m2 = rates_of(st.mid2);
    const RateSample b = rates_of(st.end);
    auto mid = [](const std::vector<double>& p, const std::vector<double>& q) {
      std::vector<double> r(p.size());
      for (std::size_t k = 0; k < p.size(); ++k) r[k] = 0.5 * (p[k] + q[k]);
      return r;
    };
    diss_u_ += integrate_step(a.diss_u, mid(m1.diss_u, m2.diss_u), b.diss_u, beta_, dt);
    diss_omega_ += integrate_step(a.diss_omega, mid(m1.diss_omega, m2.diss_omega), b.diss_omega, beta_, dt);
    bkm_ += integrate_step(a.bkm, mid(m1.bkm, m2.bkm), b.bkm, beta_, dt);
    sample(s);
    t_ = s.t;
  }

  DiagnosticsRecord record(const State& s) const {
    DiagnosticsRecord r;
    r.t = s.t;
    r.energy_u = energy_u_;
    r.diss_u_accum = diss_u_;
    r.budget_residual_u = energy_u_ + diss_u_ - e0_u_;
    r.energy_omega = energy_omega_;
    r.diss_omega_accum = diss_omega_;
    r.budget_residual_omega = energy_omega_ + diss_omega_ - e0_omega_;
    r.bkm_accum = bkm_;

    const Field u = s.u.to_spectral();
    const Field omega = dz_fd(u);
    r.omega_linf = linf_norm(omega);
    const auto ewz = mode_energy(dz_fd(omega));
    r.omega_z_l2 = std::sqrt(sobolev_x_norm_sq(ewz, 0.0));
    const auto [d, rho] = xy_exponents(cfg_);
    r.X = detail::xy_part(eu_, ew_, ewz, d, rho, 0.0);
    r.Y = detail::xy_part(eu_, ew_, ewz, d, rho, cfg_.alpha / 2.0);
    r.max_principle_margin = omega0_linf_ * (1.0 + cfg_.max_principle_tol) - r.omega_linf;

    r.mean_defect = max_vertical_mean(u);
    const Field ux = dx_spectral(u).to_physical();
    r.ux_max = ux.max_abs();
    const Field w = recover_w(u).to_physical();
    const Grid& g = u.grid();
    for (double v : w.row(0)) r.w_bottom = std::max(r.w_bottom, std::abs(v));
    for (double v : w.row(g.rows() - 1)) r.w_top = std::max(r.w_top, std::abs(v));
    return r;
  }

  double initial_energy_u() const { return e0_u_; }
  double initial_energy_omega() const { return e0_omega_; }
  double initial_omega_linf() const { return omega0_linf_; }

 private:
  RateSample rates_of(const Field& f) const {
    const Field u = f.to_spectral();
    return rate_sample(mode_energy(u), mode_energy(dz_fd(u)), cfg_.alpha, cfg_.nu);
  }

  void sample(const State& s) {
    const Field u = s.u.to_spectral();
    eu_ = mode_energy(u);
    ew_ = mode_energy(dz_fd(u));
    energy_u_ = sobolev_x_norm_sq(eu_, 0.0);
    energy_omega_ = sobolev_x_norm_sq(ew_, 0.0);
    rates_ = rate_sample(eu_, ew_, cfg_.alpha, cfg_.nu);
  }

  SimConfig cfg_;
  std::vector<double> eu_, ew_, beta_;
  RateSample rates_;
  double energy_u_ = 0, energy_omega_ = 0;
  double e0_u_ = 0, e0_omega_ = 0, omega0_linf_ = 0;
  double diss_u_ = 0, diss_omega_ = 0, bkm_ = 0;
  double t_ = 0;
};

// ---------------------------------------------------------------------------
// Record-stream reductions

struct BudgetResiduals {
  std::vector<double> u, omega;
  double max_abs_u = 0, max_abs_omega = 0;
  double max_u = -std::numeric_limits<double>::infinity();
  double max_omega = -std::numeric_limits<double>::infinity();
};

inline BudgetResiduals energy_budget(std::span<const DiagnosticsRecord> records) {
  BudgetResiduals b;
  for (const auto& r : records) {
    b.u.push_back(r.budget_residual_u);
    b.omega.push_back(r.budget_residual_omega);
    b.max_abs_u = std::max(b.max_abs_u, std::abs(r.budget_residual_u));
    b.max_abs_omega = std::max(b.max_abs_omega, std::abs(r.budget_residual_omega));
    b.max_u = std::max(b.max_u, r.budget_residual_u);
    b.max_omega = std::max(b.max_omega, r.budget_residual_omega);
  }
  return b;
}

/// Inequality form of the L^2 bounds: residual <= tol * initial energy.
inline bool budget_holds(std::span<const DiagnosticsRecord> records, double tol) {
  if (records.empty()) return true;
  const double eu = records.front().energy_u;
  const double ew = records.front().energy_omega;
  for (const auto& r : records)
    if (r.budget_residual_u > tol * eu || r.budget_residual_omega > tol * ew) return false;
  return true;
}

inline double max_principle_margin(std::span<const DiagnosticsRecord> records) {
  if (records.empty()) return 0.0;
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : records) m = std::min(m, r.max_principle_margin);
  return m;
}

inline double bkm_integral(std::span<const DiagnosticsRecord> records) {
  return records.empty() ? 0.0 : records.back().bkm_accum;
}

/// True when every accumulator column is nondecreasing in t.
inline bool accumulators_monotone(std::span<const DiagnosticsRecord> records) {
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& a = records[i - 1];
    const auto& b = records[i];
    if (b.diss_u_accum < a.diss_u_accum || b.diss_omega_accum < a.diss_omega_accum ||
        b.bkm_accum < a.bkm_accum)
      return false;
  }
  return true;
}

/// Measured Poincare constant max|f| / max|dz f| of a zero-mean field.
inline double poincare_ratio(const Field& f) {
  const double d = dz_fd(f).to_physical().max_abs();
  return d > 0.0 ? linf_norm(f) / d : 0.0;
}

}  // namespace hydrofrac
