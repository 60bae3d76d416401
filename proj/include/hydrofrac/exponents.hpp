#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "hydrofrac/error.hpp"
#include "hydrofrac/roots.hpp"

// Regularity-exponent calculus for the fractionally dissipated hydrostatic
// system: the closed-form exponents of the enhanced energy estimates, the
// alternating delta/rho bootstrap, its thresholds in alpha, and the
// admissible (rho, delta) region of the small-data argument.
//
// Naming: delta is the horizontal regularity index propagated for u, rho the
// one propagated for omega.

namespace hydrofrac::exponents {

// ---------------------------------------------------------------------------
// Closed forms in alpha

/// Largest delta reachable from the L^infinity bound on omega alone.
inline double delta1(double a) { return (2.0 * a * a - a) / 2.0; }

/// Lower bound on delta needed for the d_z omega estimate.
inline double delta_lower(double a) { return (-2.0 * a * a + 2.0 * a + 1.0) / a; }

inline double delta_star(double a) { return std::max(a / 2.0, delta_lower(a)); }

/// rho reachable with delta = delta1.
inline double rho1(double a) {
  return std::min((2.0 * a * a - a) / (8.0 - 4.0 * a), (2.0 * a * a + a - 2.0) / 4.0);
}

/// delta reachable once rho1 is available. Pole at alpha = (-1 + sqrt 33)/4.
inline double delta2(double a) {
  return a * (2.0 * a - 1.0) * (2.0 - a) / (2.0 * (4.0 - a - 2.0 * a * a));
}

/// The rho that puts omega into the Beale-Kato-Majda class.
inline double rho_star(double a) { return (3.0 - 2.0 * a) / 2.0; }

/// Smallest delta for which rho = rho_star satisfies the rho-condition.
inline double delta_dstar(double a) { return 2.0 * (-a * a - a + 3.0) / (3.0 - a); }

/// Minimal regularity index of u_0.
inline double delta_m(double a) { return std::max(a / 2.0, delta_dstar(a)); }

/// Upper fixed point limit of the bootstrap; defined iff 16 - 15 alpha^2 >= 0.
inline std::optional<double> rho_M(double a) {
  const double disc = 16.0 - 15.0 * a * a;
  if (disc < 0.0) return std::nullopt;
  return (4.0 - a - std::sqrt(disc)) / 8.0;
}

// ---------------------------------------------------------------------------
// Constraint maps

/// Upper bound on delta given rho (Gronwall condition of the u estimate).
inline double f_of_rho(double a, double rho) {
  if (rho >= 0.5) throw DomainError("f(rho) is undefined for rho >= 1/2");
  return (2.0 * a * a - a + 2.0 * rho * (a - 2.0)) / (2.0 * (1.0 - 2.0 * rho));
}

inline double g_first_branch(double a, double delta) {
  return a * (2.0 * a + 2.0 * delta - 1.0) / (2.0 * (a - 2.0 * delta + 4.0));
}
inline double g_second_branch(double a, double delta) { return (delta + a - 1.0) / 2.0; }

/// True when delta lies in [(2 - alpha)/2, 2 - alpha], where the first branch
/// is the smaller one. The endpoints belong to the first branch; both
/// formulas agree there.
inline bool g_uses_first_branch(double a, double delta) {
  return delta >= (2.0 - a) / 2.0 && delta <= 2.0 - a;
}

/// Largest rho admissible for a given delta.
inline double g_of_delta(double a, double delta) {
  if (g_uses_first_branch(a, delta)) return g_first_branch(a, delta);
  return g_second_branch(a, delta);
}

/// Inverse of g; the first branch covers rho in [alpha/4, 1/2].
inline double g_inverse(double a, double rho) {
  if (a + 2.0 * rho <= 0.0) throw DomainError("g_inverse needs alpha + 2 rho > 0");
  if (rho >= a / 4.0 && rho <= 0.5) return (a + 4.0) / 2.0 - 3.0 * a * (a + 1.0) / (2.0 * (a + 2.0 * rho));
  return 2.0 * rho - a + 1.0;
}

/// Lower bound on delta from the d_z omega estimate at a given rho.
inline double h_of_rho(double a, double rho) {
  if (2.0 * rho + a <= 0.0) throw DomainError("h(rho) needs 2 rho + alpha > 0");
  return a * (2.0 - a) / (2.0 * (2.0 * rho + a)) + (-3.0 * a * a + 2.0 * a + 2.0) / (2.0 * a);
}

// ---------------------------------------------------------------------------
// Interpolation exponents

struct ThetaMu {
  double theta11 = 0, theta12 = 0, theta21 = 0, theta22 = 0, theta32 = 0, theta33 = 0;
  std::array<double, 8> mu{};
  bool delta_window = false;  // alpha/2 <= delta < alpha + rho
  bool rho_window = false;    // alpha/4 <= rho < alpha
  bool windows_ok() const { return delta_window && rho_window; }
};

/// Interpolation exponents of the coupled (X, Y) estimate and the powers
/// mu_i of ||omega_0||_inf in each of the eight right-hand-side terms.
inline ThetaMu theta_mu(double a, double delta, double rho) {
  if (!(2.0 * rho + a > 0.0)) throw DomainError("theta_mu needs 2 rho + alpha > 0");
  ThetaMu t;
  t.theta12 = (2.0 * delta - a) / (2.0 * rho + a);
  t.theta11 = (2.0 - 2.0 * delta + t.theta12) / a;
  t.theta22 = (4.0 * rho - a) / (2.0 * rho + a);
  t.theta21 = (2.0 - 2.0 * delta + t.theta22) / a;
  t.theta32 = (2.0 - a) / (2.0 * rho + a);
  t.theta33 = (-2.0 * delta * a - a * a + 2.0 * a + 2.0) / (2.0 * a * a);
  t.mu = {1.0, 1.0, 1.0 - t.theta12, 1.0, 1.0, 1.0 - t.theta22, 1.0, (1.0 - t.theta32) / 2.0};
  t.delta_window = a / 2.0 <= delta && delta < a + rho;
  t.rho_window = a / 4.0 <= rho && rho < a;
  return t;
}

// ---------------------------------------------------------------------------
// Thresholds

struct Thresholds {
  double alpha0 = 0;       // root of 2a^3 + 3a^2 - 4a - 2: large-data threshold
  double alpha0_residual = 0;
  double alpha1 = 0;       // (13 - sqrt 73)/4: rho1 >= rho_star
  double alpha2 = 0;       // root of 6a^3 + 17a^2 - 70a + 48: rho2 >= rho_star
  double alpha2_residual = 0;
  double alpha_split = 0;  // 4/sqrt 15: bootstrap dichotomy
  double alpha_delta_m = 0;  // (-7 + sqrt 193)/6: delta_m = alpha/2 from here on
};

inline constexpr std::array<double, 4> alpha0_cubic{2.0, 3.0, -4.0, -2.0};
inline constexpr std::array<double, 4> alpha2_cubic{6.0, 17.0, -70.0, 48.0};

inline Thresholds compute_thresholds() {
  auto root = [](const std::array<double, 4>& c) {
    return bisect_newton([&](double x) { return polyval(c, x); },
                         [&](double x) { return polyder(c, x); }, 1.0, 1.2, 1e-6, 1e-13);
  };
  Thresholds t;
  const RootResult r0 = root(alpha0_cubic);
  const RootResult r2 = root(alpha2_cubic);
  t.alpha0 = r0.root;
  t.alpha0_residual = r0.residual;
  t.alpha2 = r2.root;
  t.alpha2_residual = r2.residual;
  t.alpha1 = (13.0 - std::sqrt(73.0)) / 4.0;
  t.alpha_split = 4.0 / std::sqrt(15.0);
  t.alpha_delta_m = (-7.0 + std::sqrt(193.0)) / 6.0;
  return t;
}

/// Computed once and cached.
inline const Thresholds& find_thresholds() {
  static const Thresholds t = compute_thresholds();
  return t;
}

// ---------------------------------------------------------------------------
// Bootstrap

struct BootstrapTrace {
  enum class Verdict { reaches_rho_star, converges_to_rho_M };
  double alpha = 0;
  std::vector<double> rho;    // rho_0 = 0, rho_1, ...
  std::vector<double> delta;  // delta_{k+1} = f(rho_k)
  Verdict verdict = Verdict::converges_to_rho_M;
  int steps = 0;            // iterations performed
  double limit = 0;         // last rho when converged
  bool hit_pole = false;    // denominator 2 - alpha - 2 rho_k reached zero
  bool hit_cap = false;     // stopped by the iteration cap
};

inline constexpr double bootstrap_tolerance = 1e-14;
inline constexpr int bootstrap_max_iterations = 100000;

/// One step of the composed map rho -> g(f(rho)) on the first branch of g.
inline double bootstrap_map(double a, double rho) {
  return a * (2.0 * a - 1.0 - 2.0 * rho) / (4.0 * (2.0 - a - 2.0 * rho));
}

inline BootstrapTrace bootstrap(double a) {
  BootstrapTrace tr;
  tr.alpha = a;
  const double target = rho_star(a);
  double rho = 0.0;
  tr.rho.push_back(rho);
  if (rho >= target) {
    tr.verdict = BootstrapTrace::Verdict::reaches_rho_star;
    return tr;
  }
  for (int k = 0; k < bootstrap_max_iterations; ++k) {
    if (2.0 - a - 2.0 * rho <= 0.0) {
      tr.hit_pole = true;
      tr.verdict = BootstrapTrace::Verdict::reaches_rho_star;
      return tr;
    }
    tr.delta.push_back(rho < 0.5 ? f_of_rho(a, rho) : std::numeric_limits<double>::infinity());
    const double next = bootstrap_map(a, rho);
    tr.rho.push_back(next);
    tr.steps = k + 1;
    if (next >= target) {
      tr.verdict = BootstrapTrace::Verdict::reaches_rho_star;
      return tr;
    }
    if (std::abs(next - rho) < bootstrap_tolerance) {
      tr.verdict = BootstrapTrace::Verdict::converges_to_rho_M;
      tr.limit = next;
      return tr;
    }
    rho = next;
  }
  tr.hit_cap = true;
  tr.verdict = BootstrapTrace::Verdict::converges_to_rho_M;
  tr.limit = rho;
  return tr;
}

inline const char* to_string(BootstrapTrace::Verdict v) {
  return v == BootstrapTrace::Verdict::reaches_rho_star ? "reaches_rho_star" : "converges_to_rho_M";
}

// ---------------------------------------------------------------------------
// Report

struct ExponentReport {
  double alpha = 0;
  std::optional<double> delta1, delta_star, delta2, delta_dstar, delta_m;
  std::optional<double> rho_star, rho1, rho2, rho_M;
  Thresholds thresholds;

  bool in_window = false;          // 1 <= alpha <= 6/5
  bool global_regularity = false;  // alpha >= alpha0: any data
  bool one_step = false;           // alpha >= alpha1: rho1 already reaches rho_star
  bool small_data = false;         // 1 <= alpha < alpha0: small ||omega_0||_inf
  bool critical = false;           // alpha == 1
};

/// Every closed form at alpha. Fields outside their domain are left empty.
inline ExponentReport exponent_table(double a) {
  ExponentReport r;
  r.alpha = a;
  r.thresholds = find_thresholds();
  r.in_window = a >= 1.0 && a <= 1.2;
  r.critical = a == 1.0;
  r.global_regularity = a >= r.thresholds.alpha0 && a <= 2.0;
  r.one_step = a >= r.thresholds.alpha1 && a <= 2.0;
  r.small_data = a >= 1.0 && a < r.thresholds.alpha0;
  if (!r.in_window) return r;
  r.delta1 = delta1(a);
  r.delta_star = delta_star(a);
  r.rho1 = rho1(a);
  r.rho_star = rho_star(a);
  r.delta_dstar = delta_dstar(a);
  r.delta_m = delta_m(a);
  r.rho_M = rho_M(a);
  if (4.0 - a - 2.0 * a * a > 0.0) {
    r.delta2 = delta2(a);
    r.rho2 = g_of_delta(a, *r.delta2);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Admissible region of the small-data argument

enum class UpperBound {
  alpha_half,  // delta <= h(rho) + alpha/2, as derived from the J_2 term
  rho_half,    // delta <= h(rho) + rho/2, as listed in the collected conditions
};

struct RegionCheck {
  bool f_ok = false;       // delta <= f(rho); waived at alpha = 1
  bool ginv_ok = false;    // delta >= g^{-1}(rho)
  bool h_lower_ok = false; // delta >= h(rho)
  bool h_upper_ok = false; // delta <= h(rho) + alpha/2 (or rho/2)
  bool delta_window = false;
  bool rho_window = false;
  bool critical = false;
  bool admissible() const {
    return f_ok && ginv_ok && h_lower_ok && h_upper_ok && delta_window && rho_window;
  }
};

namespace detail {
// Boundary points such as (rho_star, delta_dstar) sit exactly on
// delta = g^{-1}(rho); comparisons allow for rounding.
inline bool leq(double x, double y) {
  return x <= y + 1e-12 * std::max({1.0, std::abs(x), std::abs(y)});
}
}  // namespace detail

inline RegionCheck check_admissible(double a, double rho, double delta,
                                    UpperBound upper = UpperBound::alpha_half) {
  using detail::leq;
  RegionCheck c;
  c.critical = a == 1.0;
  if (c.critical)
    c.f_ok = true;  // the U_22 term is bounded directly with mu_3 = 1/2
  else
    c.f_ok = rho < 0.5 && leq(delta, f_of_rho(a, rho));
  c.ginv_ok = a + 2.0 * rho > 0.0 && leq(g_inverse(a, rho), delta);
  if (2.0 * rho + a > 0.0) {
    const double h = h_of_rho(a, rho);
    c.h_lower_ok = leq(h, delta);
    c.h_upper_ok = leq(delta, h + (upper == UpperBound::alpha_half ? a / 2.0 : rho / 2.0));
  }
  c.delta_window = leq(a / 2.0, delta) && delta < a + rho;
  c.rho_window = leq(a / 4.0, rho) && rho < a;
  return c;
}

struct RegionSample {
  double alpha = 0;
  std::vector<double> rho;    // one entry per grid point, row-major in delta
  std::vector<double> delta;
  std::vector<bool> admissible;
  double optimal_rho = 0;     // (rho_star, delta_dstar)
  double optimal_delta = 0;
  bool optimal_admissible = false;
  std::size_t count() const {
    return static_cast<std::size_t>(std::count(admissible.begin(), admissible.end(), true));
  }
};

struct RegionBox {
  double rho_lo = 0.0, rho_hi = 0.6;
  double delta_lo = 0.0, delta_hi = 1.6;
};

/// Rasterizes the admissible set on a resolution x resolution node grid.
inline RegionSample sample_region(double a, std::size_t resolution,
                                  UpperBound upper = UpperBound::alpha_half, RegionBox box = {}) {
  if (resolution < 2) throw DomainError("region resolution must be >= 2");
  RegionSample s;
  s.alpha = a;
  const std::size_t n = resolution;
  s.rho.reserve(n * n);
  s.delta.reserve(n * n);
  s.admissible.reserve(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    const double d = box.delta_lo + (box.delta_hi - box.delta_lo) * static_cast<double>(j) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      const double r = box.rho_lo + (box.rho_hi - box.rho_lo) * static_cast<double>(i) / static_cast<double>(n - 1);
      s.rho.push_back(r);
      s.delta.push_back(d);
      s.admissible.push_back(check_admissible(a, r, d, upper).admissible());
    }
  }
  s.optimal_rho = rho_star(a);
  s.optimal_delta = delta_dstar(a);
  s.optimal_admissible = check_admissible(a, s.optimal_rho, s.optimal_delta, upper).admissible();
  return s;
}

// ---------------------------------------------------------------------------
// Smallness constant

/// c = min_i (nu / (16 C_i))^{1/mu_i} X_0^{-(1 - mu_i)/(2 mu_i)}.
inline double smallness_constant(double nu, double x0, const std::array<double, 8>& c,
                                 const std::array<double, 8>& mu) {
  if (!(nu > 0.0)) throw DomainError("nu must be > 0");
  if (!(x0 > 0.0)) throw DomainError("X_0 must be > 0");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < 8; ++i) {
    if (!(c[i] > 0.0)) throw DomainError("C_" + std::to_string(i + 1) + " must be > 0");
    if (!(mu[i] > 0.0 && mu[i] <= 1.0)) throw DomainError("mu_" + std::to_string(i + 1) + " must lie in (0, 1]");
    const double term = std::pow(nu / (16.0 * c[i]), 1.0 / mu[i]) * std::pow(x0, -(1.0 - mu[i]) / (2.0 * mu[i]));
    best = std::min(best, term);
  }
  return best;
}

}  // namespace hydrofrac::exponents
