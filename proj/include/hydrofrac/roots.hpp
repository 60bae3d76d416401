#pragma once

#include <cmath>
#include <concepts>
#include <span>

#include "hydrofrac/error.hpp"

namespace hydrofrac {

/// Horner evaluation; coefficients from highest degree down.
inline double polyval(std::span<const double> coeffs, double x) {
  double acc = 0.0;
  for (double c : coeffs) acc = acc * x + c;
  return acc;
}

inline double polyder(std::span<const double> coeffs, double x) {
  double acc = 0.0;
  const auto n = coeffs.size();
  for (std::size_t i = 0; i + 1 < n; ++i)
    acc = acc * x + coeffs[i] * static_cast<double>(n - 1 - i);
  return acc;
}

struct RootResult {
  double root = 0.0;
  double residual = 0.0;
  int bisections = 0;
  int newton_steps = 0;
};

/// Bracketed root: bisection until the bracket is narrower than
/// `bracket_tol`, then Newton polish (kept inside the bracket) until
/// |f| < `residual_tol` or the iterate stops moving.
template <class F, class DF>
  requires std::invocable<F, double> && std::invocable<DF, double>
RootResult bisect_newton(F f, DF df, double lo, double hi, double bracket_tol = 1e-6,
                         double residual_tol = 1e-13) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return {lo, 0.0, 0, 0};
  if (fhi == 0.0) return {hi, 0.0, 0, 0};
  if ((flo < 0.0) == (fhi < 0.0)) throw DomainError("root is not bracketed");

  RootResult r;
  while (hi - lo > bracket_tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    ++r.bisections;
    if (fm == 0.0) return {mid, 0.0, r.bisections, 0};
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  double fx = f(x);
  for (int it = 0; it < 50 && std::abs(fx) >= residual_tol; ++it) {
    const double d = df(x);
    if (d == 0.0) break;
    double next = x - fx / d;
    if (next <= lo || next >= hi) next = 0.5 * (lo + hi);
    ++r.newton_steps;
    const double fn = f(next);
    if ((fn < 0.0) == (flo < 0.0)) lo = next; else hi = next;
    if (next == x) break;
    x = next;
    fx = fn;
  }
  r.root = x;
  r.residual = std::abs(fx);
  return r;
}

}  // namespace hydrofrac
