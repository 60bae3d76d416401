#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hydrofrac/simulation.hpp"

using namespace hydrofrac;
using std::numbers::pi;

namespace {

SimConfig linear_config(double alpha) {
  SimConfig c;
  c.alpha = alpha;
  c.nu = 0.1;
  c.n_x = 32;
  c.n_z = 64;
  c.t_end = 1.0;
  c.nonlinear = false;
  c.initial_data = parse_preset("single_mode(1, linear)");
  return c;
}

// ||Lambda^s f||^2 on row j only.
double slice_norm_sq(const Field& f, std::size_t j, double s) {
  const auto row = f.spectral_row(j);
  const std::size_t nyq = f.grid().n_x / 2;
  double acc = 0.0;
  for (std::size_t k = 1; k < row.size(); ++k)
    acc += (k == nyq ? 1.0 : 2.0) * sobolev_weight(k, s) * std::norm(row[k]);
  return acc;
}

}  // namespace

TEST(Norms, SobolevExamples) {
  const Grid g(32, 8);
  const Field c1 = Field::sample(g, [](double x, double) { return std::cos(2 * pi * x); });
  EXPECT_NEAR(sobolev_x_norm(c1, 0.5), 1.7724538509055160273, 1e-13);
  const Field c12 = Field::sample(g, [](double x, double) { return std::cos(2 * pi * x) + std::cos(4 * pi * x); });
  EXPECT_NEAR(sobolev_x_norm(c12, 1.0), 9.9345882657961012344, 1e-12);
  EXPECT_EQ(sobolev_x_norm(Field(g, Representation::physical), 1.3), 0.0);
  EXPECT_THROW(sobolev_x_norm(c1, -0.1), DomainError);
}

TEST(Norms, ZeroOrderIsL2) {
  const Grid g(32, 16);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(-1, 1);
  Field f(g, Representation::physical);
  for (double& v : f.values()) v = U(rng);
  EXPECT_DOUBLE_EQ(sobolev_x_norm(f, 0.0), l2_norm(f));
  // Parseval against the direct trapezoid sum.
  double direct = 0.0;
  for (std::size_t j = 0; j < g.rows(); ++j) {
    const double w = (j == 0 || j + 1 == g.rows()) ? 0.5 : 1.0;
    for (std::size_t i = 0; i < g.n_x; ++i) direct += w * f.at(j, i) * f.at(j, i);
  }
  direct *= g.dx() * g.dz();
  EXPECT_NEAR(l2_norm(f) * l2_norm(f), direct, 1e-13 * direct);
  EXPECT_EQ(linf_norm(f), f.max_abs());
}

TEST(Norms, InterpolationInequality) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> U(-1, 1);
  std::uniform_real_distribution<double> S(0.0, 3.0);
  const Grid g(64, 8);
  double min_slack = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 100; ++trial) {
    Field f(g, Representation::spectral);
    const long kmax = 2 + trial % 20;
    for (std::size_t j = 0; j < g.rows(); ++j)
      for (long k = 1; k <= kmax; ++k) f.mode(j, static_cast<std::size_t>(k)) = {U(rng), U(rng)};
    double s1 = S(rng), s2 = S(rng);
    if (s1 > s2) std::swap(s1, s2);
    s2 += 0.05;
    const double theta = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
    const double s = (1 - theta) * s1 + theta * s2;
    const double lhs = sobolev_x_norm(f, s);
    const double rhs = std::pow(sobolev_x_norm(f, s1), 1 - theta) * std::pow(sobolev_x_norm(f, s2), theta);
    EXPECT_LT(lhs, rhs);
    min_slack = std::min(min_slack, (rhs - lhs) / rhs);
    for (std::size_t j = 0; j < g.rows(); ++j) {
      const double l = std::sqrt(slice_norm_sq(f, j, s));
      const double r = std::pow(slice_norm_sq(f, j, s1), (1 - theta) / 2) * std::pow(slice_norm_sq(f, j, s2), theta / 2);
      EXPECT_LT(l, r);
    }
  }
  RecordProperty("min_relative_slack", std::to_string(min_slack));
  EXPECT_GT(min_slack, 0.0);
}

TEST(Quadrature, LogMean) {
  EXPECT_DOUBLE_EQ(log_mean(2.0, 2.0), 2.0);
  EXPECT_NEAR(log_mean(std::exp(1.0), 1.0), std::exp(1.0) - 1.0, 1e-15);
  EXPECT_EQ(log_mean(0.0, 1.0), 0.5);
  EXPECT_NEAR(log_mean(1.0, 1.0 + 1e-6), 1e-6 / std::log1p(1e-6), 1e-15);
}

TEST(Quadrature, FittedWeightsReduceToSimpson) {
  const auto w = fitted_simpson_weights(0.0);
  EXPECT_NEAR(w[0], 1.0 / 6, 1e-15);
  EXPECT_NEAR(w[1], 4.0 / 6, 1e-15);
  EXPECT_NEAR(w[2], 1.0 / 6, 1e-15);
}

TEST(Quadrature, FittedRuleExactForDecayingQuadratic) {
  for (double beta : {0.0, 3.0, 40.0}) {
    const double h = 0.02;
    auto f = [&](double s) { return std::exp(-beta * s) * (1.0 + 2.0 * s - 30.0 * s * s); };
    // Exact integral of exp(-b s)(1 + 2 s - 30 s^2) over [0, h], by fine Simpson.
    double exact = 0.0;
    const int n = 2000;
    for (int i = 0; i < n; ++i) {
      const double a = h * i / n, b = h * (i + 1) / n;
      exact += (b - a) / 6 * (f(a) + 4 * f(0.5 * (a + b)) + f(b));
    }
    const double got = integrate_step({f(0)}, {f(h / 2)}, {f(h)}, {beta}, h);
    EXPECT_NEAR(got, exact, 1e-14 * std::abs(exact)) << beta;
  }
}

TEST(Functionals, XYOracleSingleMode) {
  SimConfig c = linear_config(1.0);
  c.rho = 0.5;
  c.delta = 1.0;
  const State s = initial_state(c);
  const auto [X, Y] = xy_functionals(s, c);
  EXPECT_NEAR(X, 4.7873299109003479105, 1e-12);
  EXPECT_NEAR(Y, 30.079680956790424845, 1e-11);
  Monitor m(c, s);
  const auto rec = m.record(s);
  EXPECT_NEAR(rec.X, X, 1e-14);
  EXPECT_NEAR(rec.Y, Y, 1e-13);
  EXPECT_NEAR(rec.energy_u, 0.5 * 683.0 / 8192.0, 1e-16);
}

TEST(Functionals, DefaultExponents) {
  SimConfig c = linear_config(1.05);
  const auto [d, r] = xy_exponents(c);
  EXPECT_DOUBLE_EQ(d, exponents::delta_dstar(1.05));
  EXPECT_DOUBLE_EQ(r, exponents::rho_star(1.05));
  c.alpha = 1.8;
  const auto [d2, r2] = xy_exponents(c);
  EXPECT_EQ(r2, 0.0);
  EXPECT_GE(d2, 0.0);
}

TEST(Blowup, Verdicts) {
  EXPECT_EQ(blowup_check(1.0, 1.0, true, 1e6), BlowupVerdict::proceed);
  EXPECT_EQ(blowup_check(2e6, 1.0, true, 1e6), BlowupVerdict::vorticity_growth);
  EXPECT_EQ(blowup_check(1.0, 1.0, false, 1e6), BlowupVerdict::non_finite);
  EXPECT_EQ(blowup_check(std::numeric_limits<double>::infinity(), 1.0, true, 1e6), BlowupVerdict::non_finite);
  EXPECT_EQ(blowup_check(0.0, 0.0, true, 1e6), BlowupVerdict::proceed);
}

TEST(Blowup, FactorMustExceedOne) {
  SimConfig c = linear_config(1.15);
  c.blowup_factor = 1.0;
  EXPECT_THROW(run(c), ConfigError);
}

TEST(Blowup, StateCheck) {
  SimConfig c = linear_config(1.15);
  State s = initial_state(c);
  const double w0 = linf_norm(vorticity(s.u));
  EXPECT_EQ(blowup_check(s, c, w0), BlowupVerdict::proceed);
  EXPECT_EQ(blowup_check(s, c, w0 / 2e6), BlowupVerdict::vorticity_growth);
  Field p = s.u.to_physical();
  p.at(1, 1) = std::numeric_limits<double>::infinity();
  s.u = p;
  EXPECT_EQ(blowup_check(s, c, w0), BlowupVerdict::non_finite);
}

TEST(LinearRun, EnergyAndBkmMatchClosedForm) {
  const std::vector<std::array<double, 3>> table{
      {1.0, 0.011864521368317138569, 11.237327015518888788},
      {1.1108, 0.0089328681876647703618, 8.2131300867935193445},
      {1.5, 0.0017865164771224849793, 2.3928613251787159813},
      {2.0, 0.000015522046510072449723, 0.39773920544398279849},
  };
  for (const auto& [alpha, energy, bkm] : table) {
    const RunResult r = run(linear_config(alpha));
    const auto& last = r.records.back();
    EXPECT_DOUBLE_EQ(last.t, 1.0);
    EXPECT_NEAR(last.energy_u, energy, 1e-10 * energy) << alpha;
    EXPECT_NEAR(last.bkm_accum, bkm, 1e-8 * bkm) << alpha;
    const auto b = energy_budget(r.records);
    EXPECT_LE(b.max_abs_u, 1e-10 * r.records.front().energy_u) << alpha;
    EXPECT_TRUE(accumulators_monotone(r.records));
    EXPECT_GE(max_principle_margin(r.records), 0.0);
  }
}

TEST(NonlinearRun, MonitorsHoldOnShortRun) {
  SimConfig c;
  c.alpha = 1.15;
  c.nu = 0.1;
  c.n_x = 64;
  c.n_z = 32;
  c.t_end = 0.25;
  c.initial_data = parse_preset("random_band(4, 2, 1.0)");
  const RunResult r = run(c);
  ASSERT_FALSE(r.halted);
  EXPECT_TRUE(budget_holds(r.records, 1e-6));
  EXPECT_GE(max_principle_margin(r.records), 0.0);
  EXPECT_TRUE(accumulators_monotone(r.records));
  EXPECT_TRUE(std::isfinite(bkm_integral(r.records)));
  EXPECT_GT(bkm_integral(r.records), 0.0);
}

TEST(NonlinearRun, RecordCadenceDoesNotChangeResults) {
  SimConfig c;
  c.alpha = 1.15;
  c.nu = 0.1;
  c.n_x = 32;
  c.n_z = 16;
  c.t_end = 0.2;
  c.initial_data = parse_preset("random_band(4, 2, 1.0)");
  const RunResult every = run(c);
  c.output_every = 7;
  const RunResult sparse = run(c);
  EXPECT_LT(sparse.records.size(), every.records.size());
  EXPECT_EQ(sparse.records.back().t, every.records.back().t);
  EXPECT_EQ(sparse.records.back().bkm_accum, every.records.back().bkm_accum);
  EXPECT_EQ(sparse.records.back().energy_u, every.records.back().energy_u);
}

TEST(Reductions, BudgetAndMargin) {
  std::vector<DiagnosticsRecord> recs(3);
  recs[0].energy_u = 1.0;
  recs[0].energy_omega = 2.0;
  recs[1].budget_residual_u = -0.5;
  recs[2].budget_residual_omega = 1e-7;
  recs[0].max_principle_margin = 0.3;
  recs[1].max_principle_margin = -0.1;
  recs[2].max_principle_margin = 0.2;
  const auto b = energy_budget(recs);
  EXPECT_EQ(b.max_abs_u, 0.5);
  EXPECT_EQ(b.max_u, 0.0);
  EXPECT_EQ(b.max_omega, 1e-7);
  EXPECT_TRUE(budget_holds(recs, 1e-6));
  recs[2].budget_residual_omega = 3e-6;
  EXPECT_FALSE(budget_holds(recs, 1e-6));
  EXPECT_EQ(max_principle_margin(recs), -0.1);
  recs[1].bkm_accum = 2.0;
  recs[2].bkm_accum = 1.0;
  EXPECT_FALSE(accumulators_monotone(recs));
  EXPECT_EQ(bkm_integral(recs), 1.0);
}

TEST(Reductions, PoincareRatio) {
  const Grid g(16, 32);
  EXPECT_NEAR(poincare_ratio(Field::sample(g, [](double, double z) { return z - 0.5; })), 0.5, 1e-14);
  const double r = poincare_ratio(Field::sample(g, [](double x, double z) { return std::cos(2 * pi * x) * std::cos(pi * z); }));
  EXPECT_GT(r, 0.0);
  EXPECT_LE(r, 1.0);
  EXPECT_EQ(poincare_ratio(Field(g, Representation::physical)), 0.0);
}
