#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hydrofrac/spectral.hpp"

using namespace hydrofrac;
using std::numbers::pi;

namespace {

double max_diff(const Field& a, const Field& b) {
  const Field pa = a.to_physical();
  const Field pb = b.to_physical();
  double m = 0.0;
  for (std::size_t n = 0; n < pa.values().size(); ++n) m = std::max(m, std::abs(pa.values()[n] - pb.values()[n]));
  return m;
}

Field random_band_field(const Grid& g, std::mt19937_64& rng, long kmax, bool mean_zero_x) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Field f(g, Representation::spectral);
  for (std::size_t j = 0; j < g.rows(); ++j)
    for (long k = mean_zero_x ? 1 : 0; k <= kmax; ++k) f.mode(j, k) = {U(rng), k == 0 ? 0.0 : U(rng)};
  return f;
}

double slope(double e1, double e2) { return std::log2(e1 / e2); }

}  // namespace

TEST(Grid, RejectsBadSizes) {
  EXPECT_THROW(Grid(7, 16), ConfigError);
  EXPECT_THROW(Grid(6, 16), ConfigError);
  EXPECT_THROW(Grid(16, 4), ConfigError);
  const Grid g(16, 8);
  EXPECT_EQ(g.rows(), 9u);
  EXPECT_EQ(g.modes(), 9u);
  EXPECT_DOUBLE_EQ(g.z(8), 1.0);
}

TEST(Field, RoundTripWithinTenEpsilon) {
  const Grid g(64, 16);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-5.0, 5.0);
  Field f(g, Representation::physical);
  for (double& v : f.values()) v = U(rng);
  const Field back = f.to_spectral().to_physical();
  EXPECT_LE(max_diff(f, back), 10.0 * std::numeric_limits<double>::epsilon() * f.max_abs());
}

TEST(DxSpectral, CosineDerivative) {
  const Grid g(32, 8);
  const Field f = Field::sample(g, [](double x, double) { return std::cos(2 * pi * x); });
  const Field want = Field::sample(g, [](double x, double) { return -2 * pi * std::sin(2 * pi * x); });
  EXPECT_LT(max_diff(dx_spectral(f), want), 1e-12);
}

TEST(DxSpectral, ConstantGivesZero) {
  const Grid g(32, 8);
  const Field f = Field::sample(g, [](double, double) { return 3.25; });
  EXPECT_EQ(dx_spectral(f).to_physical().max_abs(), 0.0);
}

TEST(DxSpectral, ThirdHarmonic) {
  const Grid g(32, 8);
  const Field f = Field::sample(g, [](double x, double) { return std::sin(6 * pi * x); });
  const Field want = Field::sample(g, [](double x, double) { return 6 * pi * std::cos(6 * pi * x); });
  EXPECT_LT(max_diff(dx_spectral(f), want), 1e-12);
}

TEST(DzFd, ExactOnQuadraticsInside) {
  const Grid g(8, 16);
  const Field d = dz_fd(Field::sample(g, [](double, double z) { return z * z; }));
  for (std::size_t j = 0; j < g.rows(); ++j)
    for (std::size_t i = 0; i < g.n_x; ++i) EXPECT_NEAR(d.at(j, i), 2 * g.z(j), 1e-12);
}

TEST(DzFd, ConstantGivesZero) {
  const Grid g(8, 16);
  EXPECT_EQ(dz_fd(Field::sample(g, [](double, double) { return 2.0; })).max_abs(), 0.0);
}

TEST(DzFd, SecondOrderOnSine) {
  std::vector<double> err;
  for (std::size_t nz : {16u, 32u, 64u, 128u}) {
    const Grid g(8, nz);
    const Field d = dz_fd(Field::sample(g, [](double, double z) { return std::sin(pi * z); }));
    const Field want = Field::sample(g, [](double, double z) { return pi * std::cos(pi * z); });
    err.push_back(max_diff(d, want));
  }
  for (std::size_t i = 1; i < err.size(); ++i) EXPECT_NEAR(slope(err[i - 1], err[i]), 2.0, 0.3);
}

TEST(ApplyFractional, SingleModeSymbol) {
  const Grid g(32, 8);
  const Field f = Field::sample(g, [](double x, double) { return std::cos(2 * pi * x); });
  const Field got = apply_fractional(f, 1.5);
  const Field want = Field::sample(g, [](double x, double) { return std::pow(2 * pi, 1.5) * std::cos(2 * pi * x); });
  EXPECT_LT(max_diff(got, want), 1e-12);
}

TEST(ApplyFractional, AnnihilatesConstants) {
  const Grid g(32, 8);
  EXPECT_EQ(apply_fractional(Field::sample(g, [](double, double) { return 1.0; }), 1.2).to_physical().max_abs(), 0.0);
}

TEST(ApplyFractional, SquareIsMinusSecondDerivative) {
  const Grid g(32, 8);
  const Field f = Field::sample(g, [](double x, double) { return std::cos(2 * pi * x); });
  const Field lap = apply_fractional(f, 1.0, 2.0);
  Field minus_dxx = dx_spectral(dx_spectral(f));
  minus_dxx *= -1.0;
  EXPECT_LT(max_diff(lap, minus_dxx) / (4 * pi * pi), 1e-12);
}

TEST(ApplyFractional, RejectsBadExponents) {
  const Grid g(16, 8);
  const Field f(g, Representation::spectral);
  EXPECT_THROW(apply_fractional(f, 1.0, -0.5), DomainError);
  EXPECT_THROW(apply_fractional(f, 2.5), DomainError);
  EXPECT_THROW(apply_fractional(f, 0.0), DomainError);
}

TEST(ApplyFractional, SemigroupAndCommutesWithDx) {
  const Grid g(64, 8);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Field f = random_band_field(g, rng, 20, true);
    const double s1 = 0.3 + 0.05 * trial, s2 = 1.1 - 0.03 * trial;
    const Field lhs = apply_fractional(apply_fractional(f, 1.0, s1), 1.0, s2);
    const Field rhs = apply_fractional(f, 1.0, s1 + s2);
    EXPECT_LT(max_diff(lhs, rhs), 1e-12 * rhs.to_physical().max_abs());
    const Field a = dx_spectral(apply_fractional(f, 1.3));
    const Field b = apply_fractional(dx_spectral(f), 1.3);
    EXPECT_LT(max_diff(a, b), 1e-12 * a.to_physical().max_abs());
  }
}

TEST(Dealias, KeepsRetainedBand) {
  const Grid g(48, 8);
  std::mt19937_64 rng(5);
  const Field f = random_band_field(g, rng, 16, false);
  EXPECT_EQ(max_diff(dealias(f), f), 0.0);
}

TEST(Dealias, RemovesMode15At32) {
  const Grid g(32, 8);
  const Field f = Field::sample(g, [](double x, double) { return std::cos(2 * pi * 15 * x); });
  EXPECT_LT(dealias(f).to_physical().max_abs(), 1e-14);
}

TEST(Dealias, Idempotent) {
  const Grid g(32, 8);
  std::mt19937_64 rng(9);
  const Field f = random_band_field(g, rng, 16, false);
  EXPECT_EQ(max_diff(dealias(dealias(f)), dealias(f)), 0.0);
}

TEST(VerticalCumint, ConstantAndLinearExact) {
  const Grid g(8, 16);
  const Field one = vertical_cumint(Field::sample(g, [](double, double) { return 1.0; }));
  const Field lin = vertical_cumint(Field::sample(g, [](double, double z) { return z; }));
  for (std::size_t j = 0; j < g.rows(); ++j) {
    EXPECT_NEAR(one.at(j, 3), g.z(j), 1e-15);
    EXPECT_NEAR(lin.at(j, 3), g.z(j) * g.z(j) / 2, 1e-15);
  }
  EXPECT_EQ(one.at(0, 0), 0.0);
}

TEST(VerticalCumint, SecondOrderOnCosine) {
  std::vector<double> err;
  for (std::size_t nz : {16u, 32u, 64u, 128u}) {
    const Grid g(8, nz);
    const Field F = vertical_cumint(Field::sample(g, [](double, double z) { return std::cos(pi * z); }));
    const Field want = Field::sample(g, [](double, double z) { return std::sin(pi * z) / pi; });
    err.push_back(max_diff(F, want));
  }
  for (std::size_t i = 1; i < err.size(); ++i) EXPECT_NEAR(slope(err[i - 1], err[i]), 2.0, 0.3);
}

TEST(VerticalMean, Examples) {
  const Grid g(16, 16);
  for (double m : vertical_mean(Field::sample(g, [](double, double z) { return z - 0.5; }))) EXPECT_EQ(m, 0.0);
  for (double m : vertical_mean(Field::sample(g, [](double, double) { return 1.0; }))) EXPECT_NEAR(m, 1.0, 1e-15);
}

TEST(VerticalMean, QuadraticDefectSecondOrder) {
  std::vector<double> err;
  for (std::size_t nz : {16u, 32u, 64u, 128u}) {
    const Grid g(16, nz);
    const auto m = vertical_mean(Field::sample(g, [](double x, double z) { return std::cos(2 * pi * x) * (z * z - 1.0 / 3.0); }));
    err.push_back(std::abs(m[0]));
  }
  for (std::size_t i = 1; i < err.size(); ++i) EXPECT_NEAR(slope(err[i - 1], err[i]), 2.0, 0.3);
}

TEST(VerticalMean, MatchesCumintAtTop) {
  const Grid g(32, 24);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Field f(g, Representation::physical);
  for (double& v : f.values()) v = U(rng);
  const Field F = vertical_cumint(f);
  const auto m = vertical_mean(f);
  for (std::size_t i = 0; i < g.n_x; ++i) EXPECT_EQ(F.at(g.rows() - 1, i), m[i]);
}

TEST(RemoveVerticalMean, ProjectsOntoZeroMean) {
  const Grid g(32, 24);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Field f(g, Representation::physical);
  for (double& v : f.values()) v = U(rng);
  EXPECT_LE(max_vertical_mean(remove_vertical_mean(f)), 1e-15);
  EXPECT_LE(max_vertical_mean(remove_vertical_mean(f.to_spectral())), 1e-15);
}
