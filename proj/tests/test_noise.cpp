#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sabi/noise.hpp"

namespace sabi {
namespace {

TEST(DivfreeMode, AxisAlignedCosine) {
  const GridSpec g = GridSpec::cube(16);
  const VectorField xi = make_divfree_mode(g, {1, 0, 0}, {0, 1, 0}, 0.0);
  const auto expect = VectorField::from_function(g, [](double x, double, double) { return Vec3{0.0, std::cos(x), 0.0}; });
  EXPECT_LT(max_abs(xi - expect), 1e-15);
  EXPECT_LT(max_divergence(xi), 1e-12);
}

TEST(DivfreeMode, ParallelAmplitudeIsRejected) {
  const GridSpec g = GridSpec::cube(8);
  EXPECT_THROW(make_divfree_mode(g, {1, 0, 0}, {1, 0, 0}, 0.0), std::invalid_argument);
  EXPECT_THROW(make_divfree_mode(g, {0, 0, 0}, {1, 0, 0}, 0.0), std::invalid_argument);
}

TEST(DivfreeMode, DiagonalModeEnergy) {
  const GridSpec g = GridSpec::cube(16);
  const VectorField xi = make_divfree_mode(g, {1, 1, 0}, {0, 0, 1}, 0.7);
  EXPECT_LT(max_divergence(xi), 1e-12);
  // a is already normal to k, so |a_perp| = 1 and the mean of cos^2 is 1/2.
  EXPECT_NEAR(inner(xi, xi), 0.5 * std::pow(2.0 * std::numbers::pi, 3), 1e-10);
}

TEST(DivfreeMode, ObliqueAmplitudeIsProjected) {
  const GridSpec g = GridSpec::cube(16);
  const VectorField xi = make_divfree_mode(g, {1, 1, 0}, {1, 0, 0}, 0.0);
  EXPECT_LT(max_divergence(xi), 1e-12);
  const Vec3 at0 = xi.at(0);  // cos(0) = 1, a_perp = (1/2, -1/2, 0)
  EXPECT_NEAR(at0[0], 0.5, 1e-15);
  EXPECT_NEAR(at0[1], -0.5, 1e-15);
}

TEST(NoiseModel, BuildScalesAndCombines) {
  const GridSpec g = GridSpec::cube(8);
  const NoiseModel m = NoiseModel::build(g, {{NoiseKind::Constant, {}, {1.0, 0.0, 0.0}, 0.0, 0.5, {}},
                                             {NoiseKind::Harmonic, {0, 1, 0}, {0.0, 0.0, 1.0}, 0.0, 2.0, {}}});
  ASSERT_EQ(m.size(), 2);
  const std::vector<double> dw{0.2, -0.1};
  const VectorField c = m.combined(dw);
  const auto expect = VectorField::from_function(g, [](double, double y, double) {
    return Vec3{0.1, 0.0, -0.2 * std::cos(y)};
  });
  EXPECT_LT(max_abs(c - expect), 1e-15);
  EXPECT_NEAR(m.speed_bound(), 2.5, 1e-14);
}

TEST(NoiseModel, CustomDivergentModeIsRejected) {
  const GridSpec g = GridSpec::cube(8);
  NoiseModeSpec bad{NoiseKind::Custom, {}, {}, 0.0, 1.0, {{{1, 0, 0}, {1.0, 0.0, 0.0}, 0.0}}};
  try {
    NoiseModel::build(g, {bad});
    FAIL() << "expected a constraint violation";
  } catch (const ConstraintViolation& e) {
    EXPECT_NE(std::string(e.what()).find("divergence-free violation"), std::string::npos);
  }
  NoiseModeSpec good{NoiseKind::Custom, {}, {}, 0.0, 1.0, {{{1, 0, 0}, {0.0, 1.0, 0.0}, 0.0}, {{0, 0, 2}, {1.0, 1.0, 0.0}, 0.4}}};
  EXPECT_NO_THROW(NoiseModel::build(g, {good}));
}

TEST(WienerDriver, IsAPureFunctionOfTheKey) {
  const WienerDriver w{99, 3, 4};
  EXPECT_EQ(w.sample_increments(17, 0.01), w.sample_increments(17, 0.01));
  EXPECT_NE(w.sample_increments(17, 0.01), w.sample_increments(18, 0.01));
  const WienerDriver copy{99, 3, 4};
  EXPECT_EQ(copy.sample_increments(5, 0.25), w.sample_increments(5, 0.25));
  EXPECT_THROW(w.sample_increments(0, 0.0), std::invalid_argument);
}

TEST(WienerDriver, MomentsOfIncrements) {
  const double dt = 0.01;
  const WienerDriver w{7, 0, 1};
  const int n = 100000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = w.sample_increments(static_cast<std::uint64_t>(i), dt)[0];
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  EXPECT_LT(std::abs(mean), 4.0 * std::sqrt(dt / n));
  EXPECT_LT(std::abs(var / dt - 1.0), 0.05);
}

TEST(WienerDriver, MembersAndModesDecorrelate) {
  const WienerDriver a{11, 0, 2};
  const WienerDriver b{11, 1, 2};
  const int n = 10000;
  double ab = 0.0, aa = 0.0, bb = 0.0, m01 = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto x = a.sample_increments(static_cast<std::uint64_t>(i), 1.0);
    const auto y = b.sample_increments(static_cast<std::uint64_t>(i), 1.0);
    ab += x[0] * y[0];
    aa += x[0] * x[0];
    bb += y[0] * y[0];
    m01 += x[0] * x[1];
  }
  EXPECT_LT(std::abs(ab / std::sqrt(aa * bb)), 0.02);
  EXPECT_LT(std::abs(m01 / aa), 0.02);
}

TEST(BrownianPath, CoarseIncrementsAreSumsOfFineOnes) {
  const BrownianPath p(WienerDriver{5, 2, 3}, 1.0, 8, 3);
  EXPECT_EQ(p.steps(3), 64);
  for (int lev = 1; lev <= 3; ++lev)
    for (int n = 0; n < p.steps(lev - 1); ++n) {
      const auto c = p.increments(lev - 1, n);
      const auto f0 = p.increments(lev, 2 * n);
      const auto f1 = p.increments(lev, 2 * n + 1);
      for (int m = 0; m < 3; ++m) ASSERT_NEAR(c[m], f0[m] + f1[m], 1e-15);
    }
  // Level 0 matches the plain driver.
  const WienerDriver w{5, 2, 3};
  for (int n = 0; n < 8; ++n) {
    const auto a = p.increments(0, n);
    const auto b = w.sample_increments(static_cast<std::uint64_t>(n), 1.0 / 8.0);
    for (int m = 0; m < 3; ++m) EXPECT_NEAR(a[m], b[m], 1e-15);
  }
}

TEST(BrownianPath, BridgeVarianceMatchesFineStep) {
  // Over many members, fine increments have variance dt_fine.
  const int members = 4000;
  double sq = 0.0;
  for (int m = 0; m < members; ++m) {
    const BrownianPath p(WienerDriver{13, static_cast<std::uint64_t>(m), 1}, 1.0, 1, 2);
    sq += std::pow(p.increments(2, 1)[0], 2);
  }
  EXPECT_NEAR(sq / members / 0.25, 1.0, 0.08);
}

TEST(BrownianPath, RejectsBadLayout) {
  EXPECT_THROW(BrownianPath(WienerDriver{1, 0, 1}, 1.0, 0, 1), std::invalid_argument);
  EXPECT_THROW(BrownianPath(WienerDriver{1, 0, 1}, -1.0, 4, 1), std::invalid_argument);
}

}  // namespace
}  // namespace sabi
