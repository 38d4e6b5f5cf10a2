#include <gtest/gtest.h>

#include <cmath>

#include "sabi/em_fields.hpp"
#include "sabi/initial.hpp"

namespace sabi {
namespace {

EMState uniform(const GridSpec& g, Vec3 d, Vec3 b) { return {VectorField(g, d), VectorField(g, b)}; }

void expect_uniform(const VectorField& v, Vec3 value, double tol) {
  for (std::size_t i = 0; i < v.grid.size(); ++i)
    for (int d = 0; d < 3; ++d) ASSERT_NEAR(v[d].values[i], value[d], tol);
}

TEST(EnergyDensity, VacuumIsOne) {
  const GridSpec g = GridSpec::cube(4);
  const ScalarField h = bi_energy_density(uniform(g, {0, 0, 0}, {0, 0, 0}));
  for (double v : h.values) EXPECT_EQ(v, 1.0);
}

TEST(EnergyDensity, CrossedUnitFields) {
  const GridSpec g = GridSpec::cube(4);
  const ScalarField h = bi_energy_density(uniform(g, {1, 0, 0}, {0, 1, 0}));
  for (double v : h.values) EXPECT_DOUBLE_EQ(v, 2.0);
}

TEST(EnergyDensity, WeakFieldSeriesIsQuartic) {
  const GridSpec g = GridSpec::cube(8);
  const EMState base{random_divfree_field(g, 1, 2, 1.0), random_divfree_field(g, 2, 2, 1.0)};
  double prev = 0.0;
  for (double eps : {1e-2, 1e-3}) {
    const EMState s = eps * base;
    const ScalarField h = bi_energy_density(s);
    const ScalarField m = maxwell_energy_density(s);
    double err = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) err = std::max(err, std::abs(h.values[i] - 1.0 - m.values[i]));
    if (prev > 0.0) {
      EXPECT_NEAR(std::log10(prev / err), 4.0, 0.3);
    }
    prev = err;
  }
}

TEST(VariationalDerivatives, VacuumAndCrossedFields) {
  const GridSpec g = GridSpec::cube(4);
  auto zero = bi_variational_derivatives(uniform(g, {0, 0, 0}, {0, 0, 0}));
  expect_uniform(zero.E, {0, 0, 0}, 0.0);
  expect_uniform(zero.H, {0, 0, 0}, 0.0);
  // P = (0,0,1), B x P = (1,0,0), D x P = (0,-1,0), H = 2.
  auto eh = bi_variational_derivatives(uniform(g, {1, 0, 0}, {0, 1, 0}));
  expect_uniform(eh.E, {1, 0, 0}, 1e-15);
  expect_uniform(eh.H, {0, 1, 0}, 1e-15);
}

TEST(VariationalDerivatives, MatchFiniteDifferenceGradient) {
  const GridSpec g = GridSpec::cube(8);
  EMState s{random_divfree_field(g, 3, 2, 0.8), random_divfree_field(g, 4, 2, 0.8)};
  const auto eh = bi_variational_derivatives(s);
  auto total = [&](const EMState& x) { return integrate(bi_energy_density(x)); };
  const double step = 1e-6;
  const double scale = std::max(max_abs(eh.E), max_abs(eh.H));
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); i += 37) {
    for (int d = 0; d < 3; ++d) {
      for (int which = 0; which < 2; ++which) {
        VectorField& f = which == 0 ? s.D : s.B;
        const double keep = f[d].values[i];
        f[d].values[i] = keep + step;
        const double up = total(s);
        f[d].values[i] = keep - step;
        const double down = total(s);
        f[d].values[i] = keep;
        const double fd = (up - down) / (2.0 * step * g.cell_volume());
        const double exact = (which == 0 ? eh.E : eh.H)[d].values[i];
        worst = std::max(worst, std::abs(fd - exact) / scale);
      }
    }
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(VariationalDerivatives, MaxwellIsIdentityAndWeakFieldLimit) {
  const GridSpec g = GridSpec::cube(8);
  const EMState s{random_divfree_field(g, 5, 2, 1e-3), random_divfree_field(g, 6, 2, 1e-3)};
  const auto mx = maxwell_variational_derivatives(s);
  EXPECT_EQ(max_abs(mx.E - s.D), 0.0);
  EXPECT_EQ(max_abs(mx.H - s.B), 0.0);
  const auto bi = bi_variational_derivatives(s);
  EXPECT_LT(max_abs(bi.E - mx.E) / max_abs(mx.E), 1e-5);
  EXPECT_LT(max_abs(bi.H - mx.H) / max_abs(mx.H), 1e-5);
}

TEST(Poynting, CrossedAndParallel) {
  const GridSpec g = GridSpec::cube(4);
  expect_uniform(poynting(uniform(g, {1, 0, 0}, {0, 1, 0})), {0, 0, 1}, 0.0);
  expect_uniform(poynting(uniform(g, {0.3, 0.2, 0.1}, {0.6, 0.4, 0.2})), {0, 0, 0}, 1e-16);
}

TEST(Poynting, OrthogonalToBothFieldsAndEqualsExH) {
  const GridSpec g = GridSpec::cube(8);
  const EMState s{random_divfree_field(g, 7, 3, 1.0), random_divfree_field(g, 8, 3, 1.0)};
  const VectorField p = poynting(s, PoyntingCheck::CompareEH);
  EXPECT_LT(max_abs(dot(p, s.D)), 1e-14);
  EXPECT_LT(max_abs(dot(p, s.B)), 1e-14);
}

TEST(PoyntingGeneral, ReducesAndCorrects) {
  const GridSpec g = GridSpec::cube(16);
  const VectorField D = random_divfree_field(g, 9, 3, 1.0);
  const VectorField B = random_divfree_field(g, 10, 3, 1.0);
  const VectorField A = random_divfree_field(g, 11, 3, 1.0);
  EXPECT_LT(max_abs(poynting_general(D, B, A) - cross(D, B)), 1e-12);

  const auto gradf = VectorField::from_function(g, [](double x, double, double) { return Vec3{std::cos(x), 0.0, 0.0}; });
  const VectorField ay(g, Vec3{0.0, 1.0, 0.0});
  const auto expect = VectorField::from_function(g, [](double x, double, double) { return Vec3{0.0, std::sin(x), 0.0}; });
  EXPECT_LT(max_abs(poynting_general(gradf, VectorField(g), ay) - expect), 1e-12);
  EXPECT_EQ(max_abs(poynting_general(VectorField(g), VectorField(g), VectorField(g))), 0.0);
}

TEST(HydroVars, HandValues) {
  const GridSpec g = GridSpec::cube(4);
  const auto vac = hydro_vars(uniform(g, {0, 0, 0}, {0, 0, 0}));
  expect_uniform(vac.v, {0, 0, 0}, 0.0);
  for (double h : vac.Hd.values) EXPECT_EQ(h, 1.0);
  const auto hv = hydro_vars(uniform(g, {1, 0, 0}, {0, 1, 0}));
  expect_uniform(hv.v, {0, 0, 0.5}, 1e-15);
  expect_uniform(hv.gamma, {0.5, 0, 0}, 1e-15);
  expect_uniform(hv.beta, {0, 0.5, 0}, 1e-15);
}

// Property: (1 + |D|^2 + |B|^2 + |P|^2)/H^2 = 1, i.e. |v|^2 + |gamma|^2 + |beta|^2 + 1/H^2 = 1.
TEST(HydroVars, NormalizationIdentity) {
  const GridSpec g = GridSpec::cube(8);
  for (std::uint64_t seed = 20; seed < 24; ++seed) {
    const EMState s{random_divfree_field(g, seed, 3, 2.0), random_divfree_field(g, seed + 50, 3, 2.0)};
    const auto hv = hydro_vars(s);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Vec3 v = hv.v.at(i), c = hv.gamma.at(i), b = hv.beta.at(i);
      const double h = hv.Hd.values[i];
      ASSERT_NEAR(dot(v, v) + dot(c, c) + dot(b, b) + 1.0 / (h * h), 1.0, 1e-14);
    }
  }
}

TEST(MomentumMap, TrivialCases) {
  const GridSpec g = GridSpec::cube(8);
  const VectorField A = random_divfree_field(g, 30, 2, 1.0);
  const VectorField D = random_divfree_field(g, 31, 2, 1.0);
  const Pairing z1 = momentum_map_pairing(A, D, VectorField(g));
  EXPECT_EQ(z1.lhs, 0.0);
  EXPECT_EQ(z1.rhs, 0.0);
  const Pairing z2 = momentum_map_pairing(A, VectorField(g), D);
  EXPECT_EQ(z2.lhs, 0.0);
  EXPECT_EQ(z2.rhs, 0.0);
}

TEST(MomentumMap, PairingAgreesOnRandomInputs) {
  const GridSpec g = GridSpec::cube(16);
  const VectorField A = random_divfree_field(g, 32, 3, 1.0) + grad(random_scalar_field(g, 33, 3, 1.0));
  const VectorField D = random_divfree_field(g, 34, 3, 1.0);
  const VectorField xi = random_divfree_field(g, 35, 3, 1.0);
  const Pairing p = momentum_map_pairing(A, D, xi);
  EXPECT_LT(std::abs(p.lhs - p.rhs) / std::abs(p.lhs), 1e-10);
}

TEST(MomentumMap, RejectsDivergentD) {
  const GridSpec g = GridSpec::cube(8);
  const auto bad = VectorField::from_function(g, [](double x, double, double) { return Vec3{std::sin(x), 0.0, 0.0}; });
  EXPECT_THROW(momentum_map_pairing(bad, bad, VectorField(g, Vec3{1, 0, 0})), ConstraintViolation);
}

TEST(EMState, ConstraintCheck) {
  const GridSpec g = GridSpec::cube(8);
  EMState s{random_divfree_field(g, 40, 2, 1.0), random_divfree_field(g, 41, 2, 1.0)};
  EXPECT_NO_THROW(s.check_constraints());
  s.D += VectorField::from_function(g, [](double x, double, double) { return Vec3{1e-3 * std::sin(x), 0.0, 0.0}; });
  EXPECT_THROW(s.check_constraints(), ConstraintViolation);
}

}  // namespace
}  // namespace sabi
