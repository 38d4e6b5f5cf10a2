#include <gtest/gtest.h>

#include <cmath>

#include "sabi/dynamics.hpp"
#include "sabi/initial.hpp"

namespace sabi {
namespace {

double max_diff(const VectorField& a, const VectorField& b) { return max_abs(a - b); }

// (xi . grad) f - (f . grad) xi, written out independently of the curl form.
VectorField commutator(const VectorField& xi, const VectorField& f) {
  VectorField out(f.grid);
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j) out[k] += xi[j] * derivative(f[k], j) - f[j] * derivative(xi[k], j);
  return out;
}

TEST(ModelNames, RoundTrip) {
  for (auto [m, name] : model_names) {
    EXPECT_EQ(to_string(m), name);
    EXPECT_EQ(parse_model(name), m);
  }
  EXPECT_FALSE(parse_model("bogus").has_value());
  EXPECT_TRUE(is_ito(Model::BornInfeldIto));
  EXPECT_FALSE(is_stochastic(Model::Mhd));
  EXPECT_EQ(family(Model::MhdStratonovich), ModelFamily::Mhd);
}

TEST(BiRhs, ZeroAndUniformStatesAreStationary) {
  const GridSpec g = GridSpec::cube(8);
  for (Closure c : {Closure::BornInfeld, Closure::Maxwell}) {
    const EMState zero{VectorField(g), VectorField(g)};
    const EMState r0 = bi_rhs(zero, c);
    EXPECT_EQ(max_abs(r0.D) + max_abs(r0.B), 0.0);
    const EMState uni{VectorField(g, Vec3{0.3, -1.0, 2.0}), VectorField(g, Vec3{1.5, 0.2, -0.4})};
    const EMState r1 = bi_rhs(uni, c);
    EXPECT_LT(max_abs(r1.D) + max_abs(r1.B), 1e-13);
  }
}

TEST(BiRhs, MaxwellPlaneWave) {
  // D = (0, cos(x - t), 0), B = (0, 0, cos(x - t)) solves the Maxwell system.
  const GridSpec g = GridSpec::cube(16);
  InitialCondition ic;
  ic.preset = "plane-wave";
  ic.amplitude = 1.0;
  const EMState s = make_em_initial(g, ic);
  const EMState r = bi_rhs(s, Closure::Maxwell);
  const auto dt_d = VectorField::from_function(g, [](double x, double, double) { return Vec3{0.0, std::sin(x), 0.0}; });
  const auto dt_b = VectorField::from_function(g, [](double x, double, double) { return Vec3{0.0, 0.0, std::sin(x)}; });
  EXPECT_LT(max_diff(r.D, dt_d), 1e-13);
  EXPECT_LT(max_diff(r.B, dt_b), 1e-13);
}

// Properties of the semi-discrete BI system on random states: the rhs is a curl,
// and energy and momentum are stationary to roundoff-level quadrature.
TEST(BiRhs, ConservationProperties) {
  const GridSpec g = GridSpec::cube(16);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    EMState s{random_divfree_field(g, seed, 2, 0.4), random_divfree_field(g, seed + 10, 2, 0.4)};
    s.D += VectorField(g, Vec3{0.1, 0.0, 0.0});
    const EMState r = bi_rhs(s, Closure::BornInfeld);
    EXPECT_LT(max_divergence(r.D), 1e-12);
    EXPECT_LT(max_divergence(r.B), 1e-12);
    const auto eh = bi_variational_derivatives(s);
    const double de = inner(eh.E, r.D) + inner(eh.H, r.B);
    EXPECT_LT(std::abs(de), 1e-6 * integrate(bi_energy_density(s)));
    const Vec3 dp = integrate(cross(r.D, s.B) + cross(s.D, r.B));
    EXPECT_LT(norm(dp), 1e-6 * integrate(bi_energy_density(s)));
  }
}

TEST(StochasticIncrement, ZeroIncrementAndConstantField) {
  const GridSpec g = GridSpec::cube(16);
  const EMState s{random_divfree_field(g, 4, 3, 1.0), random_divfree_field(g, 5, 3, 1.0)};
  const double sigma = 0.7, dw = 0.3;
  const NoiseModel noise = NoiseModel::build(g, {{NoiseKind::Constant, {}, {sigma, 0.0, 0.0}, 0.0, 1.0, {}}});
  const std::vector<double> zero{0.0};
  const EMState r0 = stochastic_increment(s, noise, zero);
  EXPECT_EQ(max_abs(r0.D) + max_abs(r0.B), 0.0);
  const std::vector<double> w{dw};
  const EMState r = stochastic_increment(s, noise, w);
  for (int d = 0; d < 3; ++d) {
    EXPECT_LT(max_abs(r.D[d] + sigma * dw * derivative(s.D[d], 0)), 1e-12);
    EXPECT_LT(max_abs(r.B[d] + sigma * dw * derivative(s.B[d], 0)), 1e-12);
  }
}

TEST(StochasticIncrement, HarmonicModeIsDivergenceFree) {
  const GridSpec g = GridSpec::cube(16);
  const EMState s{random_divfree_field(g, 6, 3, 1.0), random_divfree_field(g, 7, 3, 1.0)};
  const NoiseModel noise = NoiseModel::build(g, {{NoiseKind::Harmonic, {1, 2, 0}, {0.0, 0.0, 1.0}, 0.4, 1.0, {}},
                                                 {NoiseKind::Harmonic, {0, 1, 1}, {1.0, 0.0, 0.0}, 0.1, 1.0, {}}});
  const std::vector<double> w{0.2, -0.5};
  const EMState r = stochastic_increment(s, noise, w);
  EXPECT_LT(max_divergence(r.D), 1e-12);
  EXPECT_LT(max_divergence(r.B), 1e-12);
}

TEST(ItoCorrection, ConstantFieldIsHalfSecondDerivative) {
  const GridSpec g = GridSpec::cube(16);
  const EMState s{random_divfree_field(g, 8, 3, 1.0), random_divfree_field(g, 9, 3, 1.0)};
  const double sigma = 0.6;
  const NoiseModel noise = NoiseModel::build(g, {{NoiseKind::Constant, {}, {sigma, 0.0, 0.0}, 0.0, 1.0, {}}});
  const EMState c = ito_drift_correction(s, noise);
  for (int d = 0; d < 3; ++d) {
    EXPECT_LT(max_abs(c.D[d] - 0.5 * sigma * sigma * derivative(derivative(s.D[d], 0), 0)), 1e-11);
    EXPECT_LT(max_abs(c.B[d] - 0.5 * sigma * sigma * derivative(derivative(s.B[d], 0), 0)), 1e-11);
  }
  const EMState none = ito_drift_correction(s, NoiseModel{});
  EXPECT_EQ(max_abs(none.D) + max_abs(none.B), 0.0);
}

TEST(ItoCorrection, HarmonicModeEqualsDoubleCommutator) {
  // Non-truncated grid large enough that every product stays resolved.
  const GridSpec g = GridSpec::cube(24, false);
  const EMState s{random_divfree_field(g, 10, 2, 1.0), random_divfree_field(g, 11, 2, 1.0)};
  const NoiseModel noise = NoiseModel::build(g, {{NoiseKind::Harmonic, {1, 1, 0}, {0.0, 0.0, 1.0}, 0.3, 0.8, {}}});
  const VectorField& xi = noise.xis[0];
  const EMState c = ito_drift_correction(s, noise);
  EXPECT_LT(max_diff(c.D, 0.5 * commutator(xi, commutator(xi, s.D))), 1e-10);
  EXPECT_LT(max_diff(c.B, 0.5 * commutator(xi, commutator(xi, s.B))), 1e-10);
}

TEST(ExpectationRhs, ReducesToMaxwellAndLaplacians) {
  const GridSpec g = GridSpec::cube(16);
  const EMState s{random_divfree_field(g, 12, 3, 1.0), random_divfree_field(g, 13, 3, 1.0)};
  const EMState plain = bi_rhs(s, Closure::Maxwell);
  const EMState r0 = expectation_rhs(s, NoiseModel{});
  EXPECT_EQ(max_diff(r0.D, plain.D) + max_diff(r0.B, plain.B), 0.0);

  const double sx = 0.5, sy = 0.3, sz = 0.2;
  const NoiseModel basis = NoiseModel::build(g, {{NoiseKind::Constant, {}, {sx, 0.0, 0.0}, 0.0, 1.0, {}},
                                                 {NoiseKind::Constant, {}, {0.0, sy, 0.0}, 0.0, 1.0, {}},
                                                 {NoiseKind::Constant, {}, {0.0, 0.0, sz}, 0.0, 1.0, {}}});
  const EMState r = expectation_rhs(s, basis);
  auto damping = [&](const VectorField& f) {
    VectorField out(g);
    const double sig[3] = {sx, sy, sz};
    for (int d = 0; d < 3; ++d)
      for (int a = 0; a < 3; ++a) out[d] += 0.5 * sig[a] * sig[a] * derivative(derivative(f[d], a), a);
    return out;
  };
  EXPECT_LT(max_diff(r.D, plain.D + damping(s.D)), 1e-10);
  EXPECT_LT(max_diff(r.B, plain.B + damping(s.B)), 1e-10);
  EXPECT_THROW(expectation_rhs(s, basis, Closure::BornInfeld), ConfigError);
}

TEST(Vorticity, UniformVorticityIsRejected) {
  const GridSpec g = GridSpec::cube(8);
  const VorticityState s{VectorField(g, Vec3{0.0, 0.0, 1.0})};
  EXPECT_THROW(euler_vorticity_drift(s), ConstraintViolation);
}

TEST(Vorticity, DivergentVorticityIsRejected) {
  const GridSpec g = GridSpec::cube(8);
  const VorticityState s{VectorField::from_function(g, [](double x, double, double) { return Vec3{std::sin(x), 0.0, 0.0}; })};
  EXPECT_THROW(euler_vorticity_rhs(s, NoiseModel{}, {}, 0.1), ConstraintViolation);
}

TEST(Vorticity, ConstantNoiseTransports) {
  const GridSpec g = GridSpec::cube(16);
  const VorticityState s{random_divfree_field(g, 14, 3, 1.0)};
  const Vec3 c{0.4, -0.1, 0.3};
  const NoiseModel noise = NoiseModel::build(g, {{NoiseKind::Constant, {}, c, 0.0, 1.0, {}}});
  const std::vector<double> w{0.5};
  const VorticityState inc = euler_vorticity_noise(s, noise, w);
  VectorField expect(g);
  for (int d = 0; d < 3; ++d)
    for (int a = 0; a < 3; ++a) expect[d] += -0.5 * c[a] * derivative(s.w[d], a);
  EXPECT_LT(max_diff(inc.w, expect), 1e-12);
  const VectorField full = euler_vorticity_rhs(s, noise, w, 0.0);
  EXPECT_LT(max_diff(full, expect), 1e-12);
}

TEST(Vorticity, BeltramiFlowIsSteady) {
  // ABC flow: u = w, so u x w = 0.
  const GridSpec g = GridSpec::cube(16);
  const VorticityState s{abc_field(g, 1.0, 0.7, 0.4)};
  EXPECT_LT(max_abs(euler_vorticity_drift(s).w), 1e-13);
}

TEST(Mhd, UniformStatesAreStationary) {
  const GridSpec g = GridSpec::cube(8);
  const MHDState a{VectorField(g, Vec3{0.7, 0.0, 0.0}), VectorField(g)};
  const MHDState ra = mhd_rhs(a);
  EXPECT_LT(max_abs(ra.P) + max_abs(ra.B), 1e-14);
  const MHDState b{VectorField(g), VectorField(g, Vec3{0.0, 0.2, 0.9})};
  const MHDState rb = mhd_rhs(b);
  EXPECT_LT(max_abs(rb.P) + max_abs(rb.B), 1e-14);
}

TEST(Mhd, ZeroStateHitsTheFloor) {
  const GridSpec g = GridSpec::cube(8);
  const MHDState z{VectorField(g), VectorField(g)};
  EXPECT_THROW(mhd_rhs(z), NumericalFailure);
}

TEST(Mhd, EnergyIsStationaryOnOrthogonalData) {
  const GridSpec g = GridSpec::cube(32);
  InitialCondition ic;
  ic.preset = "random-band-limited";
  ic.amplitude = 0.1;
  const MHDState s = make_mhd_initial(g, ic);
  EXPECT_LT(max_abs(dot(s.P, s.B)), 1e-14);
  const MHDState r = mhd_rhs(s);
  const ScalarField h = mhd_energy_density(s);
  ScalarField dh(g);
  for (std::size_t i = 0; i < g.size(); ++i) dh.values[i] = (dot(s.P.at(i), r.P.at(i)) + dot(s.B.at(i), r.B.at(i))) / h.values[i];
  EXPECT_LT(std::abs(integrate(dh)), 1e-9);
  EXPECT_LT(max_divergence(r.B), 1e-12);
}

TEST(Mhd, ConstantNoiseTransports) {
  const GridSpec g = GridSpec::cube(16);
  InitialCondition ic;
  ic.preset = "abc";
  const MHDState s = make_mhd_initial(g, ic);
  const Vec3 c{0.0, 0.5, -0.2};
  const NoiseModel noise = NoiseModel::build(g, {{NoiseKind::Constant, {}, c, 0.0, 1.0, {}}});
  const std::vector<double> zero{0.0}, w{0.3};
  const MHDState r0 = mhd_stochastic_increment(s, noise, zero);
  EXPECT_EQ(max_abs(r0.P) + max_abs(r0.B), 0.0);
  const MHDState r = mhd_stochastic_increment(s, noise, w);
  for (int d = 0; d < 3; ++d) {
    ScalarField ep(g), eb(g);
    for (int a = 0; a < 3; ++a) {
      ep += -0.3 * c[a] * derivative(s.P[d], a);
      eb += -0.3 * c[a] * derivative(s.B[d], a);
    }
    EXPECT_LT(max_abs(r.P[d] - ep), 1e-12);
    EXPECT_LT(max_abs(r.B[d] - eb), 1e-12);
  }
}

TEST(Mhd, HarmonicNoiseChangesMomentum) {
  const GridSpec g = GridSpec::cube(16);
  InitialCondition ic;
  ic.preset = "random-band-limited";
  const MHDState s = make_mhd_initial(g, ic);
  const NoiseModel noise = NoiseModel::build(g, {{NoiseKind::Harmonic, {1, 0, 0}, {0.0, 1.0, 0.0}, 0.0, 1.0, {}}});
  const std::vector<double> w{1.0};
  EXPECT_GT(norm(integrate(mhd_stochastic_increment(s, noise, w).P)), 1e-3);
  const NoiseModel constant = NoiseModel::build(g, {{NoiseKind::Constant, {}, {0.0, 1.0, 0.0}, 0.0, 1.0, {}}});
  EXPECT_LT(norm(integrate(mhd_stochastic_increment(s, constant, w).P)), 1e-12);
}

}  // namespace
}  // namespace sabi
