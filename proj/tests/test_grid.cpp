#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sabi/grid.hpp"
#include "sabi/initial.hpp"

namespace sabi {
namespace {

constexpr double pi = std::numbers::pi;

double max_diff(const ScalarField& a, const ScalarField& b) { return max_abs(a - b); }
double max_diff(const VectorField& a, const VectorField& b) { return max_abs(a - b); }

TEST(GridSpec, RejectsOddAndTinyAxes) {
  GridSpec g = GridSpec::cube(16);
  EXPECT_NO_THROW(g.validate());
  g.ny = 15;
  EXPECT_THROW(g.validate(), ConfigError);
  g.ny = 2;
  EXPECT_THROW(g.validate(), ConfigError);
  g = GridSpec::cube(8);
  g.lz = 0.0;
  EXPECT_THROW(g.validate(), ConfigError);
}

TEST(GridSpec, CellVolumeAndIndexing) {
  GridSpec g;
  g.nx = 8;
  g.ny = 6;
  g.nz = 4;
  g.lx = 2.0;
  g.ly = 3.0;
  g.lz = 4.0;
  EXPECT_DOUBLE_EQ(g.cell_volume(), 24.0 / 192.0);
  EXPECT_EQ(g.index(1, 0, 0), 1u);
  EXPECT_EQ(g.index(0, 1, 0), 8u);
  EXPECT_EQ(g.index(0, 0, 1), 48u);
  const Vec3 p = g.position(2, 3, 1);
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  EXPECT_DOUBLE_EQ(p[1], 1.5);
  EXPECT_DOUBLE_EQ(p[2], 1.0);
}

TEST(Fft, RoundTripIsIdentity) {
  const GridSpec g = GridSpec::cube(12);
  const ScalarField f = random_scalar_field(g, 3, 4, 1.0);
  EXPECT_LT(max_diff(ifft(fft(f)), f), 1e-14);
}

TEST(Fft, SingleModeCoefficientIsNormalized) {
  // cos(2x) has coefficient 1/2 at kx = +-2; r2c stores only kx = +2.
  const GridSpec g = GridSpec::cube(8);
  const auto f = ScalarField::from_function(g, [](double x, double, double) { return std::cos(2.0 * x); });
  const Spectrum s = fft(f);
  const std::size_t nh = g.nx / 2 + 1;
  EXPECT_NEAR(s.c[2].real(), 0.5, 1e-15);
  for (std::size_t n = 0; n < s.c.size(); ++n) {
    if (n == 2) continue;
    EXPECT_LT(std::abs(s.c[n]), 1e-15) << "mode " << n << " of " << nh;
  }
}

TEST(Curl, SingleMode) {
  const GridSpec g = GridSpec::cube(16);
  const auto f = VectorField::from_function(g, [](double x, double, double) { return Vec3{0.0, 0.0, std::sin(x)}; });
  const auto expect = VectorField::from_function(g, [](double x, double, double) { return Vec3{0.0, -std::cos(x), 0.0}; });
  EXPECT_LT(max_diff(curl(f), expect), 1e-13);
}

TEST(Curl, OfGradientVanishes) {
  const GridSpec g = GridSpec::cube(16);
  const auto f = ScalarField::from_function(g, [](double x, double y, double) { return std::sin(x) * std::cos(y); });
  EXPECT_LT(max_abs(curl(grad(f))), 1e-12);
}

TEST(Curl, DivergenceOfCurlVanishesOnRandomInput) {
  const GridSpec g = GridSpec::cube(32);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const VectorField f = random_divfree_field(g, seed, 6, 1.0) + grad(random_scalar_field(g, seed + 10, 6, 1.0));
    EXPECT_LT(max_abs(div(curl(f))), 1e-12);
  }
}

TEST(Div, SumOfSines) {
  const GridSpec g = GridSpec::cube(16);
  const auto f = VectorField::from_function(g, [](double x, double y, double z) {
    return Vec3{std::sin(x), std::sin(y), std::sin(z)};
  });
  const auto expect = ScalarField::from_function(g, [](double x, double y, double z) {
    return std::cos(x) + std::cos(y) + std::cos(z);
  });
  EXPECT_LT(max_diff(div(f), expect), 1e-13);
}

TEST(Derivative, NonCubicBoxScalesWavenumbers) {
  GridSpec g = GridSpec::cube(16);
  g.ly = 3.0;
  const double ky = 2.0 * pi / g.ly;
  const auto f = ScalarField::from_function(g, [&](double, double y, double) { return std::sin(ky * y); });
  const auto expect = ScalarField::from_function(g, [&](double, double y, double) { return ky * std::cos(ky * y); });
  EXPECT_LT(max_diff(derivative(f, 1), expect), 1e-12);
}

TEST(Integrate, SineSquared) {
  const GridSpec g = GridSpec::cube(8);
  const auto f = ScalarField::from_function(g, [](double x, double, double) { return std::sin(x) * std::sin(x); });
  EXPECT_NEAR(integrate(f), std::pow(2.0 * pi, 3) / 2.0, 1e-11);
}

TEST(Integrate, ByPartsOnTorus) {
  const GridSpec g = GridSpec::cube(16);
  const ScalarField f = random_scalar_field(g, 7, 4, 1.0);
  const VectorField F = random_divfree_field(g, 8, 4, 1.0) + grad(random_scalar_field(g, 9, 4, 1.0));
  EXPECT_LT(std::abs(integrate(f * div(F)) + inner(grad(f), F)), 1e-12);
}

TEST(Laplacian, MatchesDivGrad) {
  const GridSpec g = GridSpec::cube(16, false);
  const ScalarField f = random_scalar_field(g, 11, 5, 1.0);
  EXPECT_LT(max_diff(laplacian(f), div(grad(f))), 1e-11);
}

TEST(Dealias, KeepsLowModesAndRemovesHighOnes) {
  const GridSpec g = GridSpec::cube(12);  // keeps |m| <= 3
  const auto low = ScalarField::from_function(g, [](double x, double y, double) { return std::cos(3.0 * x) * std::sin(2.0 * y); });
  const auto high = ScalarField::from_function(g, [](double, double, double z) { return std::cos(4.0 * z); });
  EXPECT_LT(max_diff(dealias(low), low), 1e-14);
  EXPECT_LT(max_abs(dealias(high)), 1e-14);
}

TEST(Dealias, CurlDealiasedTruncatesProductModes) {
  const GridSpec g = GridSpec::cube(12);
  const auto f = VectorField::from_function(g, [](double x, double, double) { return Vec3{0.0, 0.0, std::sin(5.0 * x)}; });
  EXPECT_LT(max_abs(curl_dealiased(f)), 1e-13);
  EXPECT_GT(max_abs(curl(f)), 1.0);
}

TEST(Lie2Form, ConstantFieldIsAdvection) {
  const GridSpec g = GridSpec::cube(16);
  const VectorField xi(g, Vec3{1.0, 0.0, 0.0});
  const auto d = VectorField::from_function(g, [](double x, double, double) { return Vec3{0.0, std::sin(x), 0.0}; });
  const auto expect = VectorField::from_function(g, [](double x, double, double) { return Vec3{0.0, std::cos(x), 0.0}; });
  EXPECT_LT(max_diff(lie2form(xi, d), expect), 1e-13);
}

TEST(Lie2Form, SelfTransportVanishes) {
  const GridSpec g = GridSpec::cube(16);
  const VectorField d = random_divfree_field(g, 5, 3, 1.0);
  EXPECT_LT(max_abs(lie2form(d, d)), 1e-14);
}

TEST(Lie2Form, EqualsVectorFieldCommutator) {
  // Low-mode inputs so the product stays inside the retained band.
  const GridSpec g = GridSpec::cube(24);
  const VectorField xi = random_divfree_field(g, 21, 3, 1.0);
  const VectorField d = random_divfree_field(g, 22, 3, 1.0);
  EXPECT_LT(max_diff(lie2form(xi, d), advect(xi, d) - advect(d, xi)), 1e-10);
}

TEST(Lie2Form, RejectsDivergentArguments) {
  const GridSpec g = GridSpec::cube(8);
  const auto bad = VectorField::from_function(g, [](double x, double, double) { return Vec3{std::sin(x), 0.0, 0.0}; });
  const VectorField ok(g, Vec3{1.0, 0.0, 0.0});
  EXPECT_THROW(lie2form(bad, ok), ConstraintViolation);
  EXPECT_THROW(lie2form(ok, bad), ConstraintViolation);
}

TEST(Lie1Form, SelfTransport) {
  const GridSpec g = GridSpec::cube(24, false);
  const VectorField v = random_divfree_field(g, 31, 3, 1.0);
  const VectorField expect = grad(dot(v, v)) - cross(v, curl(v));
  EXPECT_LT(max_diff(lie1form(v, v), expect), 1e-11);
}

TEST(Lie1Form, ConstantFieldReduces) {
  const GridSpec g = GridSpec::cube(16);
  const Vec3 c{0.3, -0.7, 0.2};
  const VectorField xi(g, c);
  const VectorField v = random_divfree_field(g, 32, 3, 1.0);
  const ScalarField h = random_scalar_field(g, 33, 3, 1.0);
  EXPECT_LT(max_diff(lie1form(xi, v), advect(xi, v)), 1e-12);
  const ScalarField dh = c[0] * derivative(h, 0) + c[1] * derivative(h, 1) + c[2] * derivative(h, 2);
  EXPECT_LT(max_diff(lie_scalar_density(xi, h), dh), 1e-12);
}

TEST(Lie1Form, CommutesWithGradient) {
  const GridSpec g = GridSpec::cube(24, false);
  const VectorField xi = random_divfree_field(g, 34, 3, 1.0);
  const ScalarField f = random_scalar_field(g, 35, 3, 1.0);
  EXPECT_LT(max_diff(lie1form(xi, grad(f)), grad(dot(xi, grad(f)))), 1e-10);
}

TEST(Projection, IdempotentAndKillsGradients) {
  const GridSpec g = GridSpec::cube(16);
  const VectorField d = random_divfree_field(g, 41, 4, 1.0);
  EXPECT_LT(max_diff(project_divfree(d), d), 1e-12);
  const VectorField gf = grad(random_scalar_field(g, 42, 4, 1.0));
  EXPECT_LT(max_abs(project_divfree(gf)), 1e-12);
}

TEST(CurlInv, SingleMode) {
  const GridSpec g = GridSpec::cube(16);
  const auto b = VectorField::from_function(g, [](double x, double, double) { return Vec3{0.0, 0.0, std::cos(x)}; });
  const VectorField a = curl_inv(b);
  const auto expect = VectorField::from_function(g, [](double x, double, double) { return Vec3{0.0, std::sin(x), 0.0}; });
  EXPECT_LT(max_diff(a, expect), 1e-12);
  EXPECT_LT(max_diff(curl(a), b), 1e-12);
}

TEST(CurlInv, RejectsDivergentOrMeanFields) {
  const GridSpec g = GridSpec::cube(8);
  EXPECT_THROW(curl_inv(VectorField(g, Vec3{1.0, 0.0, 0.0})), ConstraintViolation);
  const auto bad = VectorField::from_function(g, [](double x, double, double) { return Vec3{std::sin(x), 0.0, 0.0}; });
  EXPECT_THROW(curl_inv(bad), ConstraintViolation);
}

TEST(Interpolator, ExactForBandLimitedFields) {
  const GridSpec g = GridSpec::cube(8);
  const auto v = VectorField::from_function(g, [](double x, double y, double z) {
    return Vec3{std::sin(x + 2.0 * y), std::cos(z) * std::sin(x), std::cos(3.0 * y)};
  });
  const SpectralInterpolator interp(v);
  for (const Vec3 p : {Vec3{0.3, 1.7, 5.9}, Vec3{-1.0, 7.0, 2.2}, Vec3{4.4, 0.01, 3.3}}) {
    const Vec3 got = interp(p);
    EXPECT_NEAR(got[0], std::sin(p[0] + 2.0 * p[1]), 1e-12);
    EXPECT_NEAR(got[1], std::cos(p[2]) * std::sin(p[0]), 1e-12);
    EXPECT_NEAR(got[2], std::cos(3.0 * p[1]), 1e-12);
  }
}

// Property: linearity of the spectral operators on random inputs.
TEST(Properties, OperatorsAreLinear) {
  const GridSpec g = GridSpec::cube(16);
  for (std::uint64_t seed = 50; seed < 55; ++seed) {
    const VectorField a = random_divfree_field(g, seed, 4, 1.0);
    const VectorField b = random_divfree_field(g, seed + 100, 4, 1.0);
    const double s = 0.1 * static_cast<double>(seed - 47);
    EXPECT_LT(max_diff(curl(a + s * b), curl(a) + s * curl(b)), 1e-12);
    EXPECT_LT(max_diff(div(a + s * b), div(a) + s * div(b)), 1e-12);
  }
}

}  // namespace
}  // namespace sabi
