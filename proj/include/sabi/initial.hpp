/**
 * @file initial.hpp
 * @brief Named initial-condition presets and random band-limited fields.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "sabi/dynamics.hpp"
#include "sabi/noise.hpp"

namespace sabi {

/// Random divergence-free field with modes |m_axis| <= kmax, zero mean, scaled
/// so that max|component| equals `amplitude`.
inline VectorField random_divfree_field(const GridSpec& g, std::uint64_t seed, int kmax, double amplitude) {
  std::array<Spectrum, 3> s{Spectrum(g), Spectrum(g), Spectrum(g)};
  const Wavenumbers w(g);
  for_each_mode(g, w, [&](std::size_t n, int ix, int iy, int iz, const Vec3&) {
    const int mx = w.mx[ix], my = w.my[iy], mz = w.mz[iz];
    if (std::abs(mx) > kmax || std::abs(my) > kmax || std::abs(mz) > kmax) return;
    if (mx == 0 && my == 0 && mz == 0) return;
    for (int d = 0; d < 3; ++d) {
      const double re = keyed_normal(seed, static_cast<std::uint64_t>(d), Stream::InitialData, n, 0);
      const double im = keyed_normal(seed, static_cast<std::uint64_t>(d), Stream::InitialData, n, 1);
      s[d].c[n] = Complex(re, im);
    }
  });
  // The inverse real transform keeps only the Hermitian part, so the kx = 0
  // plane needs no explicit symmetrization.
  VectorField v = project_divfree(detail::ifft3(std::move(s)));
  const double m = max_abs(v);
  if (m > 0.0) v *= amplitude / m;
  return v;
}

inline ScalarField random_scalar_field(const GridSpec& g, std::uint64_t seed, int kmax, double amplitude) {
  Spectrum s(g);
  const Wavenumbers w(g);
  for_each_mode(g, w, [&](std::size_t n, int ix, int iy, int iz, const Vec3&) {
    const int mx = w.mx[ix], my = w.my[iy], mz = w.mz[iz];
    if (std::abs(mx) > kmax || std::abs(my) > kmax || std::abs(mz) > kmax) return;
    if (mx == 0 && my == 0 && mz == 0) return;
    s.c[n] = Complex(keyed_normal(seed, 7, Stream::InitialData, n, 0), keyed_normal(seed, 7, Stream::InitialData, n, 1));
  });
  ScalarField f = ifft(std::move(s));
  const double m = max_abs(f);
  if (m > 0.0) f *= amplitude / m;
  return f;
}

/// Arnold-Beltrami-Childress field (a sin z + c cos y, b sin x + a cos z, c sin y + b cos x); curl v = v.
inline VectorField abc_field(const GridSpec& g, double a, double b, double c) {
  return VectorField::from_function(g, [=](double x, double y, double z) {
    return Vec3{a * std::sin(z) + c * std::cos(y), b * std::sin(x) + a * std::cos(z), c * std::sin(y) + b * std::cos(x)};
  });
}

/// Taylor-Green velocity (sin x cos y cos z, -cos x sin y cos z, 0).
inline VectorField taylor_green_velocity(const GridSpec& g) {
  return VectorField::from_function(g, [](double x, double y, double z) {
    return Vec3{std::sin(x) * std::cos(y) * std::cos(z), -std::cos(x) * std::sin(y) * std::cos(z), 0.0};
  });
}

struct InitialCondition {
  std::string preset = "random-band-limited";
  std::uint64_t seed = 1;
  double amplitude = 0.3;
  int kmax = 2;
  Vec3 mean_d{0.0, 0.0, 0.0};
  Vec3 mean_b{0.0, 0.0, 0.0};

  friend bool operator==(const InitialCondition&, const InitialCondition&) = default;
};

inline const std::array<std::string_view, 4> initial_presets{"plane-wave", "taylor-green", "abc",
                                                             "random-band-limited"};

inline EMState make_em_initial(const GridSpec& g, const InitialCondition& ic) {
  EMState s{VectorField(g), VectorField(g)};
  const double a = ic.amplitude;
  if (ic.preset == "plane-wave") {
    // Transverse wave travelling along +x: D = (0, a cos x, 0), B = (0, 0, a cos x).
    s.D = VectorField::from_function(g, [&](double x, double, double) { return Vec3{0.0, a * std::cos(two_pi * x / g.lx), 0.0}; });
    s.B = VectorField::from_function(g, [&](double x, double, double) { return Vec3{0.0, 0.0, a * std::cos(two_pi * x / g.lx)}; });
  } else if (ic.preset == "taylor-green") {
    s.D = taylor_green_velocity(g);
    s.D *= a;
    s.B = curl(taylor_green_velocity(g));
    s.B *= a / std::max(1e-300, max_abs(s.B));
  } else if (ic.preset == "abc") {
    s.D = abc_field(g, 1.0, 1.0, 1.0);
    s.D *= a / 2.0;
    s.B = abc_field(g, 1.0, -0.5, 0.7);
    s.B *= a / 2.0;
  } else if (ic.preset == "random-band-limited") {
    s.D = random_divfree_field(g, ic.seed, ic.kmax, a);
    s.B = random_divfree_field(g, ic.seed + 0x9e37, ic.kmax, a);
  } else {
    throw ConfigError("unknown initial preset '" + ic.preset + "'");
  }
  s.D += VectorField(g, ic.mean_d);
  s.B += VectorField(g, ic.mean_b);
  return s;
}

inline VorticityState make_vorticity_initial(const GridSpec& g, const InitialCondition& ic) {
  if (ic.preset == "taylor-green") {
    VectorField w = curl(taylor_green_velocity(g));
    w *= ic.amplitude;
    return {std::move(w)};
  }
  if (ic.preset == "abc") {
    VectorField w = abc_field(g, 1.0, 1.0, 1.0);
    w *= ic.amplitude;
    return {std::move(w)};
  }
  if (ic.preset == "random-band-limited") {
    return {random_divfree_field(g, ic.seed, ic.kmax, ic.amplitude)};
  }
  throw ConfigError("initial preset '" + ic.preset + "' is not available for euler-vorticity");
}

/// Orthogonal (P . B = 0) data with a null-free, zero-mean, helical B.
///
/// B is a Beltrami field (sin z, cos z + e sin x, e cos x) with |B| >= 1 - e,
/// plus (for the random preset) a small divergence-free perturbation.
/// P = B x W for a smooth W, so P . B vanishes pointwise.
inline MHDState make_mhd_initial(const GridSpec& g, const InitialCondition& ic) {
  const double eps = 0.1;
  VectorField B = VectorField::from_function(g, [&](double x, double, double z) {
    return Vec3{std::sin(z), std::cos(z) + eps * std::sin(x), eps * std::cos(x)};
  });
  VectorField W(g);
  if (ic.preset == "abc") {
    W = abc_field(g, 0.4, 1.0, 0.8);
  } else if (ic.preset == "random-band-limited") {
    B += random_divfree_field(g, ic.seed + 17, ic.kmax, 0.1);
    W = random_divfree_field(g, ic.seed, ic.kmax, 1.0);
  } else {
    throw ConfigError("initial preset '" + ic.preset + "' is not available for the mhd models");
  }
  VectorField P = cross(B, W);
  P *= ic.amplitude / std::max(1e-300, max_abs(P));
  return {std::move(P), std::move(B)};
}

}  // namespace sabi
