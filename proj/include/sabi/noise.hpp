/**
 * @file noise.hpp
 * @brief Divergence-free correlation fields and the counter-based Wiener driver.
 *
 * Every Gaussian draw is a pure function of (seed, member, stream, index, mode),
 * so ensemble members can be integrated in any order or on any worker and
 * still reproduce bit-identical paths.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sabi/grid.hpp"

namespace sabi {

// ---------------------------------------------------------------------------
// Counter-based Gaussian source

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline double to_unit_open(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace detail

/// Key layout: which logical sequence a draw belongs to.
enum class Stream : std::uint64_t { Increment = 1, Bridge = 2, InitialData = 3, NoisePhase = 4 };

/// Standard normal draw keyed by the full tuple (Box-Muller on two hashed uniforms).
inline double keyed_normal(std::uint64_t seed, std::uint64_t member, Stream stream, std::uint64_t index,
                           std::uint64_t mode, std::uint64_t level = 0) {
  std::uint64_t h = detail::splitmix64(seed);
  h = detail::splitmix64(h ^ member);
  h = detail::splitmix64(h ^ static_cast<std::uint64_t>(stream));
  h = detail::splitmix64(h ^ level);
  h = detail::splitmix64(h ^ index);
  h = detail::splitmix64(h ^ mode);
  const double u1 = detail::to_unit_open(detail::splitmix64(h ^ 0x51ULL));
  const double u2 = detail::to_unit_open(detail::splitmix64(h ^ 0xa3ULL));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

struct WienerDriver {
  std::uint64_t seed = 0;
  std::uint64_t member = 0;
  int modes = 0;

  /// N independent Normal(0, dt) increments for one time step.
  std::vector<double> sample_increments(std::uint64_t step, double dt) const {
    if (!(dt > 0.0)) throw std::invalid_argument("sample_increments requires dt > 0");
    std::vector<double> dw(static_cast<std::size_t>(modes));
    const double sd = std::sqrt(dt);
    for (int i = 0; i < modes; ++i) {
      dw[i] = sd * keyed_normal(seed, member, Stream::Increment, step, static_cast<std::uint64_t>(i));
    }
    return dw;
  }
};

/// A Brownian path fixed on [0, t_end] and refined by dyadic midpoint (Levy) bridging.
///
/// Level 0 uses `base_steps` increments; level l has base_steps * 2^l steps and
/// agrees with every coarser level at the shared nodes.
class BrownianPath {
 public:
  BrownianPath(const WienerDriver& driver, double t_end, int base_steps, int levels)
      : t_end_(t_end), base_steps_(base_steps) {
    if (base_steps < 1 || levels < 0 || !(t_end > 0.0)) throw std::invalid_argument("invalid Brownian path layout");
    nodes_.resize(static_cast<std::size_t>(levels) + 1);
    const double dt0 = t_end / base_steps;
    auto& l0 = nodes_[0];
    l0.assign(driver.modes, std::vector<double>(base_steps + 1, 0.0));
    for (int m = 0; m < driver.modes; ++m)
      for (int n = 0; n < base_steps; ++n)
        l0[m][n + 1] = l0[m][n] + std::sqrt(dt0) * keyed_normal(driver.seed, driver.member, Stream::Increment,
                                                                 static_cast<std::uint64_t>(n),
                                                                 static_cast<std::uint64_t>(m));
    for (int lev = 1; lev <= levels; ++lev) {
      const auto& coarse = nodes_[lev - 1];
      const int nc = steps(lev - 1);
      const double h = t_end / nc;
      auto& fine = nodes_[lev];
      fine.assign(driver.modes, std::vector<double>(2 * nc + 1, 0.0));
      for (int m = 0; m < driver.modes; ++m)
        for (int n = 0; n < nc; ++n) {
          const double left = coarse[m][n], right = coarse[m][n + 1];
          const double z = keyed_normal(driver.seed, driver.member, Stream::Bridge, static_cast<std::uint64_t>(n),
                                        static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(lev));
          fine[m][2 * n] = left;
          fine[m][2 * n + 1] = 0.5 * (left + right) + 0.5 * std::sqrt(h) * z;
          fine[m][2 * n + 2] = right;
        }
    }
  }

  int levels() const { return static_cast<int>(nodes_.size()) - 1; }
  int steps(int level) const { return base_steps_ << level; }
  double dt(int level) const { return t_end_ / steps(level); }
  int modes() const { return nodes_.empty() ? 0 : static_cast<int>(nodes_[0].size()); }

  double value(int level, int mode, int node) const { return nodes_.at(level).at(mode).at(node); }

  std::vector<double> increments(int level, int step) const {
    std::vector<double> dw(modes());
    for (int m = 0; m < modes(); ++m) dw[m] = nodes_[level][m][step + 1] - nodes_[level][m][step];
    return dw;
  }

 private:
  double t_end_;
  int base_steps_;
  std::vector<std::vector<std::vector<double>>> nodes_;  // [level][mode][node]
};

// ---------------------------------------------------------------------------
// Correlation fields

enum class NoiseKind { Constant, Harmonic, Custom };

struct FourierTerm {
  std::array<int, 3> k{0, 0, 0};
  Vec3 a{0.0, 0.0, 0.0};
  double phase = 0.0;
  friend bool operator==(const FourierTerm&, const FourierTerm&) = default;
};

/// One configured xi_i. Harmonic modes are projected transverse to k; custom
/// terms are summed verbatim and must already be divergence-free.
struct NoiseModeSpec {
  NoiseKind kind = NoiseKind::Constant;
  std::array<int, 3> k{0, 0, 0};
  Vec3 a{0.0, 0.0, 0.0};
  double phase = 0.0;
  double amplitude = 1.0;
  std::vector<FourierTerm> terms;
  friend bool operator==(const NoiseModeSpec&, const NoiseModeSpec&) = default;
};

inline Vec3 physical_wavevector(const GridSpec& g, const std::array<int, 3>& k) {
  return {two_pi * k[0] / g.lx, two_pi * k[1] / g.ly, two_pi * k[2] / g.lz};
}

/// xi(x) = a_perp cos(k.x + phase), with a_perp the part of a normal to k.
inline VectorField make_divfree_mode(const GridSpec& g, const std::array<int, 3>& k, const Vec3& a, double phase) {
  if (k[0] == 0 && k[1] == 0 && k[2] == 0) {
    throw std::invalid_argument("harmonic noise mode needs k != 0; use a constant mode instead");
  }
  const Vec3 kv = physical_wavevector(g, k);
  const double proj = dot(a, kv) / dot(kv, kv);
  const Vec3 ap{a[0] - proj * kv[0], a[1] - proj * kv[1], a[2] - proj * kv[2]};
  if (norm(ap) <= 1e-14 * std::max(1.0, norm(a))) {
    throw std::invalid_argument("harmonic noise amplitude is parallel to k (transverse part vanishes)");
  }
  return VectorField::from_function(g, [&](double x, double y, double z) {
    const double c = std::cos(kv[0] * x + kv[1] * y + kv[2] * z + phase);
    return Vec3{ap[0] * c, ap[1] * c, ap[2] * c};
  });
}

inline VectorField make_constant_mode(const GridSpec& g, const Vec3& a) { return VectorField(g, a); }

inline VectorField make_custom_mode(const GridSpec& g, const std::vector<FourierTerm>& terms) {
  VectorField out(g);
  for (const auto& t : terms) {
    const Vec3 kv = physical_wavevector(g, t.k);
    out += VectorField::from_function(g, [&](double x, double y, double z) {
      const double c = std::cos(kv[0] * x + kv[1] * y + kv[2] * z + t.phase);
      return Vec3{t.a[0] * c, t.a[1] * c, t.a[2] * c};
    });
  }
  return out;
}

inline constexpr double noise_div_tolerance = 1e-10;

struct NoiseModel {
  std::vector<VectorField> xis;

  int size() const { return static_cast<int>(xis.size()); }
  bool empty() const { return xis.empty(); }

  /// Validates divergence of every mode; throws ConstraintViolation otherwise.
  static NoiseModel from_fields(std::vector<VectorField> fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const double d = max_divergence(fields[i]);
      if (d > noise_div_tolerance) {
        throw ConstraintViolation("divergence-free violation in noise mode " + std::to_string(i) +
                                  " (max|div xi| = " + std::to_string(d) + ")");
      }
    }
    return NoiseModel{std::move(fields)};
  }

  static NoiseModel build(const GridSpec& g, const std::vector<NoiseModeSpec>& specs) {
    std::vector<VectorField> fields;
    fields.reserve(specs.size());
    for (const auto& s : specs) {
      VectorField xi;
      switch (s.kind) {
        case NoiseKind::Constant: xi = make_constant_mode(g, s.a); break;
        case NoiseKind::Harmonic: xi = make_divfree_mode(g, s.k, s.a, s.phase); break;
        case NoiseKind::Custom: xi = make_custom_mode(g, s.terms); break;
      }
      xi *= s.amplitude;
      fields.push_back(std::move(xi));
    }
    return from_fields(std::move(fields));
  }

  /// Sum_i xi_i dW_i.
  VectorField combined(std::span<const double> dw) const {
    VectorField out(xis.empty() ? GridSpec{} : xis.front().grid);
    for (std::size_t i = 0; i < xis.size(); ++i) out.axpy(dw[i], xis[i]);
    return out;
  }

  /// Sum_i max|xi_i|, used by the CFL guard.
  double speed_bound() const {
    double s = 0.0;
    for (const auto& xi : xis) s += max_norm(xi);
    return s;
  }
};

}  // namespace sabi
