/**
 * @file grid.hpp
 * @brief Periodic 3-torus fields and Fourier pseudo-spectral operators.
 *
 * Fields are sampled on a uniform nx*ny*nz grid, stored x-fastest.
 * Derivatives are taken in Fourier space with the Nyquist wavenumber
 * zeroed, which makes the discrete grad/div/curl exactly skew-adjoint
 * under the grid inner product and keeps div(curl F) = 0 to roundoff.
 */
#pragma once

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "sabi/errors.hpp"

namespace sabi {

using Vec3 = std::array<double, 3>;
using Complex = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

struct GridSpec {
  int nx = 16;
  int ny = 16;
  int nz = 16;
  double lx = two_pi;
  double ly = two_pi;
  double lz = two_pi;
  bool dealias = true;

  static GridSpec cube(int n, bool dealias = true) {
    GridSpec g;
    g.nx = g.ny = g.nz = n;
    g.dealias = dealias;
    return g;
  }

  void validate() const {
    for (auto [n, axis] : {std::pair{nx, "nx"}, std::pair{ny, "ny"}, std::pair{nz, "nz"}}) {
      if (n < 4 || n % 2 != 0) {
        throw ConfigError(std::string("grid.") + axis + " must be even and >= 4");
      }
    }
    if (!(lx > 0.0) || !(ly > 0.0) || !(lz > 0.0)) {
      throw ConfigError("grid lengths must be positive");
    }
  }

  std::size_t size() const { return static_cast<std::size_t>(nx) * ny * nz; }
  std::size_t spectral_size() const { return static_cast<std::size_t>(nx / 2 + 1) * ny * nz; }
  double volume() const { return lx * ly * lz; }
  double cell_volume() const { return volume() / static_cast<double>(size()); }
  double min_spacing() const { return std::min({lx / nx, ly / ny, lz / nz}); }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(nx) * (j + static_cast<std::size_t>(ny) * k);
  }
  Vec3 position(int i, int j, int k) const {
    return {lx * i / nx, ly * j / ny, lz * k / nz};
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct ScalarField {
  GridSpec grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const GridSpec& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }

  template <class F>
  static ScalarField from_function(const GridSpec& g, F&& f) {
    ScalarField out(g);
    for (int k = 0; k < g.nz; ++k)
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
          const Vec3 x = g.position(i, j, k);
          out.values[g.index(i, j, k)] = f(x[0], x[1], x[2]);
        }
    return out;
  }

  ScalarField& operator+=(const ScalarField& o) {
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
    return *this;
  }
  ScalarField& operator-=(const ScalarField& o) {
    for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
    return *this;
  }
  ScalarField& operator*=(double a) {
    for (double& v : values) v *= a;
    return *this;
  }
};

inline ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
inline ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
inline ScalarField operator*(double s, ScalarField a) { return a *= s; }
inline ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  ScalarField out(a.grid);
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = a.values[i] * b.values[i];
  return out;
}

struct VectorField {
  GridSpec grid;
  std::array<ScalarField, 3> c;

  VectorField() = default;
  explicit VectorField(const GridSpec& g, const Vec3& fill = {0.0, 0.0, 0.0})
      : grid(g), c{ScalarField(g, fill[0]), ScalarField(g, fill[1]), ScalarField(g, fill[2])} {}
  VectorField(ScalarField x, ScalarField y, ScalarField z)
      : grid(x.grid), c{std::move(x), std::move(y), std::move(z)} {
    if (!(c[1].grid == grid) || !(c[2].grid == grid)) {
      throw std::invalid_argument("vector components must share one grid");
    }
  }

  ScalarField& operator[](int d) { return c[d]; }
  const ScalarField& operator[](int d) const { return c[d]; }
  ScalarField& x() { return c[0]; }
  ScalarField& y() { return c[1]; }
  ScalarField& z() { return c[2]; }
  const ScalarField& x() const { return c[0]; }
  const ScalarField& y() const { return c[1]; }
  const ScalarField& z() const { return c[2]; }

  Vec3 at(std::size_t i) const { return {c[0].values[i], c[1].values[i], c[2].values[i]}; }
  void set(std::size_t i, const Vec3& v) {
    c[0].values[i] = v[0];
    c[1].values[i] = v[1];
    c[2].values[i] = v[2];
  }

  template <class F>
  static VectorField from_function(const GridSpec& g, F&& f) {
    VectorField out(g);
    for (int k = 0; k < g.nz; ++k)
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
          const Vec3 x = g.position(i, j, k);
          out.set(g.index(i, j, k), f(x[0], x[1], x[2]));
        }
    return out;
  }

  VectorField& operator+=(const VectorField& o) {
    for (int d = 0; d < 3; ++d) c[d] += o.c[d];
    return *this;
  }
  VectorField& operator-=(const VectorField& o) {
    for (int d = 0; d < 3; ++d) c[d] -= o.c[d];
    return *this;
  }
  VectorField& operator*=(double a) {
    for (auto& s : c) s *= a;
    return *this;
  }
  /// this += a * o, without temporaries.
  VectorField& axpy(double a, const VectorField& o) {
    for (int d = 0; d < 3; ++d) {
      auto& v = c[d].values;
      const auto& w = o.c[d].values;
      for (std::size_t i = 0; i < v.size(); ++i) v[i] += a * w[i];
    }
    return *this;
  }
};

inline VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
inline VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
inline VectorField operator*(double s, VectorField a) { return a *= s; }
inline VectorField operator-(VectorField a) { return a *= -1.0; }

// ---------------------------------------------------------------------------
// FFT layer

namespace detail {

struct FftPlans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  FftPlans get(const GridSpec& g) {
    const auto key = std::make_tuple(g.nx, g.ny, g.nz);
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<double> real(g.size());
    std::vector<Complex> spec(g.spectral_size());
    auto* cplx = reinterpret_cast<fftw_complex*>(spec.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    FftPlans p;
    p.forward = fftw_plan_dft_r2c_3d(g.nz, g.ny, g.nx, real.data(), cplx, flags);
    p.backward = fftw_plan_dft_c2r_3d(g.nz, g.ny, g.nx, cplx, real.data(), flags);
    if (p.forward == nullptr || p.backward == nullptr) {
      throw std::runtime_error("FFTW planning failed");
    }
    plans_.emplace(key, p);
    return p;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, p] : plans_) {
      fftw_destroy_plan(p.forward);
      fftw_destroy_plan(p.backward);
    }
  }

  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, FftPlans> plans_;
};

inline int signed_mode(int idx, int n) { return idx <= n / 2 ? idx : idx - n; }

}  // namespace detail

/// Normalized Fourier coefficients in FFTW r2c layout: [kz][ky][kx], kx in [0, nx/2].
struct Spectrum {
  GridSpec grid;
  std::vector<Complex> c;

  Spectrum() = default;
  explicit Spectrum(const GridSpec& g) : grid(g), c(g.spectral_size()) {}
};

inline Spectrum fft(const ScalarField& f) {
  Spectrum s(f.grid);
  const auto plans = detail::PlanCache::instance().get(f.grid);
  // r2c with FFTW_ESTIMATE does not modify its input.
  fftw_execute_dft_r2c(plans.forward, const_cast<double*>(f.values.data()),
                       reinterpret_cast<fftw_complex*>(s.c.data()));
  const double norm = 1.0 / static_cast<double>(f.grid.size());
  for (auto& v : s.c) v *= norm;
  return s;
}

/// Consumes its argument; multi-dimensional c2r transforms overwrite the input.
inline ScalarField ifft(Spectrum s) {
  ScalarField f(s.grid);
  const auto plans = detail::PlanCache::instance().get(s.grid);
  fftw_execute_dft_c2r(plans.backward, reinterpret_cast<fftw_complex*>(s.c.data()), f.values.data());
  return f;
}

/// Wavenumber tables for one grid. `deriv` has the Nyquist entry zeroed.
struct Wavenumbers {
  std::vector<double> kx, ky, kz;
  std::vector<int> mx, my, mz;
  std::array<int, 3> cutoff{};

  explicit Wavenumbers(const GridSpec& g) {
    auto fill = [](int n, double len, bool half, std::vector<double>& k, std::vector<int>& m) {
      const int count = half ? n / 2 + 1 : n;
      k.resize(count);
      m.resize(count);
      for (int i = 0; i < count; ++i) {
        const int mode = half ? i : detail::signed_mode(i, n);
        m[i] = mode;
        k[i] = (std::abs(mode) == n / 2) ? 0.0 : two_pi * mode / len;
      }
    };
    fill(g.nx, g.lx, true, kx, mx);
    fill(g.ny, g.ly, false, ky, my);
    fill(g.nz, g.lz, false, kz, mz);
    cutoff = {(g.nx - 1) / 3, (g.ny - 1) / 3, (g.nz - 1) / 3};
  }

  bool retained(int ix, int iy, int iz) const {
    return std::abs(mx[ix]) <= cutoff[0] && std::abs(my[iy]) <= cutoff[1] && std::abs(mz[iz]) <= cutoff[2];
  }
};

/// Visit every spectral coefficient with its flat index and derivative wavevector.
template <class F>
void for_each_mode(const GridSpec& g, const Wavenumbers& w, F&& f) {
  const int hx = g.nx / 2 + 1;
  std::size_t idx = 0;
  for (int iz = 0; iz < g.nz; ++iz)
    for (int iy = 0; iy < g.ny; ++iy)
      for (int ix = 0; ix < hx; ++ix, ++idx) f(idx, ix, iy, iz, Vec3{w.kx[ix], w.ky[iy], w.kz[iz]});
}

inline void truncate(Spectrum& s) {
  const Wavenumbers w(s.grid);
  for_each_mode(s.grid, w, [&](std::size_t idx, int ix, int iy, int iz, const Vec3&) {
    if (!w.retained(ix, iy, iz)) s.c[idx] = 0.0;
  });
}

/// 2/3-rule truncation; identity when the grid has dealiasing disabled.
inline ScalarField dealias(const ScalarField& f) {
  if (!f.grid.dealias) return f;
  Spectrum s = fft(f);
  truncate(s);
  return ifft(std::move(s));
}

inline VectorField dealias(const VectorField& v) {
  if (!v.grid.dealias) return v;
  return VectorField(dealias(v.x()), dealias(v.y()), dealias(v.z()));
}

// ---------------------------------------------------------------------------
// Pointwise algebra

inline VectorField cross(const VectorField& a, const VectorField& b) {
  VectorField out(a.grid);
  const std::size_t n = a.grid.size();
  const double* ax = a.x().values.data();
  const double* ay = a.y().values.data();
  const double* az = a.z().values.data();
  const double* bx = b.x().values.data();
  const double* by = b.y().values.data();
  const double* bz = b.z().values.data();
  double* ox = out.x().values.data();
  double* oy = out.y().values.data();
  double* oz = out.z().values.data();
  for (std::size_t i = 0; i < n; ++i) {
    ox[i] = ay[i] * bz[i] - az[i] * by[i];
    oy[i] = az[i] * bx[i] - ax[i] * bz[i];
    oz[i] = ax[i] * by[i] - ay[i] * bx[i];
  }
  return out;
}

inline ScalarField dot(const VectorField& a, const VectorField& b) {
  ScalarField out(a.grid);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.values[i] = a.x().values[i] * b.x().values[i] + a.y().values[i] * b.y().values[i] +
                    a.z().values[i] * b.z().values[i];
  }
  return out;
}

inline VectorField scale(const ScalarField& s, const VectorField& v) {
  VectorField out(v.grid);
  for (int d = 0; d < 3; ++d)
    for (std::size_t i = 0; i < s.size(); ++i) out[d].values[i] = s.values[i] * v[d].values[i];
  return out;
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

// ---------------------------------------------------------------------------
// Reductions

inline double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

inline double max_abs(const VectorField& v) {
  return std::max({max_abs(v.x()), max_abs(v.y()), max_abs(v.z())});
}

/// max over grid points of the Euclidean norm.
inline double max_norm(const VectorField& v) {
  double m = 0.0;
  for (std::size_t i = 0; i < v.grid.size(); ++i) m = std::max(m, norm(v.at(i)));
  return m;
}

/// Quadrature of a periodic sample set: mean times volume.
inline double integrate(const ScalarField& f) {
  double sum = 0.0;
  for (double v : f.values) sum += v;
  return sum * f.grid.cell_volume();
}

inline Vec3 integrate(const VectorField& v) {
  return {integrate(v.x()), integrate(v.y()), integrate(v.z())};
}

inline double inner(const ScalarField& a, const ScalarField& b) { return integrate(a * b); }
inline double inner(const VectorField& a, const VectorField& b) { return integrate(dot(a, b)); }
inline double l2_norm(const ScalarField& f) { return std::sqrt(inner(f, f)); }
inline double l2_norm(const VectorField& v) { return std::sqrt(inner(v, v)); }

inline bool all_finite(const ScalarField& f) {
  return std::all_of(f.values.begin(), f.values.end(), [](double v) { return std::isfinite(v); });
}
inline bool all_finite(const VectorField& v) {
  return all_finite(v.x()) && all_finite(v.y()) && all_finite(v.z());
}

// ---------------------------------------------------------------------------
// Spectral differential operators

namespace detail {

inline std::array<Spectrum, 3> fft3(const VectorField& v) { return {fft(v.x()), fft(v.y()), fft(v.z())}; }

inline VectorField ifft3(std::array<Spectrum, 3> s) {
  return VectorField(ifft(std::move(s[0])), ifft(std::move(s[1])), ifft(std::move(s[2])));
}

inline std::array<Spectrum, 3> curl_hat(const std::array<Spectrum, 3>& f, bool truncate_modes) {
  const GridSpec& g = f[0].grid;
  const Wavenumbers w(g);
  std::array<Spectrum, 3> out{Spectrum(g), Spectrum(g), Spectrum(g)};
  const Complex I(0.0, 1.0);
  for_each_mode(g, w, [&](std::size_t n, int ix, int iy, int iz, const Vec3& k) {
    if (truncate_modes && !w.retained(ix, iy, iz)) return;
    const Complex fx = f[0].c[n], fy = f[1].c[n], fz = f[2].c[n];
    out[0].c[n] = I * (k[1] * fz - k[2] * fy);
    out[1].c[n] = I * (k[2] * fx - k[0] * fz);
    out[2].c[n] = I * (k[0] * fy - k[1] * fx);
  });
  return out;
}

}  // namespace detail

inline ScalarField derivative(const ScalarField& f, int axis) {
  Spectrum s = fft(f);
  const Wavenumbers w(f.grid);
  const Complex I(0.0, 1.0);
  for_each_mode(f.grid, w, [&](std::size_t n, int, int, int, const Vec3& k) { s.c[n] *= I * k[axis]; });
  return ifft(std::move(s));
}

inline VectorField grad(const ScalarField& f) {
  const Spectrum s = fft(f);
  const Wavenumbers w(f.grid);
  const Complex I(0.0, 1.0);
  std::array<Spectrum, 3> out{Spectrum(f.grid), Spectrum(f.grid), Spectrum(f.grid)};
  for_each_mode(f.grid, w, [&](std::size_t n, int, int, int, const Vec3& k) {
    for (int d = 0; d < 3; ++d) out[d].c[n] = I * k[d] * s.c[n];
  });
  return detail::ifft3(std::move(out));
}

inline ScalarField div(const VectorField& v) {
  const auto s = detail::fft3(v);
  const Wavenumbers w(v.grid);
  const Complex I(0.0, 1.0);
  Spectrum out(v.grid);
  for_each_mode(v.grid, w, [&](std::size_t n, int, int, int, const Vec3& k) {
    out.c[n] = I * (k[0] * s[0].c[n] + k[1] * s[1].c[n] + k[2] * s[2].c[n]);
  });
  return ifft(std::move(out));
}

inline VectorField curl(const VectorField& v) {
  return detail::ifft3(detail::curl_hat(detail::fft3(v), false));
}

/// curl of the 2/3-truncated field; plain curl when the grid has dealiasing disabled.
inline VectorField curl_dealiased(const VectorField& v) {
  return detail::ifft3(detail::curl_hat(detail::fft3(v), v.grid.dealias));
}

namespace detail {

inline VectorField tensor_div(const std::array<VectorField, 3>& rows, bool truncate_modes) {
  const GridSpec& g = rows[0].grid;
  const Wavenumbers w(g);
  const Complex I(0.0, 1.0);
  std::array<Spectrum, 3> out{Spectrum(g), Spectrum(g), Spectrum(g)};
  for (int j = 0; j < 3; ++j) {
    const auto s = fft3(rows[j]);
    for_each_mode(g, w, [&](std::size_t n, int ix, int iy, int iz, const Vec3& k) {
      if (truncate_modes && !w.retained(ix, iy, iz)) return;
      out[j].c[n] = I * (k[0] * s[0].c[n] + k[1] * s[1].c[n] + k[2] * s[2].c[n]);
    });
  }
  return ifft3(std::move(out));
}

}  // namespace detail

/// Row-wise divergence of a (not necessarily symmetric) tensor field given as
/// rows[j] = (T_xj, T_yj, T_zj); returns out_j = d_i T_ij.
inline VectorField tensor_div(const std::array<VectorField, 3>& rows) { return detail::tensor_div(rows, false); }

/// tensor_div with 2/3 truncation on dealiased grids.
inline VectorField tensor_div_dealiased(const std::array<VectorField, 3>& rows) {
  return detail::tensor_div(rows, rows[0].grid.dealias);
}

inline ScalarField laplacian(const ScalarField& f) {
  Spectrum s = fft(f);
  const Wavenumbers w(f.grid);
  for_each_mode(f.grid, w, [&](std::size_t n, int, int, int, const Vec3& k) { s.c[n] *= -dot(k, k); });
  return ifft(std::move(s));
}

inline VectorField laplacian(const VectorField& v) {
  return VectorField(laplacian(v.x()), laplacian(v.y()), laplacian(v.z()));
}

/// (a . grad) b, evaluated pointwise from spectral derivatives of b.
inline VectorField advect(const VectorField& a, const VectorField& b) {
  VectorField out(a.grid);
  for (int d = 0; d < 3; ++d) {
    const VectorField gb = grad(b[d]);
    out[d] = dot(a, gb);
  }
  return out;
}

inline double max_divergence(const VectorField& v) { return max_abs(div(v)); }

// ---------------------------------------------------------------------------
// Lie derivatives

inline constexpr double lie_div_tolerance = 1e-10;

/// -curl(xi x D); the product is truncated before differentiation on dealiased grids.
inline VectorField lie2form_unchecked(const VectorField& xi, const VectorField& field) {
  VectorField out = curl_dealiased(cross(xi, field));
  out *= -1.0;
  return out;
}

/// Lie derivative of a divergence-free flux (2-form) field: [xi, D] = -curl(xi x D).
inline VectorField lie2form(const VectorField& xi, const VectorField& field) {
  const double dxi = max_divergence(xi);
  const double dfield = max_divergence(field);
  if (dxi > lie_div_tolerance || dfield > lie_div_tolerance) {
    throw ConstraintViolation("lie2form requires divergence-free arguments (max|div xi| = " +
                              std::to_string(dxi) + ", max|div D| = " + std::to_string(dfield) + ")");
  }
  return lie2form_unchecked(xi, field);
}

/// Lie derivative of a 1-form v.dx: grad(xi.v) - xi x curl v.
inline VectorField lie1form(const VectorField& xi, const VectorField& v) {
  VectorField out = grad(dot(xi, v));
  out -= cross(xi, curl(v));
  return out;
}

/// Lie derivative of a scalar density h d^3x: div(h xi).
inline ScalarField lie_scalar_density(const VectorField& xi, const ScalarField& h) {
  return div(scale(h, xi));
}

/// Lie derivative of a 1-form density P.dx (x) d^3x: d_j(xi^j P_k) + P_j d_k xi^j.
inline VectorField lie_1form_density(const VectorField& xi, const VectorField& p) {
  VectorField out(xi.grid);
  std::array<VectorField, 3> grad_xi{grad(xi.x()), grad(xi.y()), grad(xi.z())};
  for (int k = 0; k < 3; ++k) {
    out[k] = div(scale(p[k], xi));
    for (int j = 0; j < 3; ++j) out[k] += p[j] * grad_xi[j][k];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Helmholtz projection and inverse curl

inline VectorField project_divfree(const VectorField& v) {
  auto s = detail::fft3(v);
  const Wavenumbers w(v.grid);
  for_each_mode(v.grid, w, [&](std::size_t n, int, int, int, const Vec3& k) {
    const double k2 = dot(k, k);
    if (k2 == 0.0) return;
    const Complex kf = k[0] * s[0].c[n] + k[1] * s[1].c[n] + k[2] * s[2].c[n];
    for (int d = 0; d < 3; ++d) s[d].c[n] -= k[d] * kf / k2;
  });
  return detail::ifft3(std::move(s));
}

inline constexpr double curl_inv_div_tolerance = 1e-8;

/// Divergence-free vector potential A with curl A = B. Requires div B = 0 and zero mean.
inline VectorField curl_inv(const VectorField& b) {
  const double divb = max_divergence(b);
  if (divb > curl_inv_div_tolerance) {
    throw ConstraintViolation("curl_inv requires a divergence-free field (max|div B| = " + std::to_string(divb) + ")");
  }
  auto s = detail::fft3(b);
  const double scale_b = std::max(1.0, max_abs(b));
  for (int d = 0; d < 3; ++d) {
    if (std::abs(s[d].c[0]) > 1e-12 * scale_b) {
      throw ConstraintViolation("curl_inv requires a zero-mean field");
    }
  }
  const Wavenumbers w(b.grid);
  const Complex I(0.0, 1.0);
  std::array<Spectrum, 3> a{Spectrum(b.grid), Spectrum(b.grid), Spectrum(b.grid)};
  for_each_mode(b.grid, w, [&](std::size_t n, int, int, int, const Vec3& k) {
    const double k2 = dot(k, k);
    if (k2 == 0.0) return;
    const Complex bx = s[0].c[n], by = s[1].c[n], bz = s[2].c[n];
    a[0].c[n] = I * (k[1] * bz - k[2] * by) / k2;
    a[1].c[n] = I * (k[2] * bx - k[0] * bz) / k2;
    a[2].c[n] = I * (k[0] * by - k[1] * bx) / k2;
  });
  return detail::ifft3(std::move(a));
}

/// Removes the k = 0 mode.
inline VectorField remove_mean(const VectorField& v) {
  VectorField out = v;
  for (int d = 0; d < 3; ++d) {
    const double m = integrate(v[d]) / v.grid.volume();
    for (double& x : out[d].values) x -= m;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Off-grid evaluation

/// Evaluates the trigonometric interpolant of a field at arbitrary points.
class SpectralInterpolator {
 public:
  explicit SpectralInterpolator(const VectorField& v) : grid_(v.grid), waves_(v.grid), coeffs_(detail::fft3(v)) {}

  Vec3 operator()(const Vec3& x) const {
    const GridSpec& g = grid_;
    const int hx = g.nx / 2 + 1;
    thread_local std::vector<Complex> ex, ey, ez;
    ex.resize(hx);
    ey.resize(g.ny);
    ez.resize(g.nz);
    for (int i = 0; i < hx; ++i) ex[i] = std::polar(1.0, two_pi * waves_.mx[i] * x[0] / g.lx);
    for (int j = 0; j < g.ny; ++j) ey[j] = std::polar(1.0, two_pi * waves_.my[j] * x[1] / g.ly);
    for (int k = 0; k < g.nz; ++k) ez[k] = std::polar(1.0, two_pi * waves_.mz[k] * x[2] / g.lz);
    Vec3 out{0.0, 0.0, 0.0};
    std::size_t idx = 0;
    for (int k = 0; k < g.nz; ++k) {
      const bool nyq_z = std::abs(waves_.mz[k]) == g.nz / 2;
      for (int j = 0; j < g.ny; ++j) {
        const bool nyq_y = std::abs(waves_.my[j]) == g.ny / 2;
        const Complex eyz = ey[j] * ez[k];
        std::array<Complex, 3> row{};
        for (int i = 0; i < hx; ++i, ++idx) {
          if (nyq_z || nyq_y || i == g.nx / 2) continue;
          const double weight = (i == 0) ? 1.0 : 2.0;
          const Complex e = weight * ex[i];
          for (int d = 0; d < 3; ++d) row[d] += coeffs_[d].c[idx] * e;
        }
        for (int d = 0; d < 3; ++d) out[d] += (row[d] * eyz).real();
      }
    }
    return out;
  }

 private:
  GridSpec grid_;
  Wavenumbers waves_;
  std::array<Spectrum, 3> coeffs_;
};

}  // namespace sabi
