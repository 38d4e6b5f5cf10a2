/**
 * @file diagnostics.hpp
 * @brief Conserved-quantity monitors, constraint residuals, tracer loops and
 *        numerical checks of the momentum-map and bracket identities.
 */
#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <stdexcept>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "sabi/dynamics.hpp"
#include "sabi/integrators.hpp"

namespace sabi {

// ---------------------------------------------------------------------------
// Totals

inline double total_energy(const EMState& s, Closure closure) { return integrate(energy_density(s, closure)); }

inline double total_energy(const MHDState& s, double h_floor = default_h_floor) {
  return integrate(mhd_energy_density(s, h_floor));
}

inline Vec3 total_momentum(const EMState& s) { return integrate(cross(s.D, s.B)); }
inline Vec3 total_momentum(const MHDState& s) { return integrate(s.P); }

/// L1 size of the momentum density, the scale used for relative momentum drift.
inline double momentum_scale(const VectorField& p) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.grid.size(); ++i) sum += norm(p.at(i));
  return sum * p.grid.cell_volume();
}

/// int A . B with A = curl^{-1} B.
inline double magnetic_helicity(const VectorField& B) { return inner(curl_inv(B), B); }

/// max |P . B| / h.
inline double pb_orthogonality(const MHDState& s, double h_floor = default_h_floor) {
  const ScalarField h = mhd_energy_density(s, h_floor);
  double m = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) m = std::max(m, std::abs(dot(s.P.at(i), s.B.at(i))) / h.values[i]);
  return m;
}

// ---------------------------------------------------------------------------
// Hydrodynamic-analogy residuals

/// gamma x curl gamma + beta x curl beta, the non-gradient loop force.
inline VectorField kelvin_force(const EMState& s) {
  const HydroVars hv = hydro_vars(s);
  VectorField f = cross(hv.gamma, curl(hv.gamma));
  f += cross(hv.beta, curl(hv.beta));
  return f;
}

/// Time derivative of v = P/H implied by the field equations.
inline VectorField velocity_tendency(const EMState& s) {
  const auto eh = bi_variational_derivatives(s);
  const EMState rate{curl(eh.H), -curl(eh.E)};
  const HydroVars hv = hydro_vars(s);
  VectorField dp = cross(rate.D, s.B);
  dp += cross(s.D, rate.B);
  ScalarField dh = dot(eh.E, rate.D);
  dh += dot(eh.H, rate.B);
  VectorField dv(s.grid());
  for (std::size_t i = 0; i < dv.grid.size(); ++i) {
    const double inv = 1.0 / hv.Hd.values[i];
    for (int d = 0; d < 3; ++d) dv[d].values[i] = (dp[d].values[i] - hv.v[d].values[i] * dh.values[i]) * inv;
  }
  return dv;
}

/// L2 norm of d(varpi)/dt - curl(v x varpi) + curl(gamma x curl gamma + beta x curl beta), varpi = curl v.
inline double vorticity_residual(const EMState& s) {
  const HydroVars hv = hydro_vars(s);
  const VectorField varpi = curl(hv.v);
  VectorField r = curl(velocity_tendency(s));
  r -= curl(cross(hv.v, varpi));
  r += curl(kelvin_force(s));
  return l2_norm(r);
}

/// dP/dt from the conservative law: -div(P(x)P/H - D(x)D/H - B(x)B/H) + grad(1/H).
inline VectorField momentum_tendency_conservative(const EMState& s) {
  const GridSpec& g = s.grid();
  const HydroVars hv = hydro_vars(s);
  const VectorField P = cross(s.D, s.B);
  std::array<VectorField, 3> rows{VectorField(g), VectorField(g), VectorField(g)};
  ScalarField inv_h(g);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Vec3 p = P.at(n), d = s.D.at(n), b = s.B.at(n);
    const double inv = 1.0 / hv.Hd.values[n];
    inv_h.values[n] = inv;
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) rows[j][i].values[n] = (p[i] * p[j] - d[i] * d[j] - b[i] * b[j]) * inv;
  }
  VectorField out = tensor_div(rows);
  out *= -1.0;
  out += grad(inv_h);
  return out;
}

/// dP/dt from the augmented bracket form: -Lie_v P - beta <> B - gamma <> D,
/// with alpha <> F = F x curl alpha for a 1-form alpha and 2-form F.
inline VectorField momentum_tendency_bracket(const EMState& s) {
  const HydroVars hv = hydro_vars(s);
  const VectorField P = cross(s.D, s.B);
  VectorField out = lie_1form_density(hv.v, P);
  out *= -1.0;
  out -= cross(s.B, curl(hv.beta));
  out -= cross(s.D, curl(hv.gamma));
  return out;
}

/// L2 norm of the difference between the two momentum-law formulations.
inline double km_bracket_residual(const EMState& s) {
  return l2_norm(momentum_tendency_conservative(s) - momentum_tendency_bracket(s));
}

// ---------------------------------------------------------------------------
// Lie-Poisson bracket of smeared momentum functionals

/// Sign relating the canonical bracket {F_xi, F_eta} to <P, [xi, eta]>. Fixed by
/// brute-force functional differentiation (see tests/test_diagnostics.cpp).
inline constexpr double lp_bracket_sign = -1.0;

/// Canonical (D, A) bracket of F_xi = int A . curl(xi x D) and F_eta, against
/// lp_bracket_sign * <P, [xi, eta]> with [xi, eta] = (xi . grad) eta - (eta . grad) xi.
inline Pairing lp_bracket_check(const VectorField& D, const VectorField& A, const VectorField& xi,
                                const VectorField& eta) {
  for (const VectorField* f : {&D, &xi, &eta}) {
    if (max_divergence(*f) > lie_div_tolerance) {
      throw ConstraintViolation("lp_bracket_check requires divergence-free D, xi and eta");
    }
  }
  const VectorField B = curl(A);
  // dF_xi/dD = B x xi, dF_xi/dA = curl(xi x D)
  const VectorField fd_xi = cross(B, xi), fa_xi = curl(cross(xi, D));
  const VectorField fd_eta = cross(B, eta), fa_eta = curl(cross(eta, D));
  Pairing out;
  out.lhs = inner(fd_xi, fa_eta) - inner(fd_eta, fa_xi);
  VectorField bracket = advect(xi, eta);
  bracket -= advect(eta, xi);
  out.rhs = lp_bracket_sign * inner(cross(D, B), bracket);
  return out;
}

// ---------------------------------------------------------------------------
// Tracer loops

struct TracerLoop {
  std::vector<Vec3> points;

  std::size_t size() const { return points.size(); }
  TracerLoop& axpy(double a, const TracerLoop& o) {
    for (std::size_t i = 0; i < points.size(); ++i)
      for (int d = 0; d < 3; ++d) points[i][d] += a * o.points[i][d];
    return *this;
  }
};

inline bool all_finite(const TracerLoop& l) {
  for (const auto& p : l.points)
    for (double v : p)
      if (!std::isfinite(v)) return false;
  return true;
}

/// Circle of `n` points around `center` in the plane normal to `normal`.
inline TracerLoop make_circle_loop(const Vec3& center, double radius, const Vec3& normal, int n) {
  if (n < 3) throw std::invalid_argument("a tracer loop needs at least 3 points");
  const double nn = norm(normal);
  const Vec3 nz{normal[0] / nn, normal[1] / nn, normal[2] / nn};
  const Vec3 trial = std::abs(nz[0]) < 0.9 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 1.0, 0.0};
  Vec3 e1 = cross(nz, trial);
  const double n1 = norm(e1);
  for (double& v : e1) v /= n1;
  const Vec3 e2 = cross(nz, e1);
  TracerLoop loop;
  loop.points.resize(n);
  for (int i = 0; i < n; ++i) {
    const double s = two_pi * i / n;
    for (int d = 0; d < 3; ++d) loop.points[i][d] = center[d] + radius * (std::cos(s) * e1[d] + std::sin(s) * e2[d]);
  }
  return loop;
}

/// dx/ds for the loop parametrized over s in [0, 2 pi), by trigonometric differentiation.
inline std::vector<Vec3> loop_tangents(const TracerLoop& loop) {
  const int n = static_cast<int>(loop.size());
  std::vector<Vec3> out(n, Vec3{0.0, 0.0, 0.0});
  for (int d = 0; d < 3; ++d) {
    std::vector<std::complex<double>> coef(n);
    for (int m = 0; m < n; ++m) {
      std::complex<double> acc = 0.0;
      for (int i = 0; i < n; ++i) acc += loop.points[i][d] * std::polar(1.0, -two_pi * m * i / n);
      coef[m] = acc / static_cast<double>(n);
    }
    for (int i = 0; i < n; ++i) {
      std::complex<double> acc = 0.0;
      for (int m = 0; m < n; ++m) {
        const int k = m <= n / 2 ? m : m - n;
        if (2 * std::abs(k) == n) continue;
        acc += std::complex<double>(0.0, k) * coef[m] * std::polar(1.0, two_pi * m * i / n);
      }
      out[i][d] = acc.real();
    }
  }
  return out;
}

/// Trapezoidal rule in the loop parameter: (2 pi / n) Sum_i w(x_i) . x'(s_i).
inline double loop_integral(const TracerLoop& loop, const SpectralInterpolator& w) {
  const auto tangents = loop_tangents(loop);
  double sum = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) sum += dot(w(loop.points[i]), tangents[i]);
  return sum * two_pi / static_cast<double>(loop.size());
}

inline double loop_circulation(const TracerLoop& loop, const VectorField& v) {
  return loop_integral(loop, SpectralInterpolator(v));
}

/// Point velocities of the loop sampled from a field.
inline TracerLoop sample_loop(const TracerLoop& loop, const SpectralInterpolator& v) {
  TracerLoop out;
  out.points.reserve(loop.size());
  for (const auto& p : loop.points) out.points.push_back(v(p));
  return out;
}

/// One step of loop advection through a frozen field v plus Sum_i xi_i dW_i.
inline TracerLoop advect_loop(const TracerLoop& loop, const VectorField& v, const NoiseModel& noise, double dt,
                              std::span<const double> dw, Scheme scheme) {
  const SpectralInterpolator vi(v);
  const bool noisy = !noise.empty() && !dw.empty();
  const SpectralInterpolator xi(noisy ? noise.combined(dw) : VectorField(v.grid));
  auto drift = [&](const TracerLoop& l) { return sample_loop(l, vi); };
  auto kick = [&](const TracerLoop& l, std::span<const double>) {
    if (!noisy) {
      TracerLoop z;
      z.points.assign(l.size(), Vec3{0.0, 0.0, 0.0});
      return z;
    }
    return sample_loop(l, xi);
  };
  switch (scheme) {
    case Scheme::RK4: return rk4_step(loop, drift, dt);
    case Scheme::Heun: return heun_stratonovich_step(loop, drift, kick, dt, dw);
    case Scheme::EulerMaruyama: return euler_maruyama_step(loop, drift, kick, dt, dw);
  }
  return loop;
}

/// A field state carried together with tracer loops and per-loop time
/// integrals, so loops advance with the same scheme, stages and Brownian
/// increments as the fields.
template <class S>
struct Tracked {
  S fields;
  std::vector<TracerLoop> loops;
  std::vector<double> accum;

  Tracked& axpy(double a, const Tracked& o) {
    fields.axpy(a, o.fields);
    for (std::size_t i = 0; i < loops.size(); ++i) loops[i].axpy(a, o.loops[i]);
    for (std::size_t i = 0; i < accum.size(); ++i) accum[i] += a * o.accum[i];
    return *this;
  }
};

template <class S>
bool all_finite(const Tracked<S>& t) {
  if (!all_finite(t.fields)) return false;
  for (const auto& l : t.loops)
    if (!all_finite(l)) return false;
  for (double a : t.accum)
    if (!std::isfinite(a)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Records

struct DiagnosticsRecord {
  double time = 0.0;
  double energy = 0.0;
  Vec3 momentum{0.0, 0.0, 0.0};
  double div_d = 0.0;
  double div_b = 0.0;
  double helicity = 0.0;
  double pb_orth = 0.0;
  double vorticity_residual = 0.0;
  std::vector<double> circulation;
  std::vector<double> force_integral;

  bool finite() const {
    for (double v : {time, energy, momentum[0], momentum[1], momentum[2], div_d, div_b, helicity, pb_orth,
                     vorticity_residual})
      if (!std::isfinite(v)) return false;
    for (double c : circulation)
      if (!std::isfinite(c)) return false;
    for (double c : force_integral)
      if (!std::isfinite(c)) return false;
    return true;
  }
};

inline const std::vector<std::string> diagnostics_columns{
    "time", "energy", "momentum_x", "momentum_y", "momentum_z", "div_d", "div_b", "helicity", "pb_orth",
    "vorticity_residual"};

inline void write_csv_header(std::ostream& os, std::size_t loops) {
  for (std::size_t i = 0; i < diagnostics_columns.size(); ++i) os << (i ? "," : "") << diagnostics_columns[i];
  for (std::size_t i = 0; i < loops; ++i) os << ",circulation_" << i;
  for (std::size_t i = 0; i < loops; ++i) os << ",force_integral_" << i;
  os << '\n';
}

inline void write_csv_row(std::ostream& os, const DiagnosticsRecord& r) {
  char buf[64];
  auto put = [&](double v, bool first = false) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    if (!first) os << ',';
    os << buf;
  };
  put(r.time, true);
  put(r.energy);
  for (double m : r.momentum) put(m);
  put(r.div_d);
  put(r.div_b);
  put(r.helicity);
  put(r.pb_orth);
  put(r.vorticity_residual);
  for (double c : r.circulation) put(c);
  for (double c : r.force_integral) put(c);
  os << '\n';
}

/// Inverse of record_values for a record with `loops` tracked loops.
inline DiagnosticsRecord record_from_values(const std::vector<double>& v, std::size_t loops) {
  if (v.size() != diagnostics_columns.size() + 2 * loops) {
    throw std::runtime_error("diagnostics row has " + std::to_string(v.size()) + " columns");
  }
  DiagnosticsRecord r;
  r.time = v[0];
  r.energy = v[1];
  r.momentum = {v[2], v[3], v[4]};
  r.div_d = v[5];
  r.div_b = v[6];
  r.helicity = v[7];
  r.pb_orth = v[8];
  r.vorticity_residual = v[9];
  const auto base = static_cast<std::ptrdiff_t>(diagnostics_columns.size());
  const auto nl = static_cast<std::ptrdiff_t>(loops);
  r.circulation.assign(v.begin() + base, v.begin() + base + nl);
  r.force_integral.assign(v.begin() + base + nl, v.end());
  return r;
}

/// Inverse of write_csv_row.
inline DiagnosticsRecord parse_csv_row(const std::string& line, std::size_t loops) {
  std::vector<double> v;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    const std::size_t end = std::min(line.find(',', pos), line.size());
    v.push_back(std::stod(line.substr(pos, end - pos)));
    pos = end + 1;
  }
  return record_from_values(v, loops);
}

/// Record values in CSV column order.
inline std::vector<double> record_values(const DiagnosticsRecord& r) {
  std::vector<double> v{r.time,   r.energy,   r.momentum[0], r.momentum[1],         r.momentum[2],
                        r.div_d,  r.div_b,    r.helicity,    r.pb_orth,             r.vorticity_residual};
  v.insert(v.end(), r.circulation.begin(), r.circulation.end());
  v.insert(v.end(), r.force_integral.begin(), r.force_integral.end());
  return v;
}

}  // namespace sabi
