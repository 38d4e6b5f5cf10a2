/**
 * @file dynamics.hpp
 * @brief Drift and noise terms for the electromagnetic, vorticity and
 *        high-field MHD evolution systems.
 *
 * Conventions: every function returns a time derivative (drift) or an
 * increment already multiplied by the Brownian increments it was given.
 * Products that are subsequently differentiated are 2/3-truncated on
 * dealiased grids, so all flux-field updates are spectral curls.
 */
#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "sabi/em_fields.hpp"
#include "sabi/noise.hpp"

namespace sabi {

enum class Model {
  BornInfeld,
  Maxwell,
  BornInfeldStratonovich,
  BornInfeldIto,
  MaxwellStratonovich,
  MaxwellIto,
  MaxwellExpectation,
  EulerVorticity,
  Mhd,
  MhdStratonovich,
};

inline constexpr std::array<std::pair<Model, std::string_view>, 10> model_names{{
    {Model::BornInfeld, "bi"},
    {Model::Maxwell, "maxwell"},
    {Model::BornInfeldStratonovich, "bi-stratonovich"},
    {Model::BornInfeldIto, "bi-ito"},
    {Model::MaxwellStratonovich, "maxwell-stratonovich"},
    {Model::MaxwellIto, "maxwell-ito"},
    {Model::MaxwellExpectation, "maxwell-expectation"},
    {Model::EulerVorticity, "euler-vorticity"},
    {Model::Mhd, "mhd"},
    {Model::MhdStratonovich, "mhd-stratonovich"},
}};

inline std::string_view to_string(Model m) {
  for (auto [model, name] : model_names)
    if (model == m) return name;
  return "unknown";
}

inline std::optional<Model> parse_model(std::string_view name) {
  for (auto [model, name2] : model_names)
    if (name2 == name) return model;
  return std::nullopt;
}

enum class ModelFamily { Electromagnetic, Vorticity, Mhd };

inline ModelFamily family(Model m) {
  switch (m) {
    case Model::EulerVorticity: return ModelFamily::Vorticity;
    case Model::Mhd:
    case Model::MhdStratonovich: return ModelFamily::Mhd;
    default: return ModelFamily::Electromagnetic;
  }
}

inline Closure closure_of(Model m) {
  switch (m) {
    case Model::BornInfeld:
    case Model::BornInfeldStratonovich:
    case Model::BornInfeldIto: return Closure::BornInfeld;
    default: return Closure::Maxwell;
  }
}

inline bool is_stochastic(Model m) {
  switch (m) {
    case Model::BornInfeldStratonovich:
    case Model::BornInfeldIto:
    case Model::MaxwellStratonovich:
    case Model::MaxwellIto:
    case Model::EulerVorticity:
    case Model::MhdStratonovich: return true;
    default: return false;
  }
}

inline bool is_ito(Model m) { return m == Model::BornInfeldIto || m == Model::MaxwellIto; }

// ---------------------------------------------------------------------------
// Electromagnetic systems

/// (curl H, -curl E) with (E, H) from the closure's variational derivatives.
inline EMState bi_rhs(const EMState& s, Closure closure) {
  auto eh = variational_derivatives(s, closure);
  EMState out{curl_dealiased(eh.H), curl_dealiased(eh.E)};
  out.B *= -1.0;
  return out;
}

/// -Sum_i [xi_i, (D, B)] dW_i. Linear in xi, so the modes are combined first.
inline EMState stochastic_increment(const EMState& s, const NoiseModel& noise, std::span<const double> dw) {
  if (noise.empty()) return EMState{VectorField(s.grid()), VectorField(s.grid())};
  const VectorField xi = noise.combined(dw);
  EMState out{lie2form_unchecked(xi, s.D), lie2form_unchecked(xi, s.B)};
  out *= -1.0;
  return out;
}

/// +1/2 Sum_i [xi_i, [xi_i, (D, B)]], the drift that turns the Stratonovich system into Ito form.
inline EMState ito_drift_correction(const EMState& s, const NoiseModel& noise) {
  EMState out{VectorField(s.grid()), VectorField(s.grid())};
  for (const auto& xi : noise.xis) {
    out.D.axpy(0.5, lie2form_unchecked(xi, lie2form_unchecked(xi, s.D)));
    out.B.axpy(0.5, lie2form_unchecked(xi, lie2form_unchecked(xi, s.B)));
  }
  return out;
}

/// Deterministic evolution of the ensemble mean in the weak-field limit.
inline EMState expectation_rhs(const EMState& s, const NoiseModel& noise, Closure closure = Closure::Maxwell) {
  if (closure != Closure::Maxwell) {
    throw ConfigError("the expectation equation is only defined for the Maxwell closure");
  }
  EMState out = bi_rhs(s, Closure::Maxwell);
  out += ito_drift_correction(s, noise);
  return out;
}

// ---------------------------------------------------------------------------
// Euler vorticity

struct VorticityState {
  VectorField w;

  const GridSpec& grid() const { return w.grid; }
  VorticityState& operator+=(const VorticityState& o) {
    w += o.w;
    return *this;
  }
  VorticityState& operator*=(double a) {
    w *= a;
    return *this;
  }
  VorticityState& axpy(double a, const VorticityState& o) {
    w.axpy(a, o.w);
    return *this;
  }
};

inline bool all_finite(const VorticityState& s) { return all_finite(s.w); }

/// Velocity u = curl^{-1} w on the torus; rejects a nonzero mean vorticity.
inline VectorField biot_savart(const VorticityState& s) { return curl_inv(s.w); }

/// curl(u x w).
inline VorticityState euler_vorticity_drift(const VorticityState& s) {
  const VectorField u = biot_savart(s);
  return {curl_dealiased(cross(u, s.w))};
}

/// curl(Sum_i xi_i dW_i x w).
inline VorticityState euler_vorticity_noise(const VorticityState& s, const NoiseModel& noise,
                                            std::span<const double> dw) {
  if (noise.empty()) return {VectorField(s.grid())};
  return {curl_dealiased(cross(noise.combined(dw), s.w))};
}

/// One-step increment curl((u dt + Sum_i xi_i dW_i) x w).
inline VectorField euler_vorticity_rhs(const VorticityState& s, const NoiseModel& noise, std::span<const double> dw,
                                       double dt) {
  const double dv = max_divergence(s.w);
  if (dv > default_div_tolerance) {
    throw ConstraintViolation("divergence-free violation: max|div w| = " + std::to_string(dv));
  }
  VectorField transport = biot_savart(s);
  transport *= dt;
  if (!noise.empty()) transport += noise.combined(dw);
  return curl_dealiased(cross(transport, s.w));
}

// ---------------------------------------------------------------------------
// High-field MHD limit

inline constexpr double default_h_floor = 1e-8;

struct MHDState {
  VectorField P;
  VectorField B;

  const GridSpec& grid() const { return P.grid; }
  MHDState& operator+=(const MHDState& o) {
    P += o.P;
    B += o.B;
    return *this;
  }
  MHDState& operator*=(double a) {
    P *= a;
    B *= a;
    return *this;
  }
  MHDState& axpy(double a, const MHDState& o) {
    P.axpy(a, o.P);
    B.axpy(a, o.B);
    return *this;
  }
};

inline bool all_finite(const MHDState& s) { return all_finite(s.P) && all_finite(s.B); }

/// h = sqrt(|P|^2 + |B|^2); throws NumericalFailure where h drops below the floor.
inline ScalarField mhd_energy_density(const MHDState& s, double h_floor = default_h_floor) {
  ScalarField h(s.grid());
  double hmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < h.size(); ++i) {
    const Vec3 p = s.P.at(i), b = s.B.at(i);
    h.values[i] = std::sqrt(dot(p, p) + dot(b, b));
    hmin = std::min(hmin, h.values[i]);
  }
  if (!(hmin > h_floor)) {
    throw NumericalFailure("energy density h fell to " + std::to_string(hmin) + " (floor " +
                           std::to_string(h_floor) + ")");
  }
  return h;
}

/// dP = -div(P (x) P/h - B (x) B/h), dB = curl(P x B/h).
inline MHDState mhd_rhs(const MHDState& s, double h_floor = default_h_floor) {
  const GridSpec& g = s.grid();
  const ScalarField h = mhd_energy_density(s, h_floor);
  std::array<VectorField, 3> rows{VectorField(g), VectorField(g), VectorField(g)};
  VectorField e(g);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Vec3 p = s.P.at(n), b = s.B.at(n);
    const double inv = 1.0 / h.values[n];
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) rows[j][i].values[n] = (p[i] * p[j] - b[i] * b[j]) * inv;
    const Vec3 pb = cross(p, b);
    e.set(n, {pb[0] * inv, pb[1] * inv, pb[2] * inv});
  }
  MHDState out{tensor_div_dealiased(rows), curl_dealiased(e)};
  out.P *= -1.0;
  return out;
}

/// (-Lie_xi P as a 1-form density, -[xi, B]) with xi = Sum_i xi_i dW_i.
inline MHDState mhd_stochastic_increment(const MHDState& s, const NoiseModel& noise, std::span<const double> dw) {
  if (noise.empty()) return MHDState{VectorField(s.grid()), VectorField(s.grid())};
  const VectorField xi = noise.combined(dw);
  MHDState out{dealias(lie_1form_density(xi, s.P)), lie2form_unchecked(xi, s.B)};
  out *= -1.0;
  return out;
}

}  // namespace sabi
