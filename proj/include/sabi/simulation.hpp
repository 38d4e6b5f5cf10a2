/**
 * @file simulation.hpp
 * @brief Binds each model to its drift/noise terms and advances a tracked
 *        member state by one step of the configured scheme.
 */
#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sabi/config.hpp"

namespace sabi {

template <class S>
struct Physics {
  std::shared_ptr<const NoiseModel> noise = std::make_shared<NoiseModel>();
  std::function<S(const S&)> drift;
  std::function<S(const S&)> ito_drift;
  std::function<S(const S&, std::span<const double>)> increment;
  std::function<VectorField(const S&)> loop_velocity;
  std::function<VectorField(const S&)> loop_force;
};

inline Physics<EMState> em_physics(Model m, NoiseModel noise) {
  Physics<EMState> p;
  p.noise = std::make_shared<const NoiseModel>(std::move(noise));
  const Closure closure = closure_of(m);
  auto nm = p.noise;
  if (m == Model::MaxwellExpectation) {
    p.drift = [nm](const EMState& s) { return expectation_rhs(s, *nm); };
  } else {
    p.drift = [closure](const EMState& s) { return bi_rhs(s, closure); };
  }
  p.ito_drift = [closure, nm](const EMState& s) {
    EMState r = bi_rhs(s, closure);
    r += ito_drift_correction(s, *nm);
    return r;
  };
  p.increment = [nm](const EMState& s, std::span<const double> dw) { return stochastic_increment(s, *nm, dw); };
  if (closure == Closure::BornInfeld) {
    p.loop_velocity = [](const EMState& s) { return hydro_vars(s).v; };
    p.loop_force = [](const EMState& s) { return kelvin_force(s); };
  }
  return p;
}

inline Physics<VorticityState> vorticity_physics(NoiseModel noise) {
  Physics<VorticityState> p;
  p.noise = std::make_shared<const NoiseModel>(std::move(noise));
  auto nm = p.noise;
  p.drift = [](const VorticityState& s) { return euler_vorticity_drift(s); };
  p.ito_drift = p.drift;
  p.increment = [nm](const VorticityState& s, std::span<const double> dw) { return euler_vorticity_noise(s, *nm, dw); };
  p.loop_velocity = [](const VorticityState& s) { return biot_savart(s); };
  return p;
}

inline Physics<MHDState> mhd_physics(NoiseModel noise, double h_floor) {
  Physics<MHDState> p;
  p.noise = std::make_shared<const NoiseModel>(std::move(noise));
  auto nm = p.noise;
  p.drift = [h_floor](const MHDState& s) { return mhd_rhs(s, h_floor); };
  p.ito_drift = p.drift;
  p.increment = [nm](const MHDState& s, std::span<const double> dw) { return mhd_stochastic_increment(s, *nm, dw); };
  p.loop_velocity = [h_floor](const MHDState& s) {
    const ScalarField h = mhd_energy_density(s, h_floor);
    VectorField v = s.P;
    for (int d = 0; d < 3; ++d)
      for (std::size_t i = 0; i < h.size(); ++i) v[d].values[i] /= h.values[i];
    return v;
  };
  return p;
}

template <class S>
Tracked<S> tracked_drift(const Tracked<S>& t, const Physics<S>& p, bool ito) {
  Tracked<S> out{ito ? p.ito_drift(t.fields) : p.drift(t.fields), {}, std::vector<double>(t.accum.size(), 0.0)};
  if (!t.loops.empty()) {
    const SpectralInterpolator v(p.loop_velocity(t.fields));
    for (const auto& l : t.loops) out.loops.push_back(sample_loop(l, v));
    if (p.loop_force) {
      const SpectralInterpolator f(p.loop_force(t.fields));
      for (std::size_t i = 0; i < t.loops.size(); ++i) out.accum[i] = loop_integral(t.loops[i], f);
    }
  }
  return out;
}

template <class S>
Tracked<S> tracked_increment(const Tracked<S>& t, const Physics<S>& p, std::span<const double> dw) {
  Tracked<S> out{p.increment(t.fields, dw), {}, std::vector<double>(t.accum.size(), 0.0)};
  if (!t.loops.empty()) {
    if (p.noise->empty()) {
      for (const auto& l : t.loops) out.loops.push_back(TracerLoop{std::vector<Vec3>(l.size(), Vec3{0.0, 0.0, 0.0})});
    } else {
      const SpectralInterpolator xi(p.noise->combined(dw));
      for (const auto& l : t.loops) out.loops.push_back(sample_loop(l, xi));
    }
  }
  return out;
}

/// One step of the scheme; dw is ignored by RK4.
template <class S>
Tracked<S> advance(const Tracked<S>& t, const Physics<S>& p, Scheme scheme, double dt, std::span<const double> dw) {
  auto drift = [&](const Tracked<S>& x) { return tracked_drift(x, p, false); };
  auto ito = [&](const Tracked<S>& x) { return tracked_drift(x, p, true); };
  auto inc = [&](const Tracked<S>& x, std::span<const double> w) { return tracked_increment(x, p, w); };
  switch (scheme) {
    case Scheme::RK4: return rk4_step(t, drift, dt);
    case Scheme::Heun: return heun_stratonovich_step(t, drift, inc, dt, dw);
    case Scheme::EulerMaruyama: return euler_maruyama_step(t, ito, inc, dt, dw);
  }
  return t;
}

/// Plain-state convenience wrapper.
template <class S>
S advance(const S& s, const Physics<S>& p, Scheme scheme, double dt, std::span<const double> dw) {
  return advance(Tracked<S>{s, {}, {}}, p, scheme, dt, dw).fields;
}

// ---------------------------------------------------------------------------
// Named views of state fields (snapshot/checkpoint order)

inline std::vector<std::pair<std::string, VectorField*>> named_fields(EMState& s) { return {{"D", &s.D}, {"B", &s.B}}; }
inline std::vector<std::pair<std::string, VectorField*>> named_fields(VorticityState& s) { return {{"w", &s.w}}; }
inline std::vector<std::pair<std::string, VectorField*>> named_fields(MHDState& s) { return {{"P", &s.P}, {"B", &s.B}}; }

// ---------------------------------------------------------------------------
// Diagnostics per family

template <class S>
std::vector<double> circulations(const Tracked<S>& t, const Physics<S>& p) {
  std::vector<double> out;
  if (t.loops.empty()) return out;
  const SpectralInterpolator v(p.loop_velocity(t.fields));
  for (const auto& l : t.loops) out.push_back(loop_integral(l, v));
  return out;
}

inline DiagnosticsRecord make_record(const EMState& s, Model m) {
  DiagnosticsRecord r;
  const Closure c = closure_of(m);
  r.energy = total_energy(s, c);
  r.momentum = total_momentum(s);
  r.div_d = max_divergence(s.D);
  r.div_b = max_divergence(s.B);
  r.helicity = magnetic_helicity(remove_mean(s.B));
  if (c == Closure::BornInfeld) r.vorticity_residual = vorticity_residual(s);
  return r;
}

/// Kinetic energy, net velocity, max|div w| and fluid helicity int u . w.
inline DiagnosticsRecord make_record(const VorticityState& s, Model) {
  DiagnosticsRecord r;
  const VectorField u = biot_savart(s);
  r.energy = 0.5 * inner(u, u);
  r.momentum = integrate(u);
  r.div_d = max_divergence(s.w);
  r.helicity = inner(u, s.w);
  return r;
}

inline DiagnosticsRecord make_record(const MHDState& s, Model, double h_floor = default_h_floor) {
  DiagnosticsRecord r;
  r.energy = total_energy(s, h_floor);
  r.momentum = total_momentum(s);
  r.div_b = max_divergence(s.B);
  r.helicity = magnetic_helicity(remove_mean(s.B));
  r.pb_orth = pb_orthogonality(s, h_floor);
  return r;
}

}  // namespace sabi
