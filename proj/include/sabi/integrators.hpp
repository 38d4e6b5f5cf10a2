/**
 * @file integrators.hpp
 * @brief Fixed-step time integrators for deterministic and stochastic systems.
 *
 * States are value types exposing `axpy(a, other)` (this += a * other) and a
 * free `all_finite(state)`. Noise callables return the full stochastic
 * increment for a given vector of Brownian increments.
 */
#pragma once

#include <cmath>
#include <concepts>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "sabi/errors.hpp"

namespace sabi {

template <class S>
concept IntegrableState = std::copyable<S> && requires(S s, const S& o, double a) {
  s.axpy(a, o);
  { all_finite(o) } -> std::convertible_to<bool>;
};

enum class Scheme { RK4, Heun, EulerMaruyama };

inline std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::RK4: return "rk4";
    case Scheme::Heun: return "heun";
    case Scheme::EulerMaruyama: return "euler-maruyama";
  }
  return "unknown";
}

inline std::optional<Scheme> parse_scheme(std::string_view name) {
  if (name == "rk4") return Scheme::RK4;
  if (name == "heun") return Scheme::Heun;
  if (name == "euler-maruyama") return Scheme::EulerMaruyama;
  return std::nullopt;
}

struct IntegratorConfig {
  Scheme scheme = Scheme::RK4;
  double dt = 0.0;
  double t_end = 1.0;
  double cfl_guard = 0.5;

  /// Number of steps; dt is expected to divide t_end to within one step.
  long steps() const { return std::lround(t_end / dt); }

  friend bool operator==(const IntegratorConfig&, const IntegratorConfig&) = default;
};

/// Largest dt with (speed dt + noise_bound sqrt(dt)) / dx <= guard.
inline double cfl_time_step(double speed, double noise_bound, double dx, double guard) {
  const double budget = guard * dx;
  if (speed <= 0.0 && noise_bound <= 0.0) return budget;
  if (speed <= 0.0) return (budget / noise_bound) * (budget / noise_bound);
  const double root = (-noise_bound + std::sqrt(noise_bound * noise_bound + 4.0 * speed * budget)) / (2.0 * speed);
  return root * root;
}

inline double courant_number(double speed, double noise_bound, double dt, double dx) {
  return (speed * dt + noise_bound * std::sqrt(dt)) / dx;
}

inline void check_cfl(double speed, double noise_bound, double dt, double dx, double guard) {
  const double c = courant_number(speed, noise_bound, dt, dx);
  if (c > guard) {
    throw NumericalFailure("CFL guard exceeded: Courant number " + std::to_string(c) + " > " +
                           std::to_string(guard));
  }
}

template <IntegrableState S>
void require_finite(const S& s) {
  if (!all_finite(s)) throw NumericalFailure("non-finite value in state");
}

/// Classical four-stage Runge-Kutta step.
template <IntegrableState S, class Rhs>
S rk4_step(const S& s, Rhs&& rhs, double dt) {
  const S k1 = rhs(s);
  S stage = s;
  stage.axpy(0.5 * dt, k1);
  const S k2 = rhs(stage);
  stage = s;
  stage.axpy(0.5 * dt, k2);
  const S k3 = rhs(stage);
  stage = s;
  stage.axpy(dt, k3);
  const S k4 = rhs(stage);
  S out = s;
  out.axpy(dt / 6.0, k1);
  out.axpy(dt / 3.0, k2);
  out.axpy(dt / 3.0, k3);
  out.axpy(dt / 6.0, k4);
  require_finite(out);
  return out;
}

/// Stratonovich Heun: Euler predictor, trapezoidal corrector, one shared dW.
template <IntegrableState S, class Drift, class Noise>
S heun_stratonovich_step(const S& s, Drift&& drift, Noise&& noise_increment, double dt, std::span<const double> dw) {
  const S a0 = drift(s);
  const S b0 = noise_increment(s, dw);
  S predictor = s;
  predictor.axpy(dt, a0);
  predictor.axpy(1.0, b0);
  const S a1 = drift(predictor);
  const S b1 = noise_increment(predictor, dw);
  S out = s;
  out.axpy(0.5 * dt, a0);
  out.axpy(0.5 * dt, a1);
  out.axpy(0.5, b0);
  out.axpy(0.5, b1);
  require_finite(out);
  return out;
}

/// Explicit Ito step; `ito_drift` must already contain the Ito correction.
template <IntegrableState S, class Drift, class Noise>
S euler_maruyama_step(const S& s, Drift&& ito_drift, Noise&& noise_increment, double dt, std::span<const double> dw) {
  S out = s;
  out.axpy(dt, ito_drift(s));
  out.axpy(1.0, noise_increment(s, dw));
  require_finite(out);
  return out;
}

}  // namespace sabi
