/**
 * @file em_fields.hpp
 * @brief Born-Infeld and Maxwell field energetics and the Poynting momentum map.
 *
 * The state is the pair of flux fields (D, B). The Poynting vector is always
 * derived as D x B; it is never carried as independent state here.
 */
#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "sabi/grid.hpp"

namespace sabi {

inline constexpr double default_div_tolerance = 1e-8;

enum class Closure { BornInfeld, Maxwell };

struct EMState {
  VectorField D;
  VectorField B;

  const GridSpec& grid() const { return D.grid; }

  EMState& operator+=(const EMState& o) {
    D += o.D;
    B += o.B;
    return *this;
  }
  EMState& operator*=(double a) {
    D *= a;
    B *= a;
    return *this;
  }
  EMState& axpy(double a, const EMState& o) {
    D.axpy(a, o.D);
    B.axpy(a, o.B);
    return *this;
  }

  /// Throws ConstraintViolation when either flux field has max|div| above `tol`.
  void check_constraints(double tol = default_div_tolerance) const {
    const double dd = max_divergence(D);
    const double db = max_divergence(B);
    if (dd > tol || db > tol) {
      throw ConstraintViolation("divergence-free violation: max|div D| = " + std::to_string(dd) +
                                ", max|div B| = " + std::to_string(db));
    }
  }
};

inline EMState operator+(EMState a, const EMState& b) { return a += b; }
inline EMState operator*(double s, EMState a) { return a *= s; }
inline bool all_finite(const EMState& s) { return all_finite(s.D) && all_finite(s.B); }

struct HydroVars {
  ScalarField Hd;
  VectorField v;
  VectorField gamma;
  VectorField beta;
};

struct VariationalDerivatives {
  VectorField E;
  VectorField H;
};

/// sqrt(1 + |D|^2 + |B|^2 + |D x B|^2), pointwise.
inline ScalarField bi_energy_density(const EMState& s) {
  ScalarField h(s.grid());
  const auto& D = s.D;
  const auto& B = s.B;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const Vec3 d = D.at(i), b = B.at(i);
    const Vec3 p = cross(d, b);
    h.values[i] = std::sqrt(1.0 + dot(d, d) + dot(b, b) + dot(p, p));
  }
  return h;
}

inline ScalarField maxwell_energy_density(const EMState& s) {
  ScalarField h(s.grid());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const Vec3 d = s.D.at(i), b = s.B.at(i);
    h.values[i] = 0.5 * (dot(d, d) + dot(b, b));
  }
  return h;
}

inline ScalarField energy_density(const EMState& s, Closure closure) {
  return closure == Closure::BornInfeld ? bi_energy_density(s) : maxwell_energy_density(s);
}

/// E = (D + B x P)/H, H = (B - D x P)/H with P = D x B.
inline VariationalDerivatives bi_variational_derivatives(const EMState& s) {
  VariationalDerivatives out{VectorField(s.grid()), VectorField(s.grid())};
  for (std::size_t i = 0; i < s.grid().size(); ++i) {
    const Vec3 d = s.D.at(i), b = s.B.at(i);
    const Vec3 p = cross(d, b);
    const double hd = std::sqrt(1.0 + dot(d, d) + dot(b, b) + dot(p, p));
    const Vec3 bp = cross(b, p), dp = cross(d, p);
    out.E.set(i, {(d[0] + bp[0]) / hd, (d[1] + bp[1]) / hd, (d[2] + bp[2]) / hd});
    out.H.set(i, {(b[0] - dp[0]) / hd, (b[1] - dp[1]) / hd, (b[2] - dp[2]) / hd});
  }
  return out;
}

/// Weak-field limit: E = D, H = B.
inline VariationalDerivatives maxwell_variational_derivatives(const EMState& s) { return {s.D, s.B}; }

inline VariationalDerivatives variational_derivatives(const EMState& s, Closure closure) {
  return closure == Closure::BornInfeld ? bi_variational_derivatives(s) : maxwell_variational_derivatives(s);
}

enum class PoyntingCheck { None, CompareEH };

inline constexpr double poynting_eh_tolerance = 1e-9;

/// P = D x B. With CompareEH, also evaluates E x H and throws if the two differ.
inline VectorField poynting(const EMState& s, PoyntingCheck check = PoyntingCheck::None) {
  VectorField p = cross(s.D, s.B);
  if (check == PoyntingCheck::CompareEH) {
    const auto eh = bi_variational_derivatives(s);
    const VectorField p2 = cross(eh.E, eh.H);
    const double diff = max_abs(p - p2);
    if (diff > poynting_eh_tolerance * std::max(1.0, max_abs(p))) {
      throw ConstraintViolation("E x H differs from D x B by " + std::to_string(diff));
    }
  }
  return p;
}

/// P = D x B - A div D; reduces to D x B on divergence-free D.
inline VectorField poynting_general(const VectorField& D, const VectorField& B, const VectorField& A) {
  VectorField p = cross(D, B);
  p -= scale(div(D), A);
  return p;
}

/// v = P/H, gamma = D/H, beta = B/H.
inline HydroVars hydro_vars(const EMState& s) {
  HydroVars hv{bi_energy_density(s), VectorField(s.grid()), VectorField(s.grid()), VectorField(s.grid())};
  for (std::size_t i = 0; i < s.grid().size(); ++i) {
    const Vec3 d = s.D.at(i), b = s.B.at(i);
    const Vec3 p = cross(d, b);
    const double inv = 1.0 / hv.Hd.values[i];
    hv.v.set(i, {p[0] * inv, p[1] * inv, p[2] * inv});
    hv.gamma.set(i, {d[0] * inv, d[1] * inv, d[2] * inv});
    hv.beta.set(i, {b[0] * inv, b[1] * inv, b[2] * inv});
  }
  return hv;
}

struct Pairing {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// <P, xi> computed two ways: directly from D x curl A, and as the pairing of A
/// with -Lie_xi D = curl(xi x D).
inline Pairing momentum_map_pairing(const VectorField& A, const VectorField& D, const VectorField& xi) {
  const double dd = max_divergence(D);
  const double dxi = max_divergence(xi);
  if (dd > lie_div_tolerance || dxi > lie_div_tolerance) {
    throw ConstraintViolation("momentum map pairing requires divergence-free D and xi");
  }
  const VectorField B = curl(A);
  Pairing out;
  out.lhs = inner(xi, cross(D, B));
  out.rhs = inner(A, curl(cross(xi, D)));
  return out;
}

}  // namespace sabi
