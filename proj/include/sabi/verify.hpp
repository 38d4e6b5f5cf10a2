/**
 * @file verify.hpp
 * @brief Canned verification suites, one per acceptance criterion.
 *
 * Each suite returns measured values together with the thresholds they are
 * compared against. `grid` and `dt` overrides replace the suite's default
 * resolution and (coarsest) time step.
 */
#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sabi/simulation.hpp"

namespace sabi {

struct VerifyOptions {
  int grid = 0;     // 0: suite default
  double dt = 0.0;  // 0: suite default
};

struct Check {
  std::string label;
  double value = 0.0;
  double threshold = 0.0;
  bool at_least = false;  // pass when value >= threshold instead of value < threshold
  bool passed() const { return at_least ? value >= threshold : value < threshold; }
};

struct SuiteReport {
  int criterion = 0;
  std::string name;
  std::vector<Check> checks;
  std::vector<std::string> notes;
  double seconds = 0.0;
  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed()) return false;
    return !checks.empty();
  }
};

inline std::ostream& operator<<(std::ostream& os, const SuiteReport& r) {
  os << (r.passed() ? "PASS" : "FAIL") << " [" << r.criterion << "] " << r.name << ":";
  char buf[160];
  for (std::size_t i = 0; i < r.checks.size(); ++i) {
    const auto& c = r.checks[i];
    std::snprintf(buf, sizeof buf, "%s %s=%.3e %s %.3e", i ? ";" : "", c.label.c_str(), c.value,
                  c.at_least ? ">=" : "<", c.threshold);
    os << buf;
  }
  std::snprintf(buf, sizeof buf, " (%.1f s)", r.seconds);
  return os << buf;
}

namespace verify {

inline int pick(int override_value, int fallback) { return override_value > 0 ? override_value : fallback; }
inline double pick(double override_value, double fallback) { return override_value > 0.0 ? override_value : fallback; }

/// Number of steps of size close to dt that exactly covers t_end.
inline long steps_for(double t_end, double dt) { return std::max(1L, std::lround(std::ceil(t_end / dt - 1e-9))); }

/// Random divergence-free field rescaled so that max|v| = target.
inline VectorField random_field_max_norm(const GridSpec& g, std::uint64_t seed, int kmax, double target) {
  VectorField v = random_divfree_field(g, seed, kmax, 1.0);
  v *= target / max_norm(v);
  return v;
}

/// Complex Fourier coefficient (normalized by 1/N) of the integer mode m.
inline Complex mode_coefficient(const ScalarField& f, std::array<int, 3> m) {
  const GridSpec& g = f.grid;
  bool conj = false;
  if (m[0] < 0) {
    m = {-m[0], -m[1], -m[2]};
    conj = true;
  }
  const Spectrum s = fft(f);
  const int ix = m[0], iy = (m[1] + g.ny) % g.ny, iz = (m[2] + g.nz) % g.nz;
  const Complex c = s.c[(static_cast<std::size_t>(iz) * g.ny + iy) * (g.nx / 2 + 1) + ix];
  return conj ? std::conj(c) : c;
}

/// v(x - shift) by a spectral phase shift (exact for band-limited fields).
inline VectorField translate(const VectorField& v, const Vec3& shift) {
  auto s = detail::fft3(v);
  const Wavenumbers w(v.grid);
  for_each_mode(v.grid, w, [&](std::size_t n, int ix, int iy, int iz, const Vec3&) {
    const double phase = -two_pi * (w.mx[ix] * shift[0] / v.grid.lx + w.my[iy] * shift[1] / v.grid.ly +
                                    w.mz[iz] * shift[2] / v.grid.lz);
    for (int d = 0; d < 3; ++d) s[d].c[n] *= std::polar(1.0, phase);
  });
  return detail::ifft3(std::move(s));
}

/// Least-squares slope of log(err) against log(dt).
inline double fit_order(const std::vector<double>& dts, const std::vector<double>& errs) {
  const std::size_t n = dts.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(dts[i]), y = std::log(errs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline double em_l2_distance(const EMState& a, const EMState& b) {
  const double d = l2_norm(a.D - b.D), e = l2_norm(a.B - b.B);
  return std::sqrt(d * d + e * e);
}

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. operator identities

inline SuiteReport operator_identities(const VerifyOptions& o) {
  SuiteReport r{1, "operator-identities", {}, {}, 0.0};
  const GridSpec g = GridSpec::cube(pick(o.grid, 32));
  const int kmax = std::max(1, g.nx / 6);
  const VectorField F = random_divfree_field(g, 11, kmax, 1.0) + grad(random_scalar_field(g, 12, kmax, 1.0));
  const ScalarField f = random_scalar_field(g, 13, kmax, 1.0);
  r.checks.push_back({"max|div curl F|", max_abs(div(curl(F))), 1e-12});
  r.checks.push_back({"max|curl grad f|", max_abs(curl(grad(f))), 1e-12});
  const VectorField xi = random_divfree_field(g, 14, kmax, 1.0);
  const VectorField D = random_divfree_field(g, 15, kmax, 1.0);
  const VectorField bracket = advect(xi, D) - advect(D, xi);
  r.checks.push_back({"max|lie2form - [xi,D]|", max_abs(lie2form(xi, D) - bracket), 1e-10});
  return r;
}

// ---------------------------------------------------------------------------
// 2. variational derivatives

inline SuiteReport variational_derivatives(const VerifyOptions& o) {
  SuiteReport r{2, "variational-derivatives", {}, {}, 0.0};
  const GridSpec g = GridSpec::cube(pick(o.grid, 8));
  EMState s{random_field_max_norm(g, 21, 2, 0.8), random_field_max_norm(g, 22, 2, 0.8)};
  s.D += VectorField(g, Vec3{0.2, -0.1, 0.3});
  s.B += VectorField(g, Vec3{-0.1, 0.3, 0.2});
  const auto eh = bi_variational_derivatives(s);
  const double h = 1e-6;
  const double dv = g.cell_volume();
  auto fd_error = [&](bool perturb_d) {
    double err = 0.0;
    VectorField& target = perturb_d ? s.D : s.B;
    const VectorField& exact = perturb_d ? eh.E : eh.H;
    for (int d = 0; d < 3; ++d)
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double keep = target[d].values[i];
        target[d].values[i] = keep + h;
        const double fp = integrate(bi_energy_density(s));
        target[d].values[i] = keep - h;
        const double fm = integrate(bi_energy_density(s));
        target[d].values[i] = keep;
        err = std::max(err, std::abs((fp - fm) / (2.0 * h * dv) - exact[d].values[i]));
      }
    return err / max_abs(exact);
  };
  r.checks.push_back({"E rel error", fd_error(true), 1e-6});
  r.checks.push_back({"H rel error", fd_error(false), 1e-6});
  return r;
}

// ---------------------------------------------------------------------------
// 3. deterministic energy and momentum

inline SuiteReport energy_deterministic(const VerifyOptions& o) {
  SuiteReport r{3, "energy-deterministic", {}, {}, 0.0};
  const GridSpec g = GridSpec::cube(pick(o.grid, 32));
  const double dt = pick(o.dt, 1e-3), t_end = 1.0;
  const long steps = steps_for(t_end, dt);
  EMState s{random_field_max_norm(g, 31, 2, 0.4), random_field_max_norm(g, 32, 2, 0.4)};
  s.D += VectorField(g, Vec3{0.1, 0.0, 0.0});
  s.B += VectorField(g, Vec3{0.0, 0.1, 0.0});
  const auto phys = em_physics(Model::BornInfeld, {});
  const double e0 = total_energy(s, Closure::BornInfeld);
  const Vec3 p0 = total_momentum(s);
  const double pscale = momentum_scale(cross(s.D, s.B));
  for (long n = 0; n < steps; ++n) s = advance(s, phys, Scheme::RK4, t_end / steps, {});
  const Vec3 p1 = total_momentum(s);
  const Vec3 dp{p1[0] - p0[0], p1[1] - p0[1], p1[2] - p0[2]};
  r.checks.push_back({"energy rel drift", std::abs(total_energy(s, Closure::BornInfeld) - e0) / e0, 1e-8});
  r.checks.push_back({"momentum rel drift", norm(dp) / pscale, 1e-8});
  r.notes.push_back("momentum drift is relative to int |P| dx");
  return r;
}

// ---------------------------------------------------------------------------
// 4. stochastic energy along a fixed path, dyadic refinement

inline SuiteReport stochastic_energy(const VerifyOptions& o) {
  SuiteReport r{4, "stochastic-energy", {}, {}, 0.0};
  const GridSpec g = GridSpec::cube(pick(o.grid, 16));
  const double t_end = 0.5;
  const double dt0 = pick(o.dt, 1.0 / 64.0);
  const int base = static_cast<int>(steps_for(t_end, dt0));
  const int levels = 3;
  const NoiseModel noise = NoiseModel::build(g, {{NoiseKind::Harmonic, {1, 1, 0}, {0.0, 0.0, 1.0}, 0.3, 0.5, {}}});
  const auto phys = em_physics(Model::BornInfeldStratonovich, noise);
  const EMState s0{random_field_max_norm(g, 41, 2, 0.3), random_field_max_norm(g, 42, 2, 0.3)};
  const double e0 = total_energy(s0, Closure::BornInfeld);
  const BrownianPath path(WienerDriver{4242, 0, noise.size()}, t_end, base, levels);
  std::vector<double> dts, errs;
  for (int lev = 0; lev <= levels; ++lev) {
    EMState s = s0;
    for (int n = 0; n < path.steps(lev); ++n) s = advance(s, phys, Scheme::Heun, path.dt(lev), path.increments(lev, n));
    dts.push_back(path.dt(lev));
    errs.push_back(std::abs(total_energy(s, Closure::BornInfeld) - e0) / e0);
    r.notes.push_back("dt=" + fmt("%.5f", path.dt(lev)) + " |dE|/E=" + fmt("%.4e", errs.back()));
  }
  r.checks.push_back({"energy drift order", fit_order(dts, errs), 0.8, true});
  return r;
}

// ---------------------------------------------------------------------------
// 5. momentum dichotomy

inline SuiteReport momentum_dichotomy(const VerifyOptions& o) {
  SuiteReport r{5, "momentum-dichotomy", {}, {}, 0.0};
  const GridSpec g = GridSpec::cube(pick(o.grid, 16));
  const double t_end = 0.5, dt = pick(o.dt, 1.0 / 64.0);
  const long steps = steps_for(t_end, dt);
  EMState s0{random_field_max_norm(g, 51, 2, 0.3), random_field_max_norm(g, 52, 2, 0.3)};
  s0.D += VectorField(g, Vec3{0.1, 0.0, 0.0});
  s0.B += VectorField(g, Vec3{0.0, 0.1, 0.0});
  const Vec3 p0 = total_momentum(s0);
  const double pscale = momentum_scale(cross(s0.D, s0.B));
  auto drift_of = [&](const Physics<EMState>& phys, int members, std::uint64_t seed) {
    std::vector<double> out;
    for (int m = 0; m < members; ++m) {
      const WienerDriver w{seed, static_cast<std::uint64_t>(m), phys.noise->size()};
      EMState s = s0;
      for (long n = 0; n < steps; ++n)
        s = advance(s, phys, Scheme::Heun, t_end / steps, w.sample_increments(static_cast<std::uint64_t>(n), t_end / steps));
      const Vec3 p = total_momentum(s);
      out.push_back(norm(Vec3{p[0] - p0[0], p[1] - p0[1], p[2] - p0[2]}) / pscale);
    }
    return out;
  };
  const auto constant = em_physics(Model::BornInfeldStratonovich,
                                   NoiseModel::build(g, {{NoiseKind::Constant, {}, {0.5, 0.0, 0.0}, 0.0, 1.0, {}},
                                                         {NoiseKind::Constant, {}, {0.0, 0.3, 0.2}, 0.0, 1.0, {}}}));
  const auto harmonic = em_physics(Model::BornInfeldStratonovich,
                                   NoiseModel::build(g, {{NoiseKind::Harmonic, {1, 1, 0}, {0.0, 0.0, 1.0}, 0.3, 0.5, {}},
                                                         {NoiseKind::Harmonic, {0, 1, 1}, {1.0, 0.0, 0.0}, 1.1, 0.5, {}}}));
  // Constant xi: the drift must vanish with dt, so each member is replayed on a
  // dyadically refined copy of its own path.
  const int levels = 2;
  std::vector<double> dts, rms_c(levels + 1, 0.0);
  double bound = 0.0;
  for (int m = 0; m < 8; ++m) {
    const BrownianPath path(WienerDriver{5151, static_cast<std::uint64_t>(m), constant.noise->size()}, t_end,
                            static_cast<int>(steps), levels);
    for (int lev = 0; lev <= levels; ++lev) {
      EMState s = s0;
      for (int n = 0; n < path.steps(lev); ++n) s = advance(s, constant, Scheme::Heun, path.dt(lev), path.increments(lev, n));
      const Vec3 p = total_momentum(s);
      const double d = norm(Vec3{p[0] - p0[0], p[1] - p0[1], p[2] - p0[2]}) / pscale;
      rms_c[lev] += d * d / 8.0;
      if (lev == 0) bound = std::max(bound, d);
      if (m == 0) dts.push_back(path.dt(lev));
    }
  }
  for (int lev = 0; lev <= levels; ++lev) {
    rms_c[lev] = std::sqrt(rms_c[lev]);
    r.notes.push_back("constant xi dt=" + fmt("%.5f", dts[lev]) + " rms rel drift=" + fmt("%.4e", rms_c[lev]));
  }
  const auto h = drift_of(harmonic, 64, 5252);
  double rms = 0.0;
  for (double v : h) rms += v * v;
  rms = std::sqrt(rms / static_cast<double>(h.size()));
  r.checks.push_back({"constant-xi drift order", fit_order(dts, rms_c), 0.8, true});
  r.checks.push_back({"harmonic rms drift / constant bound", rms / std::max(bound, 1e-300), 10.0, true});
  r.notes.push_back("constant xi max rel drift at base dt=" + fmt("%.4e", bound));
  r.notes.push_back("harmonic rms rel drift=" + fmt("%.4e", rms));
  return r;
}

// ---------------------------------------------------------------------------
// 6 and 7. weak-field ensembles

struct FieldStats {
  EMState mean;
  EMState m2;  // sum of squared deviations (Welford)
  int count = 0;

  explicit FieldStats(const GridSpec& g)
      : mean{VectorField(g), VectorField(g)}, m2{VectorField(g), VectorField(g)} {}

  void add(const EMState& s) {
    ++count;
    auto update = [&](VectorField& mu, VectorField& q, const VectorField& x) {
      for (int d = 0; d < 3; ++d)
        for (std::size_t i = 0; i < x.grid.size(); ++i) {
          const double delta = x[d].values[i] - mu[d].values[i];
          mu[d].values[i] += delta / count;
          q[d].values[i] += delta * (x[d].values[i] - mu[d].values[i]);
        }
    };
    update(mean.D, m2.D, s.D);
    update(mean.B, m2.B, s.B);
  }

  /// Squared standard error of the mean, pointwise.
  EMState se2() const {
    EMState out = m2;
    out *= 1.0 / (static_cast<double>(count - 1) * count);
    return out;
  }
};

struct Observable {
  std::string name;
  bool on_d;
  int component;
  std::array<int, 3> mode;
  bool imag;
};

inline double observe(const EMState& s, const Observable& ob) {
  const Complex c = mode_coefficient((ob.on_d ? s.D : s.B)[ob.component], ob.mode);
  return ob.imag ? c.imag() : c.real();
}

struct WeakFieldSetup {
  GridSpec grid;
  double t_end = 0.5;
  long steps = 0;
  int members = 512;
  EMState initial;
  std::vector<NoiseModeSpec> noise;
};

inline WeakFieldSetup weak_field_setup(const VerifyOptions& o) {
  WeakFieldSetup w;
  w.grid = GridSpec::cube(pick(o.grid, 16));
  w.steps = steps_for(w.t_end, pick(o.dt, 1.0 / 128.0));
  const GridSpec& g = w.grid;
  const double a = 0.01;
  w.initial.D = VectorField::from_function(g, [a](double x, double y, double) {
    return Vec3{0.0, a * std::cos(x), 0.5 * a * std::sin(x + y)};
  });
  w.initial.B = curl(w.initial.D);
  w.initial.B *= 0.8;
  w.noise = {{NoiseKind::Harmonic, {0, 1, 0}, {1.0, 0.0, 0.0}, 0.0, 0.5, {}},
             {NoiseKind::Constant, {}, {0.3, 0.0, 0.0}, 0.0, 1.0, {}}};
  return w;
}

struct EnsembleOutcome {
  FieldStats stats;
  std::vector<std::vector<double>> observations;  // [member][observable]
};

inline const std::vector<Observable>& weak_field_observables() {
  static const std::vector<Observable> obs = [] {
    std::vector<Observable> v;
    for (bool im : {false, true}) {
      v.push_back({"Dy(1,0,0)", true, 1, {1, 0, 0}, im});
      v.push_back({"Bz(1,0,0)", false, 2, {1, 0, 0}, im});
      v.push_back({"Dz(1,1,0)", true, 2, {1, 1, 0}, im});
      v.push_back({"Dy(1,2,0)", true, 1, {1, 2, 0}, im});
    }
    return v;
  }();
  return obs;
}

inline EnsembleOutcome run_weak_ensemble(const WeakFieldSetup& w, Model model, std::uint64_t seed) {
  const NoiseModel noise = NoiseModel::build(w.grid, w.noise);
  const auto phys = em_physics(model, noise);
  const Scheme scheme = is_ito(model) ? Scheme::EulerMaruyama : Scheme::Heun;
  const double dt = w.t_end / static_cast<double>(w.steps);
  EnsembleOutcome out{FieldStats(w.grid), {}};
  for (int m = 0; m < w.members; ++m) {
    const WienerDriver drv{seed, static_cast<std::uint64_t>(m), noise.size()};
    EMState s = w.initial;
    for (long n = 0; n < w.steps; ++n) s = advance(s, phys, scheme, dt, drv.sample_increments(static_cast<std::uint64_t>(n), dt));
    out.stats.add(s);
    std::vector<double> row;
    for (const auto& ob : weak_field_observables()) row.push_back(observe(s, ob));
    out.observations.push_back(std::move(row));
  }
  return out;
}

/// Itô ensembles are shared between suites 6 and 7 within one process.
inline const EnsembleOutcome& ito_ensemble(const VerifyOptions& o) {
  static std::map<std::pair<int, double>, EnsembleOutcome> cache;
  const auto key = std::make_pair(o.grid, o.dt);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, run_weak_ensemble(weak_field_setup(o), Model::MaxwellIto, 6001)).first;
  return it->second;
}

inline std::pair<double, double> mean_and_se(const std::vector<std::vector<double>>& rows, std::size_t col) {
  double mean = 0.0;
  for (const auto& r : rows) mean += r[col];
  mean /= static_cast<double>(rows.size());
  double var = 0.0;
  for (const auto& r : rows) var += (r[col] - mean) * (r[col] - mean);
  var /= static_cast<double>(rows.size() - 1);
  return {mean, std::sqrt(var / static_cast<double>(rows.size()))};
}

inline SuiteReport ito_stratonovich(const VerifyOptions& o) {
  SuiteReport r{6, "ito-stratonovich", {}, {}, 0.0};
  const WeakFieldSetup w = weak_field_setup(o);
  const EnsembleOutcome strat = run_weak_ensemble(w, Model::MaxwellStratonovich, 6002);
  const EnsembleOutcome& ito = ito_ensemble(o);
  double worst = 0.0;
  std::string worst_name;
  const auto& obs = weak_field_observables();
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const auto [m1, se1] = mean_and_se(strat.observations, i);
    const auto [m2, se2] = mean_and_se(ito.observations, i);
    const double z = std::abs(m1 - m2) / std::sqrt(se1 * se1 + se2 * se2);
    if (z > worst) {
      worst = z;
      worst_name = obs[i].name + (obs[i].imag ? " im" : " re");
    }
  }
  r.checks.push_back({"max |mean diff| / SE", worst, 3.0});
  r.notes.push_back("largest deviation at " + worst_name);
  return r;
}

inline SuiteReport expectation_pde(const VerifyOptions& o) {
  SuiteReport r{7, "expectation-pde", {}, {}, 0.0};
  const WeakFieldSetup w = weak_field_setup(o);
  const EnsembleOutcome& ito = ito_ensemble(o);
  // Deterministic expectation solve on a 4x finer time grid.
  const auto phys = em_physics(Model::MaxwellExpectation, NoiseModel::build(w.grid, w.noise));
  EMState e = w.initial;
  const long fine = 4 * w.steps;
  for (long n = 0; n < fine; ++n) e = advance(e, phys, Scheme::RK4, w.t_end / fine, {});
  const double dist = em_l2_distance(ito.stats.mean, e);
  const EMState se2 = ito.stats.se2();
  const double se_l2 = std::sqrt(integrate(se2.D[0] + se2.D[1] + se2.D[2] + se2.B[0] + se2.B[1] + se2.B[2]));
  r.checks.push_back({"L2(mean - expectation) / L2(SE)", dist / se_l2, 3.0});

  // Constant xi = (sigma, 0, 0): the k = (1,0,0) mode envelope decays as exp(-sigma^2 t / 2).
  const double sigma = 1.0;
  const GridSpec& g = w.grid;
  const auto cphys = em_physics(Model::MaxwellExpectation,
                                NoiseModel::build(g, {{NoiseKind::Constant, {}, {sigma, 0.0, 0.0}, 0.0, 1.0, {}}}));
  EMState s{VectorField::from_function(g, [](double x, double, double) { return Vec3{0.0, std::cos(x), 0.0}; }),
            VectorField::from_function(g, [](double x, double, double) { return Vec3{0.0, 0.0, std::cos(x)}; })};
  const double amp0 = std::abs(mode_coefficient(s.D[1], {1, 0, 0}));
  for (long n = 0; n < fine; ++n) s = advance(s, cphys, Scheme::RK4, w.t_end / fine, {});
  const double ratio = std::abs(mode_coefficient(s.D[1], {1, 0, 0})) / amp0;
  r.checks.push_back({"envelope rel error", std::abs(ratio / std::exp(-0.5 * sigma * sigma * w.t_end) - 1.0), 0.05});
  return r;
}

// ---------------------------------------------------------------------------
// 8. pure transport

inline SuiteReport pure_transport(const VerifyOptions& o) {
  SuiteReport r{8, "pure-transport", {}, {}, 0.0};
  const GridSpec g = GridSpec::cube(pick(o.grid, 16));
  const double t_end = 1.0;
  const int base = static_cast<int>(steps_for(t_end, pick(o.dt, 1.0 / 16.0)));
  const int levels = 4, paths = 16;
  const Vec3 sigma{0.4, -0.2, 0.1};
  const NoiseModel noise = NoiseModel::build(g, {{NoiseKind::Constant, {}, {sigma[0], 0.0, 0.0}, 0.0, 1.0, {}},
                                                 {NoiseKind::Constant, {}, {0.0, sigma[1], sigma[2]}, 0.0, 1.0, {}}});
  Physics<EMState> phys = em_physics(Model::MaxwellStratonovich, noise);
  phys.drift = [](const EMState& s) { return EMState{VectorField(s.grid()), VectorField(s.grid())}; };
  const EMState s0{random_divfree_field(g, 81, 2, 0.5), random_divfree_field(g, 82, 2, 0.5)};
  std::vector<double> dts, rms(levels + 1, 0.0);
  for (int p = 0; p < paths; ++p) {
    const BrownianPath path(WienerDriver{8080, static_cast<std::uint64_t>(p), noise.size()}, t_end, base, levels);
    const double w0 = path.value(0, 0, base), w1 = path.value(0, 1, base);
    const Vec3 shift{sigma[0] * w0, sigma[1] * w1, sigma[2] * w1};
    const EMState exact{translate(s0.D, shift), translate(s0.B, shift)};
    for (int lev = 0; lev <= levels; ++lev) {
      EMState s = s0;
      for (int n = 0; n < path.steps(lev); ++n) s = advance(s, phys, Scheme::Heun, path.dt(lev), path.increments(lev, n));
      const double e = em_l2_distance(s, exact);
      rms[lev] += e * e / paths;
    }
  }
  for (int lev = 0; lev <= levels; ++lev) {
    rms[lev] = std::sqrt(rms[lev]);
    dts.push_back(t_end / (base << lev));
    r.notes.push_back("dt=" + fmt("%.5f", dts.back()) + " rms L2 error=" + fmt("%.4e", rms[lev]));
  }
  r.checks.push_back({"|strong order - 1|", std::abs(fit_order(dts, rms) - 1.0), 0.2});
  return r;
}

// ---------------------------------------------------------------------------
// 9. high-field MHD limit

inline SuiteReport mhd_limit(const VerifyOptions& o) {
  SuiteReport r{9, "mhd-limit", {}, {}, 0.0};
  const GridSpec g = GridSpec::cube(pick(o.grid, 32));
  const double t_end = 0.5;
  const long steps = steps_for(t_end, pick(o.dt, 1e-2));
  InitialCondition ic;
  ic.preset = "abc";
  ic.amplitude = 0.1;
  MHDState s = make_mhd_initial(g, ic);
  const auto phys = mhd_physics({}, default_h_floor);
  const double h0 = total_energy(s);
  const double k0 = magnetic_helicity(s.B);
  double orth = pb_orthogonality(s);
  for (long n = 0; n < steps; ++n) {
    s = advance(s, phys, Scheme::RK4, t_end / steps, {});
    orth = std::max(orth, pb_orthogonality(s));
  }
  r.checks.push_back({"helicity rel drift", std::abs(magnetic_helicity(s.B) - k0) / std::abs(k0), 1e-6});
  r.checks.push_back({"max |P.B|/h", orth, 1e-6});
  r.checks.push_back({"int h rel drift", std::abs(total_energy(s) - h0) / h0, 1e-8});
  return r;
}

// ---------------------------------------------------------------------------
// 10. Hamiltonian structure

inline SuiteReport hamiltonian_structure(const VerifyOptions& o) {
  SuiteReport r{10, "hamiltonian-structure", {}, {}, 0.0};
  const GridSpec g = GridSpec::cube(pick(o.grid, 16));
  const VectorField D = random_divfree_field(g, 101, 3, 0.5);
  const VectorField A = random_divfree_field(g, 102, 3, 0.5) + grad(random_scalar_field(g, 103, 3, 0.3));
  const VectorField xi = random_divfree_field(g, 104, 3, 1.0);
  const Pairing mm = momentum_map_pairing(A, D, xi);
  r.checks.push_back({"momentum map rel diff", std::abs(mm.lhs - mm.rhs) / std::abs(mm.lhs), 1e-8});
  const VectorField e1 = VectorField::from_function(g, [](double x, double, double) { return Vec3{0.0, std::cos(x), 0.0}; });
  const VectorField e2 = VectorField::from_function(g, [](double, double y, double) { return Vec3{0.0, 0.0, std::cos(y)}; });
  const Pairing lp = lp_bracket_check(D, A, e1, e2);
  r.checks.push_back({"LP bracket rel diff", std::abs(lp.lhs - lp.rhs) / std::max(std::abs(lp.lhs), 1e-14), 1e-8});
  const GridSpec g32 = GridSpec::cube(std::max(32, g.nx));
  InitialCondition ic;
  ic.amplitude = 0.3;
  ic.kmax = 2;
  r.checks.push_back({"KM residual (L2)", km_bracket_residual(make_em_initial(g32, ic)), 1e-6});
  return r;
}

// ---------------------------------------------------------------------------
// 11. Kelvin circulation

/// |C(T) - C(0) + int_0^T loop-integral of (gamma x curl gamma + beta x curl beta) dt|.
inline double kelvin_residual(const EMState& s0, const TracerLoop& loop0, double t_end, long steps) {
  const auto phys = em_physics(Model::BornInfeld, {});
  Tracked<EMState> t{s0, {loop0}, {0.0}};
  const double c0 = circulations(t, phys)[0];
  for (long n = 0; n < steps; ++n) t = advance(t, phys, Scheme::RK4, t_end / steps, {});
  return std::abs(circulations(t, phys)[0] - c0 + t.accum[0]);
}

inline SuiteReport kelvin_circulation(const VerifyOptions& o) {
  SuiteReport r{11, "kelvin-circulation", {}, {}, 0.0};
  const GridSpec g = GridSpec::cube(pick(o.grid, 32));
  const double t_end = 0.5;
  const long base = steps_for(t_end, pick(o.dt, 0.25));
  const EMState s0{random_field_max_norm(g, 111, 2, 0.3), random_field_max_norm(g, 112, 2, 0.3)};
  std::vector<double> res;
  for (int lev = 0; lev < 3; ++lev) {
    const int points = 16 << lev;
    const TracerLoop loop = make_circle_loop({3.0, 3.2, 2.9}, 1.2, {0.3, 0.2, 1.0}, points);
    res.push_back(kelvin_residual(s0, loop, t_end, base << lev));
    r.notes.push_back("dt=" + fmt("%.5f", t_end / (base << lev)) + " points=" + std::to_string(points) +
                      " residual=" + fmt("%.4e", res.back()));
  }
  r.checks.push_back({"min refinement ratio", std::min(res[0] / res[1], res[1] / res[2]), 4.0, true});
  return r;
}

}  // namespace verify

// ---------------------------------------------------------------------------
// Registry

using SuiteFn = std::function<SuiteReport(const VerifyOptions&)>;

inline const std::vector<std::pair<std::string, SuiteFn>>& verify_suites() {
  static const std::vector<std::pair<std::string, SuiteFn>> suites{
      {"operator-identities", verify::operator_identities},
      {"variational-derivatives", verify::variational_derivatives},
      {"energy-deterministic", verify::energy_deterministic},
      {"stochastic-energy", verify::stochastic_energy},
      {"momentum-dichotomy", verify::momentum_dichotomy},
      {"ito-stratonovich", verify::ito_stratonovich},
      {"expectation-pde", verify::expectation_pde},
      {"pure-transport", verify::pure_transport},
      {"mhd-limit", verify::mhd_limit},
      {"hamiltonian-structure", verify::hamiltonian_structure},
      {"kelvin-circulation", verify::kelvin_circulation},
  };
  return suites;
}

/// Runs one named suite, timing it.
inline SuiteReport run_suite(const std::string& name, const VerifyOptions& o = {}) {
  for (const auto& [n, fn] : verify_suites()) {
    if (n != name) continue;
    const auto t0 = std::chrono::steady_clock::now();
    SuiteReport r = fn(o);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  }
  throw ConfigError("unknown verification suite '" + name + "'");
}

}  // namespace sabi
