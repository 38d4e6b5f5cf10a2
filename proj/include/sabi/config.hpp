/**
 * @file config.hpp
 * @brief JSON run configuration: schema, defaults, validation and round-trip.
 */
#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sabi/diagnostics.hpp"
#include "sabi/initial.hpp"

namespace sabi {

using json = nlohmann::json;

inline constexpr int config_schema_version = 1;

struct LoopSpec {
  Vec3 center{0.0, 0.0, 0.0};
  double radius = 1.0;
  Vec3 normal{0.0, 0.0, 1.0};
  int points = 256;
  friend bool operator==(const LoopSpec&, const LoopSpec&) = default;
};

struct EnsembleConfig {
  int members = 1;
  std::uint64_t seed = 1;
  friend bool operator==(const EnsembleConfig&, const EnsembleConfig&) = default;
};

/// Intervals are counted in steps; 0 disables the corresponding output.
struct OutputConfig {
  std::string directory = "sabi-out";
  long snapshot_interval = 0;
  long diagnostics_interval = 1;
  long checkpoint_interval = 0;
  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct RunConfig {
  Model model = Model::Maxwell;
  GridSpec grid = GridSpec::cube(16);
  InitialCondition initial;
  std::vector<NoiseModeSpec> noise;
  IntegratorConfig integrator;
  EnsembleConfig ensemble;
  OutputConfig output;
  std::vector<LoopSpec> loops;
  double h_floor = default_h_floor;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Scheme used when the config leaves it out.
inline Scheme default_scheme(Model m) {
  if (is_ito(m)) return Scheme::EulerMaruyama;
  if (is_stochastic(m)) return Scheme::Heun;
  return Scheme::RK4;
}

/// Signal-speed bound used by the CFL guard: 1 (light speed) for the field
/// models, the current max|u| for Euler vorticity.
inline double signal_speed(const RunConfig& c) {
  if (family(c.model) == ModelFamily::Vorticity) {
    return max_norm(biot_savart(make_vorticity_initial(c.grid, c.initial)));
  }
  return 1.0;
}

inline double noise_speed(const RunConfig& c) {
  if (!is_stochastic(c.model) && c.model != Model::MaxwellExpectation) return 0.0;
  return NoiseModel::build(c.grid, c.noise).speed_bound();
}

/// The largest dt allowed by the guard, shrunk so that it divides t_end.
inline double default_time_step(const RunConfig& c) {
  const double dt = cfl_time_step(signal_speed(c), noise_speed(c), c.grid.min_spacing(), c.integrator.cfl_guard);
  const double steps = std::max(1.0, std::ceil(c.integrator.t_end / dt - 1e-9));
  return c.integrator.t_end / steps;
}

// ---------------------------------------------------------------------------
// Parsing helpers

namespace detail {

class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& at(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  template <class T>
  T get(const std::string& key, const T& fallback) {
    if (!has(key)) return fallback;
    return convert<T>(j_.at(key), field(key));
  }

  template <class T>
  T require(const std::string& key) {
    if (!has(key)) throw ConfigError(field(key) + ": required field is missing");
    return convert<T>(j_.at(key), field(key));
  }

  /// Throws on any key not consumed by has/at/get/require.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(field(it.key()) + ": unknown key");
    }
  }

  template <class T>
  static T convert(const json& v, const std::string& name) {
    try {
      if constexpr (std::is_same_v<T, Vec3>) {
        if (!v.is_array() || v.size() != 3) throw ConfigError(name + ": expected an array of 3 numbers");
        return Vec3{v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
      } else if constexpr (std::is_same_v<T, std::array<int, 3>>) {
        if (!v.is_array() || v.size() != 3) throw ConfigError(name + ": expected an array of 3 integers");
        for (const auto& e : v)
          if (!e.is_number_integer()) throw ConfigError(name + ": expected integer entries");
        return {v[0].get<int>(), v[1].get<int>(), v[2].get<int>()};
      } else if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw ConfigError(name + ": expected a number");
        return v.get<double>();
      } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!v.is_number_integer()) throw ConfigError(name + ": expected an integer");
        if constexpr (std::is_unsigned_v<T>) {
          if (v.is_number_unsigned()) return v.get<T>();
          if (v.get<long long>() < 0) throw ConfigError(name + ": expected a non-negative integer");
        }
        return v.get<T>();
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError(name + ": expected true or false");
        return v.get<bool>();
      } else {
        if (!v.is_string()) throw ConfigError(name + ": expected a string");
        return v.get<std::string>();
      }
    } catch (const json::exception& e) {
      throw ConfigError(name + ": " + e.what());
    }
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline NoiseModeSpec parse_noise_mode(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  NoiseModeSpec s;
  const std::string type = r.require<std::string>("type");
  if (type == "constant") {
    s.kind = NoiseKind::Constant;
    s.a = r.require<Vec3>("a");
  } else if (type == "harmonic") {
    s.kind = NoiseKind::Harmonic;
    s.k = r.require<std::array<int, 3>>("k");
    s.a = r.require<Vec3>("a");
    s.phase = r.get<double>("phase", 0.0);
  } else if (type == "custom") {
    s.kind = NoiseKind::Custom;
    if (!r.has("terms") || !r.at("terms").is_array()) throw ConfigError(r.field("terms") + ": expected an array");
    const json& terms = r.at("terms");
    for (std::size_t i = 0; i < terms.size(); ++i) {
      ObjectReader t(terms[i], r.field("terms") + "[" + std::to_string(i) + "]");
      FourierTerm ft;
      ft.k = t.require<std::array<int, 3>>("k");
      ft.a = t.require<Vec3>("a");
      ft.phase = t.get<double>("phase", 0.0);
      t.finish();
      s.terms.push_back(ft);
    }
  } else {
    throw ConfigError(r.field("type") + ": unknown noise type '" + type + "' (constant, harmonic, custom)");
  }
  s.amplitude = r.get<double>("amplitude", 1.0);
  r.finish();
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Validation

/// Checks cross-field consistency and builds the noise model once so that
/// divergence violations surface at load time.
inline void validate(const RunConfig& c) {
  try {
    c.grid.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
  const auto preset_ok = std::find(initial_presets.begin(), initial_presets.end(), c.initial.preset);
  if (preset_ok == initial_presets.end()) throw ConfigError("initial.preset: unknown preset '" + c.initial.preset + "'");
  if (!(c.initial.amplitude >= 0.0)) throw ConfigError("initial.amplitude: must be non-negative");
  if (c.initial.kmax < 1) throw ConfigError("initial.kmax: must be >= 1");
  if (!(c.integrator.t_end > 0.0)) throw ConfigError("integrator.t_end: must be positive");
  if (!(c.integrator.dt > 0.0)) throw ConfigError("integrator.dt: must be positive");
  if (!(c.integrator.cfl_guard > 0.0)) throw ConfigError("integrator.cfl_guard: must be positive");
  if (std::abs(c.integrator.steps() * c.integrator.dt - c.integrator.t_end) > c.integrator.dt * (1.0 + 1e-9)) {
    throw ConfigError("integrator.dt: steps do not reproduce t_end within one step");
  }
  if (c.ensemble.members < 1) throw ConfigError("ensemble.members: must be >= 1");
  if (c.output.snapshot_interval < 0 || c.output.diagnostics_interval < 0 || c.output.checkpoint_interval < 0) {
    throw ConfigError("output: intervals must be non-negative");
  }
  if (c.output.directory.empty()) throw ConfigError("output.directory: must not be empty");
  if (!(c.h_floor > 0.0)) throw ConfigError("h_floor: must be positive");

  const Scheme s = c.integrator.scheme;
  if (is_ito(c.model) && s != Scheme::EulerMaruyama) {
    throw ConfigError("integrator.scheme: Ito models require euler-maruyama");
  }
  if (is_stochastic(c.model) && !is_ito(c.model) && s != Scheme::Heun) {
    throw ConfigError("integrator.scheme: Stratonovich models require heun");
  }
  const bool uses_noise = is_stochastic(c.model) || c.model == Model::MaxwellExpectation;
  if (!uses_noise && !c.noise.empty()) throw ConfigError("noise: model '" + std::string(to_string(c.model)) + "' takes no noise");
  if (family(c.model) == ModelFamily::Electromagnetic && closure_of(c.model) == Closure::Maxwell && !c.loops.empty()) {
    throw ConfigError("loops: circulation tracking needs the Born-Infeld velocity P/H");
  }
  if (family(c.model) != ModelFamily::Electromagnetic) {
    if (c.initial.mean_d != Vec3{0.0, 0.0, 0.0} || c.initial.mean_b != Vec3{0.0, 0.0, 0.0}) {
      throw ConfigError("initial.mean_d/mean_b: only the electromagnetic models accept mean fields");
    }
  }
  if (family(c.model) == ModelFamily::Vorticity && c.initial.preset == "plane-wave") {
    throw ConfigError("initial.preset: 'plane-wave' is not available for euler-vorticity");
  }
  if (family(c.model) == ModelFamily::Mhd && c.initial.preset != "abc" && c.initial.preset != "random-band-limited") {
    throw ConfigError("initial.preset: mhd models accept 'abc' or 'random-band-limited'");
  }
  for (std::size_t i = 0; i < c.loops.size(); ++i) {
    if (c.loops[i].points < 3) throw ConfigError("loops[" + std::to_string(i) + "].points: must be >= 3");
    if (!(c.loops[i].radius > 0.0)) throw ConfigError("loops[" + std::to_string(i) + "].radius: must be positive");
    if (norm(c.loops[i].normal) == 0.0) throw ConfigError("loops[" + std::to_string(i) + "].normal: must be nonzero");
  }
  try {
    NoiseModel::build(c.grid, c.noise);
  } catch (const ConstraintViolation& e) {
    throw ConfigError(std::string("noise: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("noise: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// JSON <-> RunConfig

inline RunConfig config_from_json(const json& j) {
  using detail::ObjectReader;
  ObjectReader root(j, "");
  const int version = root.require<int>("schema_version");
  if (version != config_schema_version) {
    throw ConfigError("schema_version: unsupported version " + std::to_string(version));
  }
  RunConfig c;
  const std::string model = root.require<std::string>("model");
  const auto m = parse_model(model);
  if (!m) throw ConfigError("model: unknown model '" + model + "'");
  c.model = *m;

  {
    ObjectReader g(root.has("grid") ? root.at("grid") : throw ConfigError("grid: required field is missing"), "grid");
    if (g.has("n")) {
      const int n = g.require<int>("n");
      c.grid = GridSpec::cube(n);
      if (g.has("nx") || g.has("ny") || g.has("nz")) throw ConfigError("grid: give either n or nx/ny/nz");
    } else {
      c.grid.nx = g.require<int>("nx");
      c.grid.ny = g.require<int>("ny");
      c.grid.nz = g.require<int>("nz");
    }
    c.grid.lx = g.get<double>("lx", two_pi);
    c.grid.ly = g.get<double>("ly", two_pi);
    c.grid.lz = g.get<double>("lz", two_pi);
    c.grid.dealias = g.get<bool>("dealias", true);
    g.finish();
  }

  if (family(c.model) == ModelFamily::Mhd) c.initial.preset = "random-band-limited";
  if (root.has("initial")) {
    ObjectReader r(root.at("initial"), "initial");
    c.initial.preset = r.get<std::string>("preset", c.initial.preset);
    c.initial.seed = r.get<std::uint64_t>("seed", c.initial.seed);
    c.initial.amplitude = r.get<double>("amplitude", c.initial.amplitude);
    c.initial.kmax = r.get<int>("kmax", c.initial.kmax);
    c.initial.mean_d = r.get<Vec3>("mean_d", c.initial.mean_d);
    c.initial.mean_b = r.get<Vec3>("mean_b", c.initial.mean_b);
    r.finish();
  }

  if (root.has("noise")) {
    const json& n = root.at("noise");
    if (!n.is_array()) throw ConfigError("noise: expected an array of modes");
    for (std::size_t i = 0; i < n.size(); ++i) {
      c.noise.push_back(detail::parse_noise_mode(n[i], "noise[" + std::to_string(i) + "]"));
    }
  }

  c.integrator.scheme = default_scheme(c.model);
  bool dt_given = false;
  if (root.has("integrator")) {
    ObjectReader r(root.at("integrator"), "integrator");
    if (r.has("scheme")) {
      const std::string name = r.require<std::string>("scheme");
      const auto s = parse_scheme(name);
      if (!s) throw ConfigError("integrator.scheme: unknown scheme '" + name + "' (rk4, heun, euler-maruyama)");
      c.integrator.scheme = *s;
    }
    c.integrator.t_end = r.get<double>("t_end", c.integrator.t_end);
    c.integrator.cfl_guard = r.get<double>("cfl_guard", c.integrator.cfl_guard);
    if (r.has("dt")) {
      c.integrator.dt = r.require<double>("dt");
      dt_given = true;
    }
    r.finish();
  }

  if (root.has("ensemble")) {
    ObjectReader r(root.at("ensemble"), "ensemble");
    c.ensemble.members = r.get<int>("members", c.ensemble.members);
    c.ensemble.seed = r.get<std::uint64_t>("seed", c.ensemble.seed);
    r.finish();
  }

  if (root.has("output")) {
    ObjectReader r(root.at("output"), "output");
    c.output.directory = r.get<std::string>("directory", c.output.directory);
    c.output.snapshot_interval = r.get<long>("snapshot_interval", c.output.snapshot_interval);
    c.output.diagnostics_interval = r.get<long>("diagnostics_interval", c.output.diagnostics_interval);
    c.output.checkpoint_interval = r.get<long>("checkpoint_interval", c.output.checkpoint_interval);
    r.finish();
  }

  if (root.has("loops")) {
    const json& l = root.at("loops");
    if (!l.is_array()) throw ConfigError("loops: expected an array");
    for (std::size_t i = 0; i < l.size(); ++i) {
      ObjectReader r(l[i], "loops[" + std::to_string(i) + "]");
      LoopSpec s;
      s.center = r.require<Vec3>("center");
      s.radius = r.require<double>("radius");
      s.normal = r.get<Vec3>("normal", s.normal);
      s.points = r.get<int>("points", s.points);
      r.finish();
      c.loops.push_back(s);
    }
  }

  c.h_floor = root.get<double>("h_floor", c.h_floor);
  root.finish();

  if (!dt_given) {
    if (!(c.integrator.t_end > 0.0) || !(c.integrator.cfl_guard > 0.0)) {
      c.integrator.dt = 1.0;  // validate() reports the offending field
    } else {
      try {
        c.grid.validate();
        c.integrator.dt = default_time_step(c);
      } catch (const std::exception&) {
        c.integrator.dt = c.integrator.t_end;  // validate() below names the real problem
      }
    }
  }
  validate(c);
  return c;
}

inline json to_json(const RunConfig& c) {
  auto vec = [](const Vec3& v) { return json::array({v[0], v[1], v[2]}); };
  auto ivec = [](const std::array<int, 3>& v) { return json::array({v[0], v[1], v[2]}); };
  json j;
  j["schema_version"] = config_schema_version;
  j["model"] = std::string(to_string(c.model));
  j["grid"] = {{"nx", c.grid.nx}, {"ny", c.grid.ny}, {"nz", c.grid.nz},      {"lx", c.grid.lx},
               {"ly", c.grid.ly}, {"lz", c.grid.lz}, {"dealias", c.grid.dealias}};
  j["initial"] = {{"preset", c.initial.preset}, {"seed", c.initial.seed},     {"amplitude", c.initial.amplitude},
                  {"kmax", c.initial.kmax},     {"mean_d", vec(c.initial.mean_d)}, {"mean_b", vec(c.initial.mean_b)}};
  json noise = json::array();
  for (const auto& s : c.noise) {
    json m;
    switch (s.kind) {
      case NoiseKind::Constant:
        m["type"] = "constant";
        m["a"] = vec(s.a);
        break;
      case NoiseKind::Harmonic:
        m["type"] = "harmonic";
        m["k"] = ivec(s.k);
        m["a"] = vec(s.a);
        m["phase"] = s.phase;
        break;
      case NoiseKind::Custom: {
        m["type"] = "custom";
        json terms = json::array();
        for (const auto& t : s.terms) terms.push_back({{"k", ivec(t.k)}, {"a", vec(t.a)}, {"phase", t.phase}});
        m["terms"] = terms;
        break;
      }
    }
    m["amplitude"] = s.amplitude;
    noise.push_back(m);
  }
  j["noise"] = noise;
  j["integrator"] = {{"scheme", std::string(to_string(c.integrator.scheme))},
                     {"dt", c.integrator.dt},
                     {"t_end", c.integrator.t_end},
                     {"cfl_guard", c.integrator.cfl_guard}};
  j["ensemble"] = {{"members", c.ensemble.members}, {"seed", c.ensemble.seed}};
  j["output"] = {{"directory", c.output.directory},
                 {"snapshot_interval", c.output.snapshot_interval},
                 {"diagnostics_interval", c.output.diagnostics_interval},
                 {"checkpoint_interval", c.output.checkpoint_interval}};
  json loops = json::array();
  for (const auto& l : c.loops) {
    loops.push_back({{"center", vec(l.center)}, {"radius", l.radius}, {"normal", vec(l.normal)}, {"points", l.points}});
  }
  j["loops"] = loops;
  j["h_floor"] = c.h_floor;
  return j;
}

/// Parses JSON text; syntax errors report line and column.
inline RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = detail::line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ConfigError("JSON syntax error at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                      e.what());
  }
  return config_from_json(j);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

inline std::string serialize_config(const RunConfig& c) { return to_json(c).dump(2); }

}  // namespace sabi
