/**
 * @file driver.hpp
 * @brief Ensemble runner: per-member integration, diagnostics CSV, snapshots,
 *        checkpoints with bit-exact resume, and the run manifest.
 *
 * Output layout under the run directory:
 *   manifest.json, ensemble_summary.json,
 *   member_NNNN/{member.json, diagnostics.csv, snapshots/, checkpoints/}
 */
#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <fftw3.h>

#include "sabi/io.hpp"
#include "sabi/simulation.hpp"

namespace sabi {

inline constexpr const char* sabi_version = "1.0.0";
inline constexpr const char* output_root_env = "SABI_OUTPUT_ROOT";

/// Relative output directories are placed under $SABI_OUTPUT_ROOT when it is set.
inline fs::path resolve_output_dir(const RunConfig& c) {
  fs::path dir(c.output.directory);
  if (dir.is_absolute()) return dir;
  if (const char* root = std::getenv(output_root_env); root && *root) return fs::path(root) / dir;
  return dir;
}

inline std::string config_hash(const RunConfig& c) { return sha256_hex(to_json(c).dump()); }

inline std::string member_dir_name(int m) {
  std::ostringstream os;
  os << "member_" << std::setw(4) << std::setfill('0') << m;
  return os.str();
}

inline std::string step_tag(long step) {
  std::ostringstream os;
  os << "step" << std::setw(8) << std::setfill('0') << step;
  return os.str();
}

/// Files produced by one member, relative to the run directory.
struct MemberFiles {
  int index = 0;
  std::uint64_t seed = 0;
  std::string diagnostics;
  std::vector<std::string> snapshots;
  std::vector<std::string> checkpoints;
};

inline nlohmann::json to_json(const MemberFiles& f) {
  return {{"index", f.index},
          {"seed", f.seed},
          {"stream", {{"seed", f.seed}, {"member", f.index}}},
          {"diagnostics", f.diagnostics},
          {"snapshots", f.snapshots},
          {"checkpoints", f.checkpoints}};
}

inline MemberFiles member_files_from_json(const nlohmann::json& j) {
  MemberFiles f;
  f.index = j.at("index");
  f.seed = j.at("seed");
  f.diagnostics = j.at("diagnostics");
  f.snapshots = j.at("snapshots").get<std::vector<std::string>>();
  f.checkpoints = j.at("checkpoints").get<std::vector<std::string>>();
  return f;
}

struct RunResult {
  fs::path directory;
  std::vector<std::vector<DiagnosticsRecord>> records;  // [member][sample]
};

/// Everything needed to continue a member mid-run.
struct Checkpoint {
  RunConfig config;
  fs::path run_dir;
  int member = 0;
  long step = 0;
};

namespace detail {

inline std::vector<TracerLoop> initial_loops(const RunConfig& c) {
  std::vector<TracerLoop> loops;
  for (const auto& l : c.loops) loops.push_back(make_circle_loop(l.center, l.radius, l.normal, l.points));
  return loops;
}

template <class S>
std::vector<double> flatten(Tracked<S> t) {
  std::vector<double> out;
  for (auto& [name, f] : named_fields(t.fields))
    for (int d = 0; d < 3; ++d) out.insert(out.end(), (*f)[d].values.begin(), (*f)[d].values.end());
  for (const auto& l : t.loops)
    for (const auto& p : l.points) out.insert(out.end(), p.begin(), p.end());
  out.insert(out.end(), t.accum.begin(), t.accum.end());
  return out;
}

template <class S>
void unflatten(Tracked<S>& t, const std::vector<double>& data) {
  std::size_t pos = 0;
  auto take = [&](std::size_t n) {
    if (pos + n > data.size()) throw ConfigError("checkpoint state is truncated");
    const std::size_t at = pos;
    pos += n;
    return data.begin() + static_cast<std::ptrdiff_t>(at);
  };
  for (auto& [name, f] : named_fields(t.fields))
    for (int d = 0; d < 3; ++d) {
      auto it = take((*f)[d].values.size());
      std::copy(it, it + static_cast<std::ptrdiff_t>((*f)[d].values.size()), (*f)[d].values.begin());
    }
  for (auto& l : t.loops)
    for (auto& p : l.points) {
      auto it = take(3);
      std::copy(it, it + 3, p.begin());
    }
  for (double& a : t.accum) a = *take(1);
  if (pos != data.size()) throw ConfigError("checkpoint state has trailing data");
}

inline void write_member_index(const fs::path& run_dir, const MemberFiles& f) {
  std::ofstream(run_dir / member_dir_name(f.index) / "member.json") << to_json(f).dump(2) << '\n';
}

/// Calls f(physics, initial_state, record_fn) with the concrete state type of the model.
template <class F>
void dispatch(const RunConfig& c, F&& f) {
  NoiseModel noise = NoiseModel::build(c.grid, c.noise);
  switch (family(c.model)) {
    case ModelFamily::Electromagnetic: {
      const Model m = c.model;
      f(em_physics(m, std::move(noise)), make_em_initial(c.grid, c.initial),
        [m](const EMState& s) { return make_record(s, m); });
      break;
    }
    case ModelFamily::Vorticity:
      f(vorticity_physics(std::move(noise)), make_vorticity_initial(c.grid, c.initial),
        [](const VorticityState& s) { return make_record(s, Model::EulerVorticity); });
      break;
    case ModelFamily::Mhd: {
      const double floor = c.h_floor;
      f(mhd_physics(std::move(noise), floor), make_mhd_initial(c.grid, c.initial),
        [m = c.model, floor](const MHDState& s) { return make_record(s, m, floor); });
      break;
    }
  }
}

inline double state_speed(const EMState&) { return 1.0; }
inline double state_speed(const MHDState&) { return 1.0; }
inline double state_speed(const VorticityState& s) { return max_norm(biot_savart(s)); }

/// Integrates one member from `start` (step `start_step`) to t_end.
template <class S, class RecordFn>
std::vector<DiagnosticsRecord> integrate_member(const RunConfig& c, const Physics<S>& phys, RecordFn&& make,
                                                Tracked<S> state, long start_step,
                                                std::vector<DiagnosticsRecord> history, MemberFiles& files,
                                                const fs::path& run_dir) {
  const int m = files.index;
  const fs::path mdir = run_dir / member_dir_name(m);
  fs::create_directories(mdir);
  const double dt = c.integrator.dt;
  const long steps = c.integrator.steps();
  const WienerDriver driver{c.ensemble.seed, static_cast<std::uint64_t>(m), phys.noise->size()};
  const bool noisy = !phys.noise->empty() && c.integrator.scheme != Scheme::RK4;
  const double dx = c.grid.min_spacing();
  const double noise_bound = noisy ? phys.noise->speed_bound() : 0.0;
  const std::size_t nloops = state.loops.size();

  files.diagnostics = member_dir_name(m) + "/diagnostics.csv";
  std::ofstream csv(run_dir / files.diagnostics, std::ios::trunc);
  write_csv_header(csv, nloops);
  for (const auto& r : history) write_csv_row(csv, r);
  csv.flush();

  auto emit = [&](long step) {
    DiagnosticsRecord r = make(state.fields);
    r.time = static_cast<double>(step) * dt;
    r.circulation = circulations(state, phys);
    r.force_integral = state.accum;
    if (!r.finite()) throw NumericalFailure("non-finite diagnostics at step " + std::to_string(step));
    history.push_back(r);
    write_csv_row(csv, r);
    csv.flush();
    check_cfl(state_speed(state.fields), noise_bound, dt, dx, c.integrator.cfl_guard);
  };
  auto snapshot = [&](long step) {
    const fs::path sdir = mdir / "snapshots";
    fs::create_directories(sdir);
    for (auto& [name, f] : named_fields(state.fields)) {
      const SnapshotMeta meta{name, static_cast<double>(step) * dt, step, c.ensemble.seed};
      for (const auto& p : write_snapshot(sdir, step_tag(step) + "_" + name, *f, meta)) {
        files.snapshots.push_back(fs::relative(p, run_dir).string());
      }
    }
  };
  auto checkpoint = [&](long step) {
    const fs::path cdir = mdir / "checkpoints";
    fs::create_directories(cdir);
    const std::string stem = "checkpoint_" + step_tag(step);
    const fs::path bin = cdir / (stem + ".bin");
    const fs::path meta = cdir / (stem + ".json");
    files.checkpoints.push_back(fs::relative(meta, run_dir).string());
    files.checkpoints.push_back(fs::relative(bin, run_dir).string());
    write_binary_file(bin, flatten(state));
    nlohmann::json j;
    j["kind"] = "sabi-checkpoint";
    j["config"] = to_json(c);
    j["config_hash"] = config_hash(c);
    j["member"] = m;
    j["step"] = step;
    j["state"] = bin.filename().string();
    j["files"] = to_json(files);
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : history) rows.push_back(record_values(r));
    j["diagnostics"] = rows;
    std::ofstream(meta) << j.dump() << '\n';
  };

  const long diag_every = c.output.diagnostics_interval;
  const long snap_every = c.output.snapshot_interval;
  const long ckpt_every = c.output.checkpoint_interval;
  if (start_step == 0) {
    if (diag_every > 0) emit(0);
    else check_cfl(state_speed(state.fields), noise_bound, dt, dx, c.integrator.cfl_guard);
    if (snap_every > 0) snapshot(0);
  }
  for (long step = start_step; step < steps; ++step) {
    std::vector<double> dw;
    if (noisy) dw = driver.sample_increments(static_cast<std::uint64_t>(step), dt);
    state = advance(state, phys, c.integrator.scheme, dt, dw);
    const long n = step + 1;
    if (diag_every > 0 && (n % diag_every == 0 || n == steps)) emit(n);
    if (snap_every > 0 && (n % snap_every == 0 || n == steps)) snapshot(n);
    if (ckpt_every > 0 && n % ckpt_every == 0 && n < steps) checkpoint(n);
  }
  write_member_index(run_dir, files);
  return history;
}

template <class S>
Tracked<S> fresh_state(const RunConfig& c, S initial) {
  Tracked<S> t{std::move(initial), initial_loops(c), {}};
  t.accum.assign(t.loops.size(), 0.0);
  return t;
}

inline std::vector<DiagnosticsRecord> run_member(const RunConfig& c, int m, const fs::path& run_dir) {
  std::vector<DiagnosticsRecord> out;
  dispatch(c, [&](const auto& phys, auto initial, auto make) {
    MemberFiles files;
    files.index = m;
    files.seed = c.ensemble.seed;
    out = integrate_member(c, phys, make, fresh_state(c, std::move(initial)), 0, {}, files, run_dir);
  });
  return out;
}

template <class F>
auto with_member_context(int m, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const NumericalFailure& e) {
    throw NumericalFailure("member " + std::to_string(m) + ": " + e.what());
  } catch (const ConstraintViolation& e) {
    throw NumericalFailure("member " + std::to_string(m) + ": " + e.what());
  }
}

}  // namespace detail

inline std::vector<DiagnosticsRecord> read_diagnostics_csv(const fs::path& path, std::size_t loops) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  std::string line;
  std::getline(in, line);
  std::vector<DiagnosticsRecord> out;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(parse_csv_row(line, loops));
  return out;
}

/// Mean and standard error per column and sample time across members.
inline nlohmann::json ensemble_summary(const std::vector<std::vector<DiagnosticsRecord>>& records,
                                       std::size_t loops) {
  nlohmann::json j;
  const std::size_t members = records.size();
  j["members"] = members;
  if (members == 0) return j;
  const std::size_t samples = records.front().size();
  for (const auto& r : records)
    if (r.size() != samples) throw NumericalFailure("members produced different numbers of diagnostics rows");
  std::vector<std::string> names(diagnostics_columns.begin(), diagnostics_columns.end());
  for (std::size_t i = 0; i < loops; ++i) names.push_back("circulation_" + std::to_string(i));
  for (std::size_t i = 0; i < loops; ++i) names.push_back("force_integral_" + std::to_string(i));
  std::vector<std::vector<double>> mean(names.size(), std::vector<double>(samples, 0.0));
  std::vector<std::vector<double>> se(names.size(), std::vector<double>(samples, 0.0));
  for (std::size_t s = 0; s < samples; ++s) {
    std::vector<double> sum(names.size(), 0.0), sq(names.size(), 0.0);
    for (const auto& r : records) {
      const auto v = record_values(r[s]);
      for (std::size_t c = 0; c < names.size(); ++c) sum[c] += v[c];
    }
    for (std::size_t c = 0; c < names.size(); ++c) mean[c][s] = sum[c] / static_cast<double>(members);
    for (const auto& r : records) {
      const auto v = record_values(r[s]);
      for (std::size_t c = 0; c < names.size(); ++c) sq[c] += (v[c] - mean[c][s]) * (v[c] - mean[c][s]);
    }
    if (members > 1)
      for (std::size_t c = 0; c < names.size(); ++c)
        se[c][s] = std::sqrt(sq[c] / static_cast<double>(members - 1) / static_cast<double>(members));
  }
  j["time"] = mean[0];
  for (std::size_t c = 1; c < names.size(); ++c) j["columns"][names[c]] = {{"mean", mean[c]}, {"stderr", se[c]}};
  return j;
}

/// Rebuilds the ensemble summary and manifest from the member outputs on disk.
inline RunResult finalize_run(const RunConfig& c, const fs::path& run_dir) {
  RunResult result{run_dir, {}};
  nlohmann::json members = nlohmann::json::array();
  for (int m = 0; m < c.ensemble.members; ++m) {
    std::ifstream in(run_dir / member_dir_name(m) / "member.json");
    if (!in) throw NumericalFailure("member " + std::to_string(m) + " has no completed output");
    const auto files = member_files_from_json(nlohmann::json::parse(in));
    result.records.push_back(read_diagnostics_csv(run_dir / files.diagnostics, c.loops.size()));
    nlohmann::json entry = to_json(files);
    entry["index_file"] = member_dir_name(m) + "/member.json";
    members.push_back(entry);
  }
  std::ofstream(run_dir / "ensemble_summary.json") << ensemble_summary(result.records, c.loops.size()).dump(2) << '\n';
  nlohmann::json manifest;
  manifest["tool"] = "sabi";
  manifest["version"] = sabi_version;
  manifest["fftw"] = std::string(fftw_version);
  manifest["compiler"] = __VERSION__;
  manifest["config"] = to_json(c);
  manifest["config_hash"] = config_hash(c);
  manifest["members"] = members;
  manifest["summary"] = "ensemble_summary.json";
  std::ofstream(run_dir / "manifest.json") << manifest.dump(2) << '\n';
  return result;
}

/// Runs every member in order and writes the manifest.
inline RunResult run_ensemble(const RunConfig& c) {
  validate(c);
  const fs::path run_dir = resolve_output_dir(c);
  fs::create_directories(run_dir);
  for (int m = 0; m < c.ensemble.members; ++m) {
    detail::with_member_context(m, [&] { return detail::run_member(c, m, run_dir); });
  }
  return finalize_run(c, run_dir);
}

inline Checkpoint read_checkpoint(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open checkpoint '" + path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("checkpoint '" + path.string() + "' is not valid JSON: " + e.what());
  }
  if (j.value("kind", "") != "sabi-checkpoint") throw ConfigError("'" + path.string() + "' is not a checkpoint");
  Checkpoint ck;
  ck.config = config_from_json(j.at("config"));
  if (config_hash(ck.config) != j.at("config_hash").get<std::string>()) {
    throw ConfigError("checkpoint config hash mismatch");
  }
  ck.member = j.at("member");
  ck.step = j.at("step");
  ck.run_dir = fs::absolute(path).parent_path().parent_path().parent_path();
  return ck;
}

/// Continues the member stored in the checkpoint, runs any later members, and finalizes.
inline RunResult resume_run(const fs::path& checkpoint_path) {
  const Checkpoint ck = read_checkpoint(checkpoint_path);
  const RunConfig& c = ck.config;
  std::ifstream in(checkpoint_path);
  const auto j = nlohmann::json::parse(in);
  detail::with_member_context(ck.member, [&] {
    detail::dispatch(c, [&](const auto& phys, auto initial, auto make) {
      auto state = detail::fresh_state(c, std::move(initial));
      detail::unflatten(state, read_binary_file(checkpoint_path.parent_path() / j.at("state").get<std::string>()));
      std::vector<DiagnosticsRecord> history;
      for (const auto& row : j.at("diagnostics")) {
        history.push_back(record_from_values(row.get<std::vector<double>>(), c.loops.size()));
      }
      MemberFiles files = member_files_from_json(j.at("files"));
      detail::integrate_member(c, phys, make, std::move(state), ck.step, std::move(history), files, ck.run_dir);
    });
    return 0;
  });
  for (int m = ck.member + 1; m < c.ensemble.members; ++m) {
    detail::with_member_context(m, [&] { return detail::run_member(c, m, ck.run_dir); });
  }
  return finalize_run(c, ck.run_dir);
}

}  // namespace sabi
