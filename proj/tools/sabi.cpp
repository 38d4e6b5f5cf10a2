// sabi: run, resume and verify stochastic Born-Infeld simulations.
//
// Exit codes: 0 ok, 2 config error, 3 numerical failure, 4 acceptance failure.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sabi/driver.hpp"
#include "sabi/verify.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_numerical = 3;
constexpr int exit_acceptance = 4;

void report_run(const sabi::RunResult& r) {
  std::cout << "wrote " << (r.directory / "manifest.json").string() << " (" << r.records.size() << " member"
            << (r.records.size() == 1 ? "" : "s") << ")\n";
}

int verify(const std::string& suite, const sabi::VerifyOptions& opts) {
  bool ok = true;
  auto one = [&](const std::string& name) {
    const auto r = sabi::run_suite(name, opts);
    std::cout << r << '\n';
    for (const auto& n : r.notes) std::cout << "    " << n << '\n';
    ok = ok && r.passed();
  };
  if (suite == "all") {
    for (const auto& [name, fn] : sabi::verify_suites()) one(name);
  } else {
    one(suite);
  }
  return ok ? exit_ok : exit_acceptance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic Born-Infeld / Maxwell / MHD pseudo-spectral simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", sabi::sabi_version);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an ensemble described by a JSON config");
  run->add_option("config", config_path, "Path to the run configuration")->required();

  std::string checkpoint_path;
  auto* resume = app.add_subcommand("resume", "Continue a run from a checkpoint");
  resume->add_option("checkpoint", checkpoint_path, "Checkpoint JSON written by a previous run")->required();

  std::string suite;
  sabi::VerifyOptions opts;
  auto* ver = app.add_subcommand("verify", "Run a verification suite (or 'all')");
  std::vector<std::string> names{"all"};
  for (const auto& [name, fn] : sabi::verify_suites()) names.push_back(name);
  ver->add_option("suite", suite, "Suite name")->required()->check(CLI::IsMember(names));
  ver->add_option("--grid", opts.grid, "Grid points per axis (overrides the suite default)")->check(CLI::PositiveNumber);
  ver->add_option("--dt", opts.dt, "Time step (overrides the suite default)")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config;
  }

  try {
    if (*run) {
      report_run(sabi::run_ensemble(sabi::load_config(config_path)));
    } else if (*resume) {
      report_run(sabi::resume_run(checkpoint_path));
    } else if (*ver) {
      return verify(suite, opts);
    }
  } catch (const sabi::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const sabi::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return exit_numerical;
  } catch (const sabi::ConstraintViolation& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return exit_numerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_numerical;
  }
  return exit_ok;
}
