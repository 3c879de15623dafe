#include "decay/error.hpp"
#include "decay/runner.hpp"
#include "decay/scenario.hpp"
#include "decay/spectra.hpp"
#include "decay/units.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct Flags {
  std::string out;
  double until_fs = 0.0;
  int threads = 0;
  std::string format = "csv";
  std::string checkpoint;
  bool peak_normalize = false;
};

void add_run_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--out", f.out, "Output directory (overrides [output] directory)");
  cmd->add_option("--until-time", f.until_fs, "Report spectra at this finite time, fs")->check(CLI::PositiveNumber);
  cmd->add_option("--threads", f.threads, "Worker threads (default: all cores)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--format", f.format, "Output format")->check(CLI::IsMember({"csv"}));
  cmd->add_option("--from-checkpoint", f.checkpoint, "Reuse a decaying-state history instead of propagating")
      ->check(CLI::ExistingFile);
  cmd->add_flag("--peak-normalize", f.peak_normalize, "Scale every written spectrum to unit peak");
}

decay::RunOptions options(const Flags& f) {
  decay::RunOptions o;
  if (!f.out.empty()) o.out = f.out;
  if (f.until_fs > 0.0) o.until_time = decay::fs(f.until_fs);
  if (!f.checkpoint.empty()) o.from_checkpoint = f.checkpoint;
  o.threads = f.threads;
  o.peak_normalize = f.peak_normalize;
  return o;
}

template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const decay::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return decay::exit_config_error;
  } catch (const decay::InvalidArgument& e) {
    std::cerr << "invalid scenario: " << e.what() << '\n';
    return decay::exit_config_error;
  } catch (const decay::NumericalAbort& e) {
    std::cerr << "numerical abort: " << e.what() << '\n';
    return decay::exit_numerical_abort;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return decay::exit_numerical_abort;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nuclear wavepacket simulator for electronic decay with fragmentation"};
  app.require_subcommand(1);

  Flags run_flags, preset_flags;
  std::string config_path, inspect_path, preset_name;
  bool print_only = false;

  auto* run_cmd = app.add_subcommand("run", "Run a scenario file");
  run_cmd->add_option("config", config_path, "Scenario file")->required()->check(CLI::ExistingFile);
  add_run_flags(run_cmd, run_flags);

  auto* preset_cmd = app.add_subcommand("preset", "Run (or print) a built-in scenario");
  preset_cmd->add_option("name", preset_name, "fig2a or fig2b")->required();
  preset_cmd->add_flag("--print", print_only, "Print the scenario text instead of running it");
  add_run_flags(preset_cmd, preset_flags);

  auto* inspect_cmd = app.add_subcommand("inspect-config", "Validate a scenario and list every resolved key");
  inspect_cmd->add_option("config", inspect_path, "Scenario file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // usage errors share the exit status of invalid scenarios
    const int code = app.exit(e);
    return code == 0 ? 0 : decay::exit_config_error;
  }

  if (*run_cmd) {
    return guarded([&] { return decay::run(decay::read_config(config_path), options(run_flags), std::cout); });
  }
  if (*preset_cmd) {
    return guarded([&] {
      const std::string text = decay::preset_text(preset_name);
      if (print_only) {
        std::cout << text;
        return decay::exit_converged;
      }
      return decay::run(decay::parse_config(text), options(preset_flags), std::cout);
    });
  }
  return guarded([&] {
    const auto cfg = decay::read_config(inspect_path);
    std::cout << "# scenario " << decay::scenario_hash(cfg.canonical()) << '\n';
    std::string section;
    for (const auto& e : cfg.resolved) {
      if (e.section != section) {
        section = e.section;
        std::cout << '[' << section << "]\n";
      }
      std::cout << e.key << " = " << e.value << (e.defaulted ? "    # default" : "") << '\n';
    }
    return decay::exit_converged;
  });
}
