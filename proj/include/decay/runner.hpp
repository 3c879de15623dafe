#pragma once

#include "decay/continuum.hpp"
#include "decay/dynamics.hpp"
#include "decay/scenario.hpp"
#include "decay/spectra.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace decay {

struct RunOptions {
  std::optional<std::filesystem::path> out;   // overrides [output] directory
  std::optional<double> until_time;           // a.u.; spectra at this finite time
  std::optional<std::filesystem::path> from_checkpoint;
  int threads = 0;                            // 0: OpenMP default
  bool peak_normalize = false;
};

struct ChannelResult {
  std::string name;
  double v_inf;
  EnergyGrid final_energies;
  std::vector<ContinuumState> states;
  std::vector<SourceSeries> sources;
  Spectrum ker;
  std::optional<Spectrum> electron;       // spectral route
  std::optional<Spectrum> electron_grid;  // driven route
};

struct Convergence {
  bool converged = false;
  bool finite_time = false;
  double final_norm = 0.0;
  double ker_change = 0.0;  // max change of the KER over the last lifetime, relative to its peak
  double lifetime = 0.0;
};

/// Everything a run computes, before anything is written.
struct RunProducts {
  RadialGrid grid;
  Wavefunction psi0;
  double e_total;  // E_T used for mirror imaging
  DecayHistory history;
  std::vector<ChannelResult> channels;
  Spectrum ker;
  std::optional<Spectrum> electron;
  std::optional<Spectrum> electron_grid;
  std::optional<Spectrum> mirror;
  std::optional<CoincidenceMap> coincidence;
  std::vector<Spectrum> convolved;
  std::vector<std::string> convolved_names;
  std::optional<double> l1_ker_mirror;
  Convergence convergence;
  Diagnostics diagnostics;
};

/// Computes all requested spectra. Throws ConfigError for scenarios that
/// violate the numerical contracts (time step, storage interval) and
/// NumericalAbort when a propagation fails.
RunProducts simulate(const ScenarioConfig& config, const RunOptions& options = {});

/// simulate() followed by writing CSVs, the manifest and an optional
/// checkpoint. Returns the process exit status: 0 converged, 2 config error,
/// 3 numerical abort, 4 not converged.
int run(const ScenarioConfig& config, const RunOptions& options, std::ostream& log);

inline constexpr int exit_converged = 0;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_numerical_abort = 3;
inline constexpr int exit_not_converged = 4;

}  // namespace decay
