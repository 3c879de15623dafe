#pragma once

#include "decay/continuum.hpp"
#include "decay/dynamics.hpp"
#include "decay/potentials.hpp"

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace decay {

/// One potential curve as written in a scenario: an analytic form or a
/// two-column table. All numbers are atomic units.
struct CurveSpec {
  std::string kind = "harmonic";  // harmonic | coulomb | file
  double omega = 0.0;
  double r_eq = 0.0;
  double v_min = 0.0;
  double charge_product = 0.0;
  double v_inf = 0.0;
  std::filesystem::path file;
  std::vector<CurveSample> samples;

  PotentialCurve build(double mu) const;
};

struct ChannelSpec {
  std::string name;
  CurveSpec final_curve;
  std::optional<double> gamma;  // constant width
  std::filesystem::path gamma_file;
  std::vector<CurveSample> gamma_samples;

  DecayWidth width() const;
};

enum class ElectronRoute { spectral, grid, both };
std::string_view electron_route_name(ElectronRoute r);

struct ScenarioConfig {
  double mu = 0.0;
  CurveSpec ground;
  CurveSpec decaying;
  std::optional<double> gamma_total;
  std::vector<ChannelSpec> channels;

  struct Radial {
    double r_min = 0.0;
    double r_max = 0.0;
    Eigen::Index points = 0;
  } radial;

  struct Time {
    double dt = 0.0;
    int store_every = 1;
    std::optional<double> t_final;
    bool auto_converge = true;
    double stop_norm = 1e-6;
    double ker_tolerance = 1e-5;
    double t_max = 0.0;
  } time;

  struct Energy {
    double ker_min = 0.0;
    double ker_max = 0.0;
    double ker_step = 0.0;
    std::optional<double> electron_min;
    std::optional<double> electron_max;
    std::optional<double> electron_step;
    ElectronRoute route = ElectronRoute::spectral;
    int grid_stride = 1;
    ContinuumMethod continuum = ContinuumMethod::exact;
  } energy;

  Absorber absorber;

  struct Transforms {
    std::optional<double> mirror_total;
    std::vector<double> gaussian_fwhm;
    std::vector<double> lorentzian_fwhm;
    bool peak_normalize = false;
  } transforms;

  struct Output {
    std::filesystem::path directory;
    std::set<std::string> spectra;
    bool checkpoint = false;
    bool per_channel = true;
  } output;

  /// Every key after defaults were filled, in section order, with the value
  /// as text and whether it came from the input or from a default.
  struct Entry {
    std::string section;
    std::string key;
    std::string value;
    bool defaulted;
  };
  std::vector<Entry> resolved;

  DecayWidth total_width() const;
  RadialGrid grid() const { return RadialGrid(radial.r_min, radial.r_max, radial.points); }
  EnergyGrid ker_grid() const;
  bool wants(std::string_view spectrum) const { return output.spectra.count(std::string(spectrum)) > 0; }
  bool needs_electron() const { return wants("electron") || wants("mirror") || wants("coincidence"); }

  /// Canonical text of all resolved entries plus the contents of ingested tables.
  std::string canonical() const;
  /// Canonical text of the entries that determine the decaying-state history.
  std::string dynamics_canonical() const;
};

/// Parses the sectioned key = value format. Relative file names are taken
/// from `base_dir`. Throws ConfigError with the offending line.
ScenarioConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
ScenarioConfig read_config(const std::filesystem::path& path);

std::vector<std::string> preset_names();
/// Scenario text of a built-in preset; throws ConfigError for unknown names.
std::string preset_text(std::string_view name);

}  // namespace decay
