#pragma once

#include "decay/dynamics.hpp"
#include "decay/error.hpp"
#include "decay/grid.hpp"

#include <filesystem>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace decay {

enum class AxisKind { ker, electron };
enum class Provenance { eq4, eq5_grid, eq5_spectral, mirror, convolved };

std::string_view axis_name(AxisKind kind);
std::string_view provenance_name(Provenance p);

/// Density per hartree on a uniform energy axis (hartree).
struct Spectrum {
  EnergyGrid axis;
  AxisKind kind;
  RealVector values;
  double time = std::numeric_limits<double>::infinity();
  Provenance provenance;
  /// Weight known to lie beyond the ends of the axis (Lorentzian wings).
  double outside = 0.0;

  double integral() const;
  Eigen::Index peak_index() const;
  double peak() const { return values.maxCoeff(); }
  double peak_energy() const { return axis.e(peak_index()); }
};

/// sigma(E_KER, E_e) per hartree^2; rows follow the KER axis.
struct CoincidenceMap {
  EnergyGrid ker_axis;
  EnergyGrid electron_axis;
  Eigen::MatrixXd values;
  double time;

  /// int dE_e sigma
  Spectrum ker_marginal() const;
  /// int dE_KER sigma
  Spectrum electron_marginal() const;
};

/// 2 pi int_0^t |<E_f|W|psi_d>|^2 dt' for every final energy; the axis is
/// relabeled to E_KER = E_f - v_inf. Warns when the band edges still carry
/// more than 1e-4 of the peak.
Spectrum ker_spectrum(const std::vector<SourceSeries>& sources, const EnergyGrid& final_energies, double v_inf,
                      double t, Diagnostics* diag = nullptr);

/// Norm account of each driven state; all states must share one time.
Spectrum electron_spectrum_grid(const std::vector<DrivenState>& driven, const EnergyGrid& electron_energies);

/// int dE_f |c_{E_f}(E_e, t)|^2, one chirp-z transform per final energy.
/// Warns when dropping every second final energy moves the peak by more
/// than 1e-3.
Spectrum electron_spectrum_spectral(const std::vector<SourceSeries>& sources, const EnergyGrid& final_energies,
                                    const EnergyGrid& electron_energies, double t, Diagnostics* diag = nullptr);

CoincidenceMap coincidence_spectrum(const std::vector<SourceSeries>& sources, const EnergyGrid& final_energies,
                                    double v_inf, const EnergyGrid& electron_energies, double t);

/// Electron axis covering one full period 2 pi / dt of the sampled
/// amplitudes, centered at `center`, with at least `samples` points. On this
/// axis the discrete integral over E_e of |c|^2 is exact.
EnergyGrid full_band_grid(double dt, Eigen::Index samples, double center);

/// E -> e_total - E with values reversed and the axis kind toggled. Points
/// that would land below zero are dropped with a warning.
Spectrum mirror_image(const Spectrum& spec, double e_total, Diagnostics* diag = nullptr);

enum class Kernel { gaussian, lorentzian };
std::string_view kernel_name(Kernel k);

/// Convolution with an area-normalized kernel; the axis grows by 3 FWHM on
/// both sides. Gaussian kernels end at 3 FWHM; Lorentzian kernels cover the
/// whole axis and report the weight of their wings in `outside`.
Spectrum convolve(const Spectrum& spec, Kernel kernel, double fwhm);

/// Linear interpolation onto another axis, zero outside the source axis.
Spectrum resample(const Spectrum& spec, const EnergyGrid& axis);

/// int |a/|a| - b/|b|| dE on a common axis spanning both inputs.
double l1_distance(const Spectrum& a, const Spectrum& b);

/// Indices of local maxima above `min_relative` times the peak.
std::vector<Eigen::Index> local_maxima(const Spectrum& spec, double min_relative = 0.0);

Spectrum peak_normalized(const Spectrum& spec);

/// 64-bit FNV-1a of a canonical scenario string, as 16 hex digits.
std::string scenario_hash(std::string_view canonical);

struct CsvHeader {
  std::string scenario;
  std::vector<std::string> notes;
};

/// "energy_eV,value_per_eV" rows after '#' header lines.
void write_csv(const std::filesystem::path& path, const Spectrum& spec, const CsvHeader& header);
/// "E_KER_eV,E_e_eV,value" triplets, value per eV^2.
void write_csv(const std::filesystem::path& path, const CoincidenceMap& map, const CsvHeader& header);

/// Shortest round-trip decimal representation.
std::string format_double(double x);

}  // namespace decay
