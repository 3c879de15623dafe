#pragma once

#include "decay/continuum.hpp"
#include "decay/error.hpp"
#include "decay/grid.hpp"
#include "decay/potentials.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace decay {

struct PropagationOptions {
  double dt = 0.1;        // a.u. of time
  double t_final = 0.0;   // propagate at least until here
  double stop_norm = 0.0; // when > 0, continue until ||psi_d||^2 < stop_norm as well
  double t_max = 0.0;     // hard limit when stop_norm is used (0: 100 max(t_final, 1/Gamma))
  int store_every = 1;
  double edge_tolerance = 1e-8;    // density at the first/last grid point
  double growth_tolerance = 1e-10; // allowed norm increase per step
  double window_threshold = 1e-12; // amplitude (relative to peak) kept in snapshots
};

/// Time series of the decaying-state wavepacket. Snapshots keep only the
/// window of the grid the packet ever visits; amplitudes outside it are
/// below `window_threshold` of the peak at all times.
class DecayHistory {
public:
  DecayHistory(RadialGrid grid, double dt_step, double dt_store, double e_ref, Eigen::Index offset,
               std::vector<double> times, std::vector<double> norms, Eigen::MatrixXcd snapshots,
               std::string stamp = {});

  const RadialGrid& grid() const { return grid_; }
  double step() const { return dt_step_; }
  double store_interval() const { return dt_store_; }
  /// Reference energy of the rotating frame used for interpolation, <psi_d(0)|H_d|psi_d(0)>.
  double reference_energy() const { return e_ref_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(times_.size()); }
  Eigen::Index window_offset() const { return offset_; }
  Eigen::Index window_size() const { return snapshots_.rows(); }
  double time(Eigen::Index n) const { return times_[static_cast<std::size_t>(n)]; }
  double end_time() const { return times_.back(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& norms() const { return norms_; }
  const Eigen::MatrixXcd& snapshots() const { return snapshots_; }
  const std::string& stamp() const { return stamp_; }

  Wavefunction state(Eigen::Index n) const;
  /// Windowed amplitudes at arbitrary t in [0, end]: four-point Lagrange
  /// interpolation of exp(i E_ref t) psi_d(t).
  ComplexVector interpolate(double t) const;

  /// Copy restricted to snapshots with t <= t_end.
  DecayHistory truncated(double t_end) const;

private:
  RadialGrid grid_;
  double dt_step_;
  double dt_store_;
  double e_ref_;
  Eigen::Index offset_;
  std::vector<double> times_;
  std::vector<double> norms_;
  Eigen::MatrixXcd snapshots_;
  std::string stamp_;
};

/// Split-step Fourier propagation on V_d - i Gamma(R)/2. Throws NumericalAbort
/// on norm growth or when the packet reaches the grid edge.
DecayHistory propagate_decaying(const Wavefunction& psi0, const PotentialCurve& vd, const DecayWidth& width, double mu,
                                const PropagationOptions& options, const std::string& stamp = {});
DecayHistory propagate_decaying(const Wavefunction& psi0, const PotentialCurve& vd, const DecayWidth& width, double mu,
                                double dt, double t_final);

/// Complex absorbing potential: quadratic ramp over the outer `fraction` of the grid.
struct Absorber {
  double fraction = 0.15;
  double strength = 0.2;  // hartree at R_max
  bool enabled = true;
};

RealVector absorber_profile(const RadialGrid& grid, const Absorber& cap);

/// Final-state wavepacket psi_f(E_e, t) of the driven equation
/// i d/dt psi_f = W psi_d + (H_f + E_e) psi_f.
struct DrivenState {
  double electron_energy;
  Wavefunction wavefunction;
  double absorbed_norm;
  double time;

  /// Interior norm plus everything the absorber removed.
  double norm_account() const { return norm_squared(wavefunction) + absorbed_norm; }
};

DrivenState propagate_driven(double electron_energy, const DecayHistory& history, const PotentialCurve& vf,
                             const Coupling& coupling, double mu, const Absorber& cap, Diagnostics* diag = nullptr);

/// Projected source s(t_n) = <E_f|W|psi_d(t_n)> at every stored time.
struct SourceSeries {
  double final_energy;
  double dt;
  ComplexVector values;

  double time(Eigen::Index n) const { return static_cast<double>(n) * dt; }
  double end_time() const { return time(values.size() - 1); }
};

SourceSeries source_series(const DecayHistory& history, const ContinuumState& state, const Coupling& coupling);
std::vector<SourceSeries> source_sweep(const DecayHistory& history, const std::vector<ContinuumState>& states,
                                       const Coupling& coupling);

/// Trapezoidal weights of the stored series up to time t; the last interval
/// is shortened when t falls between samples.
RealVector time_weights(const SourceSeries& series, double t);

/// c_{E_f}(E_e, t) = -i int_0^t exp(-i (E_f + E_e)(t - t')) s(t') dt'.
Complex coincidence_amplitude(const SourceSeries& series, double final_energy, double electron_energy, double t);

/// Binary checkpoint of a history; see docs/checkpoint.md for the layout.
void write_checkpoint(const std::filesystem::path& path, const DecayHistory& history);
DecayHistory read_checkpoint(const std::filesystem::path& path);

inline constexpr char checkpoint_magic[8] = {'D', 'K', 'H', 'I', 'S', 'T', '\0', '\0'};
inline constexpr std::uint32_t checkpoint_version = 1;

}  // namespace decay
