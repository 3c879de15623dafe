#pragma once

#include "decay/grid.hpp"
#include "decay/potentials.hpp"

#include <unsupported/Eigen/FFT>

#include <vector>

namespace decay {

/// Kinetic energy -1/(2mu) d^2/dR^2 applied spectrally on the periodic
/// extension of a uniform grid. Holds FFT plans, so one instance per thread.
class SpectralKinetic {
public:
  SpectralKinetic(const RadialGrid& grid, double mu);

  /// psi <- exp(-i T tau) psi
  void evolve(ComplexVector& psi, double tau);
  /// T psi
  ComplexVector apply(const ComplexVector& psi);

  /// Largest kinetic energy representable on the grid, pi^2 / (2 mu dr^2).
  double max_energy() const { return max_energy_; }
  const RealVector& energies() const { return kinetic_; }

private:
  const ComplexVector& phases(double tau);

  Eigen::FFT<double> fft_;
  RealVector kinetic_;
  double max_energy_;
  std::vector<std::complex<double>> buffer_;
  std::vector<std::complex<double>> spectrum_;
  double cached_tau_ = 0.0;
  ComplexVector cached_phases_;
  double cached_tau2_ = 0.0;
  ComplexVector cached_phases2_;
};

/// Colbert-Miller sinc-DVR Hamiltonian for potential samples on a uniform
/// mesh with spacing dr (amplitudes vanish outside the mesh).
Eigen::MatrixXd sinc_dvr_hamiltonian(const RealVector& potential, double dr, double mu);

struct BoundStates {
  RealVector energies;
  std::vector<Wavefunction> states;  // on the full grid, unit norm, positive at the maximum
};

/// Lowest `count` eigenstates of -1/(2mu) d^2/dR^2 + V on the grid. The
/// diagonalization runs on the window around the potential minimum where
/// V - V_min stays below a cutoff; the cutoff grows until the states vanish at
/// the window edges. Throws InvalidArgument when no bound state fits.
BoundStates lowest_states(const PotentialCurve& v, double mu, const RadialGrid& grid, int count = 1);

/// <psi|H|psi> for H = T_spectral + V (real part only).
double energy_expectation(const Wavefunction& psi, const RealVector& potential, double mu);

}  // namespace decay
