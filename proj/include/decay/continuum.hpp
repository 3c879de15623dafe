#pragma once

#include "decay/grid.hpp"
#include "decay/potentials.hpp"

#include <vector>

namespace decay {

enum class ContinuumMethod { exact, wkb };

std::string_view continuum_method_name(ContinuumMethod m);

/// Energy-normalized (<E|E'> = delta(E - E')) dissociative eigenfunction of
/// the final-state Hamiltonian. Amplitudes are real.
struct ContinuumState {
  double energy;
  Wavefunction wavefunction;
  double turning_point;  // outermost classical turning point; 0 if regular at the origin
  double residual;       // ||(H - E) psi|| / ||psi|| over the grid interior (exact states)
  ContinuumMethod method;

  RealVector values() const { return wavefunction.amplitudes.real(); }
};

/// sqrt(2 mu (E - V(R))), zero in the classically forbidden region.
double local_momentum(const PotentialCurve& v, double mu, double energy, double r);

/// Outermost R with V(R) = E inside (R_min, R_max). Throws when E <= V(inf)
/// or when the turning point falls outside the grid. Returns 0 when V stays
/// below E all the way down to R = 0 (regular-at-origin solution).
double turning_point(const PotentialCurve& v, double energy, const RadialGrid& grid);

/// Phase integral phi_i = int_{r_t}^{R_i} k dR at every grid point beyond
/// r_t (zero before it).
RealVector phase_integral(const PotentialCurve& v, double mu, double energy, double r_t, const RadialGrid& grid);

/// Exact state: Numerov outward integration on a refined mesh (k*h <= 0.1),
/// started where the tunneling integral under the wall reaches 12, scaled so
/// the asymptotic envelope is sqrt(2 mu / (pi k)); positive slope at the
/// turning point.
ContinuumState continuum_state(const PotentialCurve& v, double mu, double energy, const RadialGrid& grid);

/// Primitive WKB state sqrt(2 mu/(pi k)) sin(phi + pi/4) with a linear bridge
/// across [r_t - 2 dr, r_t + 2 dr] and zero further inside the wall.
ContinuumState wkb_continuum_state(const PotentialCurve& v, double mu, double energy, const RadialGrid& grid);

/// One state per energy (absolute scale, same as V), computed in parallel.
std::vector<ContinuumState> continuum_sweep(const PotentialCurve& v, double mu, const EnergyGrid& energies,
                                            const RadialGrid& grid, ContinuumMethod method = ContinuumMethod::exact);

}  // namespace decay
