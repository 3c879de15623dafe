#include "decay/grid.hpp"

#include "decay/error.hpp"

#include <cmath>
#include <string>

namespace decay {

RadialGrid::RadialGrid(double r_min, double r_max, Eigen::Index n) : r_min_(r_min), r_max_(r_max), n_(n) {
  if (n < 16) throw InvalidArgument("radial grid needs at least 16 points, got " + std::to_string(n));
  if (!(r_min > 0.0)) throw InvalidArgument("radial grid must start at R_min > 0");
  if (!(r_max > r_min)) throw InvalidArgument("radial grid needs R_max > R_min");
}

RealVector RadialGrid::weights() const {
  RealVector w = RealVector::Constant(n_, spacing());
  w(0) *= 0.5;
  w(n_ - 1) *= 0.5;
  return w;
}

Eigen::Index RadialGrid::nearest(double r) const {
  const double x = std::round((r - r_min_) / spacing());
  if (x <= 0.0) return 0;
  if (x >= static_cast<double>(n_ - 1)) return n_ - 1;
  return static_cast<Eigen::Index>(x);
}

EnergyGrid::EnergyGrid(double e_min, double e_max, Eigen::Index n) : e_min_(e_min), e_max_(e_max), n_(n) {
  if (n < 2) throw InvalidArgument("energy grid needs at least 2 points");
  if (!(e_max > e_min)) throw InvalidArgument("energy grid needs E_max > E_min");
}

RealVector EnergyGrid::weights() const {
  RealVector w = RealVector::Constant(n_, spacing());
  w(0) *= 0.5;
  w(n_ - 1) *= 0.5;
  return w;
}

Wavefunction::Wavefunction(const RadialGrid& g, ComplexVector a) : grid(g), amplitudes(std::move(a)) {
  if (amplitudes.size() != g.size()) throw InvalidArgument("amplitude count does not match grid size");
}

Wavefunction::Wavefunction(const RadialGrid& g, const RealVector& a)
    : Wavefunction(g, ComplexVector(a.cast<Complex>())) {}

Complex inner_product(const Wavefunction& bra, const Wavefunction& ket) {
  if (!(bra.grid == ket.grid)) throw InvalidArgument("inner_product: wavefunctions live on different grids");
  const RealVector w = bra.grid.weights();
  return (bra.amplitudes.conjugate().array() * ket.amplitudes.array() * w.array()).sum();
}

double norm_squared(const Wavefunction& psi) {
  return (psi.amplitudes.array().abs2() * psi.grid.weights().array()).sum();
}

void normalize(Wavefunction& psi) {
  const double n2 = norm_squared(psi);
  if (!(n2 > 0.0)) throw InvalidArgument("cannot normalize a zero wavefunction");
  psi.amplitudes /= std::sqrt(n2);
}

double mean_position(const Wavefunction& psi) {
  const RealVector w = psi.grid.weights().cwiseProduct(psi.amplitudes.cwiseAbs2());
  return w.dot(psi.grid.points()) / w.sum();
}

}  // namespace decay
