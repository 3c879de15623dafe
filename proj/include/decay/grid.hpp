#pragma once

#include <Eigen/Dense>

#include <complex>

namespace decay {

using Complex = std::complex<double>;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

/// Uniform radial mesh R_i = r_min + i*dr, i = 0..n-1, in bohr.
class RadialGrid {
public:
  RadialGrid(double r_min, double r_max, Eigen::Index n);

  double r_min() const { return r_min_; }
  double r_max() const { return r_max_; }
  Eigen::Index size() const { return n_; }
  double spacing() const { return (r_max_ - r_min_) / static_cast<double>(n_ - 1); }
  double r(Eigen::Index i) const { return r_min_ + static_cast<double>(i) * spacing(); }
  double length() const { return r_max_ - r_min_; }

  RealVector points() const { return RealVector::LinSpaced(n_, r_min_, r_max_); }

  /// Trapezoidal quadrature weights (dr, half weight at both ends).
  RealVector weights() const;

  /// Index of the grid point nearest to `r`, clamped to the grid.
  Eigen::Index nearest(double r) const;

  friend bool operator==(const RadialGrid& a, const RadialGrid& b) {
    return a.r_min_ == b.r_min_ && a.r_max_ == b.r_max_ && a.n_ == b.n_;
  }

private:
  double r_min_;
  double r_max_;
  Eigen::Index n_;
};

/// Uniform energy axis E_j = e_min + j*de, hartree.
class EnergyGrid {
public:
  EnergyGrid(double e_min, double e_max, Eigen::Index n);
  static EnergyGrid from_spacing(double e_min, double de, Eigen::Index n) {
    return EnergyGrid(e_min, e_min + de * static_cast<double>(n - 1), n);
  }

  double e_min() const { return e_min_; }
  double e_max() const { return e_max_; }
  Eigen::Index size() const { return n_; }
  double spacing() const { return (e_max_ - e_min_) / static_cast<double>(n_ - 1); }
  double e(Eigen::Index j) const { return e_min_ + static_cast<double>(j) * spacing(); }
  RealVector points() const { return RealVector::LinSpaced(n_, e_min_, e_max_); }
  RealVector weights() const;

  /// The same axis translated by `shift`.
  EnergyGrid shifted(double shift) const { return EnergyGrid(e_min_ + shift, e_max_ + shift, n_); }

  friend bool operator==(const EnergyGrid& a, const EnergyGrid& b) {
    return a.e_min_ == b.e_min_ && a.e_max_ == b.e_max_ && a.n_ == b.n_;
  }

private:
  double e_min_;
  double e_max_;
  Eigen::Index n_;
};

/// Complex nuclear amplitudes on a radial grid.
struct Wavefunction {
  RadialGrid grid;
  ComplexVector amplitudes;

  explicit Wavefunction(const RadialGrid& g) : grid(g), amplitudes(ComplexVector::Zero(g.size())) {}
  Wavefunction(const RadialGrid& g, ComplexVector a);
  Wavefunction(const RadialGrid& g, const RealVector& a);

  Eigen::Index size() const { return amplitudes.size(); }
  Wavefunction& operator*=(Complex c) {
    amplitudes *= c;
    return *this;
  }
};

/// <bra|ket> by trapezoidal quadrature. Both must live on the same grid.
Complex inner_product(const Wavefunction& bra, const Wavefunction& ket);

double norm_squared(const Wavefunction& psi);

/// Scales psi to unit norm; throws if psi is identically zero.
void normalize(Wavefunction& psi);

/// <R> for a wavefunction of nonzero norm.
double mean_position(const Wavefunction& psi);

/// Trapezoidal integral of uniformly sampled values.
template <typename Derived>
typename Derived::Scalar trapezoid(const Eigen::MatrixBase<Derived>& values, double spacing) {
  const Eigen::Index n = values.size();
  if (n < 2) return typename Derived::Scalar(0);
  return spacing * (values.sum() - 0.5 * (values(0) + values(n - 1)));
}

}  // namespace decay
