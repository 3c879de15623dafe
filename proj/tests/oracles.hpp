#pragma once

// Reference implementations used only by the tests. They share no numerical
// code with the library beyond the grid and unit helpers.

#include "decay/grid.hpp"
#include "decay/units.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

using decay::Complex;
using decay::ComplexVector;
using decay::RealVector;

inline double nea_r_mass() { return decay::amu(13.4177); }

/// Normalized harmonic ground state exp(-(R - r0)^2 / (2 s^2)), s = 1/sqrt(mu omega).
inline RealVector gaussian(const decay::RadialGrid& g, double r0, double mu, double omega) {
  const double s = 1.0 / std::sqrt(mu * omega);
  RealVector out(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const double x = (g.r(i) - r0) / s;
    out(i) = std::pow(std::numbers::pi * s * s, -0.25) * std::exp(-0.5 * x * x);
  }
  return out;
}

/// Classical RK4 for i psi' = (T + V - i G/2) psi, with T applied by its own
/// periodic FFT.
class Rk4 {
public:
  Rk4(const decay::RadialGrid& g, const RealVector& v, const RealVector& gamma, double mu)
      : n_(g.size()), diag_(g.size()), kin_(g.size()) {
    for (Eigen::Index i = 0; i < n_; ++i) diag_(i) = Complex(v(i), -0.5 * gamma(i));
    const double len = static_cast<double>(n_) * g.spacing();
    for (Eigen::Index j = 0; j < n_; ++j) {
      const double m = static_cast<double>(j <= n_ / 2 ? j : j - n_);
      const double k = 2.0 * std::numbers::pi * m / len;
      kin_(j) = k * k / (2.0 * mu);
    }
    in_.resize(static_cast<std::size_t>(n_));
  }

  ComplexVector rhs(const ComplexVector& psi) {
    for (Eigen::Index i = 0; i < n_; ++i) in_[static_cast<std::size_t>(i)] = psi(i);
    fft_.fwd(spec_, in_);
    for (Eigen::Index j = 0; j < n_; ++j) spec_[static_cast<std::size_t>(j)] *= kin_(j);
    fft_.inv(out_, spec_);
    ComplexVector h(n_);
    for (Eigen::Index i = 0; i < n_; ++i) h(i) = out_[static_cast<std::size_t>(i)] + diag_(i) * psi(i);
    return Complex(0.0, -1.0) * h;
  }

  void step(ComplexVector& psi, double h) {
    const ComplexVector k1 = rhs(psi);
    const ComplexVector k2 = rhs(psi + 0.5 * h * k1);
    const ComplexVector k3 = rhs(psi + 0.5 * h * k2);
    const ComplexVector k4 = rhs(psi + h * k3);
    psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

private:
  Eigen::Index n_;
  ComplexVector diag_;
  RealVector kin_;
  Eigen::FFT<double> fft_;
  std::vector<Complex> in_, spec_, out_;
};

/// Dense particle-in-a-box spectrum: the Colbert-Miller sinc-DVR kinetic
/// matrix plus V on the grid, amplitudes forced to zero outside it.
struct Box {
  RealVector energies;
  Eigen::MatrixXd states;  // columns normalized with the grid weights dr
};

inline Box box_spectrum(const decay::RadialGrid& g, const std::function<double(double)>& v, double mu) {
  const Eigen::Index n = g.size();
  const double dr = g.spacing();
  Eigen::MatrixXd h(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double sign = ((i - j) % 2 == 0) ? 1.0 : -1.0;
      h(i, j) = i == j ? std::numbers::pi * std::numbers::pi / 3.0 : sign * 2.0 / static_cast<double>((i - j) * (i - j));
      h(i, j) /= 2.0 * mu * dr * dr;
    }
    h(i, i) += v(g.r(i));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  return {es.eigenvalues(), es.eigenvectors() / std::sqrt(dr)};
}

/// Peak-relative maximum deviation.
inline double max_rel(const RealVector& a, const RealVector& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
}

}  // namespace oracle
