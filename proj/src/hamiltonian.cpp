#include "decay/hamiltonian.hpp"

#include "decay/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace decay {

SpectralKinetic::SpectralKinetic(const RadialGrid& grid, double mu)
    : kinetic_(grid.size()),
      buffer_(static_cast<std::size_t>(grid.size())),
      spectrum_(static_cast<std::size_t>(grid.size())) {
  const Eigen::Index n = grid.size();
  const double period = static_cast<double>(n) * grid.spacing();
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index m = j <= n / 2 ? j : j - n;
    const double k = 2.0 * std::numbers::pi * static_cast<double>(m) / period;
    kinetic_(j) = k * k / (2.0 * mu);
  }
  const double dr = grid.spacing();
  max_energy_ = std::numbers::pi * std::numbers::pi / (2.0 * mu * dr * dr);
}

const ComplexVector& SpectralKinetic::phases(double tau) {
  if (cached_phases_.size() && cached_tau_ == tau) return cached_phases_;
  if (cached_phases2_.size() && cached_tau2_ == tau) return cached_phases2_;
  // keep the two most recent step sizes (full and half steps alternate)
  std::swap(cached_tau_, cached_tau2_);
  cached_phases_.swap(cached_phases2_);
  cached_tau_ = tau;
  cached_phases_.resize(kinetic_.size());
  for (Eigen::Index j = 0; j < kinetic_.size(); ++j) cached_phases_(j) = std::polar(1.0, -kinetic_(j) * tau);
  return cached_phases_;
}

void SpectralKinetic::evolve(ComplexVector& psi, double tau) {
  const ComplexVector& ph = phases(tau);
  std::copy(psi.data(), psi.data() + psi.size(), buffer_.begin());
  fft_.fwd(spectrum_, buffer_);
  for (std::size_t j = 0; j < spectrum_.size(); ++j) spectrum_[j] *= ph(static_cast<Eigen::Index>(j));
  fft_.inv(buffer_, spectrum_);
  std::copy(buffer_.begin(), buffer_.end(), psi.data());
}

ComplexVector SpectralKinetic::apply(const ComplexVector& psi) {
  std::copy(psi.data(), psi.data() + psi.size(), buffer_.begin());
  fft_.fwd(spectrum_, buffer_);
  for (std::size_t j = 0; j < spectrum_.size(); ++j) spectrum_[j] *= kinetic_(static_cast<Eigen::Index>(j));
  fft_.inv(buffer_, spectrum_);
  ComplexVector out(psi.size());
  std::copy(buffer_.begin(), buffer_.end(), out.data());
  return out;
}

Eigen::MatrixXd sinc_dvr_hamiltonian(const RealVector& potential, double dr, double mu) {
  const Eigen::Index n = potential.size();
  const double scale = 1.0 / (2.0 * mu * dr * dr);
  Eigen::MatrixXd h(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) {
        h(i, j) = scale * std::numbers::pi * std::numbers::pi / 3.0 + potential(i);
      } else {
        const double d = static_cast<double>(i - j);
        h(i, j) = scale * ((i - j) % 2 == 0 ? 2.0 : -2.0) / (d * d);
      }
    }
  }
  return h;
}

BoundStates lowest_states(const PotentialCurve& v, double mu, const RadialGrid& grid, int count) {
  if (count < 1) throw InvalidArgument("lowest_states: count must be positive");
  const RealVector pot = v.sample(grid);
  Eigen::Index imin = 0;
  const double vmin = pot.minCoeff(&imin);
  const Eigen::Index n = grid.size();
  constexpr Eigen::Index max_window = 1200;
  constexpr double edge_tolerance = 1e-9;

  double cutoff = 1.0 / units::hartree_in_ev;  // 1 eV
  for (int attempt = 0; attempt < 16; ++attempt, cutoff *= 2.0) {
    Eigen::Index lo = imin, hi = imin;
    while (lo > 0 && pot(lo - 1) - vmin < cutoff) --lo;
    while (hi < n - 1 && pot(hi + 1) - vmin < cutoff) ++hi;
    if (hi - lo + 1 > max_window) {
      const Eigen::Index half = max_window / 2;
      lo = std::max<Eigen::Index>(0, imin - half);
      hi = std::min<Eigen::Index>(n - 1, lo + max_window - 1);
    }
    const Eigen::Index m = hi - lo + 1;
    if (m < count + 4) continue;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        sinc_dvr_hamiltonian(pot.segment(lo, m), grid.spacing(), mu));
    if (solver.info() != Eigen::Success) throw NumericalAbort("lowest_states: eigensolver failed");

    bool contained = true;
    for (int s = 0; s < count; ++s) {
      const auto vec = solver.eigenvectors().col(s);
      const double peak = vec.cwiseAbs().maxCoeff();
      const bool touches_low = lo > 0 && std::abs(vec(0)) > edge_tolerance * peak;
      const bool touches_high = hi < n - 1 && std::abs(vec(m - 1)) > edge_tolerance * peak;
      const bool touches_grid = (lo == 0 && std::abs(vec(0)) > edge_tolerance * peak) ||
                                (hi == n - 1 && std::abs(vec(m - 1)) > edge_tolerance * peak);
      if (touches_grid) throw InvalidArgument("lowest_states: state reaches the grid edge; enlarge the radial grid");
      if (touches_low || touches_high) contained = false;
    }
    const bool whole_grid = lo == 0 && hi == n - 1;
    if (!contained && !whole_grid) continue;

    BoundStates out;
    out.energies = solver.eigenvalues().head(count);
    for (int s = 0; s < count; ++s) {
      RealVector full = RealVector::Zero(n);
      full.segment(lo, m) = solver.eigenvectors().col(s);
      Eigen::Index ipk = 0;
      full.cwiseAbs().maxCoeff(&ipk);
      if (full(ipk) < 0.0) full = -full;
      Wavefunction psi(grid, full);
      normalize(psi);
      out.states.push_back(std::move(psi));
    }
    if (v.dissociative() && out.energies(count - 1) >= v.asymptote()) {
      throw InvalidArgument("lowest_states: curve supports fewer than " + std::to_string(count) + " bound states");
    }
    return out;
  }
  throw InvalidArgument("lowest_states: no bound state fits on the grid");
}

double energy_expectation(const Wavefunction& psi, const RealVector& potential, double mu) {
  SpectralKinetic kin(psi.grid, mu);
  const ComplexVector t_psi = kin.apply(psi.amplitudes);
  const RealVector w = psi.grid.weights();
  Complex e = 0.0;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    e += w(i) * std::conj(psi.amplitudes(i)) * (t_psi(i) + potential(i) * psi.amplitudes(i));
  }
  return e.real() / norm_squared(psi);
}

}  // namespace decay
