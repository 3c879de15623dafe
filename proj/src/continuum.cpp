#include "decay/continuum.hpp"

#include "decay/error.hpp"
#include "decay/parallel.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

namespace decay {

std::string_view continuum_method_name(ContinuumMethod m) { return m == ContinuumMethod::exact ? "exact" : "wkb"; }

namespace {

constexpr double tunneling_depth = 12.0;
constexpr double max_step_phase = 0.1;
constexpr double fit_fraction = 0.25;

// 8-point Gauss-Legendre on [-1, 1]
constexpr std::array<double, 4> gl_x{0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363};
constexpr std::array<double, 4> gl_w{0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

template <typename F>
double gauss8(F&& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < gl_x.size(); ++i) s += gl_w[i] * (f(c - h * gl_x[i]) + f(c + h * gl_x[i]));
  return s * h;
}

// int_{r_t}^{r} k dR via R = r_t + u^2, which removes the square-root onset at
// the turning point
double phase_from_turning_point(const PotentialCurve& v, double mu, double energy, double r_t, double r) {
  if (r <= r_t) return 0.0;
  const double umax = std::sqrt(r - r_t);
  const auto integrand = [&](double u) { return 2.0 * u * local_momentum(v, mu, energy, r_t + u * u); };
  constexpr int pieces = 4;
  double s = 0.0;
  for (int p = 0; p < pieces; ++p) s += gauss8(integrand, umax * p / pieces, umax * (p + 1) / pieces);
  return s;
}

std::string grid_advice(const RadialGrid& grid) {
  std::ostringstream ss;
  ss << "current grid [" << to_angstrom(grid.r_min()) << ", " << to_angstrom(grid.r_max())
     << "] angstrom; enlarge the radial grid";
  return ss.str();
}

}  // namespace

double local_momentum(const PotentialCurve& v, double mu, double energy, double r) {
  const double t = energy - v(r);
  return t > 0.0 ? std::sqrt(2.0 * mu * t) : 0.0;
}

double turning_point(const PotentialCurve& v, double energy, const RadialGrid& grid) {
  if (!(energy > v.asymptote())) {
    std::ostringstream ss;
    ss << "no continuum state: E = " << to_ev(energy) << " eV is not above V(inf)";
    throw InvalidArgument(ss.str());
  }
  const Eigen::Index n = grid.size();
  if (v(grid.r_max()) >= energy) {
    throw InvalidArgument("classical turning point lies beyond R_max at E = " + std::to_string(to_ev(energy)) +
                          " eV; " + grid_advice(grid));
  }
  for (Eigen::Index i = n - 2; i >= 0; --i) {
    if (v(grid.r(i)) >= energy) {
      double lo = grid.r(i), hi = grid.r(i + 1);
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (v(mid) >= energy ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
  }
  // allowed on the whole grid: either the wall sits below R_min, or there is none
  for (int j = 1; j < 400; ++j) {
    const double r = grid.r_min() * (1.0 - j / 400.0);
    if (v(r) >= energy) {
      throw InvalidArgument("classical turning point lies below R_min at E = " + std::to_string(to_ev(energy)) +
                            " eV; " + grid_advice(grid));
    }
  }
  return 0.0;
}

RealVector phase_integral(const PotentialCurve& v, double mu, double energy, double r_t, const RadialGrid& grid) {
  RealVector phi = RealVector::Zero(grid.size());
  const auto k = [&](double r) { return local_momentum(v, mu, energy, r); };
  double acc = 0.0;
  double prev = r_t;
  bool started = false;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double r = grid.r(i);
    if (r <= r_t) continue;
    acc += started ? gauss8(k, prev, r) : phase_from_turning_point(v, mu, energy, r_t, r);
    started = true;
    prev = r;
    phi(i) = acc;
  }
  return phi;
}

ContinuumState continuum_state(const PotentialCurve& v, double mu, double energy, const RadialGrid& grid) {
  const double r_t = turning_point(v, energy, grid);
  const bool regular_at_origin = r_t == 0.0;
  const Eigen::Index n = grid.size();
  const double dr = grid.spacing();

  double k_max = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) k_max = std::max(k_max, local_momentum(v, mu, energy, grid.r(i)));
  const auto refine = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::ceil(k_max * dr / max_step_phase)));
  const double h = dr / static_cast<double>(refine);

  // fine mesh R_j = r_min + j h, j in [j_start, j_end]
  Eigen::Index j_start = 0;
  if (regular_at_origin) {
    j_start = -static_cast<Eigen::Index>(std::floor(grid.r_min() / h));
  } else {
    double depth = 0.0;
    double r = r_t;
    auto kappa = [&](double x) {
      const double t = v(x) - energy;
      return t > 0.0 ? std::sqrt(2.0 * mu * t) : 0.0;
    };
    while (depth < tunneling_depth && r - h > h) {
      depth += 0.5 * h * (kappa(r) + kappa(r - h));
      r -= h;
    }
    j_start = static_cast<Eigen::Index>(std::floor((r - grid.r_min()) / h));
  }
  const Eigen::Index j_end = (n - 1) * refine;
  const Eigen::Index count = j_end - j_start + 1;
  const auto fine_r = [&](Eigen::Index local) { return grid.r_min() + static_cast<double>(local + j_start) * h; };

  RealVector f(count);
  for (Eigen::Index j = 0; j < count; ++j) f(j) = 2.0 * mu * (v(fine_r(j)) - energy);

  RealVector psi(count);
  if (regular_at_origin) {
    const double k0 = std::sqrt(std::max(0.0, -f(0)));
    psi(0) = std::sin(k0 * fine_r(0));
    psi(1) = std::sin(k0 * fine_r(1));
  } else {
    psi(0) = 0.0;
    psi(1) = 1e-12;
  }
  const double h12 = h * h / 12.0;
  for (Eigen::Index j = 1; j + 1 < count; ++j) {
    psi(j + 1) = (2.0 * psi(j) * (1.0 + 5.0 * h12 * f(j)) - psi(j - 1) * (1.0 - h12 * f(j - 1))) /
                 (1.0 - h12 * f(j + 1));
    if (std::abs(psi(j + 1)) > 1e250) psi.head(j + 2) *= 1e-250;
  }

  // amplitude from a least-squares fit a sin(phi) + b cos(phi) over the outer part of the grid
  const RealVector phi = phase_integral(v, mu, energy, r_t, grid);
  const double r_fit = grid.r_min() + (1.0 - fit_fraction) * grid.length();
  Eigen::Matrix2d ata = Eigen::Matrix2d::Zero();
  Eigen::Vector2d aty = Eigen::Vector2d::Zero();
  int fit_points = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = grid.r(i);
    if (r < r_fit || r <= r_t) continue;
    const double k = local_momentum(v, mu, energy, r);
    if (k <= 0.0) continue;
    const Eigen::Index local = i * refine - j_start;
    const double y = psi(local) * std::sqrt(k);
    const Eigen::Vector2d basis(std::sin(phi(i)), std::cos(phi(i)));
    ata += basis * basis.transpose();
    aty += basis * y;
    ++fit_points;
  }
  if (fit_points < 8) {
    throw InvalidArgument("continuum_state: too few allowed points in the normalization region; " + grid_advice(grid));
  }
  const Eigen::Vector2d ab = ata.ldlt().solve(aty);
  const double amplitude = ab.norm();
  double scale = std::sqrt(2.0 * mu / std::numbers::pi) / amplitude;

  Eigen::Index jt = regular_at_origin ? 1 : static_cast<Eigen::Index>(std::llround((r_t - grid.r_min()) / h)) - j_start;
  jt = std::clamp<Eigen::Index>(jt, 1, count - 2);
  const double slope = regular_at_origin ? psi(1) - psi(0) : psi(jt + 1) - psi(jt - 1);
  if (slope < 0.0) scale = -scale;
  psi *= scale;

  // residual of the continuous equation, sixth-order stencil on the fine mesh
  const RealVector& pot = f;  // 2 mu (V - E)
  double res2 = 0.0, norm2 = 0.0;
  const Eigen::Index lo = std::max<Eigen::Index>(3, -j_start + 3);
  for (Eigen::Index j = lo; j + 3 < count; ++j) {
    const double d2 = (2.0 * (psi(j - 3) + psi(j + 3)) - 27.0 * (psi(j - 2) + psi(j + 2)) +
                       270.0 * (psi(j - 1) + psi(j + 1)) - 490.0 * psi(j)) /
                      (180.0 * h * h);
    const double r = (-d2 + pot(j) * psi(j)) / (2.0 * mu);
    res2 += r * r;
    norm2 += psi(j) * psi(j);
  }

  RealVector out = RealVector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index local = i * refine - j_start;
    if (local >= 0) out(i) = psi(local);
  }
  return ContinuumState{energy, Wavefunction(grid, out), r_t, std::sqrt(res2 / norm2), ContinuumMethod::exact};
}

ContinuumState wkb_continuum_state(const PotentialCurve& v, double mu, double energy, const RadialGrid& grid) {
  const double r_t = turning_point(v, energy, grid);
  const Eigen::Index n = grid.size();
  const double eps = 2.0 * grid.spacing();
  const RealVector phi = phase_integral(v, mu, energy, r_t, grid);
  const double prefactor = 2.0 * mu / std::numbers::pi;

  const double r_b = r_t + eps;
  const double k_b = local_momentum(v, mu, energy, r_b);
  const double bridge_end =
      std::sqrt(prefactor / k_b) * std::sin(phase_from_turning_point(v, mu, energy, r_t, r_b) + std::numbers::pi / 4);

  RealVector out = RealVector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = grid.r(i);
    if (r <= r_t - eps) continue;
    if (r < r_b) {
      out(i) = bridge_end * (r - (r_t - eps)) / (2.0 * eps);
      continue;
    }
    const double k = local_momentum(v, mu, energy, r);
    out(i) = std::sqrt(prefactor / k) * std::sin(phi(i) + std::numbers::pi / 4);
  }
  return ContinuumState{energy, Wavefunction(grid, out), r_t, std::nan(""), ContinuumMethod::wkb};
}

std::vector<ContinuumState> continuum_sweep(const PotentialCurve& v, double mu, const EnergyGrid& energies,
                                            const RadialGrid& grid, ContinuumMethod method) {
  std::vector<std::optional<ContinuumState>> slots(static_cast<std::size_t>(energies.size()));
  parallel_for(energies.size(), [&](std::ptrdiff_t j) {
    const double e = energies.e(j);
    slots[static_cast<std::size_t>(j)] =
        method == ContinuumMethod::exact ? continuum_state(v, mu, e, grid) : wkb_continuum_state(v, mu, e, grid);
  });
  std::vector<ContinuumState> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace decay
