#include "decay/continuum.hpp"
#include "decay/error.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace decay;

namespace {

const double mu = oracle::nea_r_mass();
const RadialGrid model_grid(angstrom(2.0), angstrom(8.0), 900);

PotentialCurve zero_curve() {
  std::vector<CurveSample> s;
  for (int i = 0; i < 8; ++i) s.push_back({0.5 + i, 0.0});
  return load_tabulated(s);
}

double envelope(const PotentialCurve& v, double e, double r) {
  return std::sqrt(2.0 * mu / (std::numbers::pi * local_momentum(v, mu, e, r)));
}

}  // namespace

TEST_CASE("free particle amplitude") {
  const auto v = zero_curve();
  const RadialGrid g(1.0, 30.0, 4000);
  const double e = ev(1.0);
  const auto s = continuum_state(v, mu, e, g);
  CHECK(s.turning_point == 0.0);
  const double k = std::sqrt(2.0 * mu * e);
  const double amp = std::sqrt(2.0 * mu / (std::numbers::pi * k));
  for (double r0 : {5.0, 15.0, 27.0}) {
    // least-squares amplitude of sin(kR) over one wavelength around r0
    const auto i0 = g.nearest(r0);
    const auto span = static_cast<Eigen::Index>(std::ceil(2.0 * std::numbers::pi / k / g.spacing()));
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = i0; i < i0 + span; ++i) {
      num += s.values()(i) * std::sin(k * g.r(i));
      den += std::pow(std::sin(k * g.r(i)), 2);
    }
    CHECK(std::abs(num / den / amp - 1.0) < 1e-3);
    for (Eigen::Index i = i0; i < i0 + span; ++i) {
      CHECK(std::abs(s.values()(i) - amp * std::sin(k * g.r(i))) < 1e-3 * amp);
    }
  }
}

TEST_CASE("turning point of the model final curve") {
  const auto v = coulomb_explosion(2.0, 0.0);
  const double e = 2.0 / angstrom(3.5);
  CHECK(to_ev(e) == doctest::Approx(8.228).epsilon(1e-4));
  CHECK(turning_point(v, e, model_grid) == doctest::Approx(angstrom(3.5)).epsilon(1e-10));
  const auto s = continuum_state(v, mu, e, model_grid);
  CHECK(s.turning_point == doctest::Approx(angstrom(3.5)).epsilon(1e-10));
  const auto it = model_grid.nearest(s.turning_point);
  CHECK(s.values()(it + 1) > s.values()(it - 1));
}

TEST_CASE("residual of the radial equation") {
  const auto v = coulomb_explosion(2.0, ev(0.3));
  const EnergyGrid band(ev(7.0), ev(14.0), 15);
  for (const auto& s : continuum_sweep(v, mu, band, model_grid)) {
    CHECK(s.residual < 1e-6);
    CHECK(s.method == ContinuumMethod::exact);
  }
}

TEST_CASE("energy normalization against hard-wall box states") {
  const auto v = coulomb_explosion(2.0, 0.0);
  const auto box = oracle::box_spectrum(model_grid, [&](double r) { return v(r); }, mu);
  const double dr = model_grid.spacing();
  int tested = 0;
  double worst = 0.0;
  for (Eigen::Index n = 1; n + 1 < box.energies.size(); ++n) {
    const double e = box.energies(n);
    if (e < ev(6.5) || e > ev(14.0)) continue;
    const double rho = 2.0 / (box.energies(n + 1) - box.energies(n - 1));
    const auto s = continuum_state(v, mu, e, model_grid);
    const double overlap = std::abs(box.states.col(n).dot(s.values()) * dr);
    worst = std::max(worst, std::abs(overlap / std::sqrt(rho) - 1.0));
    ++tested;
  }
  CHECK(tested > 20);
  CHECK(worst < 1e-2);
}

TEST_CASE("WKB states") {
  const auto v = coulomb_explosion(2.0, 0.0);
  for (double e_ev : {7.0, 8.3, 11.0}) {
    const double e = ev(e_ev);
    const auto exact = continuum_state(v, mu, e, model_grid);
    const auto wkb = wkb_continuum_state(v, mu, e, model_grid);
    CHECK(wkb.method == ContinuumMethod::wkb);
    const double rt = wkb.turning_point;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < model_grid.size(); ++i) {
      const double r = model_grid.r(i);
      if (r <= rt) continue;
      const double kd = std::sqrt(2.0 * mu * (e - v(0.5 * (r + rt)))) * (r - rt);
      if (kd < 20.0) continue;
      const double env = envelope(v, e, r);
      CHECK(std::abs(wkb.values()(i)) <= env * (1.0 + 1e-12));
      worst = std::max(worst, std::abs(wkb.values()(i) - exact.values()(i)) / env);
    }
    CHECK(worst < 0.02);
    const RealVector w = wkb.values();
    CHECK(w.allFinite());
    CHECK(std::abs(w(model_grid.nearest(rt))) < envelope(v, e, model_grid.r(model_grid.nearest(rt) + 3)) * 2.0);
    CHECK(w(model_grid.nearest(rt) - 4) == 0.0);
  }
}

TEST_CASE("windowed orthogonality") {
  const auto v = coulomb_explosion(2.0, 0.0);
  const double lo = angstrom(3.0), hi = angstrom(7.5);
  RealVector window(model_grid.size());
  for (Eigen::Index i = 0; i < model_grid.size(); ++i) {
    const double x = (model_grid.r(i) - lo) / (hi - lo);
    window(i) = (x <= 0.0 || x >= 1.0) ? 0.0 : std::pow(std::sin(std::numbers::pi * x), 2);
  }
  const double dr = model_grid.spacing();
  const auto a = continuum_state(v, mu, ev(8.0), model_grid).values();
  const double self = (window.array() * a.array() * a.array()).sum() * dr;
  for (double d : {0.5, 1.0, 2.0}) {
    const auto b = continuum_state(v, mu, ev(8.0 + d), model_grid).values();
    const double cross = (window.array() * a.array() * b.array()).sum() * dr;
    CHECK(std::abs(cross) < 0.05 * self);
  }
}

TEST_CASE("continuum errors") {
  const auto v = coulomb_explosion(2.0, ev(1.0));
  CHECK_THROWS_AS(continuum_state(v, mu, ev(1.0), model_grid), InvalidArgument);
  CHECK_THROWS_AS(continuum_state(v, mu, ev(0.5), model_grid), InvalidArgument);
  // turning point at about 2.9 Angstrom for 11 eV, outside a grid starting at 4
  CHECK_THROWS_AS(continuum_state(v, mu, ev(11.0), RadialGrid(angstrom(4.0), angstrom(8.0), 600)), InvalidArgument);
  // 2 eV above the asymptote turns at 14 Angstrom, beyond R_max
  CHECK_THROWS_AS(wkb_continuum_state(v, mu, ev(3.0), model_grid), InvalidArgument);
  CHECK(local_momentum(v, mu, ev(3.0), angstrom(2.0)) == 0.0);
}
