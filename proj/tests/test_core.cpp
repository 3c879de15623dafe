#include "decay/error.hpp"
#include "decay/grid.hpp"
#include "decay/units.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <array>
#include <cmath>

using namespace decay;

TEST_CASE("unit conversions use the defining constants") {
  CHECK(convert(1.0, Unit::hartree, Unit::ev) == doctest::Approx(27.211386).epsilon(1e-8));
  CHECK(convert(0.529177, Unit::angstrom, Unit::bohr) == doctest::Approx(1.0).epsilon(1e-6));
  const double gamma = convert(200.0, Unit::mev, Unit::hartree);
  CHECK(gamma == doctest::Approx(0.0073499).epsilon(1e-5));
  CHECK(gamma == doctest::Approx(0.200 / 27.211386).epsilon(1e-7));
  CHECK(convert(gamma, Unit::hartree, Unit::mev) == doctest::Approx(200.0).epsilon(1e-14));
  CHECK(amu(13.4177) == doctest::Approx(24459.0).epsilon(1e-4));
}

TEST_CASE("unit round trips are the identity") {
  const std::array<std::array<Unit, 3>, 4> groups{{
      {Unit::hartree, Unit::ev, Unit::mev},
      {Unit::bohr, Unit::angstrom, Unit::bohr},
      {Unit::au_time, Unit::fs, Unit::au_time},
      {Unit::electron_mass, Unit::amu, Unit::electron_mass},
  }};
  for (const auto& g : groups) {
    for (Unit a : g) {
      for (Unit b : g) {
        for (double x : {1e-6, 0.37, 1.0, 8.228, 1e5}) {
          const double back = convert(convert(x, a, b), b, a);
          CHECK(std::abs(back - x) <= 1e-12 * x);
        }
      }
    }
  }
}

TEST_CASE("unit conversion rejects a dimension mismatch") {
  CHECK_THROWS_AS(convert(1.0, Unit::ev, Unit::angstrom), InvalidArgument);
  CHECK_THROWS_AS(convert(Quantity{1.0, Unit::fs}, Unit::amu), InvalidArgument);
  CHECK(parse_unit("meV") == Unit::mev);
  CHECK(parse_unit("angstrom") == Unit::angstrom);
  CHECK_THROWS(parse_unit("furlong"));
  CHECK(dimension_of(Unit::fs) == Dimension::time);
}

TEST_CASE("radial grid geometry") {
  const RadialGrid g(1.0, 3.0, 21);
  CHECK(g.spacing() == doctest::Approx(0.1));
  CHECK(g.r(20) == doctest::Approx(3.0));
  CHECK(g.nearest(2.04) == 10);
  CHECK(g.nearest(-5.0) == 0);
  CHECK(g.weights().sum() == doctest::Approx(2.0));
  CHECK_THROWS_AS(RadialGrid(0.0, 1.0, 32), InvalidArgument);
  CHECK_THROWS_AS(RadialGrid(1.0, 2.0, 8), InvalidArgument);
  CHECK_THROWS_AS(RadialGrid(2.0, 1.0, 32), InvalidArgument);
  CHECK_THROWS_AS(EnergyGrid(1.0, 1.0, 10), InvalidArgument);
}

TEST_CASE("inner products") {
  const double mu = oracle::nea_r_mass();
  const double omega = mev(200.0);
  const RadialGrid g(angstrom(2.0), angstrom(8.0), 900);
  Wavefunction a(g, oracle::gaussian(g, angstrom(3.5), mu, omega));
  Wavefunction b(g, oracle::gaussian(g, angstrom(3.3), mu, omega));

  SUBCASE("normalized state") {
    const Complex s = inner_product(a, a);
    CHECK(std::abs(s - 1.0) < 1e-10);
    CHECK(norm_squared(a) == doctest::Approx(s.real()).epsilon(1e-15));
  }
  SUBCASE("displaced Gaussians follow the analytic overlap") {
    const double sigma = 1.0 / std::sqrt(mu * omega);
    const double d = angstrom(0.2);
    const double expected = std::exp(-d * d / (4.0 * sigma * sigma));
    CHECK(std::abs(inner_product(a, b) - expected) < 1e-10);
  }
  SUBCASE("conjugate symmetry") {
    Wavefunction c = b;
    for (Eigen::Index i = 0; i < g.size(); ++i) c.amplitudes(i) *= std::polar(1.0, 3.0 * g.r(i));
    CHECK(std::abs(inner_product(a, c) - std::conj(inner_product(c, a))) < 1e-15);
  }
  SUBCASE("disjoint support") {
    RealVector left = RealVector::Zero(g.size()), right = RealVector::Zero(g.size());
    left.head(300).setOnes();
    right.tail(300).setOnes();
    CHECK(std::abs(inner_product(Wavefunction(g, left), Wavefunction(g, right))) == 0.0);
  }
  SUBCASE("homogeneity and the zero state") {
    Wavefunction c = a;
    const Complex f(0.3, -1.2);
    c *= f;
    CHECK(norm_squared(c) == doctest::Approx(std::norm(f)).epsilon(1e-14));
    CHECK(norm_squared(Wavefunction(g)) == 0.0);
    Wavefunction zero(g);
    CHECK_THROWS_AS(normalize(zero), InvalidArgument);
  }
  SUBCASE("grid mismatch") {
    const RadialGrid other(angstrom(2.0), angstrom(8.0), 901);
    CHECK_THROWS_AS(inner_product(a, Wavefunction(other)), InvalidArgument);
  }
  CHECK(mean_position(a) == doctest::Approx(angstrom(3.5)).epsilon(1e-10));
}

TEST_CASE("quadrature converges when the grid is refined") {
  const double mu = oracle::nea_r_mass();
  const double omega = mev(200.0);
  const RadialGrid coarse(angstrom(2.0), angstrom(8.0), 450);
  const RadialGrid fine(angstrom(2.0), angstrom(8.0), 899);
  auto overlap = [&](const RadialGrid& g) {
    Wavefunction a(g, oracle::gaussian(g, angstrom(3.5), mu, omega));
    Wavefunction b(g, oracle::gaussian(g, angstrom(3.3), mu, omega));
    return inner_product(a, b);
  };
  CHECK(std::abs(overlap(coarse) - overlap(fine)) < 1e-8);
}
