#pragma once

#include "decay/grid.hpp"
#include "decay/spline.hpp"
#include "decay/units.hpp"

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace decay {

enum class CurveKind { harmonic, coulomb_explosion, tabulated };

std::string_view curve_kind_name(CurveKind kind);

/// One (R, value) pair of a tabulated curve, atomic units.
struct CurveSample {
  double r;
  double value;
};

/// Potential energy curve V(R) in hartree as a function of R in bohr.
class PotentialCurve {
public:
  struct Harmonic {
    double force_constant;  // mu * omega^2
    double r_eq;
    double v_min;
  };
  struct Coulomb {
    double charge_product;
    double v_inf;
  };
  struct Tabulated {
    CubicSpline spline;
    double low_slope;  // secant slope of the first segment
    double tail_c;     // V = tail_c / R + v_inf beyond the last sample
    double v_inf;
  };

  explicit PotentialCurve(Harmonic h) : impl_(h) {}
  explicit PotentialCurve(Coulomb c) : impl_(c) {}
  explicit PotentialCurve(Tabulated t) : impl_(std::move(t)) {}

  double operator()(double r) const;
  /// V(infinity); +infinity for a bound (harmonic) curve.
  double asymptote() const;
  CurveKind kind() const;
  bool dissociative() const { return kind() != CurveKind::harmonic; }

  RealVector sample(const RadialGrid& grid) const;

  /// Same curve shifted by a constant energy.
  PotentialCurve shifted(double dv) const;

  const auto& impl() const { return impl_; }

private:
  std::variant<Harmonic, Coulomb, Tabulated> impl_;
};

/// V(R) = v_min + mu*omega^2*(R - r_eq)^2 / 2.
PotentialCurve harmonic(double omega, double r_eq, double v_min, double mu);

/// V(R) = q_prod/R + v_inf.
PotentialCurve coulomb_explosion(double q_prod, double v_inf);

/// Not-a-knot cubic spline through the samples, a c/R + v_inf tail fitted to
/// the last two samples, and a linear continuation below the first one.
PotentialCurve load_tabulated(std::span<const CurveSample> samples);

/// Reads a two-column text table ("R_in_angstrom value") with '#' comments and
/// returns samples in atomic units. `value_unit` names the second column's unit.
std::vector<CurveSample> read_curve_file(const std::filesystem::path& path, Unit value_unit = Unit::ev);
std::vector<CurveSample> parse_curve_table(std::string_view text, Unit value_unit = Unit::ev,
                                           const std::string& source = "<table>");

/// Writes samples in the same two-column format.
void write_curve_file(const std::filesystem::path& path, std::span<const CurveSample> samples,
                      Unit value_unit = Unit::ev, const std::string& header = {});

/// Total (or partial) decay width Gamma(R) >= 0, hartree. Tabulated widths
/// are spline-interpolated, clamped at zero, and held constant beyond the
/// first and last samples.
class DecayWidth {
public:
  static DecayWidth constant(double gamma);
  static DecayWidth tabulated(std::span<const CurveSample> samples);

  double operator()(double r) const;
  RealVector sample(const RadialGrid& grid) const;
  bool is_constant() const;
  /// Sum of the constant parts plus the largest sample of each tabulated part.
  double max_value() const;

  DecayWidth scaled(double factor) const;
  friend DecayWidth operator+(const DecayWidth& a, const DecayWidth& b);

private:
  struct Term {
    double constant = 0.0;
    std::shared_ptr<const CubicSpline> spline;
    double scale = 1.0;
  };
  std::vector<Term> terms_;
};

/// Decay coupling W(R) = sqrt(Gamma(R) / 2pi), real and non-negative.
class Coupling {
public:
  explicit Coupling(DecayWidth width) : width_(std::move(width)) {}
  double operator()(double r) const;
  RealVector sample(const RadialGrid& grid) const;
  const DecayWidth& width() const { return width_; }
  bool is_zero() const { return width_.is_constant() && width_.max_value() == 0.0; }

private:
  DecayWidth width_;
};

Coupling coupling_from_width(const DecayWidth& width);

}  // namespace decay
