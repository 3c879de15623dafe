#pragma once

#include <string_view>

namespace decay {

// Everything inside the library is in atomic units (hartree, bohr, a.u. of
// time, electron mass). External units only show up at the interfaces.
namespace units {
inline constexpr double hartree_in_ev = 27.211386245988;
inline constexpr double bohr_in_angstrom = 0.529177210903;
inline constexpr double au_time_in_fs = 0.024188843265857;
inline constexpr double amu_in_electron_mass = 1822.888486209;
}  // namespace units

enum class Dimension { energy, length, time, mass };

enum class Unit {
  hartree,
  ev,
  mev,
  bohr,
  angstrom,
  au_time,
  fs,
  electron_mass,
  amu,
};

struct Quantity {
  double value;
  Unit unit;
};

Dimension dimension_of(Unit unit);
std::string_view unit_name(Unit unit);
/// Parses the unit suffixes used in config keys and files ("eV", "meV", "angstrom", ...).
Unit parse_unit(std::string_view name);

/// Size of one `unit` expressed in the atomic unit of its dimension.
double atomic_scale(Unit unit);

/// Exact linear rescaling between two units of the same dimension.
/// Throws InvalidArgument on a dimension mismatch.
Quantity convert(Quantity q, Unit to);
double convert(double value, Unit from, Unit to);

inline double to_atomic(double value, Unit from) { return value * atomic_scale(from); }
inline double from_atomic(double value, Unit to) { return value / atomic_scale(to); }

inline double ev(double e) { return e / units::hartree_in_ev; }
inline double mev(double e) { return e * 1e-3 / units::hartree_in_ev; }
inline double angstrom(double r) { return r / units::bohr_in_angstrom; }
inline double fs(double t) { return t / units::au_time_in_fs; }
inline double amu(double m) { return m * units::amu_in_electron_mass; }

inline double to_ev(double e) { return e * units::hartree_in_ev; }
inline double to_angstrom(double r) { return r * units::bohr_in_angstrom; }
inline double to_fs(double t) { return t * units::au_time_in_fs; }

}  // namespace decay
