#include "decay/units.hpp"

#include "decay/error.hpp"

#include <string>

namespace decay {

Dimension dimension_of(Unit unit) {
  switch (unit) {
    case Unit::hartree:
    case Unit::ev:
    case Unit::mev:
      return Dimension::energy;
    case Unit::bohr:
    case Unit::angstrom:
      return Dimension::length;
    case Unit::au_time:
    case Unit::fs:
      return Dimension::time;
    case Unit::electron_mass:
    case Unit::amu:
      return Dimension::mass;
  }
  return Dimension::energy;
}

std::string_view unit_name(Unit unit) {
  switch (unit) {
    case Unit::hartree: return "hartree";
    case Unit::ev: return "eV";
    case Unit::mev: return "meV";
    case Unit::bohr: return "bohr";
    case Unit::angstrom: return "angstrom";
    case Unit::au_time: return "au_time";
    case Unit::fs: return "fs";
    case Unit::electron_mass: return "electron_mass";
    case Unit::amu: return "amu";
  }
  return "?";
}

Unit parse_unit(std::string_view name) {
  if (name == "hartree" || name == "Eh") return Unit::hartree;
  if (name == "eV") return Unit::ev;
  if (name == "meV") return Unit::mev;
  if (name == "bohr") return Unit::bohr;
  if (name == "angstrom" || name == "A") return Unit::angstrom;
  if (name == "au_time" || name == "au") return Unit::au_time;
  if (name == "fs") return Unit::fs;
  if (name == "electron_mass" || name == "me") return Unit::electron_mass;
  if (name == "amu") return Unit::amu;
  throw InvalidArgument("unknown unit '" + std::string(name) + "'");
}

double atomic_scale(Unit unit) {
  switch (unit) {
    case Unit::hartree: return 1.0;
    case Unit::ev: return 1.0 / units::hartree_in_ev;
    case Unit::mev: return 1e-3 / units::hartree_in_ev;
    case Unit::bohr: return 1.0;
    case Unit::angstrom: return 1.0 / units::bohr_in_angstrom;
    case Unit::au_time: return 1.0;
    case Unit::fs: return 1.0 / units::au_time_in_fs;
    case Unit::electron_mass: return 1.0;
    case Unit::amu: return units::amu_in_electron_mass;
  }
  return 1.0;
}

Quantity convert(Quantity q, Unit to) {
  if (dimension_of(q.unit) != dimension_of(to)) {
    throw InvalidArgument("cannot convert " + std::string(unit_name(q.unit)) + " to " +
                          std::string(unit_name(to)) + ": dimension mismatch");
  }
  if (q.unit == to) return q;
  return {q.value * atomic_scale(q.unit) / atomic_scale(to), to};
}

double convert(double value, Unit from, Unit to) { return convert(Quantity{value, from}, to).value; }

}  // namespace decay
