#include "decay/spectra.hpp"

#include "decay/chirpz.hpp"
#include "decay/parallel.hpp"
#include "decay/units.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace decay {

std::string_view axis_name(AxisKind kind) { return kind == AxisKind::ker ? "KER" : "electron"; }

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::eq4: return "eq4";
    case Provenance::eq5_grid: return "eq5-grid";
    case Provenance::eq5_spectral: return "eq5-spectral";
    case Provenance::mirror: return "mirror";
    case Provenance::convolved: return "convolved";
  }
  return "?";
}

std::string_view kernel_name(Kernel k) { return k == Kernel::gaussian ? "gaussian" : "lorentzian"; }

double Spectrum::integral() const { return axis.weights().dot(values); }

Eigen::Index Spectrum::peak_index() const {
  Eigen::Index i = 0;
  values.maxCoeff(&i);
  return i;
}

Spectrum CoincidenceMap::ker_marginal() const {
  return Spectrum{ker_axis, AxisKind::ker, values * electron_axis.weights(), time, Provenance::eq4};
}

Spectrum CoincidenceMap::electron_marginal() const {
  return Spectrum{electron_axis, AxisKind::electron, values.transpose() * ker_axis.weights(), time,
                  Provenance::eq5_spectral};
}

namespace {

void check_sources(const std::vector<SourceSeries>& sources, const EnergyGrid& final_energies) {
  if (static_cast<Eigen::Index>(sources.size()) != final_energies.size()) {
    throw InvalidArgument("source sweep and final-energy grid differ in length");
  }
  const double tol = 1e-9 * std::max(1.0, std::abs(final_energies.e_max()));
  for (std::size_t f = 0; f < sources.size(); ++f) {
    if (std::abs(sources[f].final_energy - final_energies.e(static_cast<Eigen::Index>(f))) > tol) {
      throw InvalidArgument("source sweep does not follow the final-energy grid");
    }
    if (sources[f].dt != sources.front().dt || sources[f].values.size() != sources.front().values.size()) {
      throw InvalidArgument("source series with different sampling");
    }
  }
}

// |c_{E_f}(E_e, t)|^2, rows: final energies, columns: electron energies
Eigen::MatrixXd coincidence_intensity(const std::vector<SourceSeries>& sources, const EnergyGrid& final_energies,
                                      const EnergyGrid& electron_energies, double t) {
  check_sources(sources, final_energies);
  const auto nf = static_cast<Eigen::Index>(sources.size());
  const Eigen::Index ne = electron_energies.size();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(nf, ne);
  if (nf == 0 || t == 0.0) return out;
  const double dt = sources.front().dt;
  const RealVector w0 = time_weights(sources.front(), t);
  Eigen::Index used = w0.size();
  while (used > 0 && w0(used - 1) == 0.0) --used;
  if (used == 0) return out;
  const double theta = electron_energies.spacing() * dt;

  constexpr Eigen::Index block = 8;
  parallel_for((nf + block - 1) / block, [&](std::ptrdiff_t b) {
    ChirpZ czt(used, ne, theta);
    ComplexVector a(used);
    const Eigen::Index first = b * block;
    for (Eigen::Index f = first; f < std::min(nf, first + block); ++f) {
      const auto& s = sources[static_cast<std::size_t>(f)];
      const double e = s.final_energy + electron_energies.e_min();
      for (Eigen::Index n = 0; n < used; ++n) {
        const double phase = std::fmod(e * dt * static_cast<double>(n), 2.0 * std::numbers::pi);
        a(n) = w0(n) * std::polar(1.0, phase) * s.values(n);
      }
      out.row(f) = czt(a).cwiseAbs2().transpose();
    }
  });
  return out;
}

}  // namespace

Spectrum ker_spectrum(const std::vector<SourceSeries>& sources, const EnergyGrid& final_energies, double v_inf,
                      double t, Diagnostics* diag) {
  check_sources(sources, final_energies);
  RealVector values = RealVector::Zero(final_energies.size());
  if (!sources.empty()) {
    const RealVector w = time_weights(sources.front(), t);
    for (std::size_t f = 0; f < sources.size(); ++f) {
      values(static_cast<Eigen::Index>(f)) = 2.0 * std::numbers::pi * w.dot(sources[f].values.cwiseAbs2());
    }
  }
  Spectrum spec{final_energies.shifted(-v_inf), AxisKind::ker, values, t, Provenance::eq4};
  const double peak = values.maxCoeff();
  if (diag && peak > 0.0) {
    const auto n = values.size();
    if (values(0) > 1e-4 * peak || values(n - 1) > 1e-4 * peak) {
      std::ostringstream ss;
      ss << "KER spectrum at the band edge is " << std::max(values(0), values(n - 1)) / peak
         << " of the peak; widen the final-energy grid [" << to_ev(spec.axis.e_min()) << ", "
         << to_ev(spec.axis.e_max()) << "] eV";
      diag->warn(ss.str());
    }
  }
  return spec;
}

Spectrum electron_spectrum_grid(const std::vector<DrivenState>& driven, const EnergyGrid& electron_energies) {
  if (static_cast<Eigen::Index>(driven.size()) != electron_energies.size()) {
    throw InvalidArgument("driven sweep and electron-energy grid differ in length");
  }
  RealVector values(electron_energies.size());
  double t = driven.empty() ? 0.0 : driven.front().time;
  for (std::size_t j = 0; j < driven.size(); ++j) {
    if (driven[j].time != t) throw InvalidArgument("driven states are not at a common time");
    values(static_cast<Eigen::Index>(j)) = driven[j].norm_account();
  }
  return Spectrum{electron_energies, AxisKind::electron, values, t, Provenance::eq5_grid};
}

Spectrum electron_spectrum_spectral(const std::vector<SourceSeries>& sources, const EnergyGrid& final_energies,
                                    const EnergyGrid& electron_energies, double t, Diagnostics* diag) {
  const Eigen::MatrixXd c2 = coincidence_intensity(sources, final_energies, electron_energies, t);
  const RealVector wf = final_energies.weights();
  RealVector values = c2.transpose() * wf;
  Spectrum spec{electron_energies, AxisKind::electron, values, t, Provenance::eq5_spectral};

  const Eigen::Index nf = final_energies.size();
  if (diag && nf >= 5 && (nf - 1) % 2 == 0 && values.maxCoeff() > 0.0) {
    const EnergyGrid coarse(final_energies.e_min(), final_energies.e_max(), (nf - 1) / 2 + 1);
    const RealVector wc = coarse.weights();
    const Eigen::Index p = spec.peak_index();
    double v = 0.0;
    for (Eigen::Index f = 0; f < coarse.size(); ++f) v += wc(f) * c2(2 * f, p);
    const double change = std::abs(v - values(p)) / values(p);
    if (change > 1e-3) {
      std::ostringstream ss;
      ss << "electron spectrum changes by " << change
         << " at its peak when the final-energy grid is halved; refine the final-energy grid";
      diag->warn(ss.str());
    }
  }
  return spec;
}

CoincidenceMap coincidence_spectrum(const std::vector<SourceSeries>& sources, const EnergyGrid& final_energies,
                                    double v_inf, const EnergyGrid& electron_energies, double t) {
  return CoincidenceMap{final_energies.shifted(-v_inf), electron_energies,
                        coincidence_intensity(sources, final_energies, electron_energies, t), t};
}

EnergyGrid full_band_grid(double dt, Eigen::Index samples, double center) {
  if (!(dt > 0.0) || samples < 2) throw InvalidArgument("full_band_grid: need dt > 0 and at least two samples");
  const Eigen::Index m = smooth_length(samples);
  const double de = 2.0 * std::numbers::pi / (static_cast<double>(m) * dt);
  return EnergyGrid::from_spacing(center - de * static_cast<double>(m / 2), de, m);
}

Spectrum mirror_image(const Spectrum& spec, double e_total, Diagnostics* diag) {
  const Eigen::Index n = spec.axis.size();
  const double de = spec.axis.spacing();
  Eigen::Index keep = n;
  // mirrored point j sits at e_total - e_max + j de
  Eigen::Index first = 0;
  const double lowest = e_total - spec.axis.e_max();
  if (lowest < 0.0) {
    first = static_cast<Eigen::Index>(std::ceil(-lowest / de - 1e-9));
    keep = n - first;
    if (keep < 2) throw InvalidArgument("mirror image lies entirely below zero energy");
    if (diag) {
      std::ostringstream ss;
      ss << "mirror image clipped at zero energy: " << first << " of " << n << " points dropped";
      diag->warn(ss.str());
    }
  }
  RealVector values(keep);
  for (Eigen::Index j = 0; j < keep; ++j) values(j) = spec.values(n - 1 - (first + j));
  const EnergyGrid axis = EnergyGrid::from_spacing(lowest + static_cast<double>(first) * de, de, keep);
  return Spectrum{axis, spec.kind == AxisKind::ker ? AxisKind::electron : AxisKind::ker, values, spec.time,
                  Provenance::mirror, spec.outside};
}

Spectrum convolve(const Spectrum& spec, Kernel kernel, double fwhm) {
  const double de = spec.axis.spacing();
  if (!(fwhm > 0.0)) throw InvalidArgument("convolution FWHM must be positive");
  if (fwhm < 2.0 * de) {
    std::ostringstream ss;
    ss << "convolution FWHM " << to_ev(fwhm) << " eV is below two energy bins (" << to_ev(2.0 * de) << " eV)";
    throw InvalidArgument(ss.str());
  }
  const Eigen::Index n = spec.axis.size();
  const auto ext = static_cast<Eigen::Index>(std::ceil(3.0 * fwhm / de - 1e-9));
  const Eigen::Index m = n + 2 * ext;
  const EnergyGrid axis = EnergyGrid::from_spacing(spec.axis.e_min() - static_cast<double>(ext) * de, de, m);
  const RealVector mass = spec.axis.weights().cwiseProduct(spec.values);
  RealVector out = RealVector::Zero(m);
  double outside = spec.outside;

  if (kernel == Kernel::gaussian) {
    const double sigma = fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    const auto reach = static_cast<Eigen::Index>(std::floor(3.0 * fwhm / de + 1e-9));
    RealVector g(2 * reach + 1);
    for (Eigen::Index k = -reach; k <= reach; ++k) {
      const double x = static_cast<double>(k) * de;
      g(k + reach) = std::exp(-0.5 * x * x / (sigma * sigma));
    }
    g /= g.sum() * de;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (mass(i) == 0.0) continue;
      out.segment(i + ext - reach, 2 * reach + 1) += mass(i) * g;
    }
  } else {
    const double gamma = 0.5 * fwhm;
    const double lo = axis.e_min(), hi = axis.e_max();
    const RealVector w = axis.weights();
    RealVector line(m);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (mass(i) == 0.0) continue;
      const double x0 = spec.axis.e(i);
      for (Eigen::Index k = 0; k < m; ++k) {
        const double x = axis.e(k) - x0;
        line(k) = gamma / (std::numbers::pi * (x * x + gamma * gamma));
      }
      // sampled line rescaled to carry exactly the weight of the line between lo and hi
      const double inside = (std::atan((hi - x0) / gamma) - std::atan((lo - x0) / gamma)) / std::numbers::pi;
      out += (mass(i) * inside / w.dot(line)) * line;
      outside += mass(i) * (1.0 - inside);
    }
  }
  return Spectrum{axis, spec.kind, out, spec.time, Provenance::convolved, outside};
}

Spectrum resample(const Spectrum& spec, const EnergyGrid& axis) {
  RealVector out = RealVector::Zero(axis.size());
  const double de = spec.axis.spacing();
  const Eigen::Index n = spec.axis.size();
  for (Eigen::Index k = 0; k < axis.size(); ++k) {
    const double x = (axis.e(k) - spec.axis.e_min()) / de;
    if (x < -1e-9 || x > static_cast<double>(n - 1) + 1e-9) continue;
    const Eigen::Index i = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(x)), 0, n - 2);
    const double f = std::clamp(x - static_cast<double>(i), 0.0, 1.0);
    out(k) = (1.0 - f) * spec.values(i) + f * spec.values(i + 1);
  }
  Spectrum r = spec;
  r.axis = axis;
  r.values = out;
  return r;
}

double l1_distance(const Spectrum& a, const Spectrum& b) {
  const double de = std::min(a.axis.spacing(), b.axis.spacing());
  const double lo = std::min(a.axis.e_min(), b.axis.e_min());
  const double hi = std::max(a.axis.e_max(), b.axis.e_max());
  const auto n = static_cast<Eigen::Index>(std::ceil((hi - lo) / de - 1e-9)) + 1;
  const EnergyGrid axis = EnergyGrid::from_spacing(lo, de, n);
  const RealVector w = axis.weights();
  RealVector ra = resample(a, axis).values;
  RealVector rb = resample(b, axis).values;
  const double ia = w.dot(ra), ib = w.dot(rb);
  if (!(ia > 0.0) || !(ib > 0.0)) throw InvalidArgument("l1_distance: spectrum with zero integral");
  return w.dot((ra / ia - rb / ib).cwiseAbs());
}

std::vector<Eigen::Index> local_maxima(const Spectrum& spec, double min_relative) {
  std::vector<Eigen::Index> out;
  const double floor = min_relative * spec.peak();
  const auto& v = spec.values;
  for (Eigen::Index i = 1; i + 1 < v.size(); ++i) {
    if (v(i) > v(i - 1) && v(i) >= v(i + 1) && v(i) > floor) out.push_back(i);
  }
  return out;
}

Spectrum peak_normalized(const Spectrum& spec) {
  Spectrum r = spec;
  const double p = spec.peak();
  if (p > 0.0) {
    r.values /= p;
    r.outside /= p;
  }
  return r;
}

std::string scenario_hash(std::string_view canonical) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

void write_common(std::ostream& out, const CsvHeader& header) {
  out << "# scenario " << header.scenario << '\n';
  for (const auto& note : header.notes) out << "# " << note << '\n';
}

std::string time_label(double t) {
  return std::isfinite(t) ? format_double(to_fs(t)) + " fs" : std::string("converged");
}

}  // namespace

void write_csv(const std::filesystem::path& path, const Spectrum& spec, const CsvHeader& header) {
  auto out = open_output(path);
  write_common(out, header);
  out << "# provenance " << provenance_name(spec.provenance) << '\n';
  out << "# axis " << axis_name(spec.kind) << '\n';
  out << "# time " << time_label(spec.time) << '\n';
  out << "# units energy eV, density 1/eV\n";
  out << "energy_eV,value_per_eV\n";
  for (Eigen::Index i = 0; i < spec.axis.size(); ++i) {
    out << format_double(to_ev(spec.axis.e(i))) << ',' << format_double(spec.values(i) / units::hartree_in_ev)
        << '\n';
  }
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

void write_csv(const std::filesystem::path& path, const CoincidenceMap& map, const CsvHeader& header) {
  auto out = open_output(path);
  write_common(out, header);
  out << "# provenance coincidence\n";
  out << "# time " << time_label(map.time) << '\n';
  out << "# units energy eV, density 1/eV^2\n";
  out << "E_KER_eV,E_e_eV,value\n";
  const double scale = 1.0 / (units::hartree_in_ev * units::hartree_in_ev);
  for (Eigen::Index f = 0; f < map.ker_axis.size(); ++f) {
    const std::string ker = format_double(to_ev(map.ker_axis.e(f)));
    for (Eigen::Index j = 0; j < map.electron_axis.size(); ++j) {
      out << ker << ',' << format_double(to_ev(map.electron_axis.e(j))) << ','
          << format_double(map.values(f, j) * scale) << '\n';
    }
  }
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace decay
