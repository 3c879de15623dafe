#include "decay/runner.hpp"

#include "decay/hamiltonian.hpp"
#include "decay/parallel.hpp"
#include "decay/units.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace decay {

namespace {

using Clock = std::chrono::steady_clock;

std::string fwhm_label(double fwhm) {
  const double mev_value = to_ev(fwhm) * 1e3;
  std::ostringstream ss;
  ss << std::llround(mev_value) << "meV";
  return ss.str();
}

Spectrum sum_spectra(const std::vector<const Spectrum*>& parts) {
  Spectrum total = *parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) {
    total.values += parts[i]->values;
    total.outside += parts[i]->outside;
  }
  return total;
}

EnergyGrid electron_grid(const ScenarioConfig& cfg, double e_total, Diagnostics& diag) {
  const auto& e = cfg.energy;
  if (e.electron_min) {
    const auto n = static_cast<Eigen::Index>(std::llround((*e.electron_max - *e.electron_min) / *e.electron_step)) + 1;
    return EnergyGrid::from_spacing(*e.electron_min, *e.electron_step, n);
  }
  const EnergyGrid ker = cfg.ker_grid();
  double lo = e_total - ker.e_max();
  Eigen::Index n = ker.size();
  if (lo < 0.0) {
    const auto skip = static_cast<Eigen::Index>(std::ceil(-lo / ker.spacing() - 1e-9));
    if (n - skip < 2) throw ConfigError("mirrored electron grid lies below zero energy; set electron_min/max/step");
    diag.warn("mirrored electron grid starts below zero energy; " + std::to_string(skip) + " points dropped");
    lo += static_cast<double>(skip) * ker.spacing();
    n -= skip;
  }
  return EnergyGrid::from_spacing(lo, ker.spacing(), n);
}

double ker_change(const std::vector<ChannelResult>& channels, double t, double lifetime, double peak) {
  if (t <= lifetime || !(peak > 0.0)) return std::numeric_limits<double>::infinity();
  RealVector now = RealVector::Zero(channels.front().ker.values.size());
  RealVector before = now;
  for (const auto& c : channels) {
    now += c.ker.values;
    before += ker_spectrum(c.sources, c.final_energies, c.v_inf, t - lifetime).values;
  }
  return (now - before).cwiseAbs().maxCoeff() / peak;
}

}  // namespace

RunProducts simulate(const ScenarioConfig& cfg, const RunOptions& opt) {
  set_thread_count(opt.threads);
  Diagnostics diag;
  const double mu = cfg.mu;
  const RadialGrid grid = cfg.grid();
  const PotentialCurve ground = cfg.ground.build(mu);
  const PotentialCurve vd = cfg.decaying.build(mu);
  const DecayWidth total_width = cfg.total_width();

  {
    SpectralKinetic kinetic(grid, mu);
    const double phase = kinetic.max_energy() * cfg.time.dt;
    if (phase >= 0.5) {
      std::ostringstream ss;
      ss << "time step too large: dt * E_max(grid) = " << phase << " rad per step (must stay below 0.5); use dt <= "
         << to_fs(0.5 / kinetic.max_energy()) << " fs";
      throw ConfigError(ss.str());
    }
  }

  BoundStates bound = lowest_states(ground, mu, grid, 1);
  Wavefunction psi0 = bound.states.front();
  const std::string stamp = scenario_hash(cfg.dynamics_canonical());

  const bool finite = opt.until_time.has_value() || !cfg.time.auto_converge;
  const double t_target = opt.until_time ? *opt.until_time : cfg.time.t_final.value_or(0.0);
  const double lifetime = 1.0 / std::max(total_width.max_value(), 1e-300);

  std::vector<ChannelResult> channels;
  std::optional<DecayHistory> history;
  Convergence conv;
  conv.finite_time = finite;
  conv.lifetime = lifetime;

  const auto solve_channels = [&](const DecayHistory& h) {
    channels.clear();
    const double t = h.end_time();
    for (const auto& spec : cfg.channels) {
      const PotentialCurve vf = spec.final_curve.build(mu);
      ChannelResult c{spec.name, vf.asymptote(), cfg.ker_grid().shifted(vf.asymptote()), {}, {}, Spectrum{
          cfg.ker_grid(), AxisKind::ker, RealVector(), t, Provenance::eq4}, std::nullopt, std::nullopt};
      c.states = continuum_sweep(vf, mu, c.final_energies, grid, cfg.energy.continuum);
      c.sources = source_sweep(h, c.states, Coupling(spec.width()));
      channels.push_back(std::move(c));
    }
  };

  double stop_norm = cfg.time.stop_norm;
  for (int attempt = 0;; ++attempt) {
    if (opt.from_checkpoint) {
      DecayHistory h = read_checkpoint(*opt.from_checkpoint);
      if (h.stamp() != stamp) {
        throw ConfigError("checkpoint '" + opt.from_checkpoint->string() + "' was written for a different scenario");
      }
      if (opt.until_time) {
        if (*opt.until_time > h.end_time() * (1.0 + 1e-12)) {
          throw ConfigError("requested time lies beyond the checkpointed history (" +
                            format_double(to_fs(h.end_time())) + " fs)");
        }
        h = h.truncated(*opt.until_time);
      }
      history = std::move(h);
    } else {
      PropagationOptions p;
      p.dt = cfg.time.dt;
      p.store_every = cfg.time.store_every;
      p.t_final = t_target;
      p.stop_norm = finite ? 0.0 : stop_norm;
      p.t_max = cfg.time.t_max;
      history = propagate_decaying(psi0, vd, total_width, mu, p, stamp);
    }
    solve_channels(*history);
    const double t = history->end_time();
    for (auto& c : channels) c.ker = ker_spectrum(c.sources, c.final_energies, c.v_inf, t, &diag);
    double peak = 0.0;
    {
      RealVector sum = RealVector::Zero(channels.front().ker.values.size());
      for (const auto& c : channels) sum += c.ker.values;
      peak = sum.maxCoeff();
    }
    conv.final_norm = history->norms().back();
    conv.ker_change = ker_change(channels, t, lifetime, peak);
    if (finite) {
      conv.converged = true;
      break;
    }
    conv.converged = conv.final_norm < cfg.time.stop_norm && conv.ker_change < cfg.time.ker_tolerance;
    const bool at_limit = t >= cfg.time.t_max * (1.0 - 1e-12);
    if (conv.converged || at_limit || opt.from_checkpoint || attempt >= 4) break;
    stop_norm *= 1e-2;
  }
  if (!conv.converged) {
    std::ostringstream ss;
    ss << "not converged at t = " << to_fs(history->end_time()) << " fs: norm " << conv.final_norm
       << ", KER change over the last lifetime " << conv.ker_change << "; raise t_max_fs";
    diag.warn(ss.str());
  }

  const DecayHistory& h = *history;
  const double t = h.end_time();
  const double v_inf0 = channels.front().v_inf;
  const double e_total = cfg.transforms.mirror_total.value_or(h.reference_energy() - v_inf0);

  std::vector<const Spectrum*> parts;
  for (const auto& c : channels) parts.push_back(&c.ker);
  Spectrum ker = sum_spectra(parts);

  RunProducts out{grid, psi0, e_total, h, {}, ker, {}, {}, {}, {}, {}, {}, {}, conv, {}};

  if (cfg.needs_electron()) {
    const EnergyGrid ee = electron_grid(cfg, e_total, diag);
    {
      const double e_ref = h.reference_energy();
      double worst = 0.0;
      for (const auto& c : channels) {
        for (double ef : {c.final_energies.e_min(), c.final_energies.e_max()}) {
          for (double e : {ee.e_min(), ee.e_max()}) worst = std::max(worst, std::abs(ef + e - e_ref));
        }
      }
      if (h.store_interval() * worst >= 0.5) {
        std::ostringstream ss;
        ss << "snapshot interval too long: dt_store * max|E_f + E_e - E_ref| = " << h.store_interval() * worst
           << " (must stay below 0.5); lower store_every";
        throw ConfigError(ss.str());
      }
    }
    const bool spectral = cfg.energy.route != ElectronRoute::grid;
    const bool driven = cfg.energy.route != ElectronRoute::spectral;
    for (std::size_t ci = 0; ci < channels.size(); ++ci) {
      auto& c = channels[ci];
      const auto& spec = cfg.channels[ci];
      if (spectral) c.electron = electron_spectrum_spectral(c.sources, c.final_energies, ee, t, &diag);
      if (driven) {
        const Eigen::Index stride = cfg.energy.grid_stride;
        const Eigen::Index n = (ee.size() - 1) / stride + 1;
        const EnergyGrid sub = EnergyGrid::from_spacing(ee.e_min(), ee.spacing() * static_cast<double>(stride), n);
        const PotentialCurve vf = spec.final_curve.build(mu);
        const Coupling w(spec.width());
        std::vector<std::optional<DrivenState>> slots(static_cast<std::size_t>(n));
        std::vector<Diagnostics> notes(static_cast<std::size_t>(n));
        parallel_for(n, [&](std::ptrdiff_t j) {
          slots[static_cast<std::size_t>(j)] =
              propagate_driven(sub.e(j), h, vf, w, mu, cfg.absorber, &notes[static_cast<std::size_t>(j)]);
        });
        std::vector<DrivenState> states;
        states.reserve(slots.size());
        for (std::size_t j = 0; j < slots.size(); ++j) {
          states.push_back(std::move(*slots[j]));
          diag.merge(notes[j]);
        }
        c.electron_grid = electron_spectrum_grid(states, sub);
      }
    }
    if (spectral) {
      parts.clear();
      for (const auto& c : channels) parts.push_back(&*c.electron);
      out.electron = sum_spectra(parts);
    }
    if (driven) {
      parts.clear();
      for (const auto& c : channels) parts.push_back(&*c.electron_grid);
      out.electron_grid = sum_spectra(parts);
      if (!out.electron) out.electron = out.electron_grid;
    }
    if (cfg.wants("mirror")) {
      out.mirror = mirror_image(*out.electron, e_total, &diag);
      out.l1_ker_mirror = l1_distance(out.ker, *out.mirror);
    }
    if (cfg.wants("coincidence")) {
      for (const auto& c : channels) {
        CoincidenceMap m = coincidence_spectrum(c.sources, c.final_energies, c.v_inf, ee, t);
        if (!out.coincidence) {
          out.coincidence = std::move(m);
        } else {
          out.coincidence->values += m.values;
        }
      }
    }
  }

  const auto add_convolutions = [&](Kernel k, const std::vector<double>& widths) {
    for (double fwhm : widths) {
      const std::string suffix = std::string("_") + std::string(kernel_name(k)) + "_" + fwhm_label(fwhm);
      out.convolved.push_back(convolve(out.ker, k, fwhm));
      out.convolved_names.push_back("ker_eq4" + suffix);
      if (out.electron) {
        out.convolved.push_back(convolve(*out.electron, k, fwhm));
        out.convolved_names.push_back("electron_eq5" + suffix);
      }
    }
  };
  add_convolutions(Kernel::gaussian, cfg.transforms.gaussian_fwhm);
  add_convolutions(Kernel::lorentzian, cfg.transforms.lorentzian_fwhm);

  out.channels = std::move(channels);
  out.diagnostics = std::move(diag);
  return out;
}

namespace {

nlohmann::json spectrum_summary(const Spectrum& s) {
  return {{"axis", axis_name(s.kind)},
          {"provenance", provenance_name(s.provenance)},
          {"e_min_eV", to_ev(s.axis.e_min())},
          {"e_max_eV", to_ev(s.axis.e_max())},
          {"points", s.axis.size()},
          {"integral", s.integral()},
          {"outside_weight", s.outside},
          {"peak_eV", to_ev(s.peak_energy())},
          {"peak_per_eV", s.peak() / units::hartree_in_ev}};
}

void write_norms(const std::filesystem::path& path, const DecayHistory& h, const CsvHeader& header) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << "# scenario " << header.scenario << '\n';
  for (const auto& n : header.notes) out << "# " << n << '\n';
  out << "# units time fs, norm dimensionless\n";
  out << "time_fs,norm\n";
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    out << format_double(to_fs(h.time(i))) << ',' << format_double(h.norms()[static_cast<std::size_t>(i)]) << '\n';
  }
}

}  // namespace

int run(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log) {
  const auto start = Clock::now();
  RunProducts p = simulate(cfg, opt);
  const double wall = std::chrono::duration<double>(Clock::now() - start).count();

  const std::filesystem::path dir = opt.out.value_or(cfg.output.directory);
  std::filesystem::create_directories(dir);
  CsvHeader header{scenario_hash(cfg.canonical()), {}};
  const std::string status = !p.convergence.converged  ? "non-converged (partial result)"
                             : p.convergence.finite_time ? "finite time"
                                                         : "converged";
  header.notes.push_back("status " + status);
  const bool normalize = opt.peak_normalize || cfg.transforms.peak_normalize;
  if (normalize) header.notes.push_back("values normalized to unit peak");
  const auto shown = [&](const Spectrum& s) { return normalize ? peak_normalized(s) : s; };

  std::vector<std::string> files;
  const auto emit = [&](const std::string& name, const Spectrum& s) {
    write_csv(dir / name, shown(s), header);
    files.push_back(name);
  };
  if (cfg.wants("ker")) emit("ker_eq4.csv", p.ker);
  if (cfg.wants("electron") && p.electron) emit("electron_eq5.csv", *p.electron);
  if (cfg.wants("electron") && p.electron_grid && cfg.energy.route == ElectronRoute::both) {
    emit("electron_eq5_grid.csv", *p.electron_grid);
  }
  if (p.mirror) emit("predicted_ker_mirror.csv", *p.mirror);
  if (cfg.wants("norm")) {
    write_norms(dir / "norm_decay.csv", p.history, header);
    files.push_back("norm_decay.csv");
  }
  if (p.coincidence) {
    write_csv(dir / "coincidence.csv", *p.coincidence, header);
    files.push_back("coincidence.csv");
  }
  for (std::size_t i = 0; i < p.convolved.size(); ++i) emit(p.convolved_names[i] + ".csv", p.convolved[i]);
  if (cfg.output.per_channel && p.channels.size() > 1) {
    for (const auto& c : p.channels) {
      if (cfg.wants("ker")) emit("ker_eq4_" + c.name + ".csv", c.ker);
      if (cfg.wants("electron") && c.electron) emit("electron_eq5_" + c.name + ".csv", *c.electron);
      if (cfg.wants("electron") && !c.electron && c.electron_grid) emit("electron_eq5_" + c.name + ".csv", *c.electron_grid);
    }
  }
  if (cfg.output.checkpoint && !opt.from_checkpoint) {
    write_checkpoint(dir / "history.dkh", p.history);
    files.push_back("history.dkh");
  }

  nlohmann::json config = nlohmann::json::object();
  for (const auto& e : cfg.resolved) {
    config[e.section][e.key] = {{"value", e.value}, {"source", e.defaulted ? "default" : "input"}};
  }
  nlohmann::json spectra = nlohmann::json::object();
  spectra["ker"] = spectrum_summary(p.ker);
  if (p.electron) spectra["electron"] = spectrum_summary(*p.electron);
  if (p.electron_grid) spectra["electron_grid"] = spectrum_summary(*p.electron_grid);
  if (p.mirror) spectra["mirror"] = spectrum_summary(*p.mirror);
  nlohmann::json channels = nlohmann::json::array();
  for (const auto& c : p.channels) {
    double worst = 0.0;
    for (const auto& s : c.states) worst = std::max(worst, s.residual);
    channels.push_back({{"name", c.name},
                        {"v_inf_eV", to_ev(c.v_inf)},
                        {"ker_integral", c.ker.integral()},
                        {"max_continuum_residual", worst}});
  }
  const auto& h = p.history;
  nlohmann::json manifest = {
      {"tool", "decaykit"},
      {"scenario_hash", header.scenario},
      {"dynamics_stamp", h.stamp()},
      {"config", config},
      {"resolved",
       {{"e_total_eV", to_ev(p.e_total)},
        {"reference_energy_eV", to_ev(h.reference_energy())},
        {"t_end_fs", to_fs(h.end_time())},
        {"snapshots", h.size()},
        {"snapshot_window", {h.window_offset(), h.window_size()}},
        {"electron_route", electron_route_name(cfg.energy.route)},
        {"continuum", continuum_method_name(cfg.energy.continuum)},
        {"from_checkpoint", opt.from_checkpoint ? opt.from_checkpoint->string() : ""}}},
      {"convergence",
       {{"converged", p.convergence.converged},
        {"finite_time", p.convergence.finite_time},
        {"final_norm", p.convergence.final_norm},
        {"lost_norm", 1.0 - p.convergence.final_norm},
        {"ker_change_last_lifetime", p.convergence.ker_change},
        {"lifetime_fs", to_fs(p.convergence.lifetime)}}},
      {"spectra", spectra},
      {"channels", channels},
      {"comparison", nlohmann::json::object()},
      {"diagnostics", p.diagnostics.warnings()},
      {"outputs", files},
      {"threads", thread_count()},
      {"wall_time_s", wall}};
  if (p.l1_ker_mirror) manifest["comparison"]["l1_ker_vs_mirror"] = *p.l1_ker_mirror;
  {
    std::ofstream out(dir / "manifest.json");
    if (!out) throw Error("cannot write manifest in '" + dir.string() + "'");
    out << manifest.dump(2) << '\n';
  }

  for (const auto& w : p.diagnostics.warnings()) log << "warning: " << w << '\n';
  log << "wrote " << files.size() + 1 << " files to " << dir.string() << " (" << status << ", " << wall << " s)\n";
  return p.convergence.converged ? exit_converged : exit_not_converged;
}

}  // namespace decay
