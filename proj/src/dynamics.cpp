#include "decay/dynamics.hpp"

#include "decay/hamiltonian.hpp"
#include "decay/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace decay {

DecayHistory::DecayHistory(RadialGrid grid, double dt_step, double dt_store, double e_ref, Eigen::Index offset,
                           std::vector<double> times, std::vector<double> norms, Eigen::MatrixXcd snapshots,
                           std::string stamp)
    : grid_(grid),
      dt_step_(dt_step),
      dt_store_(dt_store),
      e_ref_(e_ref),
      offset_(offset),
      times_(std::move(times)),
      norms_(std::move(norms)),
      snapshots_(std::move(snapshots)),
      stamp_(std::move(stamp)) {
  if (times_.empty()) throw InvalidArgument("decay history needs at least one snapshot");
  if (times_.size() != norms_.size() || static_cast<Eigen::Index>(times_.size()) != snapshots_.cols()) {
    throw InvalidArgument("decay history: inconsistent snapshot counts");
  }
  if (offset_ < 0 || offset_ + snapshots_.rows() > grid_.size()) throw InvalidArgument("decay history: bad window");
}

Wavefunction DecayHistory::state(Eigen::Index n) const {
  Wavefunction psi(grid_);
  psi.amplitudes.segment(offset_, window_size()) = snapshots_.col(n);
  return psi;
}

ComplexVector DecayHistory::interpolate(double t) const {
  const Eigen::Index count = size();
  const double slack = 1e-9 * dt_store_;
  if (t < -slack || t > end_time() + slack) {
    std::ostringstream ss;
    ss << "history interpolation at t = " << t << " outside [0, " << end_time() << "]";
    throw InvalidArgument(ss.str());
  }
  if (count == 1) return snapshots_.col(0);
  const double x = t / dt_store_;
  Eigen::Index k = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(x)), 0, count - 2);
  if (x == static_cast<double>(k)) return snapshots_.col(k);
  if (x == static_cast<double>(k + 1)) return snapshots_.col(k + 1);
  const Eigen::Index points = std::min<Eigen::Index>(4, count);
  Eigen::Index first = std::clamp<Eigen::Index>(k - 1, 0, count - points);
  ComplexVector out = ComplexVector::Zero(window_size());
  for (Eigen::Index a = first; a < first + points; ++a) {
    double l = 1.0;
    for (Eigen::Index b = first; b < first + points; ++b) {
      if (b != a) l *= (x - static_cast<double>(b)) / static_cast<double>(a - b);
    }
    out += (l * std::polar(1.0, e_ref_ * (times_[static_cast<std::size_t>(a)] - t))) * snapshots_.col(a);
  }
  return out;
}

DecayHistory DecayHistory::truncated(double t_end) const {
  Eigen::Index keep = 0;
  while (keep < size() && times_[static_cast<std::size_t>(keep)] <= t_end * (1.0 + 1e-12)) ++keep;
  if (keep == 0) throw InvalidArgument("truncated history would be empty");
  return DecayHistory(grid_, dt_step_, dt_store_, e_ref_, offset_,
                      std::vector<double>(times_.begin(), times_.begin() + keep),
                      std::vector<double>(norms_.begin(), norms_.begin() + keep), snapshots_.leftCols(keep), stamp_);
}

namespace {

struct DecayStepper {
  SpectralKinetic kinetic;
  ComplexVector half_potential;
  RealVector weights;
  double dt;

  DecayStepper(const RadialGrid& grid, const PotentialCurve& vd, const DecayWidth& width, double mu, double step)
      : kinetic(grid, mu), half_potential(grid.size()), weights(grid.weights()), dt(step) {
    const RealVector v = vd.sample(grid);
    const RealVector g = width.sample(grid);
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      half_potential(i) = std::exp(Complex(-0.5 * g(i), -v(i)) * (0.5 * dt));
    }
  }

  void step(ComplexVector& psi) {
    psi.array() *= half_potential.array();
    kinetic.evolve(psi, dt);
    psi.array() *= half_potential.array();
  }

  double norm(const ComplexVector& psi) const { return (psi.array().abs2() * weights.array()).sum(); }
};

void check_step(const ComplexVector& psi, double before, double after, double t, const PropagationOptions& opt) {
  if (after - before > opt.growth_tolerance || !std::isfinite(after)) {
    std::ostringstream ss;
    ss << "decaying-state norm grew from " << before << " to " << after << " at t = " << to_fs(t)
       << " fs; reduce dt";
    throw NumericalAbort(ss.str());
  }
  const double edge = std::max(std::norm(psi(0)), std::norm(psi(psi.size() - 1)));
  if (edge > opt.edge_tolerance) {
    std::ostringstream ss;
    ss << "decaying-state density " << edge << " at the grid edge at t = " << to_fs(t)
       << " fs; enlarge the radial grid";
    throw NumericalAbort(ss.str());
  }
}

}  // namespace

DecayHistory propagate_decaying(const Wavefunction& psi0, const PotentialCurve& vd, const DecayWidth& width, double mu,
                                const PropagationOptions& opt, const std::string& stamp) {
  if (!(opt.dt > 0.0)) throw InvalidArgument("propagate_decaying: dt must be positive");
  if (opt.store_every < 1) throw InvalidArgument("propagate_decaying: store_every must be >= 1");
  if (std::abs(norm_squared(psi0) - 1.0) > 1e-8) throw InvalidArgument("propagate_decaying: psi0 must be normalized");
  if (!(opt.t_final > 0.0) && !(opt.stop_norm > 0.0)) {
    throw InvalidArgument("propagate_decaying: need a final time or a stop norm");
  }
  const RadialGrid& grid = psi0.grid;
  const double dt = opt.dt;
  const double e_ref = energy_expectation(psi0, vd.sample(grid), mu);

  const auto target_steps = static_cast<long>(std::ceil(opt.t_final / dt - 1e-9));
  const double t_limit = opt.t_max > 0.0 ? opt.t_max : 100.0 * std::max(opt.t_final, 1.0 / width.max_value());
  const auto limit_steps = static_cast<long>(std::ceil(t_limit / dt));

  // first pass: find the final time and the part of the grid the packet visits
  long steps = 0;
  RealVector max_density = psi0.amplitudes.cwiseAbs2();
  {
    DecayStepper stepper(grid, vd, width, mu, dt);
    ComplexVector psi = psi0.amplitudes;
    double norm = stepper.norm(psi);
    for (long s = 1;; ++s) {
      stepper.step(psi);
      const double next = stepper.norm(psi);
      check_step(psi, norm, next, s * dt, opt);
      norm = next;
      max_density = max_density.cwiseMax(psi.cwiseAbs2());
      const bool reached_time = s >= target_steps;
      const bool reached_norm = opt.stop_norm > 0.0 && norm < opt.stop_norm;
      const bool stored = s % opt.store_every == 0;
      const bool done = opt.stop_norm > 0.0 ? (reached_norm && reached_time && stored) || (s >= limit_steps && stored)
                                            : reached_time && stored;
      if (done) {
        steps = s;
        break;
      }
    }
  }

  const double threshold = opt.window_threshold * opt.window_threshold * max_density.maxCoeff();
  Eigen::Index lo = 0, hi = grid.size() - 1;
  while (lo < hi && max_density(lo) <= threshold) ++lo;
  while (hi > lo && max_density(hi) <= threshold) --hi;
  lo = std::max<Eigen::Index>(0, lo - 4);
  hi = std::min<Eigen::Index>(grid.size() - 1, hi + 4);
  const Eigen::Index width_pts = hi - lo + 1;

  const long count = steps / opt.store_every + 1;
  Eigen::MatrixXcd snaps(width_pts, count);
  std::vector<double> times, norms;
  times.reserve(static_cast<std::size_t>(count));
  norms.reserve(static_cast<std::size_t>(count));

  DecayStepper stepper(grid, vd, width, mu, dt);
  ComplexVector psi = psi0.amplitudes;
  snaps.col(0) = psi.segment(lo, width_pts);
  times.push_back(0.0);
  norms.push_back(stepper.norm(psi));
  for (long s = 1; s <= steps; ++s) {
    stepper.step(psi);
    if (s % opt.store_every == 0) {
      const auto c = static_cast<Eigen::Index>(s / opt.store_every);
      snaps.col(c) = psi.segment(lo, width_pts);
      times.push_back(static_cast<double>(s) * dt);
      norms.push_back(stepper.norm(psi));
    }
  }
  return DecayHistory(grid, dt, dt * opt.store_every, e_ref, lo, std::move(times), std::move(norms), std::move(snaps),
                      stamp);
}

DecayHistory propagate_decaying(const Wavefunction& psi0, const PotentialCurve& vd, const DecayWidth& width, double mu,
                                double dt, double t_final) {
  PropagationOptions opt;
  opt.dt = dt;
  opt.t_final = t_final;
  return propagate_decaying(psi0, vd, width, mu, opt);
}

RealVector absorber_profile(const RadialGrid& grid, const Absorber& cap) {
  RealVector w = RealVector::Zero(grid.size());
  if (!cap.enabled) return w;
  if (!(cap.fraction > 0.0 && cap.fraction < 1.0)) throw InvalidArgument("absorber fraction must lie in (0, 1)");
  if (!(cap.strength > 0.0)) throw InvalidArgument("absorber strength must be positive");
  const double start = grid.r_max() - cap.fraction * grid.length();
  const double span = grid.r_max() - start;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double x = (grid.r(i) - start) / span;
    if (x > 0.0) w(i) = cap.strength * x * x;
  }
  return w;
}

DrivenState propagate_driven(double electron_energy, const DecayHistory& history, const PotentialCurve& vf,
                             const Coupling& coupling, double mu, const Absorber& cap, Diagnostics* diag) {
  const RadialGrid& grid = history.grid();
  const double dt = history.step();
  const auto steps = static_cast<long>(std::llround(history.end_time() / dt));
  const RealVector v = vf.sample(grid);
  const RealVector absorb = absorber_profile(grid, cap);
  const RealVector weights = grid.weights();
  const Eigen::Index n = grid.size();

  // exp(-i (V_f + E_e - i W_cap) dt/4), i.e. one quarter step
  ComplexVector quarter(n);
  RealVector loss(n);  // fraction of density removed per quarter step
  for (Eigen::Index i = 0; i < n; ++i) {
    quarter(i) = std::exp(Complex(-absorb(i), -(v(i) + electron_energy)) * (0.25 * dt));
    loss(i) = weights(i) * (1.0 - std::exp(-0.5 * absorb(i) * dt));
  }
  Eigen::Index cap_start = n;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (absorb(i) > 0.0) {
      cap_start = i;
      break;
    }
  }

  const Eigen::Index off = history.window_offset();
  const Eigen::Index len = history.window_size();
  RealVector w_window(len);
  for (Eigen::Index i = 0; i < len; ++i) w_window(i) = coupling(grid.r(off + i));

  SpectralKinetic kinetic(grid, mu);
  ComplexVector psi = ComplexVector::Zero(n);
  double absorbed = 0.0;
  const auto apply_quarter = [&] {
    for (Eigen::Index i = cap_start; i < n; ++i) absorbed += std::norm(psi(i)) * loss(i);
    psi.array() *= quarter.array();
  };

  if (!coupling.is_zero()) {
    for (long s = 0; s < steps; ++s) {
      const double t = static_cast<double>(s) * dt;
      apply_quarter();
      kinetic.evolve(psi, 0.5 * dt);
      apply_quarter();
      const ComplexVector source = history.interpolate(t + 0.5 * dt);
      psi.segment(off, len).array() += Complex(0.0, -dt) * w_window.array() * source.array();
      apply_quarter();
      kinetic.evolve(psi, 0.5 * dt);
      apply_quarter();
    }
  }

  if (cap.enabled && diag) {
    const double peak = psi.cwiseAbs2().maxCoeff();
    if (peak > 0.0 && std::norm(psi(n - 1)) > 1e-8 * peak) {
      std::ostringstream ss;
      ss << "final-state density reaches R_max at E_e = " << to_ev(electron_energy)
         << " eV; increase absorber strength or width";
      diag->warn(ss.str());
    }
  }
  return DrivenState{electron_energy, Wavefunction(grid, std::move(psi)), absorbed, static_cast<double>(steps) * dt};
}

SourceSeries source_series(const DecayHistory& history, const ContinuumState& state, const Coupling& coupling) {
  auto out = source_sweep(history, {state}, coupling);
  return std::move(out.front());
}

std::vector<SourceSeries> source_sweep(const DecayHistory& history, const std::vector<ContinuumState>& states,
                                       const Coupling& coupling) {
  const RadialGrid& grid = history.grid();
  for (const auto& s : states) {
    if (!(s.wavefunction.grid == grid)) throw InvalidArgument("source_series: continuum state on a different grid");
  }
  const Eigen::Index off = history.window_offset();
  const Eigen::Index len = history.window_size();
  const RealVector weights = grid.weights().segment(off, len);
  RealVector w(len);
  for (Eigen::Index i = 0; i < len; ++i) w(i) = coupling(grid.r(off + i)) * weights(i);

  const auto m = static_cast<Eigen::Index>(states.size());
  std::vector<SourceSeries> out(states.size());
  constexpr Eigen::Index block = 32;
  const Eigen::Index blocks = (m + block - 1) / block;
  parallel_for(blocks, [&](std::ptrdiff_t b) {
    const Eigen::Index first = b * block;
    const Eigen::Index cols = std::min(block, m - first);
    Eigen::MatrixXcd bras(len, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& st = states[static_cast<std::size_t>(first + c)];
      bras.col(c) = (st.wavefunction.amplitudes.segment(off, len).conjugate().array() * w.array()).matrix();
    }
    const Eigen::MatrixXcd s = history.snapshots().transpose() * bras;
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto idx = static_cast<std::size_t>(first + c);
      out[idx] = SourceSeries{states[idx].energy, history.store_interval(), s.col(c)};
    }
  });
  return out;
}

RealVector time_weights(const SourceSeries& series, double t) {
  const Eigen::Index count = series.values.size();
  if (t < 0.0 || t > series.end_time() * (1.0 + 1e-12) + 1e-12) {
    throw InvalidArgument("time outside the stored source series");
  }
  RealVector w = RealVector::Zero(count);
  if (count < 2 || t == 0.0) return w;
  const double dt = series.dt;
  const double x = std::min(t / dt, static_cast<double>(count - 1));
  const auto full = static_cast<Eigen::Index>(std::floor(x + 1e-12));
  for (Eigen::Index n = 0; n < full; ++n) {
    w(n) += 0.5 * dt;
    w(n + 1) += 0.5 * dt;
  }
  const double frac = x - static_cast<double>(full);
  if (frac > 1e-12 && full + 1 < count) {
    // partial interval: trapezoid on the linearly interpolated end value
    const double h = frac * dt;
    w(full) += 0.5 * h * (1.0 + (1.0 - frac));
    w(full + 1) += 0.5 * h * frac;
  }
  return w;
}

Complex coincidence_amplitude(const SourceSeries& series, double final_energy, double electron_energy, double t) {
  const RealVector w = time_weights(series, t);
  const double e = final_energy + electron_energy;
  Complex acc = 0.0;
  for (Eigen::Index n = 0; n < w.size(); ++n) {
    if (w(n) == 0.0) continue;
    acc += w(n) * std::polar(1.0, -e * (t - series.time(n))) * series.values(n);
  }
  return Complex(0.0, -1.0) * acc;
}

namespace {

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw Error("checkpoint truncated");
  return v;
}

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const DecayHistory& h) {
  static_assert(std::endian::native == std::endian::little, "checkpoint format is little-endian");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint '" + path.string() + "'");
  out.write(checkpoint_magic, sizeof checkpoint_magic);
  put<std::uint32_t>(out, checkpoint_version);
  put<std::uint32_t>(out, 0);
  put<double>(out, h.grid().r_min());
  put<double>(out, h.grid().r_max());
  put<std::uint64_t>(out, static_cast<std::uint64_t>(h.grid().size()));
  put<double>(out, h.step());
  put<double>(out, h.store_interval());
  put<double>(out, h.reference_energy());
  put<std::uint64_t>(out, static_cast<std::uint64_t>(h.window_offset()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(h.window_size()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(h.size()));
  put<std::uint64_t>(out, h.stamp().size());
  out.write(h.stamp().data(), static_cast<std::streamsize>(h.stamp().size()));
  out.write(reinterpret_cast<const char*>(h.times().data()), static_cast<std::streamsize>(h.size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(h.norms().data()), static_cast<std::streamsize>(h.size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(h.snapshots().data()),
            static_cast<std::streamsize>(h.snapshots().size() * sizeof(Complex)));
  if (!out) throw Error("failed writing checkpoint '" + path.string() + "'");
}

DecayHistory read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read checkpoint '" + path.string() + "'");
  char magic[sizeof checkpoint_magic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, checkpoint_magic, sizeof magic) != 0) {
    throw Error("'" + path.string() + "' is not a decay-history checkpoint");
  }
  const auto version = get<std::uint32_t>(in);
  if (version != checkpoint_version) throw Error("unsupported checkpoint version " + std::to_string(version));
  (void)get<std::uint32_t>(in);
  const double r_min = get<double>(in);
  const double r_max = get<double>(in);
  const auto n = static_cast<Eigen::Index>(get<std::uint64_t>(in));
  const double dt = get<double>(in);
  const double dt_store = get<double>(in);
  const double e_ref = get<double>(in);
  const auto offset = static_cast<Eigen::Index>(get<std::uint64_t>(in));
  const auto len = static_cast<Eigen::Index>(get<std::uint64_t>(in));
  const auto count = static_cast<Eigen::Index>(get<std::uint64_t>(in));
  const auto stamp_len = get<std::uint64_t>(in);
  if (!in || n < 2 || offset < 0 || len < 1 || offset + len > n || count < 1 || stamp_len > 4096) {
    throw Error("checkpoint '" + path.string() + "' has an inconsistent header");
  }
  std::string stamp(stamp_len, '\0');
  in.read(stamp.data(), static_cast<std::streamsize>(stamp_len));
  std::vector<double> times(static_cast<std::size_t>(count)), norms(static_cast<std::size_t>(count));
  in.read(reinterpret_cast<char*>(times.data()), static_cast<std::streamsize>(count * sizeof(double)));
  in.read(reinterpret_cast<char*>(norms.data()), static_cast<std::streamsize>(count * sizeof(double)));
  Eigen::MatrixXcd snaps(len, count);
  in.read(reinterpret_cast<char*>(snaps.data()), static_cast<std::streamsize>(snaps.size() * sizeof(Complex)));
  if (!in) throw Error("checkpoint '" + path.string() + "' is truncated");
  return DecayHistory(RadialGrid(r_min, r_max, n), dt, dt_store, e_ref, offset, std::move(times), std::move(norms),
                      std::move(snaps), std::move(stamp));
}

}  // namespace decay
