#include "decay/potentials.hpp"

#include "decay/error.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace decay {

std::string_view curve_kind_name(CurveKind kind) {
  switch (kind) {
    case CurveKind::harmonic: return "harmonic";
    case CurveKind::coulomb_explosion: return "coulomb-explosion";
    case CurveKind::tabulated: return "tabulated";
  }
  return "?";
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

double PotentialCurve::operator()(double r) const {
  return std::visit(overloaded{
                        [r](const Harmonic& h) {
                          const double d = r - h.r_eq;
                          return h.v_min + 0.5 * h.force_constant * d * d;
                        },
                        [r](const Coulomb& c) { return c.charge_product / r + c.v_inf; },
                        [r](const Tabulated& t) {
                          if (r < t.spline.front()) {
                            return t.spline.values().front() + t.low_slope * (r - t.spline.front());
                          }
                          if (r > t.spline.back()) return t.tail_c / r + t.v_inf;
                          return t.spline(r);
                        },
                    },
                    impl_);
}

double PotentialCurve::asymptote() const {
  return std::visit(overloaded{
                        [](const Harmonic&) { return std::numeric_limits<double>::infinity(); },
                        [](const Coulomb& c) { return c.v_inf; },
                        [](const Tabulated& t) { return t.v_inf; },
                    },
                    impl_);
}

CurveKind PotentialCurve::kind() const {
  return std::visit(overloaded{
                        [](const Harmonic&) { return CurveKind::harmonic; },
                        [](const Coulomb&) { return CurveKind::coulomb_explosion; },
                        [](const Tabulated&) { return CurveKind::tabulated; },
                    },
                    impl_);
}

RealVector PotentialCurve::sample(const RadialGrid& grid) const {
  RealVector v(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) v(i) = (*this)(grid.r(i));
  return v;
}

PotentialCurve PotentialCurve::shifted(double dv) const {
  return std::visit(overloaded{
                        [dv](Harmonic h) {
                          h.v_min += dv;
                          return PotentialCurve(h);
                        },
                        [dv](Coulomb c) {
                          c.v_inf += dv;
                          return PotentialCurve(c);
                        },
                        [dv](const Tabulated& t) {
                          std::vector<double> y = t.spline.values();
                          for (double& v : y) v += dv;
                          return PotentialCurve(Tabulated{CubicSpline(t.spline.knots(), y), t.low_slope,
                                                          t.tail_c, t.v_inf + dv});
                        },
                    },
                    impl_);
}

PotentialCurve harmonic(double omega, double r_eq, double v_min, double mu) {
  if (!(omega > 0.0)) throw InvalidArgument("harmonic: omega must be positive");
  if (!(r_eq > 0.0)) throw InvalidArgument("harmonic: equilibrium distance must be positive");
  if (!(mu > 0.0)) throw InvalidArgument("harmonic: reduced mass must be positive");
  return PotentialCurve(PotentialCurve::Harmonic{mu * omega * omega, r_eq, v_min});
}

PotentialCurve coulomb_explosion(double q_prod, double v_inf) {
  if (!(q_prod > 0.0)) throw InvalidArgument("coulomb_explosion: charge product must be positive");
  return PotentialCurve(PotentialCurve::Coulomb{q_prod, v_inf});
}

namespace {

void check_samples(std::span<const CurveSample> samples, const char* what) {
  if (samples.size() < 4) {
    throw InvalidArgument(std::string(what) + ": need at least 4 samples, got " + std::to_string(samples.size()));
  }
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].r == samples[i - 1].r) {
      throw InvalidArgument(std::string(what) + ": duplicate R = " + std::to_string(samples[i].r));
    }
    if (samples[i].r < samples[i - 1].r) throw InvalidArgument(std::string(what) + ": R values must be increasing");
  }
}

CubicSpline spline_of(std::span<const CurveSample> samples) {
  std::vector<double> x, y;
  x.reserve(samples.size());
  y.reserve(samples.size());
  for (const auto& s : samples) {
    x.push_back(s.r);
    y.push_back(s.value);
  }
  return CubicSpline(x, y);
}

}  // namespace

PotentialCurve load_tabulated(std::span<const CurveSample> samples) {
  check_samples(samples, "load_tabulated");
  const std::size_t n = samples.size();
  const auto& a = samples[n - 2];
  const auto& b = samples[n - 1];
  const double c = (a.value - b.value) / (1.0 / a.r - 1.0 / b.r);
  const double v_inf = b.value - c / b.r;
  const double low_slope = (samples[1].value - samples[0].value) / (samples[1].r - samples[0].r);
  return PotentialCurve(PotentialCurve::Tabulated{spline_of(samples), low_slope, c, v_inf});
}

std::vector<CurveSample> parse_curve_table(std::string_view text, Unit value_unit, const std::string& source) {
  if (dimension_of(value_unit) != Dimension::energy) throw InvalidArgument("curve value unit must be an energy");
  std::vector<CurveSample> out;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    double cols[2];
    int count = 0;
    const char* p = line.data();
    const char* last = line.data() + line.size();
    while (true) {
      while (p < last && (*p == ' ' || *p == '\t' || *p == '\r' || *p == ',')) ++p;
      if (p >= last) break;
      if (count == 2) throw ConfigError(source + ": expected two numeric columns", line_no);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(p, last, v);
      if (ec != std::errc()) throw ConfigError(source + ": not a number: '" + std::string(p, last) + "'", line_no);
      cols[count++] = v;
      p = ptr;
    }
    if (count == 0) continue;
    if (count != 2) throw ConfigError(source + ": expected two numeric columns", line_no);
    out.push_back({to_atomic(cols[0], Unit::angstrom), to_atomic(cols[1], value_unit)});
    if (pos > text.size()) break;
  }
  return out;
}

std::vector<CurveSample> read_curve_file(const std::filesystem::path& path, Unit value_unit) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read curve file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_curve_table(ss.str(), value_unit, path.string());
}

void write_curve_file(const std::filesystem::path& path, std::span<const CurveSample> samples, Unit value_unit,
                      const std::string& header) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write curve file '" + path.string() + "'");
  if (!header.empty()) out << "# " << header << '\n';
  out << "# R_in_angstrom " << unit_name(value_unit) << '\n';
  char buf[96];
  for (const auto& s : samples) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", from_atomic(s.r, Unit::angstrom), from_atomic(s.value, value_unit));
    out << buf;
  }
}

DecayWidth DecayWidth::constant(double gamma) {
  if (!(gamma >= 0.0)) throw InvalidArgument("decay width must be non-negative");
  DecayWidth w;
  w.terms_.push_back({gamma, nullptr, 1.0});
  return w;
}

DecayWidth DecayWidth::tabulated(std::span<const CurveSample> samples) {
  check_samples(samples, "tabulated decay width");
  for (const auto& s : samples) {
    if (!(s.value >= 0.0)) throw InvalidArgument("decay width sample is negative at R = " + std::to_string(s.r));
  }
  DecayWidth w;
  w.terms_.push_back({0.0, std::make_shared<const CubicSpline>(spline_of(samples)), 1.0});
  return w;
}

double DecayWidth::operator()(double r) const {
  double g = 0.0;
  for (const auto& t : terms_) {
    if (!t.spline) {
      g += t.scale * t.constant;
      continue;
    }
    const double x = std::clamp(r, t.spline->front(), t.spline->back());
    g += t.scale * std::max(0.0, (*t.spline)(x));
  }
  return g;
}

RealVector DecayWidth::sample(const RadialGrid& grid) const {
  RealVector v(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) v(i) = (*this)(grid.r(i));
  return v;
}

bool DecayWidth::is_constant() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return !t.spline; });
}

double DecayWidth::max_value() const {
  double g = 0.0;
  for (const auto& t : terms_) {
    if (!t.spline) {
      g += t.scale * t.constant;
    } else {
      const auto& v = t.spline->values();
      g += t.scale * *std::max_element(v.begin(), v.end());
    }
  }
  return g;
}

DecayWidth DecayWidth::scaled(double factor) const {
  if (!(factor >= 0.0)) throw InvalidArgument("decay width scale must be non-negative");
  DecayWidth w = *this;
  for (auto& t : w.terms_) t.scale *= factor;
  return w;
}

DecayWidth operator+(const DecayWidth& a, const DecayWidth& b) {
  DecayWidth w = a;
  w.terms_.insert(w.terms_.end(), b.terms_.begin(), b.terms_.end());
  return w;
}

double Coupling::operator()(double r) const {
  return std::sqrt(width_(r) / (2.0 * std::numbers::pi));
}

RealVector Coupling::sample(const RadialGrid& grid) const {
  return (width_.sample(grid) / (2.0 * std::numbers::pi)).cwiseSqrt();
}

Coupling coupling_from_width(const DecayWidth& width) {
  if (!(width.max_value() >= 0.0)) throw InvalidArgument("coupling_from_width: negative decay width");
  return Coupling(width);
}

}  // namespace decay
