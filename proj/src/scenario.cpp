#include "decay/scenario.hpp"

#include "decay/error.hpp"
#include "decay/spectra.hpp"
#include "decay/units.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace decay {

std::string_view electron_route_name(ElectronRoute r) {
  switch (r) {
    case ElectronRoute::spectral: return "spectral";
    case ElectronRoute::grid: return "grid";
    case ElectronRoute::both: return "both";
  }
  return "?";
}

PotentialCurve CurveSpec::build(double mu) const {
  if (kind == "harmonic") return harmonic(omega, r_eq, v_min, mu);
  if (kind == "coulomb") return coulomb_explosion(charge_product, v_inf);
  return load_tabulated(samples);
}

DecayWidth ChannelSpec::width() const {
  if (gamma) return DecayWidth::constant(*gamma);
  return DecayWidth::tabulated(gamma_samples);
}

DecayWidth ScenarioConfig::total_width() const {
  if (channels.empty()) throw InvalidArgument("scenario without final channels");
  DecayWidth total = channels.front().width();
  for (std::size_t c = 1; c < channels.size(); ++c) total = total + channels[c].width();
  return total;
}

EnergyGrid ScenarioConfig::ker_grid() const {
  const auto n = static_cast<Eigen::Index>(std::llround((energy.ker_max - energy.ker_min) / energy.ker_step)) + 1;
  return EnergyGrid::from_spacing(energy.ker_min, energy.ker_step, n);
}

namespace {

std::string samples_text(const std::vector<CurveSample>& s) {
  std::string out;
  for (const auto& p : s) out += format_double(p.r) + ' ' + format_double(p.value) + ';';
  return out;
}

}  // namespace

std::string ScenarioConfig::canonical() const {
  std::string out;
  for (const auto& e : resolved) {
    if (e.section == "output") continue;
    out += e.section + '.' + e.key + '=' + e.value + '\n';
  }
  const auto tables = [&](const std::string& label, const std::vector<CurveSample>& s) {
    if (!s.empty()) out += label + ':' + samples_text(s) + '\n';
  };
  tables("ground", ground.samples);
  tables("decaying", decaying.samples);
  for (const auto& c : channels) {
    tables(c.name + ".final", c.final_curve.samples);
    tables(c.name + ".gamma", c.gamma_samples);
  }
  return out;
}

std::string ScenarioConfig::dynamics_canonical() const {
  std::ostringstream ss;
  ss << "mu=" << format_double(mu) << '\n';
  const auto curve = [&](const char* label, const CurveSpec& c) {
    ss << label << '=' << c.kind << ' ' << format_double(c.omega) << ' ' << format_double(c.r_eq) << ' '
       << format_double(c.v_min) << ' ' << samples_text(c.samples) << '\n';
  };
  curve("ground", ground);
  curve("decaying", decaying);
  for (const auto& c : channels) {
    ss << "width." << c.name << '=' << (c.gamma ? format_double(*c.gamma) : samples_text(c.gamma_samples)) << '\n';
  }
  ss << "radial=" << format_double(radial.r_min) << ' ' << format_double(radial.r_max) << ' ' << radial.points << '\n';
  ss << "time=" << format_double(time.dt) << ' ' << time.store_every << '\n';
  return ss.str();
}

namespace {

struct RawValue {
  std::string text;
  int line;
  bool used = false;
};

struct RawSection {
  std::string name;
  std::string label;
  int line;
  std::map<std::string, RawValue> keys;
};

std::string_view trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<RawSection> split_sections(std::string_view text) {
  std::vector<RawSection> sections;
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header '" + std::string(line) + "'", lineno);
      const auto inner = trim(line.substr(1, line.size() - 2));
      const auto space = inner.find_first_of(" \t");
      RawSection s;
      s.name = std::string(inner.substr(0, space));
      s.label = space == std::string_view::npos ? std::string() : std::string(trim(inner.substr(space)));
      s.line = lineno;
      static const std::set<std::string> known{"system", "channel", "radial", "time",
                                               "energy", "absorber", "transforms", "output"};
      if (!known.count(s.name)) throw ConfigError("unknown section [" + s.name + "]", lineno);
      if (s.name == "channel") {
        if (s.label.empty()) throw ConfigError("[channel] needs a name, e.g. [channel main]", lineno);
      } else if (!s.label.empty()) {
        throw ConfigError("section [" + s.name + "] takes no name", lineno);
      }
      for (const auto& other : sections) {
        if (other.name == s.name && other.label == s.label) {
          throw ConfigError("duplicate section [" + std::string(inner) + "] (first at line " +
                                std::to_string(other.line) + ")",
                            lineno);
        }
      }
      sections.push_back(std::move(s));
      if (end == text.size()) break;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value', got '" + std::string(line) + "'", lineno);
    if (sections.empty()) throw ConfigError("key outside of any section", lineno);
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError("empty key", lineno);
    auto& keys = sections.back().keys;
    if (auto it = keys.find(key); it != keys.end()) {
      throw ConfigError("duplicate key '" + key + "' (first at line " + std::to_string(it->second.line) + ")", lineno);
    }
    keys.emplace(key, RawValue{value, lineno});
    if (end == text.size()) break;
  }
  return sections;
}

std::optional<Unit> unit_suffix(std::string_view s) {
  try {
    return parse_unit(s);
  } catch (const InvalidArgument&) {
    return std::nullopt;
  }
}

std::string_view dimension_name(Dimension d) {
  switch (d) {
    case Dimension::energy: return "energy";
    case Dimension::length: return "length";
    case Dimension::time: return "time";
    case Dimension::mass: return "mass";
  }
  return "?";
}

double parse_number(const std::string& text, const std::string& key, int line) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ConfigError("'" + key + "' expects a number, got '" + text + "'", line);
  }
  return v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = std::min(text.find(',', pos), text.size());
    const auto item = trim(std::string_view(text).substr(pos, comma - pos));
    if (!item.empty()) out.emplace_back(item);
    pos = comma + 1;
  }
  return out;
}

class Reader {
public:
  Reader(RawSection* raw, std::string section, ScenarioConfig& cfg)
      : raw_(raw), section_(std::move(section)), cfg_(cfg) {}

  int line() const { return raw_ ? raw_->line : 0; }

  /// Looks for `base_<unit>` with a unit of dimension `dim`.
  std::optional<double> quantity(const std::string& base, Dimension dim, int* where = nullptr) {
    if (!raw_) return std::nullopt;
    const std::string prefix = base + "_";
    std::optional<double> result;
    std::string found;
    for (auto& [key, value] : raw_->keys) {
      if (key == base) {
        throw ConfigError("'" + key + "' needs a unit suffix, e.g. " + base + "_" + std::string(example_unit(dim)),
                          value.line);
      }
      if (key.rfind(prefix, 0) != 0) continue;
      const auto unit = unit_suffix(std::string_view(key).substr(prefix.size()));
      if (!unit) continue;
      if (dimension_of(*unit) != dim) {
        throw ConfigError("'" + key + "': " + std::string(unit_name(*unit)) + " is not a unit of " +
                              std::string(dimension_name(dim)),
                          value.line);
      }
      if (!found.empty()) throw ConfigError("'" + key + "' repeats '" + found + "'", value.line);
      found = key;
      value.used = true;
      const double v = parse_number(value.text, key, value.line);
      result = to_atomic(v, *unit);
      record(key, format_double(v), false);
      if (where) *where = value.line;
    }
    return result;
  }

  double quantity_or(const std::string& base, Dimension dim, double fallback, Unit shown) {
    if (auto v = quantity(base, dim)) return *v;
    record(base + "_" + std::string(unit_name(shown)), format_double(from_atomic(fallback, shown)), true);
    return fallback;
  }

  double required_quantity(const std::string& base, Dimension dim) {
    if (auto v = quantity(base, dim)) return *v;
    throw ConfigError("missing required key '" + base + "_<" + std::string(dimension_name(dim)) + " unit>' in " +
                          where(),
                      line());
  }

  RawValue* find(const std::string& key) {
    if (!raw_) return nullptr;
    auto it = raw_->keys.find(key);
    if (it == raw_->keys.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }

  std::optional<double> number(const std::string& key) {
    if (auto* v = find(key)) {
      const double x = parse_number(v->text, key, v->line);
      record(key, format_double(x), false);
      return x;
    }
    return std::nullopt;
  }

  double number_or(const std::string& key, double fallback) {
    if (auto v = number(key)) return *v;
    record(key, format_double(fallback), true);
    return fallback;
  }

  long integer_or(const std::string& key, long fallback) {
    if (auto* v = find(key)) {
      long x = 0;
      auto [ptr, ec] = std::from_chars(v->text.data(), v->text.data() + v->text.size(), x);
      if (ec != std::errc() || ptr != v->text.data() + v->text.size()) {
        throw ConfigError("'" + key + "' expects an integer, got '" + v->text + "'", v->line);
      }
      record(key, std::to_string(x), false);
      return x;
    }
    record(key, std::to_string(fallback), true);
    return fallback;
  }

  bool boolean_or(const std::string& key, bool fallback) {
    if (auto* v = find(key)) {
      static const std::set<std::string> yes{"true", "yes", "on", "1"}, no{"false", "no", "off", "0"};
      bool x;
      if (yes.count(v->text)) {
        x = true;
      } else if (no.count(v->text)) {
        x = false;
      } else {
        throw ConfigError("'" + key + "' expects true or false, got '" + v->text + "'", v->line);
      }
      record(key, x ? "true" : "false", false);
      return x;
    }
    record(key, fallback ? "true" : "false", true);
    return fallback;
  }

  std::string choice_or(const std::string& key, const std::string& fallback, const std::set<std::string>& allowed) {
    if (auto* v = find(key)) {
      if (!allowed.count(v->text)) {
        std::string list;
        for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
        throw ConfigError("'" + key + "' must be one of " + list + ", got '" + v->text + "'", v->line);
      }
      record(key, v->text, false);
      return v->text;
    }
    record(key, fallback, true);
    return fallback;
  }

  std::string text_or(const std::string& key, const std::string& fallback, int* where = nullptr) {
    if (auto* v = find(key)) {
      record(key, v->text, false);
      if (where) *where = v->line;
      return v->text;
    }
    if (!fallback.empty()) record(key, fallback, true);
    return fallback;
  }

  /// Comma-separated list of quantities under `base_<unit>`.
  std::vector<double> quantity_list(const std::string& base, Dimension dim) {
    std::vector<double> out;
    if (!raw_) return out;
    const std::string prefix = base + "_";
    for (auto& [key, value] : raw_->keys) {
      if (key.rfind(prefix, 0) != 0) continue;
      const auto unit = unit_suffix(std::string_view(key).substr(prefix.size()));
      if (!unit) continue;
      if (dimension_of(*unit) != dim) {
        throw ConfigError("'" + key + "': " + std::string(unit_name(*unit)) + " is not a unit of " +
                              std::string(dimension_name(dim)),
                          value.line);
      }
      value.used = true;
      std::string shown;
      for (const auto& item : split_list(value.text)) {
        const double v = parse_number(item, key, value.line);
        if (!(v > 0.0)) throw ConfigError("'" + key + "' entries must be positive", value.line);
        out.push_back(to_atomic(v, *unit));
        shown += (shown.empty() ? "" : ", ") + format_double(v);
      }
      record(key, shown, false);
    }
    return out;
  }

  int key_line(const std::string& key) const {
    if (!raw_) return line();
    for (const auto& [k, v] : raw_->keys) {
      if (k == key || k.rfind(key + "_", 0) == 0) return v.line;
    }
    return line();
  }

  void finish() {
    if (!raw_) return;
    const RawValue* first = nullptr;
    std::string name;
    for (const auto& [key, value] : raw_->keys) {
      if (!value.used && (!first || value.line < first->line)) {
        first = &value;
        name = key;
      }
    }
    if (first) throw ConfigError("unknown key '" + name + "' in " + where(), first->line);
  }

  std::string where() const { return "[" + section_ + "]"; }

private:
  static std::string_view example_unit(Dimension d) {
    switch (d) {
      case Dimension::energy: return "eV";
      case Dimension::length: return "angstrom";
      case Dimension::time: return "fs";
      case Dimension::mass: return "amu";
    }
    return "";
  }

  void record(const std::string& key, std::string value, bool defaulted) {
    cfg_.resolved.push_back({section_, key, std::move(value), defaulted});
  }

  RawSection* raw_;
  std::string section_;
  ScenarioConfig& cfg_;
};

void require_positive(double v, const std::string& what, int line) {
  if (!(v > 0.0)) throw ConfigError(what + " must be positive", line);
}

std::vector<CurveSample> load_table(const std::filesystem::path& path, Unit unit, const std::string& key, int line) {
  std::ifstream in(path);
  if (!in) throw ConfigError("'" + key + "': cannot read '" + path.string() + "'", line);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_curve_table(ss.str(), unit, path.string());
  } catch (const Error& e) {
    throw ConfigError("'" + key + "': " + e.what(), line);
  }
}

CurveSpec read_curve(Reader& r, const std::string& prefix, const std::string& default_kind,
                     const std::set<std::string>& kinds, double default_v_min, const std::filesystem::path& base) {
  CurveSpec c;
  c.kind = r.choice_or(prefix, default_kind, kinds);
  if (c.kind == "harmonic") {
    c.omega = r.required_quantity(prefix + "_omega", Dimension::energy);
    require_positive(c.omega, prefix + "_omega", r.key_line(prefix + "_omega"));
    c.r_eq = r.required_quantity(prefix + "_r_eq", Dimension::length);
    require_positive(c.r_eq, prefix + "_r_eq", r.key_line(prefix + "_r_eq"));
    c.v_min = r.quantity_or(prefix + "_v_min", Dimension::energy, default_v_min, Unit::ev);
  } else if (c.kind == "coulomb") {
    c.charge_product = r.number_or(prefix + "_charge_product", 2.0);
    require_positive(c.charge_product, prefix + "_charge_product", r.key_line(prefix + "_charge_product"));
    c.v_inf = r.quantity_or(prefix + "_v_inf", Dimension::energy, 0.0, Unit::ev);
  } else {
    int line = r.line();
    const std::string file = r.text_or(prefix + "_file", "", &line);
    if (file.empty()) throw ConfigError("'" + prefix + " = file' needs " + prefix + "_file", r.line());
    c.file = std::filesystem::path(file).is_absolute() ? std::filesystem::path(file) : base / file;
    c.samples = load_table(c.file, Unit::ev, prefix + "_file", line);
    try {
      (void)load_tabulated(c.samples);
    } catch (const Error& e) {
      throw ConfigError(std::string(prefix + "_file: ") + e.what(), line);
    }
  }
  return c;
}

}  // namespace

ScenarioConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  auto sections = split_sections(text);
  ScenarioConfig cfg;
  const auto section = [&](const std::string& name) -> RawSection* {
    for (auto& s : sections) {
      if (s.name == name) return &s;
    }
    return nullptr;
  };

  if (!section("system")) throw ConfigError("missing [system] section");
  {
    Reader r(section("system"), "system", cfg);
    cfg.mu = r.quantity_or("mu", Dimension::mass, amu(13.4177), Unit::amu);
    require_positive(cfg.mu, "mu", r.key_line("mu"));
    cfg.ground = read_curve(r, "ground", "harmonic", {"harmonic", "file"}, 0.0, base_dir);
    cfg.decaying = read_curve(r, "decaying", "harmonic", {"harmonic", "file"}, ev(12.0), base_dir);
    int gline = 0;
    cfg.gamma_total = r.quantity("gamma", Dimension::energy, &gline);
    if (cfg.gamma_total && *cfg.gamma_total < 0.0) throw ConfigError("decay width must not be negative", gline);
    r.finish();
  }

  for (auto& s : sections) {
    if (s.name != "channel") continue;
    Reader r(&s, "channel " + s.label, cfg);
    ChannelSpec ch;
    ch.name = s.label;
    ch.final_curve = read_curve(r, "final", "coulomb", {"coulomb", "file"}, 0.0, base_dir);
    int gline = 0;
    ch.gamma = r.quantity("gamma", Dimension::energy, &gline);
    if (ch.gamma && *ch.gamma < 0.0) throw ConfigError("decay width must not be negative", gline);
    int fline = s.line;
    const std::string gfile = r.text_or("gamma_file", "", &fline);
    if (!gfile.empty()) {
      if (ch.gamma) throw ConfigError("give either gamma_<unit> or gamma_file, not both", fline);
      ch.gamma_file = std::filesystem::path(gfile).is_absolute() ? std::filesystem::path(gfile) : base_dir / gfile;
      ch.gamma_samples = load_table(ch.gamma_file, Unit::ev, "gamma_file", fline);
      try {
        (void)DecayWidth::tabulated(ch.gamma_samples);
      } catch (const Error& e) {
        throw ConfigError(std::string("gamma_file: ") + e.what(), fline);
      }
    }
    r.finish();
    cfg.channels.push_back(std::move(ch));
  }
  if (cfg.channels.empty()) throw ConfigError("at least one [channel NAME] section is required");
  for (auto& ch : cfg.channels) {
    if (ch.gamma || !ch.gamma_samples.empty()) continue;
    if (cfg.channels.size() == 1 && cfg.gamma_total) {
      ch.gamma = cfg.gamma_total;
      cfg.resolved.push_back({"channel " + ch.name, "gamma_meV", format_double(to_ev(*ch.gamma) * 1e3), true});
    } else {
      throw ConfigError("channel '" + ch.name + "' needs gamma_<unit> or gamma_file");
    }
  }
  const bool all_constant =
      std::all_of(cfg.channels.begin(), cfg.channels.end(), [](const ChannelSpec& c) { return c.gamma.has_value(); });
  if (all_constant) {
    double sum = 0.0;
    for (const auto& c : cfg.channels) sum += *c.gamma;
    if (cfg.gamma_total) {
      if (std::abs(sum - *cfg.gamma_total) > 1e-10 * std::max(std::abs(*cfg.gamma_total), 1e-300)) {
        std::ostringstream ss;
        ss << "channel widths sum to " << to_ev(sum) * 1e3 << " meV but [system] declares "
           << to_ev(*cfg.gamma_total) * 1e3 << " meV";
        throw ConfigError(ss.str(), section("system")->line);
      }
    } else {
      cfg.gamma_total = sum;
      cfg.resolved.push_back({"system", "gamma_meV", format_double(to_ev(sum) * 1e3), true});
    }
  } else if (cfg.gamma_total) {
    throw ConfigError("[system] gamma_<unit> cannot be checked against tabulated channel widths; remove it",
                      section("system")->line);
  }

  {
    Reader r(section("radial"), "radial", cfg);
    cfg.radial.r_min = r.quantity_or("r_min", Dimension::length, angstrom(2.0), Unit::angstrom);
    cfg.radial.r_max = r.quantity_or("r_max", Dimension::length, angstrom(8.0), Unit::angstrom);
    cfg.radial.points = r.integer_or("points", 900);
    require_positive(cfg.radial.r_min, "r_min", r.key_line("r_min"));
    if (!(cfg.radial.r_max > cfg.radial.r_min)) throw ConfigError("r_max must exceed r_min", r.key_line("r_max"));
    if (cfg.radial.points < 16) throw ConfigError("points must be at least 16", r.key_line("points"));
    r.finish();
  }

  {
    Reader r(section("time"), "time", cfg);
    cfg.time.dt = r.quantity_or("dt", Dimension::time, fs(0.0025), Unit::fs);
    require_positive(cfg.time.dt, "dt", r.key_line("dt"));
    cfg.time.store_every = static_cast<int>(r.integer_or("store_every", 1));
    if (cfg.time.store_every < 1) throw ConfigError("store_every must be at least 1", r.key_line("store_every"));
    int tline = 0;
    cfg.time.t_final = r.quantity("t_final", Dimension::time, &tline);
    if (cfg.time.t_final) require_positive(*cfg.time.t_final, "t_final", tline);
    cfg.time.auto_converge = r.boolean_or("auto_converge", true);
    cfg.time.stop_norm = r.number_or("stop_norm", 1e-6);
    cfg.time.ker_tolerance = r.number_or("ker_tolerance", 1e-5);
    cfg.time.t_max = r.quantity_or("t_max", Dimension::time, fs(2000.0), Unit::fs);
    require_positive(cfg.time.stop_norm, "stop_norm", r.key_line("stop_norm"));
    require_positive(cfg.time.ker_tolerance, "ker_tolerance", r.key_line("ker_tolerance"));
    require_positive(cfg.time.t_max, "t_max", r.key_line("t_max"));
    if (!cfg.time.auto_converge && !cfg.time.t_final) {
      throw ConfigError("auto_converge = false needs t_final_<time unit>", r.line());
    }
    r.finish();
  }

  {
    RawSection* raw = section("energy");
    if (!raw) throw ConfigError("missing [energy] section");
    Reader r(raw, "energy", cfg);
    auto& e = cfg.energy;
    e.ker_min = r.required_quantity("ker_min", Dimension::energy);
    e.ker_max = r.required_quantity("ker_max", Dimension::energy);
    e.ker_step = r.required_quantity("ker_step", Dimension::energy);
    require_positive(e.ker_min, "ker_min", r.key_line("ker_min"));
    require_positive(e.ker_step, "ker_step", r.key_line("ker_step"));
    if (!(e.ker_max > e.ker_min + e.ker_step)) throw ConfigError("ker_max must exceed ker_min + ker_step", r.key_line("ker_max"));
    const double count = (e.ker_max - e.ker_min) / e.ker_step;
    if (std::abs(count - std::round(count)) > 1e-6) {
      throw ConfigError("ker_max - ker_min must be a multiple of ker_step", r.key_line("ker_step"));
    }
    e.electron_min = r.quantity("electron_min", Dimension::energy);
    e.electron_max = r.quantity("electron_max", Dimension::energy);
    e.electron_step = r.quantity("electron_step", Dimension::energy);
    const int given = e.electron_min.has_value() + e.electron_max.has_value() + e.electron_step.has_value();
    if (given != 0 && given != 3) {
      throw ConfigError("electron_min, electron_max and electron_step go together", r.key_line("electron"));
    }
    if (given == 3) {
      if (*e.electron_min < 0.0) throw ConfigError("electron_min must not be negative", r.key_line("electron_min"));
      require_positive(*e.electron_step, "electron_step", r.key_line("electron_step"));
      if (!(*e.electron_max > *e.electron_min + *e.electron_step)) {
        throw ConfigError("electron_max must exceed electron_min + electron_step", r.key_line("electron_max"));
      }
    }
    const auto route = r.choice_or("electron_route", "spectral", {"spectral", "grid", "both"});
    e.route = route == "grid" ? ElectronRoute::grid : route == "both" ? ElectronRoute::both : ElectronRoute::spectral;
    e.grid_stride = static_cast<int>(r.integer_or("grid_stride", 1));
    if (e.grid_stride < 1) throw ConfigError("grid_stride must be at least 1", r.key_line("grid_stride"));
    e.continuum = r.choice_or("continuum", "exact", {"exact", "wkb"}) == "wkb" ? ContinuumMethod::wkb
                                                                              : ContinuumMethod::exact;
    r.finish();
  }

  {
    Reader r(section("absorber"), "absorber", cfg);
    cfg.absorber.enabled = r.boolean_or("enabled", true);
    cfg.absorber.fraction = r.number_or("fraction", 0.15);
    cfg.absorber.strength = r.quantity_or("strength", Dimension::energy, 0.2, Unit::hartree);
    if (!(cfg.absorber.fraction > 0.0 && cfg.absorber.fraction < 1.0)) {
      throw ConfigError("absorber fraction must lie in (0, 1)", r.key_line("fraction"));
    }
    require_positive(cfg.absorber.strength, "absorber strength", r.key_line("strength"));
    r.finish();
  }

  {
    Reader r(section("transforms"), "transforms", cfg);
    cfg.transforms.mirror_total = r.quantity("mirror_total", Dimension::energy);
    cfg.transforms.gaussian_fwhm = r.quantity_list("gaussian_fwhm", Dimension::energy);
    cfg.transforms.lorentzian_fwhm = r.quantity_list("lorentzian_fwhm", Dimension::energy);
    cfg.transforms.peak_normalize = r.boolean_or("peak_normalize", false);
    r.finish();
  }

  {
    Reader r(section("output"), "output", cfg);
    cfg.output.directory = r.text_or("directory", "out");
    int sline = r.line();
    const std::string list = r.text_or("spectra", "ker, electron, mirror, norm", &sline);
    static const std::set<std::string> known{"ker", "electron", "mirror", "norm", "coincidence"};
    for (const auto& item : split_list(list)) {
      if (!known.count(item)) {
        throw ConfigError("unknown spectrum '" + item + "'; choose from ker, electron, mirror, norm, coincidence",
                          sline);
      }
      cfg.output.spectra.insert(item);
    }
    cfg.output.checkpoint = r.boolean_or("checkpoint", false);
    cfg.output.per_channel = r.boolean_or("per_channel", cfg.channels.size() > 1);
    r.finish();
  }
  return cfg;
}

ScenarioConfig read_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read scenario file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

namespace {

constexpr std::string_view model_template = R"(# Model system: harmonic decaying state (200 meV), constant width, and the
# Coulomb-explosion final curve 2/R + V_f(inf).
[system]
mu_amu = 13.4177
ground = harmonic
ground_omega_meV = 200
ground_r_eq_angstrom = @REQ@
decaying = harmonic
decaying_omega_meV = 200
decaying_r_eq_angstrom = 3.5
decaying_v_min_eV = 12
gamma_meV = 200

[channel coulomb]
final = coulomb
final_charge_product = 2
final_v_inf_eV = 0
gamma_meV = 200

[radial]
r_min_angstrom = 2.0
r_max_angstrom = 8.0
points = 900

[time]
dt_fs = 0.0025
auto_converge = true
stop_norm = 1e-6

[energy]
ker_min_eV = @KMIN@
ker_max_eV = @KMAX@
ker_step_meV = @KSTEP@
electron_route = spectral

[transforms]
lorentzian_fwhm_meV = 200

[output]
directory = @NAME@
spectra = ker, electron, mirror, norm
)";

std::string fill(std::string text, const std::vector<std::pair<std::string, std::string>>& subs) {
  for (const auto& [k, v] : subs) {
    for (auto pos = text.find(k); pos != std::string::npos; pos = text.find(k, pos + v.size())) {
      text.replace(pos, k.size(), v);
    }
  }
  return text;
}

}  // namespace

std::vector<std::string> preset_names() { return {"fig2a", "fig2b"}; }

std::string preset_text(std::string_view name) {
  if (name == "fig2a") {
    return fill(std::string(model_template),
                {{"@REQ@", "3.5"}, {"@KMIN@", "7.6"}, {"@KMAX@", "9.6"}, {"@KSTEP@", "5"}, {"@NAME@", "fig2a"}});
  }
  if (name == "fig2b") {
    return fill(std::string(model_template),
                {{"@REQ@", "3.3"}, {"@KMIN@", "6.5"}, {"@KMAX@", "14"}, {"@KSTEP@", "10"}, {"@NAME@", "fig2b"}});
  }
  throw ConfigError("unknown preset '" + std::string(name) + "'; available: fig2a, fig2b");
}

}  // namespace decay
