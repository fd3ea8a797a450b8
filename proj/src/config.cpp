#include "hysmax/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "hysmax/errors.hpp"

namespace hysmax {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(std::string_view key, std::string_view v) {
  v = trim(v);
  if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
  if (v == "-inf") return -std::numeric_limits<double>::infinity();
  if (!v.empty() && v.front() == '+') v.remove_prefix(1);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError(std::string(key) + ": not a number: '" + std::string(v) + "'");
  return out;
}

std::size_t parse_size(std::string_view key, std::string_view v) {
  v = trim(v);
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError(std::string(key) + ": not a non-negative integer: '" + std::string(v) + "'");
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  v = trim(v);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(std::string(key) + ": not a boolean: '" + std::string(v) + "'");
}

Vec3 parse_vec3(std::string_view key, std::string_view v) {
  Vec3 out{};
  std::size_t n = 0;
  while (true) {
    const auto comma = v.find(',');
    if (n == 3) throw ConfigError(std::string(key) + ": expected three comma-separated values");
    out[n++] = parse_double(key, v.substr(0, comma));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  if (n != 3) throw ConfigError(std::string(key) + ": expected three comma-separated values");
  return out;
}

std::string fmt_size(std::size_t v) { return std::to_string(v); }
std::string fmt_bool(bool v) { return v ? "true" : "false"; }

struct Field {
  const char* key;
  std::function<void(AppConfig&, std::string_view)> set;
  std::function<std::string(const AppConfig&)> get;
};

#define HYS_DOUBLE(name, member)                                                         \
  Field {                                                                                \
    name, [](AppConfig& c, std::string_view v) { c.member = parse_double(name, v); },    \
        [](const AppConfig& c) { return format_double(c.member); }                      \
  }
#define HYS_SIZE(name, member)                                                           \
  Field {                                                                                \
    name, [](AppConfig& c, std::string_view v) { c.member = parse_size(name, v); },      \
        [](const AppConfig& c) { return fmt_size(c.member); }                           \
  }
#define HYS_BOOL(name, member)                                                           \
  Field {                                                                                \
    name, [](AppConfig& c, std::string_view v) { c.member = parse_bool(name, v); },      \
        [](const AppConfig& c) { return fmt_bool(c.member); }                           \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      HYS_SIZE("grid.nx", run.grid.nx),
      HYS_SIZE("grid.ny", run.grid.ny),
      HYS_SIZE("grid.nz", run.grid.nz),
      HYS_DOUBLE("grid.lx", run.grid.lx),
      HYS_DOUBLE("grid.ly", run.grid.ly),
      HYS_DOUBLE("grid.lz", run.grid.lz),
      HYS_DOUBLE("grid.cfl_safety", run.grid.cfl_safety),

      HYS_BOOL("material.enabled", run.material.enabled),
      HYS_DOUBLE("material.radius", run.material.radius),
      HYS_DOUBLE("material.center_x", run.material.center_x),
      HYS_DOUBLE("material.center_y", run.material.center_y),
      HYS_DOUBLE("material.transition_width", run.material.transition_width),
      HYS_DOUBLE("material.sigma", run.material.sigma),
      HYS_DOUBLE("material.omega_rpm", omega_rpm),
      HYS_DOUBLE("material.eps_r", run.material.eps_r),

      HYS_DOUBLE("hysteresis.alpha", run.hysteresis.alpha),
      HYS_DOUBLE("hysteresis.beta", run.hysteresis.beta),
      HYS_DOUBLE("hysteresis.xi", run.hysteresis.xi),
      HYS_DOUBLE("hysteresis.kappa", run.hysteresis.kappa),
      HYS_DOUBLE("hysteresis.theta", run.hysteresis.theta),

      HYS_DOUBLE("source.frequency", run.source.frequency),
      HYS_DOUBLE("source.amplitude", run.source.amplitude),
      HYS_DOUBLE("source.ramp_cycles", run.source.ramp_cycles),
      HYS_SIZE("source.wall_layers", run.source.wall_layers),

      HYS_DOUBLE("run.duration", run.duration),
      Field{"run.duration_unit",
            [](AppConfig& c, std::string_view v) {
              try {
                c.run.duration_unit = duration_unit_from_string(trim(v));
              } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("run.duration_unit: ") + e.what());
              }
            },
            [](const AppConfig& c) { return std::string(to_string(c.run.duration_unit)); }},
      Field{"run.scheme",
            [](AppConfig& c, std::string_view v) {
              try {
                c.run.scheme = scheme_from_string(trim(v));
              } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("run.scheme: ") + e.what());
              }
            },
            [](const AppConfig& c) { return std::string(to_string(c.run.scheme)); }},
      HYS_SIZE("run.record_stride", run.record_stride),
      HYS_SIZE("run.diagnostics_stride", run.diagnostics_stride),

      HYS_DOUBLE("point.amplitude", point.amplitude),
      HYS_DOUBLE("point.frequency", point.frequency),
      HYS_DOUBLE("point.periods", point.periods),
      HYS_SIZE("point.steps_per_period", point.steps_per_period),

      Field{"output.dir", [](AppConfig& c, std::string_view v) { c.output.dir = std::string(trim(v)); },
            [](const AppConfig& c) { return c.output.dir; }},
      Field{"output.prefix",
            [](AppConfig& c, std::string_view v) { c.output.prefix = std::string(trim(v)); },
            [](const AppConfig& c) { return c.output.prefix; }},
      HYS_BOOL("output.snapshot", output.snapshot),
  };
  return table;
}

#undef HYS_DOUBLE
#undef HYS_SIZE
#undef HYS_BOOL

bool valid_probe_name(std::string_view name) {
  return !name.empty() && std::all_of(name.begin(), name.end(), [](char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-';
  });
}

void set_probe(AppConfig& cfg, std::string_view name, std::string_view value) {
  if (!valid_probe_name(name))
    throw ConfigError("probes." + std::string(name) + ": probe names use [A-Za-z0-9_-]");
  const Vec3 pos = parse_vec3("probes." + std::string(name), value);
  for (auto& p : cfg.run.probes)
    if (p.name == name) {
      p.position = pos;
      return;
    }
  cfg.run.probes.push_back({std::string(name), pos});
}

// Returns false for meta.* keys, which are ignored.
bool assign(AppConfig& cfg, std::string_view key, std::string_view value) {
  if (key.starts_with("meta.")) return false;
  if (key.starts_with("probes.")) {
    set_probe(cfg, key.substr(7), value);
    return true;
  }
  for (const auto& f : fields())
    if (key == f.key) {
      f.set(cfg, value);
      return true;
    }
  throw ConfigError("unknown key '" + std::string(key) + "'");
}

std::pair<std::string_view, std::string_view> split_assignment(std::string_view line) {
  const auto eq = line.find('=');
  if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'");
  const auto key = trim(line.substr(0, eq));
  if (key.empty()) throw ConfigError("empty key");
  return {key, trim(line.substr(eq + 1))};
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

void AppConfig::resolve() { run.material.omega = omega_rpm * 2.0 * std::numbers::pi / 60.0; }

bool AppConfig::operator==(const AppConfig& other) const {
  for (const auto& f : fields())
    if (f.get(*this) != f.get(other)) return false;
  if (run.probes.size() != other.run.probes.size()) return false;
  for (std::size_t i = 0; i < run.probes.size(); ++i)
    if (run.probes[i].name != other.run.probes[i].name ||
        run.probes[i].position != other.run.probes[i].position)
      return false;
  return run.material.omega == other.run.material.omega;
}

AppConfig default_config() {
  AppConfig cfg;
  cfg.run.probes.push_back({"p0", {2.45, 2.45, 1.36}});
  cfg.resolve();
  return cfg;
}

AppConfig parse_config(std::istream& in, std::string_view origin) {
  AppConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;
    try {
      const auto [key, value] = split_assignment(body);
      if (!key.starts_with("meta.") && !seen.insert(std::string(key)).second)
        throw ConfigError("duplicate key '" + std::string(key) + "'");
      assign(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(origin) + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  cfg.resolve();
  return cfg;
}

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  return parse_config(in, path.string());
}

void apply_override(AppConfig& cfg, std::string_view assignment) {
  try {
    const auto [key, value] = split_assignment(assignment);
    if (key.starts_with("meta.")) throw ConfigError("meta.* keys cannot be overridden");
    assign(cfg, key, value);
  } catch (const ConfigError& e) {
    throw ConfigError("--set " + std::string(assignment) + ": " + e.what());
  }
  cfg.resolve();
}

std::vector<std::string> known_keys() {
  std::vector<std::string> out;
  for (const auto& f : fields()) out.emplace_back(f.key);
  return out;
}

std::string serialize_config(const AppConfig& cfg, const ConsistencyReport* report,
                             std::string_view version) {
  std::ostringstream os;
  std::string_view section;
  for (const auto& f : fields()) {
    const std::string_view key = f.key;
    const auto sec = key.substr(0, key.find('.'));
    if (sec != section) {
      if (!section.empty()) os << '\n';
      os << "# " << sec << '\n';
      section = sec;
    }
    os << key << " = " << f.get(cfg) << '\n';
  }
  os << "\n# probes\n";
  for (const auto& p : cfg.run.probes)
    os << "probes." << p.name << " = " << format_double(p.position[0]) << ", "
       << format_double(p.position[1]) << ", " << format_double(p.position[2]) << '\n';
  if (report || !version.empty()) {
    os << "\n# derived (ignored on input)\n";
    if (!version.empty()) os << "meta.version = " << version << '\n';
    if (report) {
      os << "meta.omega = " << format_double(report->omega) << '\n'
         << "meta.cycles_per_revolution = " << format_double(report->cycles_per_revolution) << '\n'
         << "meta.dt = " << format_double(report->dt) << '\n'
         << "meta.dt_max = " << format_double(report->dt_max) << '\n'
         << "meta.steps_per_period = " << format_double(report->steps_per_period) << '\n'
         << "meta.steps_per_revolution = " << format_double(report->steps_per_revolution) << '\n'
         << "meta.f_lowest = " << format_double(report->f_lowest) << '\n'
         << "meta.drive_over_f_lowest = " << format_double(report->drive_over_f_lowest) << '\n'
         << "meta.rim_speed_ratio_sq = " << format_double(report->rim_speed_ratio_sq) << '\n';
    }
  }
  return os.str();
}

}  // namespace hysmax
