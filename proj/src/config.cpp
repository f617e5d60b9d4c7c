#include "plaque/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace plaque {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void fail(int line, const std::string& msg) {
  if (line > 0) throw ConfigError(line, "line " + std::to_string(line) + ": " + msg);
  throw ConfigError(0, msg);
}

double to_double(std::string_view v, int line, std::string_view key) {
  std::string s = trim(v);
  double scale = 1.0;
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
    scale = std::numbers::pi;
    s = trim(s.substr(0, s.size() - 2));
    if (s.empty()) s = "1";
    if (s.back() == '*') s = trim(s.substr(0, s.size() - 1));
  }
  double x = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(x)) {
    fail(line, "key '" + std::string(key) + "' expects a number, got '" + trim(v) + "'");
  }
  return x * scale;
}

long long to_int(std::string_view v, int line, std::string_view key) {
  const std::string s = trim(v);
  long long x = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(line, "key '" + std::string(key) + "' expects an integer, got '" + s + "'");
  }
  return x;
}

int to_int32(std::string_view v, int line, std::string_view key) {
  const long long x = to_int(v, line, key);
  if (x < -2147483647LL || x > 2147483647LL) {
    fail(line, "key '" + std::string(key) + "' is out of range");
  }
  return static_cast<int>(x);
}

std::uint64_t to_u64(std::string_view v, int line, std::string_view key) {
  const std::string s = trim(v);
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(line, "key '" + std::string(key) + "' expects an unsigned integer, got '" + s + "'");
  }
  return x;
}

bool to_bool(std::string_view v, int line, std::string_view key) {
  const std::string s = trim(v);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  fail(line, "key '" + std::string(key) + "' expects true or false, got '" + s + "'");
}

std::vector<std::string> split_list(std::string_view v) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : v) {
    if (ch == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

std::vector<double> to_double_list(std::string_view v, int line, std::string_view key) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(to_double(item, line, key));
  if (out.empty()) fail(line, "key '" + std::string(key) + "' expects a non-empty list");
  return out;
}

Component to_component(std::string_view v, int line) {
  for (int c = 0; c < kNumComponents; ++c) {
    if (v == kComponentNames[c]) return static_cast<Component>(c);
  }
  fail(line, "unknown field '" + std::string(v) + "' (expected A, S, R, C or E)");
}

template <class F>
auto named(std::string_view v, int line, std::string_view key, F&& from_name) {
  try {
    return from_name(trim(v));
  } catch (const Error& e) {
    fail(line, "key '" + std::string(key) + "': " + e.what());
  }
}

struct Key {
  std::function<void(RunConfig&, std::string_view, int)> set;
  std::function<json(const RunConfig&)> get;
};

using Section = std::map<std::string, Key, std::less<>>;

#define NUM(section_expr, field)                                                         \
  {                                                                                      \
    #field, Key {                                                                        \
      [](RunConfig& c, std::string_view v, int l) { section_expr.field = to_double(v, l, #field); }, \
          [](const RunConfig& c) { return json(section_expr.field); }                    \
    }                                                                                    \
  }
#define INT(section_expr, field)                                                         \
  {                                                                                      \
    #field, Key {                                                                        \
      [](RunConfig& c, std::string_view v, int l) { section_expr.field = to_int32(v, l, #field); }, \
          [](const RunConfig& c) { return json(section_expr.field); }                    \
    }                                                                                    \
  }

Section params_section() {
  return {
      NUM(c.params, beta),  NUM(c.params, zeta),  NUM(c.params, mu),    NUM(c.params, delta),
      NUM(c.params, tau),   NUM(c.params, xi),    NUM(c.params, eta),   NUM(c.params, phi),
      NUM(c.params, theta), NUM(c.params, Theta), NUM(c.params, Omega), NUM(c.params, Xi),
      {"squeeze",
       Key{[](RunConfig& c, std::string_view v, int l) {
             c.params.squeeze = named(v, l, "squeeze", Squeeze::from_name);
           },
           [](const RunConfig& c) { return json(std::string(c.params.squeeze.name())); }}},
  };
}

Section dimensional_section() {
  return {
      NUM((*c.dimensional), alpha), NUM((*c.dimensional), p12),    NUM((*c.dimensional), p31),
      NUM((*c.dimensional), p21),   NUM((*c.dimensional), pC2),    NUM((*c.dimensional), d1),
      NUM((*c.dimensional), d2),    NUM((*c.dimensional), d3),     NUM((*c.dimensional), dC),
      NUM((*c.dimensional), d13),   NUM((*c.dimensional), d23),    NUM((*c.dimensional), b52),
      NUM((*c.dimensional), b62),   NUM((*c.dimensional), r5),     NUM((*c.dimensional), r6),
      NUM((*c.dimensional), R_M),   NUM((*c.dimensional), E_bar),  NUM((*c.dimensional), V_cap),
      NUM((*c.dimensional), W_cap), NUM((*c.dimensional), lambda), NUM((*c.dimensional), sigma),
      NUM((*c.dimensional), gamma), INT((*c.dimensional), n),
      {"squeeze",
       Key{[](RunConfig& c, std::string_view v, int l) {
             c.dimensional->squeeze = named(v, l, "squeeze", Squeeze::from_name);
           },
           [](const RunConfig& c) { return json(std::string(c.dimensional->squeeze.name())); }}},
  };
}

Section grid_section() { return {NUM(c.grid, L), INT(c.grid, N)}; }

Section run_section() {
  return {
      NUM(c.run, t_end),
      NUM(c.run, snapshot_every),
      NUM(c.run, amplitude),
      NUM(c.run, dt_safety),
      NUM(c.run, wall_clock_budget),
      INT(c.run, threads),
      {"seed", Key{[](RunConfig& c, std::string_view v, int l) { c.run.seed = to_u64(v, l, "seed"); },
                   [](const RunConfig& c) { return json(c.run.seed); }}},
      {"scheme", Key{[](RunConfig& c, std::string_view v, int l) {
                       c.run.scheme = named(v, l, "scheme", scheme_from_name);
                     },
                     [](const RunConfig& c) { return json(std::string(to_string(c.run.scheme))); }}},
      {"sensitivity",
       Key{[](RunConfig& c, std::string_view v, int l) {
             c.run.sensitivity = named(v, l, "sensitivity", sensitivity_from_name);
           },
           [](const RunConfig& c) { return json(std::string(to_string(c.run.sensitivity))); }}},
      {"jacobian",
       Key{[](RunConfig& c, std::string_view v, int l) {
             c.run.jacobian = named(v, l, "jacobian", jacobian_form_from_name);
           },
           [](const RunConfig& c) { return json(std::string(to_string(c.run.jacobian))); }}},
      {"record", Key{[](RunConfig& c, std::string_view v, int l) {
                       c.run.record.clear();
                       for (const auto& item : split_list(v)) {
                         const Component comp = to_component(item, l);
                         if (std::find(c.run.record.begin(), c.run.record.end(), comp) !=
                             c.run.record.end()) {
                           fail(l, "field '" + item + "' listed twice in 'record'");
                         }
                         c.run.record.push_back(comp);
                       }
                       if (c.run.record.empty()) fail(l, "'record' needs at least one field");
                     },
                     [](const RunConfig& c) {
                       std::string s;
                       for (auto comp : c.run.record) {
                         if (!s.empty()) s += ",";
                         s += kComponentNames[comp];
                       }
                       return json(s);
                     }}},
      {"heatmap",
       Key{[](RunConfig& c, std::string_view v, int l) { c.run.heatmap = to_bool(v, l, "heatmap"); },
           [](const RunConfig& c) { return json(c.run.heatmap); }}},
  };
}

Section sweep_section() {
  return {
      {"theta_min", Key{[](RunConfig& c, std::string_view v, int l) {
                          c.sweep.theta.lo = to_double(v, l, "theta_min");
                        },
                        [](const RunConfig& c) { return json(c.sweep.theta.lo); }}},
      {"theta_max", Key{[](RunConfig& c, std::string_view v, int l) {
                          c.sweep.theta.hi = to_double(v, l, "theta_max");
                        },
                        [](const RunConfig& c) { return json(c.sweep.theta.hi); }}},
      {"theta_points", Key{[](RunConfig& c, std::string_view v, int l) {
                             c.sweep.theta.points = to_int32(v, l, "theta_points");
                           },
                           [](const RunConfig& c) { return json(c.sweep.theta.points); }}},
      {"xi_min", Key{[](RunConfig& c, std::string_view v, int l) {
                       c.sweep.xi.lo = to_double(v, l, "xi_min");
                     },
                     [](const RunConfig& c) { return json(c.sweep.xi.lo); }}},
      {"xi_max", Key{[](RunConfig& c, std::string_view v, int l) {
                       c.sweep.xi.hi = to_double(v, l, "xi_max");
                     },
                     [](const RunConfig& c) { return json(c.sweep.xi.hi); }}},
      {"xi_points", Key{[](RunConfig& c, std::string_view v, int l) {
                          c.sweep.xi.points = to_int32(v, l, "xi_points");
                        },
                        [](const RunConfig& c) { return json(c.sweep.xi.points); }}},
      {"eps", Key{[](RunConfig& c, std::string_view v, int l) {
                    c.sweep.eps = to_double_list(v, l, "eps");
                  },
                  [](const RunConfig& c) { return json(c.sweep.eps); }}},
      NUM(c.sweep, k2_max),
      INT(c.sweep, k2_points),
      INT(c.sweep, m_max),
  };
}

Section metrics_section() {
  return {NUM(c.metrics, oscillation), NUM(c.metrics, drift),     NUM(c.metrics, variance_growth),
          NUM(c.metrics, early_begin), NUM(c.metrics, early_end), INT(c.metrics, probes)};
}

Section kinetic_section() {
  return {
      INT(c.kinetic, M),
      INT(c.kinetic, M_C),
      NUM(c.kinetic, length),
      INT(c.kinetic, cells),
      NUM(c.kinetic, t_probe),
      NUM(c.kinetic, amplitude),
      NUM(c.kinetic, dt_safety),
      INT(c.kinetic, decay_mode),
      NUM(c.kinetic, decay_eps),
      NUM(c.kinetic, decay_t_end),
      {"transport",
       Key{[](RunConfig& c, std::string_view v, int l) {
             c.kinetic.transport = named(v, l, "transport", transport_from_name);
           },
           [](const RunConfig& c) { return json(std::string(to_string(c.kinetic.transport))); }}},
  };
}

#define STATE(field)                                                                     \
  {                                                                                      \
    #field, Key {                                                                        \
      [](RunConfig& c, std::string_view v, int l) {                                      \
        const auto xs = to_double_list(v, l, #field);                                    \
        if (xs.size() != kNumComponents) {                                               \
          fail(l, "'" #field "' expects 5 multiples of the equilibrium (A,S,R,C,E)");    \
        }                                                                                \
        std::copy(xs.begin(), xs.end(), c.ode.field.begin());                            \
      },                                                                                 \
          [](const RunConfig& c) {                                                       \
            return json(std::vector<double>(c.ode.field.begin(), c.ode.field.end()));    \
          }                                                                              \
    }                                                                                    \
  }

Section ode_section() {
  return {
      NUM(c.ode, t_end),
      NUM(c.ode, dt),
      INT(c.ode, record_every),
      NUM(c.ode, volume),
      NUM(c.ode, appendix_t_end),
      NUM(c.ode, appendix_dt),
      INT(c.ode, harness_points),
      NUM(c.ode, harness_dt_max),
      INT(c.ode, harness_levels),
      NUM(c.ode, harness_t_end),
      STATE(initial),
      STATE(appendix_initial),
  };
}

#undef NUM
#undef INT
#undef STATE

const std::vector<std::pair<std::string, Section>>& sections() {
  static const std::vector<std::pair<std::string, Section>> s = {
      {"params", params_section()},   {"dimensional", dimensional_section()},
      {"grid", grid_section()},       {"run", run_section()},
      {"sweep", sweep_section()},     {"metrics", metrics_section()},
      {"kinetic", kinetic_section()}, {"ode", ode_section()},
  };
  return s;
}

const Section* find_section(std::string_view name) {
  for (const auto& [n, s] : sections()) {
    if (n == name) return &s;
  }
  return nullptr;
}

struct Entry {
  std::string section;
  std::string key;
  std::string value;
  int line;
};

void validate(const RunConfig& c) {
  const auto wrap = [](auto&& fn) {
    try {
      fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(0, e.what());
    }
  };
  wrap([&] {
    if (c.dimensional) {
      c.dimensional->validate();
    } else {
      c.params.validate();
    }
    Grid1D(c.grid.L, c.grid.N);
  });
  if (!(c.run.t_end >= 0.0)) fail(0, "run.t_end must be >= 0");
  if (!(c.run.snapshot_every > 0.0)) fail(0, "run.snapshot_every must be > 0");
  if (!(c.run.dt_safety > 0.0 && c.run.dt_safety <= 1.0)) fail(0, "run.dt_safety must lie in (0, 1]");
  if (!(c.run.amplitude >= 0.0)) fail(0, "run.amplitude must be >= 0");
  if (!(c.run.wall_clock_budget >= 0.0)) fail(0, "run.wall_clock_budget must be >= 0");
  if (c.run.threads < 1) fail(0, "run.threads must be >= 1");
  if (c.sweep.theta.points < 1 || c.sweep.xi.points < 1) fail(0, "sweep points must be >= 1");
  if (c.sweep.k2_points < 2 || !(c.sweep.k2_max > 0.0)) fail(0, "sweep k2 range is empty");
  if (c.sweep.m_max < 1) fail(0, "sweep.m_max must be >= 1");
  if (c.metrics.probes < 1) fail(0, "metrics.probes must be >= 1");
  if (c.kinetic.cells < 16 || !(c.kinetic.length > 0.0)) fail(0, "kinetic grid is invalid");
  if (c.ode.record_every < 1) fail(0, "ode.record_every must be >= 1");
  if (!(c.ode.dt > 0.0) || !(c.ode.appendix_dt > 0.0)) fail(0, "ode steps must be > 0");
  if (!(c.ode.volume > 0.0)) fail(0, "ode.volume must be > 0");
  for (int i = 0; i < kNumComponents; ++i) {
    if (!(c.ode.initial[i] >= 0.0) || !(c.ode.appendix_initial[i] >= 0.0)) {
      fail(0, "ode initial multiples must be >= 0");
    }
  }
}

RunConfig apply(const std::vector<Entry>& entries, std::optional<std::string> preset,
                std::optional<std::string> file_preset, int preset_line) {
  const std::string base = preset ? *preset : file_preset.value_or("paper-pars");
  RunConfig c;
  try {
    c = preset_config(base);
  } catch (const ConfigError& e) {
    fail(preset ? 0 : preset_line, e.what());
  }

  std::map<std::string, std::map<std::string, int>> seen;
  std::set<std::string> present;
  std::map<std::string, int> strict;  // section -> line of `preset = none`
  for (const auto& e : entries) {
    present.insert(e.section);
    auto& keys = seen[e.section];
    if (auto it = keys.find(e.key); it != keys.end()) {
      fail(e.line, "duplicate key '" + e.key + "' in [" + e.section + "] (first set on line " +
                       std::to_string(it->second) + ", again on line " + std::to_string(e.line) +
                       ")");
    }
    keys[e.key] = e.line;
  }
  if (present.count("params") && present.count("dimensional")) {
    fail(seen["dimensional"].begin()->second,
         "[params] and [dimensional] are mutually exclusive parameter blocks");
  }
  if (present.count("dimensional") && !c.dimensional) c.dimensional = DimensionalParams::paper_preset();
  if (present.count("params") && c.dimensional) {
    c.params = c.model();
    c.dimensional.reset();
  }

  for (const auto& e : entries) {
    if ((e.section == "params" || e.section == "dimensional") && e.key == "preset") {
      const std::string v = trim(e.value);
      if (v == "none") {
        strict[e.section] = e.line;
      } else if (v == "paper-pars" && e.section == "params") {
        c.params = ModelParams::paper_preset();
      } else if (v == "paper-dimensional" && e.section == "dimensional") {
        c.dimensional = DimensionalParams::paper_preset();
      } else {
        fail(e.line, "unknown [" + e.section + "] preset '" + v + "'");
      }
      continue;
    }
    const Section* sec = find_section(e.section);
    const auto it = sec->find(e.key);
    if (it == sec->end()) fail(e.line, "unknown key '" + e.key + "' in [" + e.section + "]");
    it->second.set(c, e.value, e.line);
  }
  for (const auto& [section, line] : strict) {
    for (const auto& [key, _] : *find_section(section)) {
      if (key == "squeeze") continue;
      if (!seen[section].count(key)) {
        fail(line, "missing required key '" + key + "' in [" + section + "] (preset = none)");
      }
    }
  }
  c.preset = base;
  validate(c);
  return c;
}

std::string json_scalar(const json& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return v.dump();
  if (v.is_array()) {
    std::string s;
    for (const auto& item : v) {
      if (!s.empty()) s += ",";
      s += json_scalar(item, where);
    }
    return s;
  }
  fail(0, "'" + where + "' must be a number, string, boolean or list");
}

}  // namespace

ModelParams RunConfig::model() const { return dimensional ? nondimensionalize(*dimensional) : params; }

DimensionalParams RunConfig::dimensional_or_preset() const {
  return dimensional ? *dimensional : DimensionalParams::paper_preset();
}

void RunConfig::set_theta(double theta) {
  if (dimensional) {
    dimensional->d2 = theta * dimensional->d3;
  } else {
    params.theta = theta;
  }
}

void RunConfig::set_xi(double xi) {
  if (!(xi >= 0.0) || !std::isfinite(xi)) throw ParameterError("xi must be finite and >= 0");
  if (dimensional) {
    DimensionalParams unit = *dimensional;
    unit.gamma = 1.0;
    dimensional->gamma = xi / nondimensionalize(unit).xi;
  } else {
    params.xi = xi;
  }
}

std::vector<std::string> preset_names() {
  return {"paper-pars", "paper-dimensional", "regime-oscillatory", "regime-mixed", "regime-frozen"};
}

RunConfig preset_config(std::string_view name) {
  RunConfig c;
  c.preset = std::string(name);
  if (name == "paper-pars") return c;
  if (name == "paper-dimensional") {
    c.dimensional = DimensionalParams::paper_preset();
    return c;
  }
  if (name == "regime-oscillatory") {
    c.params.xi = 6.0;
    c.run.t_end = 500;
    return c;
  }
  if (name == "regime-mixed") {
    c.params.xi = 9.0;
    c.run.t_end = 2000;
    c.run.snapshot_every = 2;
    return c;
  }
  if (name == "regime-frozen") {
    c.params.xi = 16.5;
    c.run.t_end = 500;
    return c;
  }
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError(0, "unknown preset '" + std::string(name) + "' (known: " + known + ")");
}

RunConfig parse_config_text(std::string_view text, std::optional<std::string> preset) {
  std::vector<Entry> entries;
  std::optional<std::string> file_preset;
  int preset_line = 0;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  std::set<std::string> opened;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    if (const auto h = s.find_first_of("#;"); h != std::string::npos) s.erase(h);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "malformed section header '" + s + "'");
      section = trim(s.substr(1, s.size() - 2));
      if (!find_section(section)) fail(line, "unknown section [" + section + "]");
      if (!opened.insert(section).second) fail(line, "section [" + section + "] appears twice");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected 'key = value', got '" + s + "'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) fail(line, "missing key before '='");
    if (value.empty()) fail(line, "missing value for key '" + key + "'");
    if (section.empty()) {
      if (key != "preset") fail(line, "key '" + key + "' outside of any section");
      if (file_preset) {
        fail(line, "duplicate key 'preset' (first set on line " + std::to_string(preset_line) +
                       ", again on line " + std::to_string(line) + ")");
      }
      file_preset = value;
      preset_line = line;
      continue;
    }
    entries.push_back({section, key, value, line});
  }
  return apply(entries, std::move(preset), std::move(file_preset), preset_line);
}

RunConfig parse_config_json(const json& j, std::optional<std::string> preset) {
  const json& cfg = j.contains("config") ? j.at("config") : j;
  if (!cfg.is_object()) fail(0, "configuration JSON must be an object");
  std::vector<Entry> entries;
  std::optional<std::string> file_preset;
  for (const auto& [name, body] : cfg.items()) {
    if (name == "preset") {
      if (!body.is_string()) fail(0, "'preset' must be a string");
      file_preset = body.get<std::string>();
      continue;
    }
    if (!find_section(name)) fail(0, "unknown section '" + name + "'");
    if (!body.is_object()) fail(0, "section '" + name + "' must be an object");
    for (const auto& [key, value] : body.items()) {
      entries.push_back({name, key, json_scalar(value, name + "." + key), 0});
    }
  }
  return apply(entries, std::move(preset), std::move(file_preset), 0);
}

RunConfig parse_config(const std::filesystem::path& path, std::optional<std::string> preset) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError(0, "cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  const std::string text = ss.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(0, "invalid JSON in '" + path.string() + "': " + e.what());
    }
    return parse_config_json(j, std::move(preset));
  }
  return parse_config_text(text, std::move(preset));
}

json to_json(const RunConfig& c) {
  json j;
  j["preset"] = c.preset;
  for (const auto& [name, sec] : sections()) {
    if (name == "params" && c.dimensional) continue;
    if (name == "dimensional" && !c.dimensional) continue;
    json body = json::object();
    for (const auto& [key, k] : sec) body[key] = k.get(c);
    j[name] = body;
  }
  return j;
}

}  // namespace plaque
