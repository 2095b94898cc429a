#include "lambda_forge/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>

#include "lambda_forge/errors.hpp"

namespace lf::cli {

using nlohmann::json;

namespace {

enum class Dim { none, integer, frequency, inductance, capacitance, time };

const std::map<std::string, double>& units_of(Dim d) {
  static const std::map<std::string, double> none;
  static const std::map<std::string, double> freq = {{"hz", 1.0}, {"khz", 1e3}, {"mhz", 1e6}, {"ghz", 1e9}};
  static const std::map<std::string, double> ind = {{"h", 1.0}, {"uh", 1e-6}, {"nh", 1e-9}, {"ph", 1e-12}};
  static const std::map<std::string, double> cap = {{"f", 1.0}, {"pf", 1e-12}, {"ff", 1e-15}};
  static const std::map<std::string, double> tim = {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}};
  switch (d) {
    case Dim::frequency: return freq;
    case Dim::inductance: return ind;
    case Dim::capacitance: return cap;
    case Dim::time: return tim;
    default: return none;
  }
}

const char* si_suffix(Dim d) {
  switch (d) {
    case Dim::frequency: return "-hz";
    case Dim::inductance: return "-h";
    case Dim::capacitance: return "-f";
    case Dim::time: return "-s";
    default: return "";
  }
}

struct Field {
  const char* section;
  const char* base;
  Dim dim;
};

// Scalar fields. Grids and output are handled separately.
constexpr Field kFields[] = {
    {"circuit", "ej", Dim::frequency},     {"circuit", "ec", Dim::frequency},
    {"circuit", "l-q", Dim::inductance},   {"circuit", "l-r", Dim::inductance},
    {"circuit", "c-r", Dim::capacitance},  {"circuit", "phi-ext", Dim::none},
    {"circuit", "dim-q", Dim::integer},    {"circuit", "dim-r", Dim::integer},
    {"circuit", "levels", Dim::integer},   {"snail", "alpha", Dim::none},
    {"snail", "n", Dim::integer},          {"snail", "ej", Dim::frequency},
    {"snail", "n-array", Dim::integer},    {"snail", "area-ratio", Dim::none},
    {"lambda", "delta-r", Dim::frequency}, {"lambda", "delta", Dim::frequency},
    {"lambda", "chi", Dim::frequency},     {"lambda", "epsilon", Dim::frequency},
    {"lambda", "g3", Dim::frequency},      {"lambda", "kappa", Dim::frequency},
    {"lambda", "t1", Dim::time},           {"lambda", "p-g-th", Dim::none},
    {"lambda", "dim-r", Dim::integer},     {"lambda", "f-q", Dim::frequency},
    {"lambda", "alpha-r", Dim::none},      {"lambda", "cool-g3", Dim::frequency},
    {"lambda", "p-g-init", Dim::none},     {"lambda", "rtol", Dim::none},
    {"lambda", "atol", Dim::none},         {"lambda", "noise-floor", Dim::none},
};

constexpr Field kGrids[] = {
    {"grids", "flux", Dim::none},          {"grids", "spectroscopy-flux", Dim::none},
    {"grids", "drive", Dim::frequency},    {"grids", "detuning", Dim::frequency},
    {"grids", "time", Dim::time},          {"grids", "cool-time", Dim::time},
};

const std::set<std::string> kSections = {"circuit", "snail", "lambda", "grids", "output"};

template <std::size_t N>
std::optional<Field> find_field(const Field (&table)[N], const std::string& section, const std::string& base) {
  for (const Field& f : table) {
    if (section == f.section && base == f.base) return f;
  }
  return std::nullopt;
}

struct KeyMatch {
  Field field;
  double scale = 1.0;
};

/// Split `key` into a known base and unit suffix. Exact base names mean SI.
template <std::size_t N>
std::optional<KeyMatch> match_key(const Field (&table)[N], const std::string& section, const std::string& key) {
  if (auto f = find_field(table, section, key)) return KeyMatch{*f, 1.0};
  const auto dash = key.rfind('-');
  if (dash == std::string::npos) return std::nullopt;
  auto f = find_field(table, section, key.substr(0, dash));
  if (!f) return std::nullopt;
  const auto& units = units_of(f->dim);
  const auto u = units.find(key.substr(dash + 1));
  if (u == units.end()) return std::nullopt;
  return KeyMatch{*f, u->second};
}

std::string path(const std::string& section, const std::string& key) { return section + "." + key; }

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + ": expected a number, got " + v.dump());
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(where + ": not finite");
  return x;
}

double integer(const json& v, const std::string& where) {
  const double x = number(v, where);
  if (x != std::floor(x)) throw ConfigError(where + ": expected an integer, got " + v.dump());
  return x;
}

std::vector<double> grid_values(const json& v, double scale, const std::string& where) {
  std::vector<double> out;
  if (v.is_array()) {
    for (const auto& e : v) out.push_back(number(e, where) * scale);
  } else if (v.is_object()) {
    for (const auto& [k, _] : v.items()) {
      if (k != "start" && k != "stop" && k != "count") {
        throw ConfigError(where + ": unknown key '" + k + "' (expected start, stop, count)");
      }
    }
    if (!v.contains("start") || !v.contains("stop") || !v.contains("count")) {
      throw ConfigError(where + ": range needs start, stop and count");
    }
    const double a = number(v["start"], where + ".start") * scale;
    const double b = number(v["stop"], where + ".stop") * scale;
    const double n = integer(v["count"], where + ".count");
    if (n < 2) throw ConfigError(where + ": count must be >= 2, got " + v["count"].dump());
    const auto count = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i < count; ++i) {
      out.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
  } else {
    throw ConfigError(where + ": expected an array or {start, stop, count}");
  }
  if (out.size() < 2) {
    throw ConfigError(where + ": grid needs at least 2 points, got " + std::to_string(out.size()));
  }
  return out;
}

json parse_override_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return text;
  }
}

/// Removes any key in `sec` that names the same field as `key` under another unit.
template <std::size_t N>
void erase_aliases(json& sec, const Field (&table)[N], const std::string& section, const std::string& key) {
  const auto m = match_key(table, section, key);
  if (!m) return;
  std::vector<std::string> drop;
  for (const auto& [k, _] : sec.items()) {
    const auto o = match_key(table, section, k);
    if (o && std::string(o->field.base) == m->field.base) drop.push_back(k);
  }
  for (const auto& k : drop) sec.erase(k);
}

void apply_override(json& raw, const std::string& dotted, const std::string& value) {
  const auto dot = dotted.find('.');
  if (dot == std::string::npos) throw ConfigError("override '--" + dotted + "': expected --section.key");
  const std::string section = dotted.substr(0, dot);
  const std::string key = dotted.substr(dot + 1);
  if (!kSections.count(section)) throw ConfigError("override '--" + dotted + "': unknown section '" + section + "'");
  json& sec = raw[section];
  if (!sec.is_object()) sec = json::object();
  if (section == "grids") {
    erase_aliases(sec, kGrids, section, key);
  } else if (section != "output") {
    erase_aliases(sec, kFields, section, key);
  }
  sec[key] = parse_override_value(value);
}

}  // namespace

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a(resolved.dump()); }

json default_tree() {
  const CircuitSpec c = CircuitSpec::calibrated_defaults();
  json t;
  t["circuit"] = {{"ej-hz", c.ej_f},   {"ec-hz", c.ec_f},         {"l-q-h", c.l_q},
                  {"l-r-h", c.l_r},    {"c-r-f", c.c_r},          {"phi-ext", c.phi_ext_f},
                  {"dim-q", c.dim_q},  {"dim-r", c.dim_r},        {"levels", 6}};
  t["snail"] = {{"alpha", c.snail_alpha}, {"n", c.snail_n}, {"ej-hz", c.snail_ej},
                {"n-array", c.n_array},   {"area-ratio", c.area_ratio}};
  t["lambda"] = {{"delta-r-mhz", 150},   {"delta-mhz", 0},   {"chi-mhz", 0.7},   {"epsilon-mhz", 50.8},
                 {"g3-mhz", 3},          {"kappa-mhz", 16.8}, {"t1-us", 5.7},    {"p-g-th", 0.6},
                 {"dim-r", 6},           {"f-q-mhz", 500},   {"alpha-r", 0.02},  {"cool-g3-mhz", 0.87},
                 {"p-g-init", 0.94},     {"rtol", 1e-8},     {"atol", 1e-10},
                 {"noise-floor", 1e-4}};
  t["grids"] = {{"flux", {{"start", 0.5}, {"stop", 6.5}, {"count", 61}}},
                {"spectroscopy-flux", {{"start", 6.4}, {"stop", 6.6}, {"count", 21}}},
                {"drive-mhz", {{"start", 7286.8}, {"stop", 7290.8}, {"count", 41}}},
                {"detuning-mhz", {{"start", -1}, {"stop", 1}, {"count", 21}}},
                {"time-us", {{"start", 0}, {"stop", 2}, {"count", 200}}},
                {"cool-time-us", {{"start", 0}, {"stop", 5}, {"count", 101}}}};
  t["output"] = {{"directory", "out"}, {"formats", {"csv", "json", "svg"}}};
  return t;
}

ExperimentConfig resolve(const json& raw_in, const Overrides& overrides, const std::string& output_env) {
  if (!raw_in.is_object()) throw ConfigError("config: top level must be an object");
  json raw = raw_in;
  bool output_overridden = false;
  for (const auto& [k, v] : overrides) {
    apply_override(raw, k, v);
    if (k == "output.directory") output_overridden = true;
  }
  for (const auto& [section, _] : raw.items()) {
    if (!kSections.count(section)) throw ConfigError("config: unknown section '" + section + "'");
  }

  // Start from defaults in SI, then overlay the user tree.
  std::map<std::string, double> scalars;
  std::map<std::string, std::vector<double>> grids;
  const json defaults = default_tree();
  auto absorb = [&](const json& tree, bool user) {
    std::set<std::string> seen;
    for (const auto& [section, body] : tree.items()) {
      if (section == "output") continue;
      if (!body.is_object()) throw ConfigError("config: section '" + section + "' must be an object");
      for (const auto& [key, value] : body.items()) {
        const std::string where = path(section, key);
        if (section == "grids") {
          const auto m = match_key(kGrids, section, key);
          if (!m) throw ConfigError("config: unknown key '" + where + "'");
          const std::string name = path(section, m->field.base);
          if (user && !seen.insert(name).second) throw ConfigError("config: '" + name + "' given twice");
          grids[name] = grid_values(value, m->scale, where);
          continue;
        }
        const auto m = match_key(kFields, section, key);
        if (!m) throw ConfigError("config: unknown key '" + where + "'");
        const std::string name = path(section, m->field.base);
        if (user && !seen.insert(name).second) throw ConfigError("config: '" + name + "' given twice");
        if (m->field.dim == Dim::integer) {
          scalars[name] = integer(value, where);
        } else {
          scalars[name] = number(value, where) * m->scale;
        }
      }
    }
  };
  absorb(defaults, false);
  absorb(raw, true);

  ExperimentConfig cfg;
  cfg.output.directory = defaults["output"]["directory"].get<std::string>();
  if (raw.contains("output")) {
    const json& out = raw["output"];
    if (!out.is_object()) throw ConfigError("config: section 'output' must be an object");
    for (const auto& [k, v] : out.items()) {
      if (k == "directory") {
        if (!v.is_string() || v.get<std::string>().empty()) {
          throw ConfigError("output.directory: expected a non-empty string");
        }
        cfg.output.directory = v.get<std::string>();
      } else if (k == "formats") {
        if (!v.is_array()) throw ConfigError("output.formats: expected an array");
        cfg.output.svg = false;
        for (const auto& f : v) {
          const std::string s = f.is_string() ? f.get<std::string>() : f.dump();
          if (s == "svg") {
            cfg.output.svg = true;
          } else if (s != "csv" && s != "json") {
            throw ConfigError("output.formats: unknown format '" + s + "' (csv, json, svg)");
          }
        }
      } else {
        throw ConfigError("config: unknown key 'output." + k + "'");
      }
    }
  }
  if (!output_env.empty() && !output_overridden) cfg.output.directory = output_env;

  auto get = [&](const std::string& name) { return scalars.at(name); };
  auto count = [&](const std::string& name, double lo) {
    const double v = get(name);
    if (v < lo) throw ConfigError(name + ": must be >= " + std::to_string(static_cast<int>(lo)));
    return v;
  };
  auto positive = [&](const std::string& name) {
    const double v = get(name);
    if (!(v > 0.0)) throw ConfigError(name + ": must be positive");
    return v;
  };

  CircuitSpec& c = cfg.circuit;
  c.ej_f = positive("circuit.ej");
  c.ec_f = positive("circuit.ec");
  c.l_q = positive("circuit.l-q");
  c.l_r = get("circuit.l-r");
  if (c.l_r < 0.0) throw ConfigError("circuit.l-r: must be >= 0");
  c.c_r = positive("circuit.c-r");
  c.phi_ext_f = get("circuit.phi-ext");
  c.dim_q = static_cast<std::size_t>(count("circuit.dim-q", 20));
  c.dim_r = static_cast<std::size_t>(count("circuit.dim-r", 3));
  cfg.levels = static_cast<std::size_t>(count("circuit.levels", 2));
  c.snail_alpha = get("snail.alpha");
  c.snail_n = static_cast<int>(count("snail.n", 1));
  c.snail_ej = positive("snail.ej");
  c.n_array = static_cast<int>(count("snail.n-array", 1));
  c.area_ratio = positive("snail.area-ratio");
  if (cfg.levels > c.dim_q * c.dim_r) throw ConfigError("circuit.levels: exceeds the Hilbert-space dimension");

  LambdaSettings& l = cfg.lambda;
  LambdaParams& p = l.params;
  p.delta_r = get("lambda.delta-r");
  p.delta = get("lambda.delta");
  p.chi = get("lambda.chi");
  p.epsilon = get("lambda.epsilon");
  p.g3 = get("lambda.g3");
  if (p.g3 < 0.0) throw ConfigError("lambda.g3: must be >= 0");
  p.kappa = positive("lambda.kappa");
  p.dim_r = static_cast<std::size_t>(count("lambda.dim-r", 4));
  l.t1 = positive("lambda.t1");
  l.p_g_th = get("lambda.p-g-th");
  if (l.p_g_th < 0.0 || l.p_g_th > 1.0) throw ConfigError("lambda.p-g-th: must lie in [0, 1]");
  l.f_q = positive("lambda.f-q");
  l.alpha_r = get("lambda.alpha-r");
  if (l.alpha_r < 0.0) throw ConfigError("lambda.alpha-r: must be >= 0");
  l.cool_g3 = get("lambda.cool-g3");
  if (l.cool_g3 < 0.0) throw ConfigError("lambda.cool-g3: must be >= 0");
  l.p_g_init = get("lambda.p-g-init");
  if (l.p_g_init < 0.0 || l.p_g_init > 1.0) throw ConfigError("lambda.p-g-init: must lie in [0, 1]");
  l.noise_floor = get("lambda.noise-floor");
  if (l.noise_floor < 0.0) throw ConfigError("lambda.noise-floor: must be >= 0");
  l.integrator.rtol = positive("lambda.rtol");
  l.integrator.atol = positive("lambda.atol");
  const BathRates b = bath_rates(l.gamma_1(), l.p_g_th);
  p.gamma_up = b.gamma_up;
  p.gamma_down = b.gamma_down;

  try {
    c.validate();
    p.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  cfg.grids.flux = grids.at("grids.flux");
  cfg.grids.spectroscopy_flux = grids.at("grids.spectroscopy-flux");
  cfg.grids.drive = grids.at("grids.drive");
  cfg.grids.detuning = grids.at("grids.detuning");
  cfg.grids.time = grids.at("grids.time");
  cfg.grids.cool_time = grids.at("grids.cool-time");
  for (const auto* name : {"grids.time", "grids.cool-time"}) {
    const auto& t = grids.at(name);
    for (std::size_t i = 1; i < t.size(); ++i) {
      if (!(t[i] > t[i - 1])) throw ConfigError(std::string(name) + ": times must be strictly increasing");
    }
  }

  // Canonical form: every field, SI suffix, grids expanded.
  json& r = cfg.resolved;
  for (const Field& f : kFields) {
    const std::string name = path(f.section, f.base);
    const double v = scalars.at(name);
    if (f.dim == Dim::integer) {
      r[f.section][f.base] = static_cast<long long>(v);
    } else {
      r[f.section][std::string(f.base) + si_suffix(f.dim)] = v;
    }
  }
  for (const Field& f : kGrids) {
    r["grids"][std::string(f.base) + si_suffix(f.dim)] = grids.at(path(f.section, f.base));
  }
  r["output"]["directory"] = cfg.output.directory;
  r["output"]["formats"] = cfg.output.svg ? json{"csv", "json", "svg"} : json{"csv", "json"};
  return cfg;
}

ExperimentConfig load(const std::string& file, const Overrides& overrides, const std::string& output_env) {
  if (file.empty()) return resolve(json::object(), overrides, output_env);
  std::ifstream in(file);
  if (!in) throw ConfigError("config: cannot open '" + file + "'");
  json raw;
  try {
    raw = json::parse(in, nullptr, true, false);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: '" + file + "' is not valid JSON: " + e.what());
  }
  return resolve(raw, overrides, output_env);
}

}  // namespace lf::cli
