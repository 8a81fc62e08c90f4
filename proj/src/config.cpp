#include "bqm/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "bqm/errors.hpp"

namespace bqm {

namespace {

struct Value {
  std::string text;
  int line;
  int column;
};

using Setter = std::function<void(RunConfig&, const Value&)>;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const Value& v) {
  double out = 0.0;
  const char* first = v.text.data();
  const char* last = first + v.text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || !std::isfinite(out)) {
    throw ConfigError("expected a finite number, got '" + v.text + "'", v.line, v.column);
  }
  return out;
}

long long to_integer(const Value& v) {
  long long out = 0;
  const char* first = v.text.data();
  const char* last = first + v.text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) throw ConfigError("expected an integer, got '" + v.text + "'", v.line, v.column);
  return out;
}

std::size_t to_count(const Value& v) {
  const long long n = to_integer(v);
  if (n < 0) throw ConfigError("expected a nonnegative integer, got '" + v.text + "'", v.line, v.column);
  return static_cast<std::size_t>(n);
}

std::string to_word(const Value& v, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (v.text == a) return v.text;
  }
  std::string list;
  for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
  throw ConfigError("unknown value '" + v.text + "' (expected one of: " + list + ")", v.line, v.column);
}

std::vector<Value> split_list(const Value& v) {
  std::vector<Value> out;
  if (trim(v.text).empty()) return out;
  std::size_t start = 0;
  while (start <= v.text.size()) {
    const auto comma = v.text.find(',', start);
    const std::size_t end = comma == std::string::npos ? v.text.size() : comma;
    const std::string raw = v.text.substr(start, end - start);
    const auto lead = raw.find_first_not_of(" \t");
    const int col = v.column + static_cast<int>(start + (lead == std::string::npos ? 0 : lead));
    out.push_back(Value{trim(raw), v.line, col});
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<double> to_doubles(const Value& v) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(to_double(item));
  return out;
}

std::vector<cplx> to_complexes(const Value& v) {
  std::vector<cplx> out;
  for (const auto& item : split_list(v)) {
    const auto colon = item.text.find(':');
    if (colon == std::string::npos) {
      out.emplace_back(to_double(item), 0.0);
      continue;
    }
    const Value re{item.text.substr(0, colon), item.line, item.column};
    const Value im{item.text.substr(colon + 1), item.line, item.column + static_cast<int>(colon) + 1};
    out.emplace_back(to_double(re), to_double(im));
  }
  return out;
}

const std::map<std::string, std::map<std::string, Setter>>& schema() {
  static const std::map<std::string, std::map<std::string, Setter>> table{
      {"equation",
       {
           {"type",
            [](RunConfig& c, const Value& v) {
              c.equation.type = to_word(v, {"schrodinger", "dirac", "dirac-free", "kg-canonical", "kg-nonrel",
                                            "kg-5d", "maxwell", "zero", "companion"});
            }},
           {"mass", [](RunConfig& c, const Value& v) { c.equation.mass = to_double(v); }},
           {"charge", [](RunConfig& c, const Value& v) { c.equation.charge = to_double(v); }},
           {"hbar", [](RunConfig& c, const Value& v) { c.equation.hbar = to_double(v); }},
           {"c", [](RunConfig& c, const Value& v) { c.equation.c = to_double(v); }},
           {"coefficients", [](RunConfig& c, const Value& v) { c.equation.coefficients = to_doubles(v); }},
           {"components", [](RunConfig& c, const Value& v) { c.equation.components = to_count(v); }},
       }},
      {"grid",
       {
           {"points", [](RunConfig& c, const Value& v) { c.grid.points = to_count(v); }},
           {"length", [](RunConfig& c, const Value& v) { c.grid.length = to_double(v); }},
           {"boundary",
            [](RunConfig& c, const Value& v) {
              c.grid.boundary = to_word(v, {"periodic", "reflecting"}) == "periodic" ? Boundary::periodic
                                                                                    : Boundary::reflecting;
            }},
       }},
      {"time",
       {
           {"start", [](RunConfig& c, const Value& v) { c.time.start = to_double(v); }},
           {"stop", [](RunConfig& c, const Value& v) { c.time.stop = to_double(v); }},
           {"step", [](RunConfig& c, const Value& v) { c.time.step = to_double(v); }},
           {"scheme",
            [](RunConfig& c, const Value& v) {
              c.time.scheme = to_word(v, {"crank-nicolson", "midpoint-exponential"});
            }},
       }},
      {"initial",
       {
           {"kind",
            [](RunConfig& c, const Value& v) { c.initial.kind = to_word(v, {"plane-wave", "gaussian", "samples"}); }},
           {"mode", [](RunConfig& c, const Value& v) { c.initial.mode = static_cast<int>(to_integer(v)); }},
           {"spinor", [](RunConfig& c, const Value& v) { c.initial.spinor = to_word(v, {"positive", "negative"}); }},
           {"width", [](RunConfig& c, const Value& v) { c.initial.width = to_double(v); }},
           {"center", [](RunConfig& c, const Value& v) { c.initial.center = to_double(v); }},
           {"momentum", [](RunConfig& c, const Value& v) { c.initial.momentum = to_double(v); }},
           {"component", [](RunConfig& c, const Value& v) { c.initial.component = to_count(v); }},
           {"samples", [](RunConfig& c, const Value& v) { c.initial.samples = to_complexes(v); }},
       }},
      {"potential",
       {
           {"kind",
            [](RunConfig& c, const Value& v) {
              c.potential.kind = to_word(v, {"none", "constant", "harmonic", "samples"});
            }},
           {"phi", [](RunConfig& c, const Value& v) { c.potential.phi = to_double(v); }},
           {"a1", [](RunConfig& c, const Value& v) { c.potential.a1 = to_double(v); }},
           {"strength", [](RunConfig& c, const Value& v) { c.potential.strength = to_double(v); }},
           {"center", [](RunConfig& c, const Value& v) { c.potential.center = to_double(v); }},
           {"phi-samples", [](RunConfig& c, const Value& v) { c.potential.phi_samples = to_doubles(v); }},
           {"a1-samples", [](RunConfig& c, const Value& v) { c.potential.a1_samples = to_doubles(v); }},
       }},
      {"trivialization",
       {
           {"kind",
            [](RunConfig& c, const Value& v) {
              c.trivialization.kind = to_word(v, {"identity", "constant-unitary", "phase-field"});
            }},
           {"angle", [](RunConfig& c, const Value& v) { c.trivialization.angle = to_double(v); }},
           {"amplitude", [](RunConfig& c, const Value& v) { c.trivialization.amplitude = to_double(v); }},
           {"wavenumber", [](RunConfig& c, const Value& v) { c.trivialization.wavenumber = to_double(v); }},
           {"component", [](RunConfig& c, const Value& v) { c.trivialization.component = to_count(v); }},
       }},
      {"output",
       {
           {"every", [](RunConfig& c, const Value& v) { c.output.every = to_count(v); }},
           {"observables",
            [](RunConfig& c, const Value& v) {
              c.output.observables.clear();
              for (const auto& item : split_list(v)) {
                c.output.observables.push_back(to_word(item, {"energy", "charge", "frequency", "position"}));
              }
            }},
           {"directory", [](RunConfig& c, const Value& v) { c.output.directory = v.text; }},
       }},
  };
  return table;
}

void validate(const RunConfig& c, const std::set<std::string>& seen) {
  for (const char* required : {"equation.type", "grid.points", "grid.length", "time.stop", "time.step"}) {
    if (!seen.count(required)) throw ConfigError(std::string("missing required key '") + required + "'");
  }
  const auto& e = c.equation;
  if (!(e.hbar > 0.0) || !(e.c > 0.0)) throw ConfigError("hbar and c must be positive");
  if ((e.type == "schrodinger" || e.type == "kg-5d" || e.type == "kg-nonrel") && !(e.mass > 0.0)) {
    throw ConfigError("equation '" + e.type + "' needs mass > 0");
  }
  if (e.type == "companion" && e.coefficients.empty()) throw ConfigError("companion equation needs coefficients");
  if (e.type == "zero" && e.components == 0) throw ConfigError("zero equation needs components >= 1");
  const auto& g = c.grid;
  if (g.points < 8) throw ConfigError("grid needs at least 8 points");
  if (g.boundary == Boundary::periodic && (g.points & (g.points - 1)) != 0) {
    throw ConfigError("periodic grids need a power-of-two point count, got " + std::to_string(g.points));
  }
  if (!(g.length > 0.0)) throw ConfigError("grid length must be positive");
  if (!(c.time.step > 0.0)) throw ConfigError("time step must be positive");
  if (!(c.time.stop >= c.time.start)) throw ConfigError("time stop must not precede start");
  const std::size_t m = state_components(c);
  if (c.initial.kind == "samples" && c.initial.samples.size() != m * g.points) {
    throw ConfigError("initial samples: expected " + std::to_string(m * g.points) + " values (components x points), got " +
                      std::to_string(c.initial.samples.size()));
  }
  if (c.initial.component >= m) throw ConfigError("initial component exceeds the state's component count");
  if (c.initial.kind == "gaussian" && !(c.initial.width > 0.0)) throw ConfigError("gaussian width must be positive");
  if (c.potential.kind == "samples") {
    if (c.potential.phi_samples.size() != g.points ||
        (!c.potential.a1_samples.empty() && c.potential.a1_samples.size() != g.points)) {
      throw ConfigError("potential samples need one value per grid point");
    }
  }
  if (c.trivialization.component >= m) throw ConfigError("trivialization component exceeds the component count");
  if (c.trivialization.kind == "constant-unitary" && m < 2) {
    throw ConfigError("constant-unitary trivialization needs at least 2 components");
  }
  if (c.output.every == 0) throw ConfigError("output cadence 'every' must be at least 1");
}

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string fmt_list(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + fmt(xs[i]);
  return out;
}

}  // namespace

std::size_t state_components(const RunConfig& c) {
  const auto& t = c.equation.type;
  if (t == "schrodinger") return 1;
  if (t == "dirac" || t == "dirac-free" || t == "maxwell") return 4;
  if (t == "kg-canonical" || t == "kg-nonrel") return 2;
  if (t == "kg-5d") return 5;
  if (t == "zero") return c.equation.components;
  if (t == "companion") return c.equation.coefficients.size();
  throw ConfigError("unknown equation type '" + t + "'");
}

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = hash == std::string::npos ? raw : raw.substr(0, hash);
    const std::string content = trim(body);
    if (content.empty()) continue;
    const int indent = static_cast<int>(body.find_first_not_of(" \t")) + 1;
    if (content.front() == '[') {
      if (content.back() != ']') throw ConfigError("unterminated section header", line, indent);
      section = trim(content.substr(1, content.size() - 2));
      if (!schema().count(section)) {
        std::string names;
        for (const auto& [name, keys] : schema()) names += (names.empty() ? "" : ", ") + name;
        throw ConfigError("unknown section [" + section + "] (sections: " + names + ")", line, indent + 1);
      }
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line, indent);
    const std::string key = trim(body.substr(0, eq));
    if (key.empty()) throw ConfigError("missing key before '='", line, static_cast<int>(eq) + 1);
    std::string value_raw = body.substr(eq + 1);
    const auto lead = value_raw.find_first_not_of(" \t");
    const int value_col = static_cast<int>(eq) + 2 + static_cast<int>(lead == std::string::npos ? 0 : lead);
    const Value value{trim(value_raw), line, value_col};
    std::string sec = section;
    std::string name = key;
    if (sec.empty()) {
      if (key != "equation") throw ConfigError("key '" + key + "' outside any section", line, indent);
      sec = "equation";
      name = "type";
    }
    const auto& keys = schema().at(sec);
    const auto it = keys.find(name);
    if (it == keys.end()) {
      throw ConfigError("unknown key '" + key + "' in section [" + sec + "]", line, indent);
    }
    const std::string full = sec + "." + name;
    if (seen.count(full)) throw ConfigError("duplicate key '" + key + "' in section [" + sec + "]", line, indent);
    seen.insert(full);
    if (value.text.empty() && name != "observables" && name != "samples") {
      throw ConfigError("empty value for key '" + key + "'", line, value_col);
    }
    it->second(config, value);
  }
  validate(config, seen);
  return config;
}

std::string emit_config(const RunConfig& c) {
  std::ostringstream os;
  os << "[equation]\n";
  os << "type = " << c.equation.type << "\n";
  os << "mass = " << fmt(c.equation.mass) << "\n";
  os << "charge = " << fmt(c.equation.charge) << "\n";
  os << "hbar = " << fmt(c.equation.hbar) << "\n";
  os << "c = " << fmt(c.equation.c) << "\n";
  if (!c.equation.coefficients.empty()) os << "coefficients = " << fmt_list(c.equation.coefficients) << "\n";
  os << "components = " << c.equation.components << "\n";
  os << "\n[grid]\n";
  os << "points = " << c.grid.points << "\n";
  os << "length = " << fmt(c.grid.length) << "\n";
  os << "boundary = " << (c.grid.boundary == Boundary::periodic ? "periodic" : "reflecting") << "\n";
  os << "\n[time]\n";
  os << "start = " << fmt(c.time.start) << "\n";
  os << "stop = " << fmt(c.time.stop) << "\n";
  os << "step = " << fmt(c.time.step) << "\n";
  os << "scheme = " << c.time.scheme << "\n";
  os << "\n[initial]\n";
  os << "kind = " << c.initial.kind << "\n";
  os << "mode = " << c.initial.mode << "\n";
  os << "spinor = " << c.initial.spinor << "\n";
  os << "width = " << fmt(c.initial.width) << "\n";
  os << "center = " << fmt(c.initial.center) << "\n";
  os << "momentum = " << fmt(c.initial.momentum) << "\n";
  os << "component = " << c.initial.component << "\n";
  if (!c.initial.samples.empty()) {
    os << "samples = ";
    for (std::size_t i = 0; i < c.initial.samples.size(); ++i) {
      os << (i ? ", " : "") << fmt(c.initial.samples[i].real()) << ":" << fmt(c.initial.samples[i].imag());
    }
    os << "\n";
  }
  os << "\n[potential]\n";
  os << "kind = " << c.potential.kind << "\n";
  os << "phi = " << fmt(c.potential.phi) << "\n";
  os << "a1 = " << fmt(c.potential.a1) << "\n";
  os << "strength = " << fmt(c.potential.strength) << "\n";
  os << "center = " << fmt(c.potential.center) << "\n";
  if (!c.potential.phi_samples.empty()) os << "phi-samples = " << fmt_list(c.potential.phi_samples) << "\n";
  if (!c.potential.a1_samples.empty()) os << "a1-samples = " << fmt_list(c.potential.a1_samples) << "\n";
  os << "\n[trivialization]\n";
  os << "kind = " << c.trivialization.kind << "\n";
  os << "angle = " << fmt(c.trivialization.angle) << "\n";
  os << "amplitude = " << fmt(c.trivialization.amplitude) << "\n";
  os << "wavenumber = " << fmt(c.trivialization.wavenumber) << "\n";
  os << "component = " << c.trivialization.component << "\n";
  os << "\n[output]\n";
  os << "every = " << c.output.every << "\n";
  os << "observables = ";
  for (std::size_t i = 0; i < c.output.observables.size(); ++i) os << (i ? ", " : "") << c.output.observables[i];
  os << "\n";
  os << "directory = " << c.output.directory << "\n";
  return os.str();
}

}  // namespace bqm
