#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fracpq::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
}

long to_long(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long x = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  std::string s = v;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split(v, ',')) {
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  return out;
}

}  // namespace

IniTable parse_ini(const std::string& text) {
  IniTable table;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": bad section");
      section = trim(line.substr(1, line.size() - 2));
      table[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    if (section.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": key outside a section");
    }
    std::string value = line.substr(eq + 1);
    // Inline comments need leading whitespace so "csv:a;b" style values survive.
    for (const char* marker : {" ;", " #", "\t;", "\t#"}) {
      const auto c = value.find(marker);
      if (c != std::string::npos) value.erase(c);
    }
    table[section][trim(line.substr(0, eq))] = trim(value);
  }
  return table;
}

IniTable read_ini_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_ini(buf.str());
}

void apply_override(IniTable& table, const std::string& arg) {
  std::string s = arg;
  if (s.rfind("--", 0) == 0) s = s.substr(2);
  const auto eq = s.find('=');
  const auto dot = s.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
    throw ConfigError("unrecognized argument '" + arg + "' (expected --section.key=value)");
  }
  table[s.substr(0, dot)][s.substr(dot + 1, eq - dot - 1)] = s.substr(eq + 1);
}

RunConfig config_from_table(const IniTable& table) {
  RunConfig c;
  for (const auto& [section, entries] : table) {
    for (const auto& [key, v] : entries) {
      const std::string k = section + "." + key;
      if (k == "domain.lo") c.lo = to_double(k, v);
      else if (k == "domain.hi") c.hi = to_double(k, v);
      else if (k == "domain.n") c.n = to_long(k, v);
      else if (k == "params.alpha") c.params.alpha = to_double(k, v);
      else if (k == "params.beta") c.params.beta = to_double(k, v);
      else if (k == "params.p") c.params.p = to_double(k, v);
      else if (k == "params.q") c.params.q = to_double(k, v);
      else if (k == "params.regime") {
        try {
          c.params.regime = regime_from_string(v);
        } catch (const std::exception& e) {
          throw ConfigError(k + ": " + e.what());
        }
      }
      else if (k == "weights.a") c.a_spec = v;
      else if (k == "weights.b") c.b_spec = v;
      else if (k == "solver.tol_quotient") c.solver.tol_quotient = to_double(k, v);
      else if (k == "solver.tol_residual") c.solver.tol_residual = to_double(k, v);
      else if (k == "solver.max_iter") c.solver.max_iter = static_cast<int>(to_long(k, v));
      else if (k == "solver.seed") c.solver.seed = static_cast<unsigned>(to_long(k, v));
      else if (k == "solver.n_starts") c.n_starts = static_cast<int>(to_long(k, v));
      else if (k == "solver.tol_formula") c.solver.tol_formula = to_double(k, v);
      else if (k == "solver.tol_tie") c.solver.tol_tie = to_double(k, v);
      else if (k == "solver.ray_escape_ratio") c.solver.ray_escape_ratio = to_double(k, v);
      else if (k == "solve.lambda") c.lambda = to_double(k, v);
      else if (k == "solve.lambda_factor") c.lambda_factor = to_double(k, v);
      else if (k == "sweep.lambda_min") c.lambda_min = to_double(k, v);
      else if (k == "sweep.lambda_max") c.lambda_max = to_double(k, v);
      else if (k == "sweep.steps") c.steps = static_cast<int>(to_long(k, v));
      else if (k == "mountain.path_points") c.path_points = static_cast<int>(to_long(k, v));
      else if (k == "rn.radii") c.radii = to_doubles(k, v);
      else if (k == "rn.cells_per_unit") c.cells_per_unit = to_double(k, v);
      else if (k == "rn.lambda_factors") c.lambda_factors = to_doubles(k, v);
      else if (k == "rn.family_radius") c.family_radius = to_double(k, v);
      else if (k == "rn.weight") c.rn_weight = v;
      else if (k == "verify.samples") c.samples = to_long(k, v);
      else if (k == "verify.suites") {
        c.suites.clear();
        for (const auto& s : split(v, ',')) {
          if (!s.empty()) c.suites.push_back(s);
        }
      }
      else if (k == "output.dir") c.dir = v;
      else if (k == "output.formats") {
        c.formats.clear();
        for (const auto& f : split(v, ',')) {
          if (f != "csv" && f != "json" && f != "svg") {
            throw ConfigError(k + ": unknown format '" + f + "'");
          }
          c.formats.insert(f);
        }
      }
      else if (k == "output.deterministic") c.deterministic = to_bool(k, v);
      else throw ConfigError("unknown configuration key '" + k + "'");
    }
  }
  return c;
}

void validate(const RunConfig& c) {
  try {
    build_grid(c.lo, c.hi, c.n);
    c.params.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (c.n_starts < 1) throw ConfigError("solver.n_starts must be >= 1");
  if (c.steps < 0) throw ConfigError("sweep.steps must be >= 0");
  if (c.lambda_max < c.lambda_min) throw ConfigError("sweep.lambda_max < sweep.lambda_min");
  if (c.path_points < 2) throw ConfigError("mountain.path_points must be >= 2");
  if (c.radii.empty() || !std::is_sorted(c.radii.begin(), c.radii.end()) ||
      c.radii.front() <= 0.0) {
    throw ConfigError("rn.radii must be positive and increasing");
  }
  if (!(c.cells_per_unit > 0.0)) throw ConfigError("rn.cells_per_unit must be positive");
  if (c.samples < 1) throw ConfigError("verify.samples must be >= 1");
  if (c.dir.empty()) throw ConfigError("output.dir is empty");
}

namespace {

std::vector<std::string> spec_fields(const std::string& spec) {
  std::vector<std::string> f = split(spec, ':');
  if (f.empty() || f[0].empty()) throw ConfigError("empty weight profile");
  return f;
}

double field(const std::vector<std::string>& f, std::size_t i, const std::string& spec) {
  if (i >= f.size()) throw ConfigError("weight profile '" + spec + "': missing field");
  return to_double("weight profile '" + spec + "'", f[i]);
}

}  // namespace

std::function<double(double)> weight_profile(const std::string& spec, double lo, double hi) {
  const auto f = spec_fields(spec);
  const std::string& kind = f[0];
  const double len = hi - lo;
  auto arity = [&](std::size_t lo_n, std::size_t hi_n) {
    if (f.size() < lo_n || f.size() > hi_n) {
      throw ConfigError("weight profile '" + spec + "': wrong number of fields");
    }
  };
  if (kind == "const") {
    arity(2, 2);
    const double c = field(f, 1, spec);
    return [c](double) { return c; };
  }
  if (kind == "shifted_cos") {
    arity(3, 3);
    const double c0 = field(f, 1, spec);
    const double k = field(f, 2, spec);
    return [=](double x) { return c0 + std::cos(2.0 * M_PI * k * (x - lo) / len); };
  }
  if (kind == "step") {
    arity(3, 5);
    const double l = field(f, 1, spec);
    const double r = field(f, 2, spec);
    const double in = f.size() > 3 ? field(f, 3, spec) : 1.0;
    const double out = f.size() > 4 ? field(f, 4, spec) : 0.0;
    return [=](double x) {
      const double xi = (x - lo) / len;
      return xi >= l && xi <= r ? in : out;
    };
  }
  if (kind == "decay") {
    arity(2, 2);
    const double d = field(f, 1, spec);
    if (!(d > 0.0)) throw ConfigError("weight profile '" + spec + "': decay must be positive");
    return decaying_weight(d);
  }
  if (kind == "csv") throw ConfigError("csv weights are tied to one grid");
  throw ConfigError("unknown weight profile '" + spec + "'");
}

Vector weight_values(const std::string& spec, const DomainGrid& grid) {
  const auto f = spec_fields(spec);
  if (f[0] != "csv") {
    try {
      return sample_weight(grid, weight_profile(spec, grid.lo, grid.hi)).values;
    } catch (const ParameterError& e) {
      throw ConfigError("weight profile '" + spec + "': " + e.what());
    }
  }
  const std::string path = spec.substr(4);
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read weight file '" + path + "'");
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line, ',');
    try {
      values.push_back(std::stod(cells.back()));
    } catch (const std::exception&) {
      if (values.empty()) continue;  // header row
      throw ConfigError("weight file '" + path + "': bad value '" + cells.back() + "'");
    }
  }
  if (static_cast<Eigen::Index>(values.size()) != grid.n) {
    throw ConfigError("weight file '" + path + "' has " + std::to_string(values.size()) +
                      " values, grid has " + std::to_string(grid.n));
  }
  return Eigen::Map<Vector>(values.data(), grid.n);
}

}  // namespace fracpq::cli
