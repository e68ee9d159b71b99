#pragma once

// Run configuration: INI-style file (sections + key = value) with
// --section.key=value overrides, plus named weight profiles.

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracpq/mountainpass.hpp"

namespace fracpq::cli {

/// Any problem with the configuration; maps to exit status 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// section -> key -> raw value
using IniTable = std::map<std::string, std::map<std::string, std::string>>;

IniTable parse_ini(const std::string& text);
IniTable read_ini_file(const std::string& path);
/// "--section.key=value" (or "section.key=value"); throws ConfigError otherwise.
void apply_override(IniTable& table, const std::string& arg);

struct RunConfig {
  // [domain]
  double lo = 0.0;
  double hi = 1.0;
  Eigen::Index n = 64;
  // [params]
  FracParams params{};
  // [weights]
  std::string a_spec = "const:1";
  std::string b_spec = "shifted_cos:0.3:1";
  // [solver]
  SolverOptions solver{};
  int n_starts = 4;
  // [solve]
  double lambda = 0.0;         // explicit lambda when > 0
  double lambda_factor = 1.1;  // otherwise lambda = factor * lambda_star
  // [sweep]
  double lambda_min = 0.0;  // both zero: lambda_star * [0.5, 1.5]
  double lambda_max = 0.0;
  int steps = 9;
  // [mountain]
  int path_points = 40;
  // [rn]
  std::vector<double> radii{1.0, 2.0, 4.0, 8.0};
  double cells_per_unit = 16.0;
  std::vector<double> lambda_factors{1.1, 1.3, 1.6, 2.0, 3.0};
  double family_radius = 4.0;
  std::string rn_weight;  // empty: default decaying weight
  // [verify]
  long samples = 100000;
  std::vector<std::string> suites;  // empty: all
  // [output]
  std::string dir = "fracpq_out";
  std::set<std::string> formats{"csv", "json", "svg"};
  bool deterministic = true;

  bool wants(const std::string& format) const { return formats.count(format) != 0; }
};

/// Fills a RunConfig from the table; unknown sections/keys and malformed
/// values throw ConfigError. Ranges are checked by validate().
RunConfig config_from_table(const IniTable& table);
/// Checks the grid and FracParams invariants (ConfigError).
void validate(const RunConfig& config);

/// Weight profiles:
///   const:c            c
///   shifted_cos:c0:k   c0 + cos(2 pi k xi), xi = (x - lo)/(hi - lo)
///   step:l:r[:in[:out]] in for xi in [l, r], out elsewhere (defaults 1, 0)
///   decay:d            (1 + |x|)^(-d)
///   csv:path           one value per node (last column of each row)
Vector weight_values(const std::string& spec, const DomainGrid& grid);
/// Analytic profiles only (csv is grid-bound); used for whole-space radii.
std::function<double(double)> weight_profile(const std::string& spec, double lo, double hi);

}  // namespace fracpq::cli
