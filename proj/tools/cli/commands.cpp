#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include "fracpq/oracle.hpp"
#include "output.hpp"

namespace fracpq::cli {

namespace {

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

BoundedProblem bounded_problem(const RunConfig& c) {
  const DomainGrid grid = build_grid(c.lo, c.hi, c.n);
  WeightField a{weight_values(c.a_spec, grid)};
  WeightField b{weight_values(c.b_spec, grid)};
  if (!a.has_positive_part()) {
    throw ConfigError("weights.a = '" + c.a_spec +
                      "' has no positive part; both weights must be positive on a set of "
                      "positive measure");
  }
  if (!b.has_positive_part()) {
    throw ConfigError("weights.b = '" + c.b_spec +
                      "' has no positive part; both weights must be positive on a set of "
                      "positive measure");
  }
  return make_bounded_problem(grid, c.params, std::move(a), std::move(b));
}

SweepOptions sweep_options(const RunConfig& c) {
  SweepOptions o;
  o.n_starts = c.n_starts;
  o.seed = c.solver.seed;
  o.solver = c.solver;
  o.mountain.m = c.path_points;
  return o;
}

Json params_json(const RunConfig& c) {
  Json j;
  j["domain"] = {{"lo", c.lo}, {"hi", c.hi}, {"n", c.n}};
  j["params"] = {{"alpha", c.params.alpha},
                 {"beta", c.params.beta},
                 {"p", c.params.p},
                 {"q", c.params.q},
                 {"regime", to_string(c.params.regime)},
                 {"order", c.params.order_label()}};
  j["weights"] = {{"a", c.a_spec}, {"b", c.b_spec}};
  j["seed"] = c.solver.seed;
  return j;
}

Json eig_json(const EigResult& e) {
  return {{"lambda", number(e.lambda)},
          {"residual", number(e.residual)},
          {"iterations", e.iterations},
          {"converged", e.converged},
          {"ray_escape", e.ray_escape},
          {"scale_ratio", number(e.scale_ratio)}};
}

Json threshold_json(const ThresholdReport& r) {
  Json j;
  j["lambda_star"] = number(r.lambda_star);
  j["lambda_1p"] = number(r.lambda_1p);
  j["lambda_1q"] = number(r.lambda_1q);
  j["min_gap"] = number(r.min_gap);
  j["relative_gap"] = number(r.relative_gap);
  j["argmin_side"] = to_string(r.argmin_side);
  j["formula_holds"] = r.formula_holds;
  j["converged"] = r.converged;
  j["ray_escape"] = r.eig_star.ray_escape;
  j["solves"] = {{"p", eig_json(r.eig_p)}, {"q", eig_json(r.eig_q)}, {"star", eig_json(r.eig_star)}};
  return j;
}

Vector unit_sup(const Vector& u) {
  const double m = u.cwiseAbs().maxCoeff();
  return m > 0.0 ? Vector(u / m) : u;
}

std::vector<double> as_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

std::string class_color(Classification c) {
  switch (c) {
    case Classification::no_nontrivial: return "#7f7f7f";
    case Classification::threshold_degenerate: return "#ff7f0e";
    case Classification::exists_positive: return "#2ca02c";
    case Classification::unresolved: return "#d62728";
  }
  return "#000000";
}

Json row_json(const SweepRow& r) {
  return {{"lambda", number(r.lambda)},          {"ratio", number(r.ratio)},
          {"classification", to_string(r.classification)}, {"branch", r.branch},
          {"level", number(r.level)},            {"residual", number(r.residual)},
          {"norm", number(r.norm)},              {"converged", r.converged}};
}

std::vector<std::string> row_cells(const SweepRow& r) {
  return {format_double(r.lambda), format_double(r.ratio), to_string(r.classification),
          r.branch,                format_double(r.level), format_double(r.residual),
          format_double(r.norm),   r.converged ? "1" : "0"};
}

const std::vector<std::string> kRowHeader{"lambda", "ratio",    "classification", "branch",
                                          "level",  "residual", "norm",           "converged"};

}  // namespace

// ---------------------------------------------------------------------------

int cmd_eig(const RunConfig& c) {
  const BoundedProblem problem = bounded_problem(c);
  RunDirectory out(c.dir, c.deterministic);
  out.log("eig: n=" + std::to_string(c.n) + " p=" + format_double(c.params.p) +
          " q=" + format_double(c.params.q));
  const ThresholdReport r = check_min_formula(problem, c.solver);

  if (c.wants("json")) {
    Json j = params_json(c);
    j["command"] = "eig";
    const Json th = threshold_json(r);
    for (const auto& [k, v] : th.items()) j[k] = v;
    out.write_text("threshold.json", dump_json(j));
  }
  const Vector star = unit_sup(r.eig_star.u);
  if (c.wants("csv")) {
    CsvTable t({"x", "phi_p", "phi_q", "u_star_unit"});
    for (Eigen::Index i = 0; i < problem.size(); ++i) {
      t.row({format_double(problem.grid.nodes(i)), format_double(r.eig_p.u(i)),
             format_double(r.eig_q.u(i)), format_double(star(i))});
    }
    out.write_text("eigenfunctions.csv", t.str());
  }
  if (c.wants("svg")) {
    SvgPlot plot;
    plot.title = "Principal eigenfunctions (sup-normalized)";
    plot.xlabel = "x";
    plot.ylabel = "u / max u";
    const auto x = as_std(problem.grid.nodes);
    plot.series.push_back({"phi_p", x, as_std(unit_sup(r.eig_p.u)), kColors[0]});
    plot.series.push_back({"phi_q", x, as_std(unit_sup(r.eig_q.u)), kColors[1]});
    plot.series.push_back({"lambda* iterate", x, as_std(star), kColors[2]});
    out.write_text("eigenfunctions.svg", plot.render());
  }
  out.log("eig: lambda_star=" + format_double(r.lambda_star) + " lambda_1p=" +
          format_double(r.lambda_1p) + " lambda_1q=" + format_double(r.lambda_1q) +
          " relative_gap=" + format_double(r.relative_gap) +
          (r.converged ? " converged" : " NOT converged"));
  return r.converged ? exit_ok : exit_nonconvergence;
}

int cmd_solve(const RunConfig& c) {
  const BoundedProblem problem = bounded_problem(c);
  RunDirectory out(c.dir, c.deterministic);
  const SweepOptions opts = sweep_options(c);
  const ThresholdReport th = check_min_formula(problem, c.solver);
  const double lambda = c.lambda > 0.0 ? c.lambda : c.lambda_factor * th.lambda_star;
  out.log("solve: lambda=" + format_double(lambda));
  const auto starts = sweep_starts(problem, th, opts.n_starts, opts.seed);
  const SolveOutcome s = solve_at(problem, lambda, th, starts, opts);

  if (c.wants("json")) {
    Json j = params_json(c);
    j["command"] = "solve";
    j["solution"] = row_json(s.row);
    j["kind"] = to_string(s.point.kind);
    j["threshold"] = threshold_json(th);
    out.write_text("solution.json", dump_json(j));
  }
  if (c.wants("csv")) {
    CsvTable t({"x", "u"});
    for (Eigen::Index i = 0; i < problem.size(); ++i) {
      t.row({format_double(problem.grid.nodes(i)), format_double(s.point.u(i))});
    }
    out.write_text("solution.csv", t.str());
  }
  if (c.wants("svg")) {
    SvgPlot plot;
    plot.title = "Solution at lambda = " + format_double(lambda) + " (" +
                 to_string(s.row.classification) + ")";
    plot.xlabel = "x";
    plot.ylabel = "u";
    plot.series.push_back({s.row.branch.empty() ? "u" : s.row.branch,
                           as_std(problem.grid.nodes), as_std(s.point.u), kColors[0]});
    out.write_text("solution.svg", plot.render());
  }
  out.log("solve: classification=" + to_string(s.row.classification) + " level=" +
          format_double(s.row.level) + " residual=" + format_double(s.row.residual));
  const bool ok = th.converged && s.row.classification != Classification::unresolved;
  return ok ? exit_ok : exit_nonconvergence;
}

int cmd_sweep(const RunConfig& c) {
  const BoundedProblem problem = bounded_problem(c);
  RunDirectory out(c.dir, c.deterministic);
  const SweepOptions opts = sweep_options(c);
  const ThresholdReport th = check_min_formula(problem, c.solver);

  double lo = c.lambda_min;
  double hi = c.lambda_max;
  if (lo == 0.0 && hi == 0.0) {
    lo = 0.5 * th.lambda_star;
    hi = 1.5 * th.lambda_star;
  }
  std::vector<double> grid;
  for (int i = 0; i < c.steps; ++i) {
    grid.push_back(c.steps == 1 ? lo : lo + (hi - lo) * i / (c.steps - 1));
  }
  out.log("sweep: " + std::to_string(grid.size()) + " values in [" + format_double(lo) + ", " +
          format_double(hi) + "]");
  const auto starts = sweep_starts(problem, th, opts.n_starts, opts.seed);
  std::vector<SweepRow> rows;
  for (double lambda : grid) rows.push_back(solve_at(problem, lambda, th, starts, opts).row);

  if (c.wants("csv")) {
    CsvTable t(kRowHeader);
    for (const auto& r : rows) t.row(row_cells(r));
    out.write_text("sweep.csv", t.str());
  }
  if (c.wants("json")) {
    Json j = params_json(c);
    j["command"] = "sweep";
    j["threshold"] = threshold_json(th);
    j["rows"] = Json::array();
    for (const auto& r : rows) j["rows"].push_back(row_json(r));
    out.write_text("sweep.json", dump_json(j));
  }
  if (c.wants("svg")) {
    SvgPlot plot;
    plot.title = "Lambda sweep: level and classification";
    plot.xlabel = "lambda";
    plot.ylabel = "critical level";
    SvgSeries s{"level", {}, {}, "#444444", true, {}};
    for (const auto& r : rows) {
      s.x.push_back(r.lambda);
      s.y.push_back(r.level);
      s.point_colors.push_back(class_color(r.classification));
    }
    plot.series.push_back(s);
    for (Classification k : {Classification::no_nontrivial, Classification::threshold_degenerate,
                             Classification::exists_positive, Classification::unresolved}) {
      plot.series.push_back({to_string(k), {}, {}, class_color(k)});
    }
    plot.vlines = {{th.lambda_star, "lambda*"}, {th.lambda_1p, "l1p"}, {th.lambda_1q, "l1q"}};
    out.write_text("sweep.svg", plot.render());
  }
  out.log("sweep: done");
  return th.converged ? exit_ok : exit_nonconvergence;
}

int cmd_rn(const RunConfig& config) {
  RunConfig c = config;
  c.params.regime = Regime::whole_space;
  try {
    c.params.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  RunDirectory out(c.dir, c.deterministic);
  std::function<double(double)> weight;
  if (!c.rn_weight.empty()) weight = weight_profile(c.rn_weight, -1.0, 1.0);

  RnOptions ro;
  ro.radii = c.radii;
  ro.cells_per_unit = c.cells_per_unit;
  ro.solver = c.solver;
  const RnResult rn = rn_principal(c.params, weight, ro);
  if (!weight) weight = decaying_weight(rn.decay_exponent);
  out.log("rn: " + std::to_string(rn.entries.size()) + " radii, monotone=" +
          (rn.monotone ? "yes" : "no"));

  const WholeSpaceProblem family =
      make_truncated_problem(c.params, c.family_radius, c.cells_per_unit, weight);
  const EigResult base = principal_whole_space(family, c.solver);
  MountainPassOptions mo;
  mo.m = c.path_points;
  struct FamilyRow {
    double factor, lambda, level, residual, norm;
    bool converged;
  };
  std::vector<FamilyRow> fam;
  bool all_ok = rn.monotone;
  for (const auto& e : rn.entries) all_ok = all_ok && e.eig.converged;
  for (double f : c.lambda_factors) {
    const double lambda = f * base.lambda;
    FamilyRow row{f, lambda, std::nan(""), std::nan(""), 0.0, false};
    try {
      const Vector e = find_descent_endpoint(family, lambda, base.u / base.u.norm());
      const MountainPassResult mp = mountain_pass(family, lambda, e, mo);
      row.level = mp.point.level;
      row.residual = mp.point.residual;
      row.norm = leading_norm(family.kp, mp.point.u);
      row.converged = mp.point.converged;
    } catch (const NoDescentDirectionError&) {
    }
    all_ok = all_ok && row.converged;
    fam.push_back(row);
  }

  if (c.wants("csv")) {
    CsvTable t({"radius", "n", "lambda", "residual", "converged", "ray_escape",
                "single_lower_bound"});
    for (const auto& e : rn.entries) {
      t.row({format_double(e.radius), std::to_string(e.n), format_double(e.eig.lambda),
             format_double(e.eig.residual), e.eig.converged ? "1" : "0",
             e.eig.ray_escape ? "1" : "0", format_double(e.single_lower_bound)});
    }
    out.write_text("rn.csv", t.str());
    CsvTable ft({"factor", "lambda", "level", "residual", "norm", "converged"});
    for (const auto& r : fam) {
      ft.row({format_double(r.factor), format_double(r.lambda), format_double(r.level),
              format_double(r.residual), format_double(r.norm), r.converged ? "1" : "0"});
    }
    out.write_text("rn_family.csv", ft.str());
  }
  if (c.wants("json")) {
    Json j = params_json(c);
    j.erase("weights");
    j["command"] = "rn";
    j["weight"] = c.rn_weight.empty() ? "decay:" + format_double(rn.decay_exponent) : c.rn_weight;
    j["cells_per_unit"] = c.cells_per_unit;
    j["monotone"] = rn.monotone;
    j["last_relative_change"] = number(rn.last_relative_change);
    j["entries"] = Json::array();
    for (const auto& e : rn.entries) {
      Json je = eig_json(e.eig);
      je["radius"] = e.radius;
      je["n"] = e.n;
      je["single_lower_bound"] = number(e.single_lower_bound);
      j["entries"].push_back(je);
    }
    j["family_radius"] = c.family_radius;
    j["family_lambda_1"] = number(base.lambda);
    j["family"] = Json::array();
    for (const auto& r : fam) {
      j["family"].push_back({{"factor", r.factor},
                             {"lambda", number(r.lambda)},
                             {"level", number(r.level)},
                             {"residual", number(r.residual)},
                             {"norm", number(r.norm)},
                             {"converged", r.converged}});
    }
    out.write_text("rn.json", dump_json(j));
  }
  if (c.wants("svg")) {
    SvgPlot plot;
    plot.title = "Truncated whole-space eigenvalue vs radius";
    plot.xlabel = "R";
    plot.ylabel = "lambda(R)";
    plot.log_x = true;
    SvgSeries s{"lambda(R)", {}, {}, kColors[0], true, {}};
    SvgSeries lb{"single-operator bound", {}, {}, kColors[1], true, {}};
    for (const auto& e : rn.entries) {
      s.x.push_back(e.radius);
      s.y.push_back(e.eig.lambda);
      lb.x.push_back(e.radius);
      lb.y.push_back(e.single_lower_bound);
    }
    plot.series = {s, lb};
    out.write_text("rn.svg", plot.render());
  }
  out.log("rn: last_relative_change=" + format_double(rn.last_relative_change));
  return all_ok ? exit_ok : exit_nonconvergence;
}

int cmd_verify(const RunConfig& c) {
  std::vector<std::string> names = c.suites.empty() ? inequality_suite_names() : c.suites;
  const auto known = inequality_suite_names();
  for (const auto& n : names) {
    if (std::find(known.begin(), known.end(), n) == known.end()) {
      throw ConfigError("verify.suites: unknown suite '" + n + "'");
    }
  }
  RunDirectory out(c.dir, c.deterministic);
  SuiteOptions so;
  so.params = c.params;
  bool all_ok = true;
  Json j;
  j["command"] = "verify";
  j["samples"] = c.samples;
  j["seed"] = c.solver.seed;
  j["suites"] = Json::array();
  CsvTable t({"name", "samples", "violations", "worst_slack", "estimated_constant",
              "constant_doubled", "relative_change"});
  for (const auto& name : names) {
    const InequalityReport r = inequality_suite(name, c.samples, c.solver.seed, so);
    Json js = {{"name", r.name},
               {"samples", r.samples},
               {"violations", r.violations},
               {"worst_slack", number(r.worst_slack)},
               {"estimated_constant", number(r.estimated_constant)}};
    bool ok = r.violations == 0;
    double doubled = std::nan("");
    double change = std::nan("");
    if (name.rfind("vec_", 0) == 0) {
      doubled = inequality_suite(name, 2 * c.samples, c.solver.seed, so).estimated_constant;
      change = std::abs(doubled - r.estimated_constant) / r.estimated_constant;
      const bool stable = std::isfinite(change) && change < 0.05;
      js["constant_doubled"] = number(doubled);
      js["relative_change"] = number(change);
      js["stable"] = stable;
      ok = ok && stable;
    }
    js["passed"] = ok;
    all_ok = all_ok && ok;
    j["suites"].push_back(js);
    t.row({r.name, std::to_string(r.samples), std::to_string(r.violations),
           format_double(r.worst_slack), format_double(r.estimated_constant),
           format_double(doubled), format_double(change)});
    out.log("verify: " + name + " violations=" + std::to_string(r.violations));
  }
  j["all_passed"] = all_ok;
  if (c.wants("json")) out.write_text("verify.json", dump_json(j));
  if (c.wants("csv")) out.write_text("verify.csv", t.str());
  return all_ok ? exit_ok : exit_nonconvergence;
}

// ---------------------------------------------------------------------------

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"fracpq: (p,q) fractional eigenvalue and critical-point solver"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"eig", "principal eigenvalues and the threshold lambda*"},
      {"solve", "one lambda: classify and return a critical point"},
      {"sweep", "classify a grid of lambda values"},
      {"rn", "whole-space eigenvalue by domain inflation"},
      {"verify", "random-sampling inequality suites"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", config_path, "INI configuration file");
    sub->add_option("-o,--output", out_dir, "output directory (overrides output.dir)");
    sub->allow_extras();
  }

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  RunConfig config;
  try {
    IniTable table = config_path.empty() ? IniTable{} : read_ini_file(config_path);
    for (const auto& extra : sub->remaining()) apply_override(table, extra);
    config = config_from_table(table);
    if (!out_dir.empty()) config.dir = out_dir;
    if (command != "rn") validate(config);
  } catch (const std::exception& e) {
    std::cerr << "fracpq " << command << ": configuration error: " << e.what() << '\n';
    return exit_config;
  }

  try {
    if (command == "eig") return cmd_eig(config);
    if (command == "solve") return cmd_solve(config);
    if (command == "sweep") return cmd_sweep(config);
    if (command == "rn") return cmd_rn(config);
    return cmd_verify(config);
  } catch (const ConfigError& e) {
    std::cerr << "fracpq " << command << ": configuration error: " << e.what() << '\n';
    return exit_config;
  } catch (const ParameterError& e) {
    std::cerr << "fracpq " << command << ": invalid input: " << e.what() << '\n';
    return exit_config;
  } catch (const DimensionError& e) {
    std::cerr << "fracpq " << command << ": invalid input: " << e.what() << '\n';
    return exit_config;
  } catch (const InfeasibleError& e) {
    std::cerr << "fracpq " << command << ": infeasible problem: " << e.what() << '\n';
    return exit_config;
  } catch (const std::exception& e) {
    std::cerr << "fracpq " << command << ": numerical failure: " << e.what() << '\n';
    return exit_nonconvergence;
  }
}

}  // namespace fracpq::cli
