// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "commands.hpp"
#include "fracpq/eigensolver.hpp"
#include "fracpq/mountainpass.hpp"
#include "fracpq/oracle.hpp"

using namespace fracpq;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(const char* id, const char* name, bool ok, const std::string& detail) {
  std::printf("%s %-4s %-28s %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

WeightField const_weight(const DomainGrid& g, double c) {
  return sample_weight(g, [c](double) { return c; });
}
WeightField cos_weight(const DomainGrid& g, double scale) {
  return sample_weight(g, [scale](double x) { return scale * (0.3 + std::cos(2 * M_PI * x)); });
}

BoundedProblem base_problem(double a_scale = 1.0, double b_scale = 1.0) {
  FracParams params;
  params.alpha = 0.3;
  params.beta = 0.5;
  params.p = 3.0;
  params.q = 2.0;
  const DomainGrid g = build_grid(0.0, 1.0, 64);
  return make_bounded_problem(g, params, const_weight(g, a_scale), cos_weight(g, b_scale));
}

BoundedProblem linear_problem(Eigen::Index n) {
  FracParams params;
  params.alpha = 0.4;
  params.beta = 0.4;
  params.p = 2.0;
  params.q = 2.0;
  const DomainGrid g = build_grid(0.0, 1.0, n);
  return make_bounded_problem(g, params, const_weight(g, 1.0), const_weight(g, 1.0));
}

Vector central_difference(const std::function<double(const Vector&)>& f, const Vector& u) {
  Vector g(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double e = 1e-6 * std::max(1.0, std::abs(u(i)));
    Vector up = u, dn = u;
    up(i) += e;
    dn(i) -= e;
    g(i) = (f(up) - f(dn)) / (2 * e);
  }
  return g;
}

// Components bounded away from 0 with random signs: keeps |u|^{q-2} u smooth.
Vector smooth_point(Eigen::Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mag(0.2, 2.0);
  std::bernoulli_distribution sign(0.5);
  Vector u(n);
  for (auto& x : u) x = (sign(rng) ? 1.0 : -1.0) * mag(rng);
  return u;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// ---------------------------------------------------------------------------

void a1_min_formula() {
  const auto t0 = std::chrono::steady_clock::now();
  const BoundedProblem pb = base_problem();
  const ThresholdReport r = check_min_formula(pb);
  const double secs = seconds_since(t0);
  const double rel = std::abs(r.lambda_star - std::min(r.lambda_1p, r.lambda_1q)) /
                     std::min(r.lambda_1p, r.lambda_1q);
  report("A1", "min_formula", r.converged && rel <= 1e-3 && secs < 30.0,
         fmt("lambda*=%.10g l1p=%.10g l1q=%.10g rel=%.2e", r.lambda_star, r.lambda_1p,
             r.lambda_1q, rel) +
             fmt(" t=%.3fs", secs));
}

void a2_linear_oracle() {
  const BoundedProblem pb = linear_problem(64);
  const EigResult e = principal_single(pb.kp, pb.a, 2.0);
  const DenseEig dense = dense_linear_eig(pb.kp, pb.kq, pb.a.values, pb.b.values);
  const double rel = std::abs(e.lambda - dense.values(0)) / dense.values(0);
  const Vector x = dense.vectors.col(0);
  const double cosine = std::abs(e.u.dot(x)) / (e.u.norm() * x.norm());
  report("A2", "linear_oracle", e.converged && rel <= 1e-6 && cosine >= 1.0 - 1e-6,
         fmt("lambda=%.12g dense=%.12g rel=%.2e 1-cos=%.2e", e.lambda, dense.values(0), rel,
             1.0 - cosine));
}

void a3_gradients() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> lam(0.5, 20.0);
  bool ok = true;
  std::string detail;
  for (auto [p, q, label] : {std::tuple{3.0, 2.5, "p,q>=2"}, std::tuple{2.5, 1.5, "1<q<2"}}) {
    FracParams params;
    params.alpha = 0.3;
    params.beta = 0.35;
    params.p = p;
    params.q = q;
    const DomainGrid g = build_grid(0.0, 1.0, 12);
    const BoundedProblem pb =
        make_bounded_problem(g, params, const_weight(g, 1.0), cos_weight(g, 1.0));
    FracParams wparams = params;
    wparams.regime = Regime::whole_space;
    const DomainGrid gw = build_grid(-2.0, 2.0, 12);
    const WholeSpaceProblem ws =
        make_whole_space_problem(gw, wparams, sample_weight(gw, decaying_weight(1.5)));
    double worst_j = 0.0;
    double worst_i = 0.0;
    for (int k = 0; k < 100; ++k) {
      const double lambda = lam(rng);
      const Vector u = smooth_point(12, rng);
      const Vector fj = central_difference([&](const Vector& v) { return evaluate_J(pb, v, lambda); }, u);
      const Vector gj = grad_J(pb, u, lambda);
      worst_j = std::max(worst_j, (fj - gj).norm() / std::max(1e-12, gj.norm()));
      const Vector v = smooth_point(12, rng);
      const Vector fi = central_difference([&](const Vector& w) { return evaluate_I(ws, w, lambda); }, v);
      const Vector gi = grad_I(ws, v, lambda);
      worst_i = std::max(worst_i, (fi - gi).norm() / std::max(1e-12, gi.norm()));
    }
    ok = ok && worst_j <= 1e-5 && worst_i <= 1e-5;
    detail += std::string(label) + fmt(": J %.1e I %.1e  ", worst_j, worst_i);
  }
  report("A3", "gradients_fd", ok, detail);
}

void a4_simplicity() {
  FracParams params;
  params.alpha = 0.3;
  params.beta = 0.4;
  params.p = 3.0;
  params.q = 2.0;
  params.regime = Regime::whole_space;
  const WholeSpaceProblem ws = make_truncated_problem(params, 2.0, 16.0, decaying_weight(1.5));
  const SimplicityReport s = simplicity_probe(ws, 10);
  report("A4", "simplicity", s.all_converged && s.all_nonnegative && s.max_deviation <= 1e-4,
         fmt("starts=%g max_dev=%.2e", s.starts, s.max_deviation) +
             (s.all_nonnegative ? " nonneg" : " NEGATIVE"));
}

void a5_nonexistence() {
  const BoundedProblem pb = base_problem();
  const ThresholdReport th = check_min_formula(pb);
  const double lambda = 0.9 * th.lambda_star;
  std::mt19937_64 rng(55);
  std::normal_distribution<double> g;
  std::vector<Vector> starts;
  for (int k = 0; k < 20; ++k) {
    Vector s(pb.size());
    for (auto& x : s) x = std::abs(g(rng));
    starts.push_back(s);
  }
  const auto runs = minimize_J_all(pb, lambda, starts);
  bool all_trivial = true;
  double worst_ratio = 0.0;
  double min_j = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < runs.size(); ++k) {
    all_trivial = all_trivial && runs[k].kind == PointKind::trivial;
    worst_ratio = std::max(worst_ratio, runs[k].u.norm() / starts[k].norm());
    for (double j : runs[k].history) min_j = std::min(min_j, j);
    min_j = std::min(min_j, runs[k].level);
  }
  report("A5", "nonexistence_below", all_trivial && worst_ratio <= 1e-6 && min_j >= -1e-10,
         fmt("runs=%g max|u|/|u0|=%.2e minJ=%.2e", double(runs.size()), worst_ratio, min_j));
}

void a6_minimizer() {
  const BoundedProblem pb = base_problem(1.0, 10.0);
  const ThresholdReport th = check_min_formula(pb);
  const double lambda = 1.1 * th.lambda_star;
  const CriticalPoint cp = minimize_J(pb, lambda, sweep_starts(pb, th, 4, 20240611u));
  Vector u = cp.u;
  if (u.sum() < 0.0) u = -u;
  const bool nonneg = (u.array() >= 0.0).all();
  const bool ok = th.lambda_1q < th.lambda_1p && cp.kind == PointKind::minimizer && cp.level < 0.0 &&
                  cp.residual <= 1e-6 && nonneg;
  report("A6", "minimizer_branch", ok,
         fmt("l1q=%.6g < l1p=%.6g level=%.4e residual=%.2e", th.lambda_1q, th.lambda_1p, cp.level,
             cp.residual));
}

void a7_mountain_pass() {
  const BoundedProblem pb = base_problem(4.0, 0.05);
  const ThresholdReport th = check_min_formula(pb);
  const double lambda = std::sqrt(th.lambda_1p * th.lambda_1q);
  const GeometryEstimate geo = estimate_geometry(pb, lambda, {0.05, 0.1, 0.2, 0.5, 1.0, 2.0}, 200,
                                                 7u, {th.eig_p.u, th.eig_q.u});
  bool ok = lambda > th.lambda_1p && geo.delta > 0.0;
  std::string detail = fmt("lambda=%.6g rho=%.3g delta=%.4e", lambda, geo.rho, geo.delta);
  if (ok) {
    const Vector e = find_descent_endpoint(pb, lambda, th.eig_p.u, geo.rho);
    const MountainPassResult mp = mountain_pass(pb, lambda, e);
    ok = mp.point.converged && mp.point.residual <= 1e-4 && mp.point.level >= geo.delta - 1e-8;
    detail += fmt(" c=%.6e residual=%.2e", mp.point.level, mp.point.residual);
  }

  const BoundedProblem lin = linear_problem(32);
  const DenseEig dense = dense_linear_eig(lin.kp, lin.kq, lin.a.values, lin.b.values);
  const double mid = 0.5 * (dense.values(0) + dense.values(1));
  const QuadraticSaddle qs = quadratic_saddle(lin.kp, lin.kq, lin.a.values, lin.b.values, mid);
  const MountainPassResult qmp = mountain_pass(qs.functional(), qs.start, qs.end);
  const double qrel = std::abs(qmp.point.level - qs.level) / std::abs(qs.level);
  ok = ok && qmp.point.converged && qrel <= 1e-4;
  detail += fmt(" | quadratic control rel=%.2e", qrel);
  report("A7", "mountain_pass_branch", ok, detail);
}

void a8_inequalities() {
  bool ok = true;
  std::string detail;
  for (const auto& name : inequality_suite_names()) {
    const InequalityReport r = inequality_suite(name, 100000, 8u);
    ok = ok && r.violations == 0;
    detail += name + "=" + std::to_string(r.violations);
    if (name.rfind("vec_", 0) == 0) {
      const InequalityReport r2 = inequality_suite(name, 200000, 8u);
      const double change =
          std::abs(r2.estimated_constant - r.estimated_constant) / r.estimated_constant;
      ok = ok && std::isfinite(r.estimated_constant) && change < 0.05;
      detail += fmt("(C=%.4g d=%.1e)", r.estimated_constant, change);
    }
    detail += " ";
  }
  report("A8", "inequality_suites", ok, detail);
}

void a9_invariances() {
  const DomainGrid g = build_grid(0.0, 1.0, 32);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> nd;
  Vector u(32);
  for (auto& x : u) x = nd(rng);
  const Vector w = cos_weight(g, 1.0).values.cwiseAbs();
  double worst_q = 0.0;
  double worst_h = 0.0;
  for (double r : {1.5, 2.0, 3.0}) {
    const auto k = build_kernel(g, 0.3, r);
    const double q0 = single_quotient(k, w, u);
    const double s0 = seminorm_pow(u, k);
    for (double t : {-3.0, 0.01, 10.0}) {
      const Vector tu = t * u;
      worst_q = std::max(worst_q, std::abs(single_quotient(k, w, tu) - q0) / q0);
      worst_h = std::max(worst_h, std::abs(seminorm_pow(tu, k) - std::pow(std::abs(t), r) * s0) /
                                      (std::pow(std::abs(t), r) * s0));
    }
  }
  report("A9", "quotient_invariance", worst_q <= 1e-12 && worst_h <= 1e-12,
         fmt("quotient=%.1e homogeneity=%.1e", worst_q, worst_h));
}

void a10_whole_space() {
  FracParams params;
  params.alpha = 0.3;
  params.beta = 0.4;
  params.p = 2.5;
  params.q = 2.0;
  params.regime = Regime::whole_space;
  RnOptions o;
  o.radii = {1.0, 2.0, 4.0, 8.0};
  o.cells_per_unit = 16.0;
  const RnResult rn = rn_principal(params, {}, o);
  bool converged = true;
  std::string lambdas;
  for (const auto& e : rn.entries) {
    converged = converged && e.eig.converged;
    lambdas += fmt("%.4g ", e.eig.lambda);
  }
  const bool cauchy = rn.last_relative_change <= 1e-2;

  const WholeSpaceProblem family =
      make_truncated_problem(params, 4.0, 16.0, decaying_weight(rn.decay_exponent));
  const EigResult base = principal_whole_space(family);
  bool family_ok = base.converged;
  double worst_res = 0.0;
  for (double f : {1.1, 1.3, 1.6, 2.0, 3.0}) {
    const double lambda = f * base.lambda;
    const Vector e = find_descent_endpoint(family, lambda, base.u / base.u.norm());
    const MountainPassResult mp = mountain_pass(family, lambda, e);
    family_ok = family_ok && mp.point.converged && mp.point.kind == PointKind::mountain_pass &&
                mp.point.residual <= 1e-4;
    worst_res = std::max(worst_res, mp.point.residual);
  }
  report("A10", "whole_space_truncation", converged && rn.monotone && cauchy && family_ok,
         "lambda(R)=" + lambdas + (rn.monotone ? "monotone" : "NOT monotone") +
             fmt(" |l8-l4|/l4=%.3e (<=1e-2 ", rn.last_relative_change) +
             (cauchy ? "met)" : "NOT met)") + fmt(" family worst residual=%.2e", worst_res) +
             (family_ok ? " ok" : " FAILED"));
}

void a11_determinism() {
  const fs::path root = fs::temp_directory_path() / "fracpq_acceptance_det";
  fs::remove_all(root);
  const int c1 = fracpq::cli::run_cli({"eig", "-o", (root / "a").string(), "--solver.seed=77"});
  const int c2 = fracpq::cli::run_cli({"eig", "-o", (root / "b").string(), "--solver.seed=77"});
  const std::string j1 = slurp(root / "a" / "threshold.json");
  const std::string j2 = slurp(root / "b" / "threshold.json");
  report("A11", "determinism", c1 == 0 && c2 == 0 && !j1.empty() && j1 == j2,
         fmt("exit=%g,%g bytes=%g identical=", c1, c2, double(j1.size())) +
             (j1 == j2 ? "yes" : "no"));
  fs::remove_all(root);
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  a1_min_formula();
  a2_linear_oracle();
  a3_gradients();
  a4_simplicity();
  a5_nonexistence();
  a6_minimizer();
  a7_mountain_pass();
  a8_inequalities();
  a9_invariances();
  a10_whole_space();
  a11_determinism();
  std::printf("%d of 11 criteria failed (%.1fs)\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
