#include "fracpq/eigensolver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "fracpq/descent.hpp"
#include "fracpq/parallel.hpp"

namespace fracpq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double relative_decrease(double previous, double current) {
  return (previous - current) / std::max(std::abs(current), 1e-300);
}

Vector mask_positive(const Vector& u, const Vector& w) {
  return (w.array() > 0.0).select(u, Vector::Zero(u.size()));
}

// Free-scale minimization of a quotient that is not 0-homogeneous. Along a
// ray t v the combined quotients are monotone in t^{p-q}, so for a fixed
// direction the best scale in [t0/ratio, t0 ratio] is an endpoint (or t0 when
// the quotient does not depend on t). Descent therefore runs on the unit
// direction v, with the scale profiled exactly at every evaluation.
struct FreeScaleQuotient {
  std::function<double(const Vector&, Vector*)> objective;
};

EigResult free_scale_minimize(const FreeScaleQuotient& quotient, const Vector& start,
                              const SolverOptions& options) {
  const double t0 = start.cwiseAbs().norm();
  if (!(t0 > 0.0)) throw InfeasibleError("free-scale quotient: zero start");
  const std::array<double, 3> scales{t0, t0 * options.ray_escape_ratio,
                                     t0 / options.ray_escape_ratio};

  auto best_scale = [&](const Vector& v) {
    std::size_t best = 0;
    double fbest = quotient.objective(scales[0] * v, nullptr);
    for (std::size_t k = 1; k < scales.size(); ++k) {
      const double f = quotient.objective(scales[k] * v, nullptr);
      if (f < fbest) {
        fbest = f;
        best = k;
      }
    }
    return best;
  };

  DescentProblem problem;
  problem.objective = [&](const Vector& v, Vector* grad) {
    const double t = scales[best_scale(v)];
    const double f = quotient.objective(t * v, grad);
    if (grad) *grad *= t;
    return f;
  };
  problem.project = [](const Vector& v) -> Vector {
    Vector y = v.cwiseAbs();
    const double nrm = y.norm();
    return nrm > 0.0 ? Vector(y / nrm) : y;
  };
  problem.stop = [&](const DescentState& s) {
    if (relative_decrease(s.previous_f, s.f) >= options.tol_quotient) return false;
    const Vector tangential = s.g - s.g.dot(s.x) * s.x;
    return tangential.norm() / std::max(std::abs(s.f), 1e-300) <= options.tol_residual;
  };

  DescentOptions descent;
  descent.max_iter = options.max_iter;
  DescentResult run = spg_minimize(problem, start, descent);

  const std::size_t k = best_scale(run.x);
  EigResult result;
  result.u = scales[k] * run.x;
  result.lambda = quotient.objective(result.u, nullptr);
  result.iterations = run.iterations;
  result.converged = run.converged;
  result.history = std::move(run.history);
  result.scale_ratio = scales[k] / t0;
  result.ray_escape = k != 0;
  return result;
}

}  // namespace

double single_quotient(const KernelMatrix<double>& k, const Vector& w, const Vector& u) {
  const double den = weighted_power<double>(u, w, k.r, k.h);
  if (!(den > 0.0)) return kInf;
  return seminorm_pow<double>(u, k) / den;
}

double combined_quotient(const BoundedProblem& problem, const Vector& u) {
  const auto e = evaluate_energies(problem, u, 0.0);
  if (!(e.psi > 0.0)) return kInf;
  return e.phi / e.psi;
}

double whole_space_quotient(const WholeSpaceProblem& problem, const Vector& u) {
  const double p = problem.params.p;
  const double q = problem.params.q;
  const double den = weighted_power<double>(u, problem.a.values, p, problem.grid.h);
  if (!(den > 0.0)) return kInf;
  return (seminorm_pow<double>(u, problem.kp) + p / q * seminorm_pow<double>(u, problem.kq)) /
         den;
}

double eigen_residual(const KernelMatrix<double>& k, const Vector& w, const Vector& u,
                      double lambda) {
  const Vector g = frac_laplacian_apply<double>(u, k) -
                   lambda * weighted_power_grad<double>(u, w, k.r, k.h);
  return weak_residual<double>(u, g, k.r);
}

Vector surrogate_start(const KernelMatrix<double>& k) {
  const Eigen::Index n = k.size();
  Matrix a = -2.0 * k.K;
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, i) = 2.0 * k.K.row(i).sum() + 2.0 * k.h * k.tail(i);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
  Vector v = eig.eigenvectors().col(0).cwiseAbs();
  return v / v.norm();
}

EigResult principal_single(const KernelMatrix<double>& k, const WeightField& w, double r,
                           const SolverOptions& options, const std::optional<Vector>& start) {
  if (r != k.r) throw ParameterError("principal_single: kernel exponent does not match r");
  detail::check_size<double>(w.size(), k.size(), "principal_single weight");
  if (!w.has_positive_part()) {
    throw InfeasibleError("principal_single: weight has no positive part");
  }
  const Vector& wv = w.values;

  Vector x0 = start ? start->cwiseAbs() : surrogate_start(k);
  if (x0.size() != k.size()) throw DimensionError("principal_single: start has wrong length");
  if (!(weighted_power<double>(x0, wv, r, k.h) > 0.0)) x0 = mask_positive(x0, wv);
  if (!(weighted_power<double>(x0, wv, r, k.h) > 0.0)) {
    x0 = (wv.array() > 0.0).select(Vector::Ones(k.size()), Vector::Zero(k.size()));
  }

  DescentProblem problem;
  problem.objective = [&](const Vector& x, Vector* grad) {
    const double den = weighted_power<double>(x, wv, r, k.h);
    if (!(den > 0.0)) return kInf;
    const double f = seminorm_pow<double>(x, k) / den;
    if (grad) {
      *grad = r / den *
              (frac_laplacian_apply<double>(x, k) - f * weighted_power_grad<double>(x, wv, r, k.h));
    }
    return f;
  };
  problem.project = [&](const Vector& v) -> Vector {
    Vector y = v.cwiseAbs();
    const double den = weighted_power<double>(y, wv, r, k.h);
    if (den > 0.0) y /= std::pow(den, 1.0 / r);
    return y;
  };
  problem.stop = [&](const DescentState& s) {
    if (relative_decrease(s.previous_f, s.f) >= options.tol_quotient) return false;
    // On the normalized set the gradient is r times the eigen-residual vector.
    const double scale = std::max(1.0, std::pow(s.x.cwiseAbs().maxCoeff(), r - 1.0));
    return s.g.cwiseAbs().maxCoeff() / (r * scale) <= options.tol_residual;
  };

  DescentOptions descent;
  descent.max_iter = options.max_iter;
  DescentResult run = spg_minimize(problem, x0, descent);

  EigResult result;
  result.u = std::move(run.x);
  result.lambda = single_quotient(k, wv, result.u);
  result.residual = eigen_residual(k, wv, result.u, result.lambda);
  result.iterations = run.iterations;
  result.converged = run.converged && result.residual <= options.tol_residual;
  result.history = std::move(run.history);
  return result;
}

EigResult lambda_star_from(const BoundedProblem& problem, const Vector& start,
                           const SolverOptions& options) {
  if (!(combined_quotient(problem, start.cwiseAbs()) < kInf)) {
    throw InfeasibleError("lambda_star: Psi(start) <= 0");
  }
  const Vector& a = problem.a.values;
  const Vector& b = problem.b.values;
  const double p = problem.params.p;
  const double q = problem.params.q;
  const double h = problem.grid.h;

  FreeScaleQuotient quotient;
  quotient.objective = [&](const Vector& x, Vector* grad) {
    const auto e = evaluate_energies(problem, x, 0.0);
    if (!(e.psi > 0.0)) return kInf;
    const double f = e.phi / e.psi;
    if (grad) {
      const Vector dphi =
          frac_laplacian_apply<double>(x, problem.kp) + frac_laplacian_apply<double>(x, problem.kq);
      const Vector dpsi = weighted_power_grad<double>(x, a, p, h) +
                          weighted_power_grad<double>(x, b, q, h);
      *grad = (dphi - f * dpsi) / e.psi;
    }
    return f;
  };
  EigResult result = free_scale_minimize(quotient, start, options);
  result.residual = weak_residual(problem, result.u, result.lambda);
  return result;
}

EigResult lambda_star(const BoundedProblem& problem, const SolverOptions& options) {
  const Vector base = surrogate_start(problem.kp);
  std::vector<Vector> starts;
  for (const Vector& shape :
       {base, mask_positive(base, problem.a.values), mask_positive(base, problem.b.values)}) {
    if (combined_quotient(problem, shape) < kInf) starts.push_back(shape);
  }
  if (starts.empty()) {
    throw InfeasibleError("lambda_star: Psi(u) <= 0 for every sampled start");
  }
  auto runs = parallel_map<EigResult>(starts.size(), [&](std::size_t i) {
    return lambda_star_from(problem, starts[i], options);
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < runs.size(); ++i) {
    if (runs[i].lambda < runs[best].lambda) best = i;
  }
  return std::move(runs[best]);
}

std::string to_string(ArgminSide side) {
  switch (side) {
    case ArgminSide::p:
      return "p";
    case ArgminSide::q:
      return "q";
    case ArgminSide::both:
      return "both";
  }
  return "both";
}

ThresholdReport check_min_formula(const BoundedProblem& problem, const SolverOptions& options) {
  ThresholdReport report;
  report.eig_p = principal_single(problem.kp, problem.a, problem.params.p, options);
  report.eig_q = principal_single(problem.kq, problem.b, problem.params.q, options);
  report.eig_star = lambda_star(problem, options);
  report.lambda_1p = report.eig_p.lambda;
  report.lambda_1q = report.eig_q.lambda;
  report.lambda_star = report.eig_star.lambda;
  const double lower = std::min(report.lambda_1p, report.lambda_1q);
  report.min_gap = std::abs(report.lambda_star - lower);
  report.relative_gap = report.min_gap / lower;
  if (std::abs(report.lambda_1p - report.lambda_1q) <= options.tol_tie * lower) {
    report.argmin_side = ArgminSide::both;
  } else {
    report.argmin_side = report.lambda_1p < report.lambda_1q ? ArgminSide::p : ArgminSide::q;
  }
  report.formula_holds = report.min_gap <= options.tol_formula * lower;
  report.converged = report.eig_p.converged && report.eig_q.converged && report.eig_star.converged;
  return report;
}

EigResult principal_whole_space(const WholeSpaceProblem& problem, const SolverOptions& options,
                                const std::optional<Vector>& start) {
  const double p = problem.params.p;
  const double q = problem.params.q;
  const double h = problem.grid.h;
  const Vector& a = problem.a.values;

  FreeScaleQuotient quotient;
  quotient.objective = [&](const Vector& x, Vector* grad) {
    const double den = weighted_power<double>(x, a, p, h);
    if (!(den > 0.0)) return kInf;
    const double f = (seminorm_pow<double>(x, problem.kp) +
                      p / q * seminorm_pow<double>(x, problem.kq)) /
                     den;
    if (grad) {
      *grad = p / den *
              (frac_laplacian_apply<double>(x, problem.kp) +
               frac_laplacian_apply<double>(x, problem.kq) -
               f * weighted_power_grad<double>(x, a, p, h));
    }
    return f;
  };
  Vector x0 = start ? start->cwiseAbs() : surrogate_start(problem.kp);
  if (!(whole_space_quotient(problem, x0) < kInf)) {
    throw InfeasibleError("whole-space quotient: start has zero weighted mass");
  }
  EigResult result = free_scale_minimize(quotient, x0, options);
  result.residual = weak_residual(problem, result.u, result.lambda);
  return result;
}

double default_interpolation_t(const FracParams& params) {
  return 0.5 * std::sqrt((params.p - params.q) / params.p);
}

double interpolation_exponent(const FracParams& params, double t) {
  const double pstar = params.p_alpha_star();
  const double denom = std::isinf(pstar) ? 1.0 : 1.0 - (params.p - t) / pstar;
  if (!(denom > 0.0)) throw RegimeError("interpolation exponent: (p - t)/p*_alpha >= 1");
  return params.p * (1.0 - t) / denom;
}

double default_decay_exponent(const FracParams& params, double t) {
  const double s = interpolation_exponent(params, t);
  const double qstar = params.q_beta_star();
  if (std::isinf(qstar)) return 2.0;  // (q*/s)' = 1: need d > 1
  const double ratio = qstar / s;
  if (!(ratio > 1.0)) throw RegimeError("weight class: q*_beta / s must exceed 1");
  const double m = ratio / (ratio - 1.0);
  return 1.0 / m + 1.0;
}

std::function<double(double)> decaying_weight(double d) {
  return [d](double x) { return std::pow(1.0 + std::abs(x), -d); };
}

WholeSpaceProblem make_truncated_problem(const FracParams& params, double radius,
                                         double cells_per_unit,
                                         const std::function<double(double)>& weight) {
  if (!(radius > 0.0)) throw ParameterError("truncation radius must be positive");
  const auto n = static_cast<Eigen::Index>(std::llround(cells_per_unit * 2.0 * radius));
  const DomainGrid grid = build_grid(-radius, radius, std::max<Eigen::Index>(n, 2));
  return make_whole_space_problem(grid, params, sample_weight(grid, weight));
}

RnResult rn_principal(const FracParams& params, std::function<double(double)> weight,
                      const RnOptions& options) {
  FracParams whole = params;
  whole.regime = Regime::whole_space;
  whole.validate();
  if (options.radii.empty()) throw ParameterError("rn_principal: no radii");
  if (!std::is_sorted(options.radii.begin(), options.radii.end())) {
    throw ParameterError("rn_principal: radii must be increasing");
  }

  RnResult out;
  if (!weight) {
    out.decay_exponent = default_decay_exponent(whole, default_interpolation_t(whole));
    weight = decaying_weight(out.decay_exponent);
  }

  out.entries = parallel_map<RnEntry>(options.radii.size(), [&](std::size_t i) {
    RnEntry entry;
    entry.radius = options.radii[i];
    const WholeSpaceProblem problem =
        make_truncated_problem(whole, entry.radius, options.cells_per_unit, weight);
    entry.n = problem.grid.n;
    entry.eig = principal_whole_space(problem, options.solver);
    const WeightField ones{Vector::Ones(problem.grid.n)};
    const EigResult bound = principal_single(problem.kp, ones, whole.p, options.solver);
    entry.single_lower_bound = bound.lambda / problem.a.sup_norm();
    return entry;
  });

  for (std::size_t i = 1; i < out.entries.size(); ++i) {
    const double prev = out.entries[i - 1].eig.lambda;
    const double cur = out.entries[i].eig.lambda;
    if (cur > prev * (1.0 + 1e-10)) out.monotone = false;
    out.last_relative_change = std::abs(cur - prev) / prev;
  }
  return out;
}

double aligned_deviation(const Vector& u, const Vector& v) {
  const Vector uh = u / u.norm();
  const Vector vh = v / v.norm();
  return (uh - uh.dot(vh) * vh).norm();
}

SimplicityReport simplicity_probe(const std::function<EigResult(const Vector&)>& solve,
                                  Eigen::Index n, int n_starts, unsigned seed,
                                  double tolerance) {
  if (n_starts < 2) throw ParameterError("simplicity_probe: need at least two starts");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vector> starts(static_cast<std::size_t>(n_starts));
  for (auto& s : starts) {
    s.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) s(i) = unit(rng);
  }

  SimplicityReport report;
  report.starts = n_starts;
  report.runs = parallel_map<EigResult>(starts.size(), [&](std::size_t i) {
    return solve(starts[i]);
  });
  for (std::size_t i = 0; i < report.runs.size(); ++i) {
    const auto& ui = report.runs[i].u;
    report.all_converged = report.all_converged && report.runs[i].converged;
    report.all_nonnegative =
        report.all_nonnegative && (ui.array() >= 0.0).all() && ui.cwiseAbs().maxCoeff() > 0.0;
    for (std::size_t j = 0; j < i; ++j) {
      report.max_deviation =
          std::max(report.max_deviation, aligned_deviation(ui, report.runs[j].u));
    }
  }
  report.simple = report.max_deviation <= tolerance;
  return report;
}

SimplicityReport simplicity_probe(const KernelMatrix<double>& k, const WeightField& w, double r,
                                  int n_starts, const SolverOptions& options, double tolerance) {
  return simplicity_probe(
      [&](const Vector& start) { return principal_single(k, w, r, options, start); }, k.size(),
      n_starts, options.seed, tolerance);
}

SimplicityReport simplicity_probe(const WholeSpaceProblem& problem, int n_starts,
                                  const SolverOptions& options, double tolerance) {
  return simplicity_probe(
      [&](const Vector& start) { return principal_whole_space(problem, options, start); },
      problem.size(), n_starts, options.seed, tolerance);
}

}  // namespace fracpq
