#include "fracpq/mountainpass.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "fracpq/descent.hpp"
#include "fracpq/parallel.hpp"

namespace fracpq {

std::string to_string(PointKind kind) {
  switch (kind) {
    case PointKind::minimizer:
      return "minimizer";
    case PointKind::mountain_pass:
      return "mountain_pass";
    case PointKind::trivial:
      return "trivial";
  }
  return "trivial";
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::no_nontrivial:
      return "no_nontrivial";
    case Classification::threshold_degenerate:
      return "threshold_degenerate";
    case Classification::exists_positive:
      return "exists_positive";
    case Classification::unresolved:
      return "unresolved";
  }
  return "unresolved";
}

Functional functional_J(const BoundedProblem& problem, double lambda) {
  Functional f;
  f.value = [&problem, lambda](const Vector& u) { return evaluate_J(problem, u, lambda); };
  f.gradient = [&problem, lambda](const Vector& u) { return grad_J(problem, u, lambda); };
  f.residual = [&problem, lambda](const Vector& u) { return weak_residual(problem, u, lambda); };
  return f;
}

Functional functional_I(const WholeSpaceProblem& problem, double lambda) {
  Functional f;
  f.value = [&problem, lambda](const Vector& u) { return evaluate_I(problem, u, lambda); };
  f.gradient = [&problem, lambda](const Vector& u) { return grad_I(problem, u, lambda); };
  f.residual = [&problem, lambda](const Vector& u) { return weak_residual(problem, u, lambda); };
  return f;
}

// ---------------------------------------------------------------------------
// Geometry

namespace {

std::vector<Vector> sphere_directions(const KernelMatrix<double>& kp, int samples, unsigned seed,
                                      const std::vector<Vector>& extra) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vector> dirs;
  dirs.reserve(static_cast<std::size_t>(samples) + extra.size());
  for (const Vector& v : extra) {
    const double nrm = leading_norm(kp, v);
    if (nrm > 0.0) dirs.push_back(v / nrm);
  }
  for (int s = 0; s < samples; ++s) {
    Vector v(kp.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
    dirs.push_back(v / leading_norm(kp, v));
  }
  return dirs;
}

template <typename Value, typename Quotient>
GeometryEstimate sample_geometry(const KernelMatrix<double>& kp, Value value, Quotient quotient,
                                 const std::vector<double>& rho_grid, int samples,
                                 unsigned seed, const std::vector<Vector>& extra) {
  if (rho_grid.empty()) throw ParameterError("estimate_geometry: empty rho grid");
  if (samples < 1) throw ParameterError("estimate_geometry: need at least one sample");
  const std::vector<Vector> dirs = sphere_directions(kp, samples, seed, extra);

  GeometryEstimate g;
  g.samples = samples;
  g.rho_grid = rho_grid;
  g.deltas = parallel_map<double>(rho_grid.size(), [&](std::size_t k) {
    double delta = std::numeric_limits<double>::infinity();
    for (const Vector& d : dirs) delta = std::min(delta, value(Vector(rho_grid[k] * d)));
    return delta;
  });
  g.lambda_star_geom = std::numeric_limits<double>::infinity();
  for (double rho : rho_grid) {
    for (const Vector& d : dirs) g.lambda_star_geom = std::min(g.lambda_star_geom, quotient(Vector(rho * d)));
  }
  const auto best = std::max_element(g.deltas.begin(), g.deltas.end());
  g.delta = *best;
  g.rho = rho_grid[static_cast<std::size_t>(best - g.deltas.begin())];
  return g;
}

}  // namespace

GeometryEstimate estimate_geometry(const BoundedProblem& problem, double lambda,
                                   const std::vector<double>& rho_grid, int samples,
                                   unsigned seed, const std::vector<Vector>& extra_directions) {
  if (!(lambda >= 0.0)) throw ParameterError("estimate_geometry: lambda must be >= 0");
  return sample_geometry(
      problem.kp, [&](const Vector& u) { return evaluate_J(problem, u, lambda); },
      [&](const Vector& u) { return combined_quotient(problem, u); }, rho_grid, samples, seed,
      extra_directions);
}

GeometryEstimate estimate_geometry(const WholeSpaceProblem& problem, double lambda,
                                   const std::vector<double>& rho_grid, int samples,
                                   unsigned seed, const std::vector<Vector>& extra_directions) {
  if (!(lambda >= 0.0)) throw ParameterError("estimate_geometry: lambda must be >= 0");
  return sample_geometry(
      problem.kp, [&](const Vector& u) { return evaluate_I(problem, u, lambda); },
      [&](const Vector& u) { return whole_space_quotient(problem, u); }, rho_grid, samples, seed,
      extra_directions);
}

// ---------------------------------------------------------------------------
// Minimization

CriticalPoint minimize_J_from(const BoundedProblem& problem, double lambda, const Vector& start,
                              const MinimizeOptions& options) {
  if (start.size() != problem.size()) throw DimensionError("minimize_J: start has wrong length");
  const double p = problem.params.p;
  const double base = 1.0 + start.norm();
  const double eps_zero = options.zero_factor * base;
  const double runaway = options.runaway_factor * base;

  DescentProblem dp;
  dp.objective = [&](const Vector& x, Vector* grad) {
    if (grad) *grad = grad_J(problem, x, lambda);
    return evaluate_J(problem, x, lambda);
  };
  dp.project = [](const Vector& v) -> Vector { return v.cwiseAbs(); };
  dp.stop = [&](const DescentState& s) {
    const double nrm = s.x.norm();
    if (nrm <= eps_zero || nrm > runaway) return true;
    return s.f < 0.0 && weak_residual<double>(s.x, s.g, p) <= options.tol_residual;
  };
  DescentOptions descent;
  descent.max_iter = options.max_iter;
  DescentResult run = spg_minimize(dp, start, descent);

  CriticalPoint cp;
  cp.lambda = lambda;
  cp.u = std::move(run.x);
  cp.level = run.f;
  cp.residual = weak_residual(problem, cp.u, lambda);
  cp.iterations = run.iterations;
  cp.history = std::move(run.history);
  const double nrm = cp.u.norm();
  if (nrm <= eps_zero) {
    cp.kind = PointKind::trivial;
    cp.converged = true;
  } else {
    cp.kind = PointKind::minimizer;
    cp.converged = nrm <= runaway && cp.level < 0.0 && cp.residual <= options.tol_residual;
    if (cp.converged) cp.branch = "minimizer";
  }
  return cp;
}

std::vector<CriticalPoint> minimize_J_all(const BoundedProblem& problem, double lambda,
                                          const std::vector<Vector>& starts,
                                          const MinimizeOptions& options) {
  return parallel_map<CriticalPoint>(starts.size(), [&](std::size_t i) {
    return minimize_J_from(problem, lambda, starts[i], options);
  });
}

CriticalPoint minimize_J(const BoundedProblem& problem, double lambda,
                         const std::vector<Vector>& starts, const MinimizeOptions& options) {
  if (starts.empty()) throw ParameterError("minimize_J: no starts");
  std::vector<CriticalPoint> runs = minimize_J_all(problem, lambda, starts, options);
  auto rank = [](const CriticalPoint& c) {
    if (c.converged && c.kind == PointKind::minimizer) return 0;
    if (c.converged) return 1;
    return 2;
  };
  std::size_t best = 0;
  for (std::size_t i = 1; i < runs.size(); ++i) {
    const int ri = rank(runs[i]);
    const int rb = rank(runs[best]);
    if (ri < rb || (ri == rb && runs[i].level < runs[best].level)) best = i;
  }
  return std::move(runs[best]);
}

bool local_min_certificate(const Functional& f, const Vector& u, double radius, int samples,
                           unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double level = f.value(u);
  for (int s = 0; s < samples; ++s) {
    Vector d(u.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = normal(rng);
    if (f.value(u + radius * d / d.norm()) < level) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Mountain pass

namespace {

Matrix fd_hessian(const Functional& f, const Vector& x) {
  const Eigen::Index n = x.size();
  Matrix H(n, n);
  Vector y = x;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double eps = 1e-6 * std::max(1.0, std::abs(x(j)));
    y(j) = x(j) + eps;
    const Vector gp = f.gradient(y);
    y(j) = x(j) - eps;
    const Vector gm = f.gradient(y);
    y(j) = x(j);
    H.col(j) = (gp - gm) / (2.0 * eps);
  }
  return 0.5 * (H + H.transpose());
}

std::vector<Vector> equal_arclength(const std::vector<Vector>& pts) {
  const std::size_t m = pts.size() - 1;
  std::vector<double> cum(m + 1, 0.0);
  for (std::size_t i = 1; i <= m; ++i) cum[i] = cum[i - 1] + (pts[i] - pts[i - 1]).norm();
  std::vector<Vector> out(pts.size());
  out.front() = pts.front();
  out.back() = pts.back();
  const double total = cum[m];
  if (!(total > 0.0)) return pts;
  std::size_t seg = 0;
  for (std::size_t j = 1; j < m; ++j) {
    const double target = total * static_cast<double>(j) / static_cast<double>(m);
    while (seg + 1 < m && cum[seg + 1] < target) ++seg;
    const double len = cum[seg + 1] - cum[seg];
    const double t = len > 0.0 ? (target - cum[seg]) / len : 0.0;
    out[j] = (1.0 - t) * pts[seg] + t * pts[seg + 1];
  }
  return out;
}

std::size_t argmax(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
  std::size_t k = lo;
  for (std::size_t i = lo + 1; i <= hi; ++i) {
    if (v[i] > v[k]) k = i;
  }
  return k;
}

}  // namespace

MountainPassResult mountain_pass(const Functional& f, const Vector& start, const Vector& end,
                                 const MountainPassOptions& options) {
  if (options.m < 2) throw ParameterError("mountain_pass: need m >= 2");
  if (start.size() != end.size()) throw DimensionError("mountain_pass: endpoint sizes differ");
  const std::size_t m = static_cast<std::size_t>(options.m);

  MountainPassResult out;
  auto& pts = out.path.points;
  auto& lv = out.path.levels;
  pts.resize(m + 1);
  lv.resize(m + 1);
  for (std::size_t i = 0; i <= m; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(m);
    pts[i] = (1.0 - t) * start + t * end;
    lv[i] = f.value(pts[i]);
  }
  auto path_max = [&] { return *std::max_element(lv.begin(), lv.end()); };

  // Phase 1: steepest descent on the highest interior node.
  double step = -1.0;
  int it = 0;
  for (; it < options.max_descent_iter; ++it) {
    const std::size_t k = argmax(lv, 1, m - 1);
    if (f.residual(pts[k]) <= options.switch_residual) break;
    // Move across the path only; sliding along it would drain nodes into the
    // valleys at the ends.
    Vector g = f.gradient(pts[k]);
    const Vector chord = pts[k + 1] - pts[k - 1];
    if (chord.norm() > 0.0) {
      const Vector tangent = chord / chord.norm();
      g -= g.dot(tangent) * tangent;
    }
    const double g2 = g.squaredNorm();
    if (!(g2 > 0.0)) break;
    if (step < 0.0) step = 1e-2 * std::max(pts[k].norm(), 1e-12) / std::sqrt(g2);
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      Vector trial = pts[k] - step * g;
      const double ft = f.value(trial);
      if (ft <= lv[k] - 1e-4 * step * g2) {
        pts[k] = std::move(trial);
        lv[k] = ft;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    step *= 1.5;

    if ((it + 1) % options.reparam_every == 0) {
      std::vector<Vector> moved = equal_arclength(pts);
      std::vector<double> ml(m + 1);
      for (std::size_t i = 0; i <= m; ++i) ml[i] = f.value(moved[i]);
      // Keep the level sequence monotone: reject a respread that raises the max.
      if (*std::max_element(ml.begin(), ml.end()) <= path_max()) {
        pts = std::move(moved);
        lv = std::move(ml);
      }
    }
    out.max_history.push_back(path_max());
  }
  out.descent_iterations = it;

  // Phase 2: damped Newton on the gradient from the path maximum. The Newton
  // direction is always a descent direction for |grad|^2 / 2.
  Vector x = pts[argmax(lv, 1, m - 1)];
  Vector g = f.gradient(x);
  double merit = 0.5 * g.squaredNorm();
  bool converged = false;
  int nit = 0;
  for (; nit <= options.max_newton_iter; ++nit) {
    if (f.residual(x) <= options.tol_mp) {
      converged = true;
      break;
    }
    if (nit == options.max_newton_iter) break;
    const Matrix H = fd_hessian(f, x);
    const Vector d = H.colPivHouseholderQr().solve(-g);
    if (!d.allFinite()) break;
    bool accepted = false;
    for (double t = 1.0; t > 1e-10; t *= 0.5) {
      const Vector y = x + t * d;
      const Vector gy = f.gradient(y);
      const double my = 0.5 * gy.squaredNorm();
      if (std::isfinite(my) && my <= (1.0 - 1e-4 * t) * merit) {
        x = y;
        g = gy;
        merit = my;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  out.newton_iterations = nit;

  CriticalPoint& cp = out.point;
  cp.u = x;
  cp.level = f.value(x);
  cp.residual = f.residual(x);
  cp.iterations = it + nit;
  cp.history = out.max_history;
  // A pass lies strictly above both endpoints.
  const double floor = std::max(lv.front(), lv.back());
  const bool nontrivial = cp.level > floor + 1e-12 * std::max(1.0, std::abs(floor));
  cp.converged = converged && nontrivial;
  cp.kind = nontrivial ? PointKind::mountain_pass : PointKind::trivial;
  if (cp.converged) cp.branch = "mountain_pass";
  return out;
}

MountainPassResult mountain_pass(const BoundedProblem& problem, double lambda, const Vector& e,
                                 const MountainPassOptions& options) {
  if (!(evaluate_J(problem, e, lambda) < 0.0)) {
    throw ParameterError("mountain_pass: endpoint must satisfy J(e) < 0");
  }
  MountainPassResult r =
      mountain_pass(functional_J(problem, lambda), Vector::Zero(problem.size()), e, options);
  r.point.lambda = lambda;
  return r;
}

MountainPassResult mountain_pass(const WholeSpaceProblem& problem, double lambda,
                                 const Vector& e, const MountainPassOptions& options) {
  if (!(evaluate_I(problem, e, lambda) < 0.0)) {
    throw ParameterError("mountain_pass: endpoint must satisfy I(e) < 0");
  }
  MountainPassResult r =
      mountain_pass(functional_I(problem, lambda), Vector::Zero(problem.size()), e, options);
  r.point.lambda = lambda;
  return r;
}

namespace {

template <typename Value>
Vector double_until_negative(const KernelMatrix<double>& kp, Value value, const Vector& direction,
                             double rho, double t_cap) {
  if (!(direction.cwiseAbs().maxCoeff() > 0.0)) {
    throw ParameterError("find_descent_endpoint: zero direction");
  }
  for (double t = 1.0; t <= t_cap; t *= 2.0) {
    const Vector e = t * direction;
    if (value(e) < 0.0 && leading_norm(kp, e) > rho) return e;
  }
  throw NoDescentDirectionError(
      "find_descent_endpoint: functional stays nonnegative along the ray (lambda below "
      "threshold?)");
}

}  // namespace

Vector find_descent_endpoint(const BoundedProblem& problem, double lambda,
                             const Vector& direction, double rho, double t_cap) {
  return double_until_negative(
      problem.kp, [&](const Vector& u) { return evaluate_J(problem, u, lambda); }, direction, rho,
      t_cap);
}

Vector find_descent_endpoint(const WholeSpaceProblem& problem, double lambda,
                             const Vector& direction, double rho, double t_cap) {
  return double_until_negative(
      problem.kp, [&](const Vector& u) { return evaluate_I(problem, u, lambda); }, direction, rho,
      t_cap);
}

double nonexistence_certificate(const BoundedProblem& problem, const Vector& u) {
  const double p = problem.params.p;
  const double q = problem.params.q;
  const double s = p == q ? 1.0 : std::pow(p / q, 1.0 / (p - q));
  return combined_quotient(problem, s * u);
}

// ---------------------------------------------------------------------------
// Sweep

std::vector<Vector> sweep_starts(const BoundedProblem& problem, const ThresholdReport& threshold,
                                 int n_starts, unsigned seed) {
  std::vector<Vector> starts{threshold.eig_p.u, threshold.eig_q.u};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  while (static_cast<int>(starts.size()) < std::max(n_starts, 2)) {
    Vector v(problem.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = std::abs(normal(rng));
    starts.push_back(v);
  }
  for (Vector& s : starts) s /= leading_norm(problem.kp, s);
  return starts;
}

SolveOutcome solve_at(const BoundedProblem& problem, double lambda,
                      const ThresholdReport& threshold, const std::vector<Vector>& starts,
                      const SweepOptions& options) {
  if (starts.empty()) throw ParameterError("solve_at: no starts");
  SolveOutcome out;
  SweepRow& row = out.row;
  row.lambda = lambda;
  row.ratio = lambda / threshold.lambda_star;
  const std::vector<CriticalPoint> runs = minimize_J_all(problem, lambda, starts, options.minimize);
  const CriticalPoint* best = nullptr;
  for (const auto& r : runs) {
    if (r.converged && r.kind == PointKind::minimizer && (!best || r.level < best->level)) {
      best = &r;
    }
  }
  auto record = [&](const CriticalPoint& c) {
    out.point = c;
    row.level = c.level;
    row.residual = c.residual;
    row.norm = leading_norm(problem.kp, c.u);
    row.converged = c.converged;
    row.branch = c.branch;
  };

  const double gap = (lambda - threshold.lambda_star) / threshold.lambda_star;
  if (gap <= options.degenerate_margin) {
    record(best ? *best : runs.front());
    if (std::abs(gap) <= options.degenerate_margin) {
      row.classification = Classification::threshold_degenerate;
    } else {
      const bool all_trivial = std::all_of(runs.begin(), runs.end(), [](const CriticalPoint& c) {
        return c.kind == PointKind::trivial;
      });
      row.classification = all_trivial ? Classification::no_nontrivial : Classification::unresolved;
    }
  } else if (best && lambda > threshold.lambda_1q) {
    record(*best);
    row.classification = Classification::exists_positive;
  } else if (lambda > threshold.lambda_1p) {
    try {
      const Vector e = find_descent_endpoint(problem, lambda, threshold.eig_p.u);
      const MountainPassResult mp = mountain_pass(problem, lambda, e, options.mountain);
      record(mp.point);
      row.classification =
          mp.point.converged ? Classification::exists_positive : Classification::unresolved;
    } catch (const NoDescentDirectionError&) {
      record(runs.front());
      row.classification = Classification::unresolved;
    }
  } else {
    record(best ? *best : runs.front());
    row.classification = Classification::unresolved;
  }
  return out;
}

SweepResult sweep_lambda(const BoundedProblem& problem, const std::vector<double>& lambda_grid,
                         const SweepOptions& options) {
  if (!std::is_sorted(lambda_grid.begin(), lambda_grid.end())) {
    throw ParameterError("sweep_lambda: lambda grid must be sorted ascending");
  }
  SweepResult out;
  if (lambda_grid.empty()) return out;
  out.threshold = check_min_formula(problem, options.solver);
  const std::vector<Vector> starts =
      sweep_starts(problem, out.threshold, options.n_starts, options.seed);
  for (double lambda : lambda_grid) {
    out.rows.push_back(solve_at(problem, lambda, out.threshold, starts, options).row);
  }
  return out;
}

}  // namespace fracpq
