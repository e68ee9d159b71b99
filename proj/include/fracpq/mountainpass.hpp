#pragma once

// Critical points of J = Phi - lambda Psi (bounded domain) and of the
// whole-space functional I: global/local minimization, a path-deformation
// mountain-pass solver, sphere sampling of the mountain-pass geometry, and the
// lambda sweep that classifies each lambda against the threshold.

#include <functional>
#include <string>
#include <vector>

#include "fracpq/eigensolver.hpp"

namespace fracpq {

enum class PointKind { minimizer, mountain_pass, trivial };
std::string to_string(PointKind kind);

struct CriticalPoint {
  Vector u;
  double level = 0.0;
  double residual = 0.0;
  PointKind kind = PointKind::trivial;
  double lambda = 0.0;
  bool converged = false;
  int iterations = 0;
  /// "minimizer", "mountain_pass" or "" -- which construction produced u.
  std::string branch;
  std::vector<double> history;
};

/// A smooth functional with its gradient and a scale-aware residual.
struct Functional {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::function<double(const Vector&)> residual;
};

Functional functional_J(const BoundedProblem& problem, double lambda);
Functional functional_I(const WholeSpaceProblem& problem, double lambda);

struct GeometryEstimate {
  double rho = 0.0;
  double delta = 0.0;
  /// min Phi/Psi over the sampled directions with Psi > 0.
  double lambda_star_geom = 0.0;
  int samples = 0;
  std::vector<double> rho_grid;
  /// Sampled minimum of J on each sphere, aligned with rho_grid.
  std::vector<double> deltas;
};

/// Samples J on spheres [u]_{alpha,p} = rho. Directions are standard normal
/// draws in sequence from `seed`, so a larger sample count always contains
/// the smaller one. `extra_directions` are added to every sphere.
GeometryEstimate estimate_geometry(const BoundedProblem& problem, double lambda,
                                   const std::vector<double>& rho_grid, int samples,
                                   unsigned seed = 7u,
                                   const std::vector<Vector>& extra_directions = {});
GeometryEstimate estimate_geometry(const WholeSpaceProblem& problem, double lambda,
                                   const std::vector<double>& rho_grid, int samples,
                                   unsigned seed = 7u,
                                   const std::vector<Vector>& extra_directions = {});

struct MinimizeOptions {
  double tol_residual = 1e-8;
  int max_iter = 50000;
  /// Relative zero threshold: ||u|| <= zero_factor (1 + ||u_start||) is trivial.
  double zero_factor = 1e-8;
  /// ||u|| > runaway_factor (1 + ||u_start||) stops as unbounded (converged = false).
  double runaway_factor = 1e8;
};

/// Projected descent on J from one start (iterates replaced by |u|).
CriticalPoint minimize_J_from(const BoundedProblem& problem, double lambda, const Vector& start,
                              const MinimizeOptions& options = {});
/// One result per start, in start order.
std::vector<CriticalPoint> minimize_J_all(const BoundedProblem& problem, double lambda,
                                          const std::vector<Vector>& starts,
                                          const MinimizeOptions& options = {});
/// Best run: converged nontrivial points first, then lowest level.
CriticalPoint minimize_J(const BoundedProblem& problem, double lambda,
                         const std::vector<Vector>& starts, const MinimizeOptions& options = {});

/// True when no sampled point at distance `radius` (l2) has a lower level.
bool local_min_certificate(const Functional& f, const Vector& u, double radius, int samples,
                           unsigned seed = 11u);

struct MountainPassOptions {
  int m = 40;
  int reparam_every = 10;
  int max_descent_iter = 4000;
  /// Descent phase hands over to the Newton refinement below this residual.
  double switch_residual = 1e-3;
  double tol_mp = 1e-7;
  int max_newton_iter = 60;
};

struct MountainPassPath {
  std::vector<Vector> points;
  std::vector<double> levels;
};

struct MountainPassResult {
  CriticalPoint point;
  MountainPassPath path;
  /// Path-max level after each descent iteration (non-increasing).
  std::vector<double> max_history;
  int descent_iterations = 0;
  int newton_iterations = 0;
};

/// Generic path deformation between `start` and `end`: steepest descent on the
/// path maximum with equal-arclength reparametrization, then damped Newton on
/// the gradient from the final path maximum.
MountainPassResult mountain_pass(const Functional& f, const Vector& start, const Vector& end,
                                 const MountainPassOptions& options = {});
/// Path from 0 to e for J; throws ParameterError unless J(e) < 0.
MountainPassResult mountain_pass(const BoundedProblem& problem, double lambda, const Vector& e,
                                 const MountainPassOptions& options = {});
MountainPassResult mountain_pass(const WholeSpaceProblem& problem, double lambda,
                                 const Vector& e, const MountainPassOptions& options = {});

/// e = t * direction, t doubled from 1 until J(e) < 0 and [e]_{alpha,p} > rho.
/// Throws NoDescentDirectionError when t exceeds t_cap.
Vector find_descent_endpoint(const BoundedProblem& problem, double lambda,
                             const Vector& direction, double rho = 0.0, double t_cap = 1e12);
Vector find_descent_endpoint(const WholeSpaceProblem& problem, double lambda,
                             const Vector& direction, double rho = 0.0, double t_cap = 1e12);

/// Phi(s u)/Psi(s u) with s^{p-q} = p/q; any critical point with lambda below
/// the threshold would have to push this below lambda_star.
double nonexistence_certificate(const BoundedProblem& problem, const Vector& u);

enum class Classification { no_nontrivial, threshold_degenerate, exists_positive, unresolved };
std::string to_string(Classification c);

struct SweepRow {
  double lambda = 0.0;
  double ratio = 0.0;  // lambda / lambda_star
  Classification classification = Classification::unresolved;
  std::string branch;
  double level = 0.0;
  double residual = 0.0;
  double norm = 0.0;
  bool converged = false;
};

struct SweepOptions {
  double degenerate_margin = 1e-3;
  int n_starts = 4;
  unsigned seed = 20240611u;
  SolverOptions solver{};
  MinimizeOptions minimize{};
  MountainPassOptions mountain{};
};

struct SweepResult {
  ThresholdReport threshold;
  std::vector<SweepRow> rows;
};

/// phi_p, phi_q and seeded |normal| draws, each scaled to [u]_{alpha,p} = 1.
std::vector<Vector> sweep_starts(const BoundedProblem& problem, const ThresholdReport& threshold,
                                 int n_starts, unsigned seed);

struct SolveOutcome {
  SweepRow row;
  CriticalPoint point;
};

/// Classifies one lambda: below the threshold every descent must collapse to
/// 0; above it the minimizer branch (lambda > lambda_1q) is tried first, then
/// the mountain-pass branch (lambda > lambda_1p) from 0 to a multiple of phi_p.
SolveOutcome solve_at(const BoundedProblem& problem, double lambda,
                      const ThresholdReport& threshold, const std::vector<Vector>& starts,
                      const SweepOptions& options = {});

/// Throws ParameterError unless lambda_grid is sorted ascending.
SweepResult sweep_lambda(const BoundedProblem& problem, const std::vector<double>& lambda_grid,
                         const SweepOptions& options = {});

}  // namespace fracpq
