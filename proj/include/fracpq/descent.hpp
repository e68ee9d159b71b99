#pragma once

// Monotone spectral projected gradient: Barzilai-Borwein trial steps with
// Armijo-type backtracking on the projected point. Shared by every
// minimization in the library.

#include <functional>
#include <vector>

#include "fracpq/domain.hpp"

namespace fracpq {

struct DescentOptions {
  int max_iter = 50000;
  /// Sufficient-decrease constant: accept when f(P(x - s g)) <= f(x) - c |P(x - s g) - x|^2 / s.
  double armijo = 1e-4;
  double min_step = 1e-300;
  double max_step = 1e300;
  int max_backtracks = 60;
};

struct DescentState {
  const Vector& x;
  double f;
  const Vector& g;
  double previous_f;
  int iteration;
};

struct DescentProblem {
  /// Returns f(x); fills *gradient when non-null. +inf marks infeasible points.
  std::function<double(const Vector&, Vector*)> objective;
  /// Projection onto the admissible set; identity when empty.
  std::function<Vector(const Vector&)> project;
  /// Stationarity test evaluated after every accepted step.
  std::function<bool(const DescentState&)> stop;
  /// Optional extra move after each accepted step (must not increase f).
  std::function<void(Vector& x, double& f, Vector& g)> post_step;
};

struct DescentResult {
  Vector x;
  double f = 0.0;
  Vector g;
  int iterations = 0;
  bool converged = false;
  /// f after every accepted step, starting with f(x0).
  std::vector<double> history;
};

/// x0 is projected before the first evaluation.
DescentResult spg_minimize(const DescentProblem& problem, const Vector& x0,
                           const DescentOptions& options = {});

}  // namespace fracpq
