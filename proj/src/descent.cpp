#include "fracpq/descent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fracpq {

DescentResult spg_minimize(const DescentProblem& problem, const Vector& x0,
                           const DescentOptions& options) {
  auto project = [&](const Vector& v) { return problem.project ? problem.project(v) : v; };

  DescentResult result;
  Vector x = project(x0);
  Vector g;
  double f = problem.objective(x, &g);
  result.history.push_back(f);
  if (!std::isfinite(f)) {
    result.x = x;
    result.f = f;
    result.g = g;
    return result;
  }

  // First trial moves about 1% of the iterate magnitude.
  const double gmax = g.cwiseAbs().maxCoeff();
  const double xmax = x.cwiseAbs().maxCoeff();
  double step = gmax > 0.0 ? 1e-2 * std::max(xmax, 1e-12) / gmax : 1.0;
  double previous_f = f;

  int iter = 0;
  for (; iter < options.max_iter; ++iter) {
    if (problem.stop && iter > 0 && problem.stop(DescentState{x, f, g, previous_f, iter})) {
      result.converged = true;
      break;
    }
    if (!g.allFinite() || g.cwiseAbs().maxCoeff() == 0.0) {
      result.converged = g.allFinite();
      break;
    }

    Vector trial;
    double trial_f = std::numeric_limits<double>::infinity();
    double s = std::clamp(step, options.min_step, options.max_step);
    bool accepted = false;
    for (int bt = 0; bt <= options.max_backtracks; ++bt) {
      trial = project(x - s * g);
      trial_f = problem.objective(trial, nullptr);
      const double moved = (trial - x).squaredNorm();
      if (std::isfinite(trial_f) && trial_f <= f - options.armijo * moved / s &&
          (trial_f < f || moved == 0.0)) {
        accepted = true;
        break;
      }
      s *= 0.5;
      if (s < options.min_step) break;
    }
    if (!accepted) break;  // no decrease possible at machine precision

    Vector trial_g;
    trial_f = problem.objective(trial, &trial_g);
    const Vector dx = trial - x;
    const Vector dg = trial_g - g;
    previous_f = f;
    x = std::move(trial);
    f = trial_f;
    g = std::move(trial_g);

    if (problem.post_step) problem.post_step(x, f, g);
    result.history.push_back(f);

    const double curvature = dx.dot(dg);
    if (curvature > 0.0 && std::isfinite(curvature)) {
      step = dx.squaredNorm() / curvature;
    } else {
      step = 2.0 * s;
    }
  }
  result.iterations = iter;
  result.x = std::move(x);
  result.f = f;
  result.g = std::move(g);
  return result;
}

}  // namespace fracpq
