#pragma once

// Principal eigenvalues by Rayleigh-quotient minimization.
//
//   single operator  [u]^r_{s,r} / (h sum w |u|^r)          scale invariant
//   combined         Phi(u) / Psi(u)                         bounded domain
//   whole space      ([u]^p + (p/q)[u]^q) / (h sum a |u|^p)  truncated domain
//
// The last two are not scale invariant when q < p; their infima are reached
// only along rays t u with t -> 0 or t -> infinity. Those solvers therefore
// keep the iterate norm free (bounded by ray_escape_ratio) and report a
// ray_escape flag instead of normalizing.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fracpq/energy.hpp"

namespace fracpq {

struct SolverOptions {
  double tol_quotient = 1e-10;  // relative successive decrease
  double tol_residual = 1e-6;
  int max_iter = 50000;
  /// Free-scale quotients: the iterate norm stays within [1/ratio, ratio]
  /// times the start norm.
  double ray_escape_ratio = 1e12;
  /// Relative threshold for check_min_formula.
  double tol_formula = 1e-3;
  /// lambda_1p and lambda_1q closer than this (relative) count as a tie.
  double tol_tie = 1e-6;
  unsigned seed = 20240611u;
};

struct EigResult {
  double lambda = 0.0;
  /// Final iterate. Single-operator solves return it normalized to
  /// h sum w |u|^r = 1; free-scale solves return the raw iterate.
  Vector u;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;
  bool ray_escape = false;
  /// ||u||_2 / ||u_start||_2 for free-scale solves, 1 otherwise.
  double scale_ratio = 1.0;
};

/// Scale-invariant single-operator quotient [u]^r / (h sum w |u|^r);
/// +inf when the denominator is not positive.
double single_quotient(const KernelMatrix<double>& k, const Vector& w, const Vector& u);
double combined_quotient(const BoundedProblem& problem, const Vector& u);
double whole_space_quotient(const WholeSpaceProblem& problem, const Vector& u);

/// ||L_r u - lambda h w |u|^{r-2} u||_inf / max(1, ||u||_inf^{r-1}).
double eigen_residual(const KernelMatrix<double>& k, const Vector& w, const Vector& u,
                      double lambda);

/// Positive first eigenvector of the quadratic surrogate built from k's pair
/// weights (the r = 2 form of the same graph), unit l2 norm.
Vector surrogate_start(const KernelMatrix<double>& k);

/// lambda_{1,r}^{w,Omega}. Throws InfeasibleError when w has no positive part.
EigResult principal_single(const KernelMatrix<double>& k, const WeightField& w, double r,
                           const SolverOptions& options = {},
                           const std::optional<Vector>& start = std::nullopt);

/// lambda_1^*(Omega) = inf Phi/Psi over {Psi > 0}, multistart.
EigResult lambda_star(const BoundedProblem& problem, const SolverOptions& options = {});
/// Single start; throws InfeasibleError if Psi(start) <= 0.
EigResult lambda_star_from(const BoundedProblem& problem, const Vector& start,
                           const SolverOptions& options = {});

enum class ArgminSide { p, q, both };
std::string to_string(ArgminSide side);

struct ThresholdReport {
  double lambda_star = 0.0;
  double lambda_1p = 0.0;
  double lambda_1q = 0.0;
  double min_gap = 0.0;
  double relative_gap = 0.0;
  ArgminSide argmin_side = ArgminSide::both;
  bool formula_holds = false;
  bool converged = false;
  EigResult eig_p;
  EigResult eig_q;
  EigResult eig_star;
};

ThresholdReport check_min_formula(const BoundedProblem& problem,
                                  const SolverOptions& options = {});

/// Whole-space quotient on a fixed truncated problem.
EigResult principal_whole_space(const WholeSpaceProblem& problem,
                                const SolverOptions& options = {},
                                const std::optional<Vector>& start = std::nullopt);

/// Interpolation parameter t = (1/2) sqrt((p-q)/p).
double default_interpolation_t(const FracParams& params);
/// s from (p - t)/p*_alpha + p (1 - t)/s = 1.
double interpolation_exponent(const FracParams& params, double t);
/// Decay d of a(x) = (1+|x|)^{-d}: one more than the integrability threshold
/// 1/m of a in L^m, m = ((q*_beta / s))'.
double default_decay_exponent(const FracParams& params, double t);
std::function<double(double)> decaying_weight(double d);

struct RnOptions {
  std::vector<double> radii{1.0, 2.0, 4.0, 8.0};
  /// Cells per unit length; n = round(cells_per_unit * 2R).
  double cells_per_unit = 16.0;
  SolverOptions solver{};
};

struct RnEntry {
  double radius = 0.0;
  Eigen::Index n = 0;
  EigResult eig;
  /// lambda_1(single p operator, weight 1) / ||a||_inf on the same grid.
  double single_lower_bound = 0.0;
};

struct RnResult {
  std::vector<RnEntry> entries;
  bool monotone = true;
  /// |lambda(R_m) - lambda(R_{m-1})| / lambda(R_{m-1}).
  double last_relative_change = 0.0;
  double decay_exponent = 0.0;
};

/// Throws RegimeError unless 1 < q < p < q*_beta. An empty weight generator
/// selects decaying_weight(default_decay_exponent(...)).
RnResult rn_principal(const FracParams& params, std::function<double(double)> weight,
                      const RnOptions& options = {});

WholeSpaceProblem make_truncated_problem(const FracParams& params, double radius,
                                         double cells_per_unit,
                                         const std::function<double(double)>& weight);

struct SimplicityReport {
  int starts = 0;
  double max_deviation = 0.0;
  bool all_nonnegative = true;
  bool all_converged = true;
  bool simple = false;
  std::vector<EigResult> runs;
};

/// Runs `solve` from n_starts random nonnegative starts (seeded) and reports
/// the largest pairwise deviation of the l2-normalized results after optimal
/// scalar alignment.
SimplicityReport simplicity_probe(const std::function<EigResult(const Vector&)>& solve,
                                  Eigen::Index n, int n_starts, unsigned seed,
                                  double tolerance);

SimplicityReport simplicity_probe(const KernelMatrix<double>& k, const WeightField& w,
                                  double r, int n_starts, const SolverOptions& options = {},
                                  double tolerance = 1e-4);
SimplicityReport simplicity_probe(const WholeSpaceProblem& problem, int n_starts,
                                  const SolverOptions& options = {}, double tolerance = 1e-4);

/// Largest sin-angle between l2-normalized vectors.
double aligned_deviation(const Vector& u, const Vector& v);

}  // namespace fracpq
