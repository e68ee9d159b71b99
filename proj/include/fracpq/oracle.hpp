#pragma once

// Brute-force references for the solvers: a dense generalized eigensolver for
// the quadratic (p = q = 2) case, exhaustive angular search on tiny grids,
// finite-difference gradients, a quadratic saddle with known critical point,
// and random-sampling checks of the pointwise inequalities behind the theory.

#include <functional>
#include <string>
#include <vector>

#include "fracpq/mountainpass.hpp"

namespace fracpq {

/// Symmetric matrix of the r = 2 seminorm: u^T A u = seminorm_pow(u, k).
Matrix quadratic_form(const KernelMatrix<double>& k);

/// Cyclic Jacobi for a symmetric matrix; eigenvalues ascending, eigenvectors
/// in matching columns.
struct SymmetricEig {
  Vector values;
  Matrix vectors;
  int sweeps = 0;
};
SymmetricEig jacobi_eigen(const Matrix& S, double tol = 1e-15, int max_sweeps = 100);

struct DenseEig {
  /// Finite positive eigenvalues of S x = lambda D x, ascending.
  Vector values;
  /// Matching eigenvectors, normalized x^T D x = 1.
  Matrix vectors;
  /// Modes with x^T D x <= 0 (no finite positive eigenvalue).
  Eigen::Index excluded = 0;
};

/// S symmetric positive definite, D symmetric and possibly indefinite. Works on
/// D x = mu S x through the Cholesky factor of S, so indefinite D is handled by
/// dropping modes with mu <= 0.
DenseEig dense_generalized_eig(const Matrix& S, const Matrix& D);

/// (A + B) x = lambda h diag(a + b) x for a p = q = 2 problem.
DenseEig dense_linear_eig(const KernelMatrix<double>& kp, const KernelMatrix<double>& kq,
                          const Vector& a, const Vector& b);
/// A x = lambda h diag(w) x: the r = 2 single-operator problem.
DenseEig dense_single_eig(const KernelMatrix<double>& k, const Vector& w);

struct SubspaceResult {
  double minimum = 0.0;
  Vector argmin;
  long evaluations = 0;
};

/// Minimum of `quotient` over a uniform angular grid (resolution points per
/// angle, endpoints included) of the unit sphere's nonnegative orthant.
/// Grids are nested when (resolution - 1) divides (finer - 1). n <= 4.
SubspaceResult subspace_grid_search(const std::function<double(const Vector&)>& quotient,
                                    Eigen::Index n, int resolution);

Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& u, double step);

/// Q(u) = (1/2)(u - c)^T M (u - c) + c0 with M the Hessian of the p = q = 2
/// functional J at lambda. lambda between the first two dense eigenvalues
/// gives exactly one negative direction, so c is a saddle at level c0.
/// start = 0 and end are chosen below c0 on opposite sides of the saddle,
/// with different transverse offsets so the straight path misses c.
struct QuadraticSaddle {
  Matrix M;
  Vector center;
  double level = 1.0;
  Vector start;
  Vector end;
  Functional functional() const;
};
QuadraticSaddle quadratic_saddle(const KernelMatrix<double>& kp, const KernelMatrix<double>& kq,
                                 const Vector& a, const Vector& b, double lambda);

struct InequalityReport {
  std::string name;
  long samples = 0;
  long violations = 0;
  /// Most negative relative margin observed (0 when every sample is tight).
  double worst_slack = 0.0;
  /// Sup of the sampled ratio for the vec_* suites, NaN otherwise.
  double estimated_constant = 0.0;
};

struct SuiteOptions {
  double p_ge = 3.0;  // vec_p_ge_2
  double p_le = 1.5;  // vec_p_le_2
  FracParams params{};  // hidden_convexity / modulus / holder exponents
  Eigen::Index grid_n = 16;
};

std::vector<std::string> inequality_suite_names();

/// Throws ParameterError for an unknown suite name.
InequalityReport inequality_suite(const std::string& name, long samples, unsigned seed,
                                  const SuiteOptions& options = {});

}  // namespace fracpq
