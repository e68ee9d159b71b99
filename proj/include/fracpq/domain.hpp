#pragma once

// Uniform 1-D grids, weights and the singular-kernel structures realizing the
// Gagliardo seminorm on a bounded interval with zero exterior extension.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "fracpq/errors.hpp"

namespace fracpq {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = Vec<double>;
using Matrix = Mat<double>;

/// Nodal values u_i on the grid; u is identically zero outside (lo, hi).
template <typename Scalar = double>
using GridFunction = Vec<Scalar>;

/// Cell-centred layout x_i = lo + (i + 1/2) h, i = 0..n-1.
struct DomainGrid {
  double lo = 0.0;
  double hi = 1.0;
  Eigen::Index n = 0;
  double h = 0.0;
  Vector nodes;

  double length() const { return hi - lo; }
  double center() const { return 0.5 * (lo + hi); }
};

DomainGrid build_grid(double lo, double hi, Eigen::Index n);

enum class Regime { bounded_domain, whole_space };

std::string to_string(Regime regime);
Regime regime_from_string(const std::string& name);

/// Fractional orders and exponents of the (p,q) problem, N = 1.
struct FracParams {
  double alpha = 0.3;
  double beta = 0.5;
  double p = 3.0;
  double q = 2.0;
  Regime regime = Regime::bounded_domain;

  /// N p / (N - p alpha) for N > p alpha, +inf otherwise.
  double p_alpha_star() const;
  double q_beta_star() const;

  /// "alpha<beta", "alpha>beta" or "alpha=beta"; the ordering is accepted
  /// as given and only recorded.
  std::string order_label() const;

  /// Throws ParameterError / RegimeError.
  void validate() const;
};

/// Bounded density w_i sampled at the grid nodes.
struct WeightField {
  Vector values;

  Eigen::Index size() const { return values.size(); }
  bool has_positive_part() const { return (values.array() > 0.0).any(); }
  bool is_nonnegative() const { return (values.array() >= 0.0).all(); }
  double sup_norm() const { return values.cwiseAbs().maxCoeff(); }
  WeightField positive_part() const { return {values.cwiseMax(0.0)}; }
};

/// Checks finiteness; throws ParameterError on NaN/inf entries.
WeightField make_weight(Vector values);
WeightField sample_weight(const DomainGrid& grid,
                          const std::function<double(double)>& profile);

enum class ExponentCheck {
  /// Reject s*r >= 1 (N = 1): the operator that carries the critical exponent.
  subcritical,
  /// Accept any s*r > 0; used for the lower-order (beta, q) operator on
  /// bounded domains, where q*_beta never enters.
  none,
};

/// Pair weights K_ij = h^2 |x_i - x_j|^{-(1+sr)} (K_ii = 0) and exterior-tail
/// densities tau_i for one (s, r).
template <typename Scalar = double>
struct KernelMatrix {
  double s = 0.0;
  double r = 2.0;
  double h = 0.0;
  Mat<Scalar> K;
  Vec<Scalar> tail;

  Eigen::Index size() const { return K.rows(); }
};

/// tau_i = [(x_i - lo)^{-sr} + (hi - x_i)^{-sr}] / (sr): the integral of
/// |x_i - y|^{-(1+sr)} over y outside (lo, hi).
template <typename Scalar = double>
Vec<Scalar> exterior_tail(const DomainGrid& grid, double s, double r) {
  const Scalar sr = Scalar(s) * Scalar(r);
  Vec<Scalar> tail(grid.n);
  for (Eigen::Index i = 0; i < grid.n; ++i) {
    // Distances from the endpoints in index form keep tau exactly symmetric.
    const Scalar left = Scalar(grid.h) * (Scalar(i) + Scalar(0.5));
    const Scalar right = Scalar(grid.h) * (Scalar(grid.n - 1 - i) + Scalar(0.5));
    using std::pow;
    tail(i) = (pow(left, -sr) + pow(right, -sr)) / sr;
  }
  return tail;
}

void check_kernel_exponents(double s, double r, ExponentCheck check);

template <typename Scalar = double>
KernelMatrix<Scalar> build_kernel(const DomainGrid& grid, double s, double r,
                                  ExponentCheck check = ExponentCheck::subcritical) {
  check_kernel_exponents(s, r, check);
  KernelMatrix<Scalar> k;
  k.s = s;
  k.r = r;
  k.h = grid.h;
  const Eigen::Index n = grid.n;
  k.K = Mat<Scalar>::Zero(n, n);
  const Scalar expo = -(Scalar(1) + Scalar(s) * Scalar(r));
  const Scalar h = Scalar(grid.h);
  for (Eigen::Index d = 1; d < n; ++d) {
    using std::pow;
    // |x_i - x_j| = |i - j| h on a uniform grid; one value per diagonal.
    const Scalar value = h * h * pow(Scalar(d) * h, expo);
    for (Eigen::Index i = 0; i + d < n; ++i) {
      k.K(i, i + d) = value;
      k.K(i + d, i) = value;
    }
  }
  k.tail = exterior_tail<Scalar>(grid, s, r);
  return k;
}

template <typename To, typename From>
KernelMatrix<To> kernel_cast(const KernelMatrix<From>& k) {
  KernelMatrix<To> out;
  out.s = k.s;
  out.r = k.r;
  out.h = k.h;
  out.K = k.K.template cast<To>();
  out.tail = k.tail.template cast<To>();
  return out;
}

}  // namespace fracpq
