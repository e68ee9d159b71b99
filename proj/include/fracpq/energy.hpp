#pragma once

// Discrete functionals Phi, Psi, J = Phi - lambda Psi (bounded domain) and
// I (whole-space form), with their gradients. Everything is templated on the
// scalar so the same code runs in long double for extended-precision checks.

#include <cmath>
#include <string>

#include "fracpq/domain.hpp"

namespace fracpq {

/// |t|^r
template <typename Scalar>
inline Scalar pow_abs(Scalar t, Scalar r) {
  using std::abs;
  using std::pow;
  if (r == Scalar(2)) return t * t;
  const Scalar a = abs(t);
  if (r == Scalar(3)) return a * a * a;
  return a == Scalar(0) ? Scalar(0) : pow(a, r);
}

/// |t|^{r-2} t, with the value 0 at t = 0 for every r > 1.
template <typename Scalar>
inline Scalar signed_pow(Scalar t, Scalar r) {
  using std::abs;
  using std::pow;
  if (r == Scalar(2)) return t;
  if (t == Scalar(0)) return Scalar(0);
  const Scalar a = abs(t);
  if (r == Scalar(3)) return a * t;
  return pow(a, r - Scalar(2)) * t;
}

namespace detail {
template <typename Scalar>
void check_size(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": length " + std::to_string(got) +
                         " does not match grid size " + std::to_string(want));
  }
}
}  // namespace detail

/// Discrete [u]^r_{s,r}: sum_{i,j} K_ij |u_i - u_j|^r + 2 h sum_i tau_i |u_i|^r.
/// The factor 2 counts both Omega x C(Omega) and C(Omega) x Omega.
template <typename Scalar>
Scalar seminorm_pow(const GridFunction<Scalar>& u, const KernelMatrix<Scalar>& k) {
  detail::check_size<Scalar>(u.size(), k.size(), "seminorm_pow");
  const Scalar r = Scalar(k.r);
  const Eigen::Index n = u.size();
  Scalar pairs(0);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      pairs += k.K(i, j) * pow_abs(u(i) - u(j), r);
    }
  }
  Scalar tails(0);
  for (Eigen::Index i = 0; i < n; ++i) tails += k.tail(i) * pow_abs(u(i), r);
  return Scalar(2) * pairs + Scalar(2) * Scalar(k.h) * tails;
}

/// Gradient of (1/r) seminorm_pow: the discrete (-Delta_r)^s u tested against
/// nodal basis functions.
template <typename Scalar>
GridFunction<Scalar> frac_laplacian_apply(const GridFunction<Scalar>& u,
                                          const KernelMatrix<Scalar>& k) {
  detail::check_size<Scalar>(u.size(), k.size(), "frac_laplacian_apply");
  const Scalar r = Scalar(k.r);
  const Eigen::Index n = u.size();
  GridFunction<Scalar> g = GridFunction<Scalar>::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      const Scalar flux = Scalar(2) * k.K(i, j) * signed_pow(u(i) - u(j), r);
      g(i) += flux;
      g(j) -= flux;
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    g(i) += Scalar(2) * Scalar(k.h) * k.tail(i) * signed_pow(u(i), r);
  }
  return g;
}

/// h sum_i w_i |u_i|^r
template <typename Scalar>
Scalar weighted_power(const GridFunction<Scalar>& u, const Vec<Scalar>& w, double r,
                      double h) {
  detail::check_size<Scalar>(w.size(), u.size(), "weighted_power");
  Scalar sum(0);
  for (Eigen::Index i = 0; i < u.size(); ++i) sum += w(i) * pow_abs(u(i), Scalar(r));
  return Scalar(h) * sum;
}

/// Gradient of (1/r) weighted_power: h w_i |u_i|^{r-2} u_i.
template <typename Scalar>
GridFunction<Scalar> weighted_power_grad(const GridFunction<Scalar>& u,
                                         const Vec<Scalar>& w, double r, double h) {
  detail::check_size<Scalar>(w.size(), u.size(), "weighted_power_grad");
  GridFunction<Scalar> g(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    g(i) = Scalar(h) * w(i) * signed_pow(u(i), Scalar(r));
  }
  return g;
}

template <typename Scalar = double>
struct EnergyReport {
  Scalar seminorm_p{0};
  Scalar seminorm_q{0};
  Scalar psi_a{0};
  Scalar psi_b{0};
  Scalar phi{0};
  Scalar psi{0};
  Scalar J{0};
  Scalar lambda{0};
};

template <typename Scalar>
EnergyReport<Scalar> evaluate_energies(const GridFunction<Scalar>& u, const Vec<Scalar>& a,
                                       const Vec<Scalar>& b, const KernelMatrix<Scalar>& kp,
                                       const KernelMatrix<Scalar>& kq, Scalar lambda) {
  const Scalar p = Scalar(kp.r);
  const Scalar q = Scalar(kq.r);
  EnergyReport<Scalar> e;
  e.lambda = lambda;
  e.seminorm_p = seminorm_pow(u, kp);
  e.seminorm_q = seminorm_pow(u, kq);
  e.psi_a = weighted_power(u, a, kp.r, kp.h);
  e.psi_b = weighted_power(u, b, kq.r, kq.h);
  e.phi = e.seminorm_p / p + e.seminorm_q / q;
  e.psi = e.psi_a / p + e.psi_b / q;
  e.J = e.phi - lambda * e.psi;
  return e;
}

/// J'(u) = L_p u + L_q u - lambda h (a |u|^{p-2} u + b |u|^{q-2} u).
template <typename Scalar>
GridFunction<Scalar> grad_J(const GridFunction<Scalar>& u, const Vec<Scalar>& a,
                            const Vec<Scalar>& b, const KernelMatrix<Scalar>& kp,
                            const KernelMatrix<Scalar>& kq, Scalar lambda) {
  GridFunction<Scalar> g = frac_laplacian_apply(u, kp) + frac_laplacian_apply(u, kq);
  g -= lambda * (weighted_power_grad(u, a, kp.r, kp.h) + weighted_power_grad(u, b, kq.r, kq.h));
  return g;
}

/// I(u) = [u]^p/p + [u]^q/q - (lambda/p) h sum a |u|^p.
template <typename Scalar>
Scalar evaluate_I(const GridFunction<Scalar>& u, const Vec<Scalar>& a,
                  const KernelMatrix<Scalar>& kp, const KernelMatrix<Scalar>& kq,
                  Scalar lambda) {
  const Scalar p = Scalar(kp.r);
  const Scalar q = Scalar(kq.r);
  return seminorm_pow(u, kp) / p + seminorm_pow(u, kq) / q -
         lambda / p * weighted_power(u, a, kp.r, kp.h);
}

template <typename Scalar>
GridFunction<Scalar> grad_I(const GridFunction<Scalar>& u, const Vec<Scalar>& a,
                            const KernelMatrix<Scalar>& kp, const KernelMatrix<Scalar>& kq,
                            Scalar lambda) {
  GridFunction<Scalar> g = frac_laplacian_apply(u, kp) + frac_laplacian_apply(u, kq);
  g -= lambda * weighted_power_grad(u, a, kp.r, kp.h);
  return g;
}

/// ||gradient||_inf / max(1, ||u||_inf^{p-1}).
template <typename Scalar>
Scalar weak_residual(const GridFunction<Scalar>& u, const GridFunction<Scalar>& gradient,
                     double p) {
  if (u.size() == 0) return Scalar(0);
  using std::max;
  using std::pow;
  const Scalar scale = max(Scalar(1), pow(u.cwiseAbs().maxCoeff(), Scalar(p) - Scalar(1)));
  return gradient.cwiseAbs().maxCoeff() / scale;
}

// ---------------------------------------------------------------------------
// Assembled problems (double precision).

/// Bounded-domain problem on Omega = (lo, hi) with weights a, b.
struct BoundedProblem {
  DomainGrid grid;
  FracParams params;
  WeightField a;
  WeightField b;
  KernelMatrix<double> kp;  // (alpha, p)
  KernelMatrix<double> kq;  // (beta, q)

  Eigen::Index size() const { return grid.n; }
};

/// Validates parameters and weights (both need a positive part; otherwise
/// InfeasibleError) and assembles both kernels.
BoundedProblem make_bounded_problem(const DomainGrid& grid, const FracParams& params,
                                    WeightField a, WeightField b);

/// Truncation of the whole-space problem to (lo, hi); b is absent, a >= 0.
struct WholeSpaceProblem {
  DomainGrid grid;
  FracParams params;
  WeightField a;
  KernelMatrix<double> kp;
  KernelMatrix<double> kq;

  Eigen::Index size() const { return grid.n; }
};

WholeSpaceProblem make_whole_space_problem(const DomainGrid& grid, const FracParams& params,
                                           WeightField a);

EnergyReport<double> evaluate_energies(const BoundedProblem& problem, const Vector& u,
                                       double lambda);
double evaluate_J(const BoundedProblem& problem, const Vector& u, double lambda);
Vector grad_J(const BoundedProblem& problem, const Vector& u, double lambda);
double evaluate_I(const WholeSpaceProblem& problem, const Vector& u, double lambda);
Vector grad_I(const WholeSpaceProblem& problem, const Vector& u, double lambda);

double weak_residual(const BoundedProblem& problem, const Vector& u, double lambda);
double weak_residual(const WholeSpaceProblem& problem, const Vector& u, double lambda);

/// Discrete W^{alpha,p}_0 norm [u]_{alpha,p}.
double leading_norm(const KernelMatrix<double>& kp, const Vector& u);

}  // namespace fracpq
