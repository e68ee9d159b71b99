#include "fracpq/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace fracpq {

Matrix quadratic_form(const KernelMatrix<double>& k) {
  if (k.r != 2.0) throw ParameterError("quadratic_form: kernel exponent must be 2");
  Matrix A = -2.0 * k.K;
  for (Eigen::Index i = 0; i < k.size(); ++i) {
    A(i, i) = 2.0 * k.K.row(i).sum() + 2.0 * k.h * k.tail(i);
  }
  return A;
}

SymmetricEig jacobi_eigen(const Matrix& S, double tol, int max_sweeps) {
  if (S.rows() != S.cols()) throw DimensionError("jacobi_eigen: matrix must be square");
  const Eigen::Index n = S.rows();
  Matrix A = 0.5 * (S + S.transpose());
  Matrix V = Matrix::Identity(n, n);
  const double scale = std::max(A.norm(), std::numeric_limits<double>::min());

  SymmetricEig out;
  for (; out.sweeps < max_sweeps; ++out.sweeps) {
    const double off = (A - Matrix(A.diagonal().asDiagonal())).norm();
    if (off <= tol * scale) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = A(p, q);
        if (apq == 0.0) continue;
        const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = A(k, p);
          const double akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = A(p, k);
          const double aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = V(k, p);
          const double vkq = V(k, q);
          V(k, p) = c * vkp - s * vkq;
          V(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return A(i, i) < A(j, j); });
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = A(order[k], order[k]);
    out.vectors.col(k) = V.col(order[k]);
  }
  return out;
}

DenseEig dense_generalized_eig(const Matrix& S, const Matrix& D) {
  if (S.rows() != S.cols() || D.rows() != S.rows() || D.cols() != S.cols()) {
    throw DimensionError("dense_generalized_eig: matrix sizes differ");
  }
  Eigen::LLT<Matrix> llt(0.5 * (S + S.transpose()));
  if (llt.info() != Eigen::Success) {
    throw ParameterError("dense_generalized_eig: left-hand form is not positive definite");
  }
  const auto L = llt.matrixL();
  const Matrix X = L.solve(D);                        // L^{-1} D
  Matrix C = L.solve(Matrix(X.transpose()));          // L^{-1} D L^{-T}
  C = 0.5 * (C + C.transpose());
  const SymmetricEig eig = jacobi_eigen(C);
  const Matrix Y = llt.matrixU().solve(eig.vectors);  // L^{-T} y: S-orthonormal

  const double cutoff = 1e-14 * std::max(eig.values.cwiseAbs().maxCoeff(), 1e-300);
  DenseEig out;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = eig.values.size() - 1; k >= 0; --k) {  // mu descending = lambda ascending
    if (eig.values(k) > cutoff) {
      keep.push_back(k);
    } else {
      ++out.excluded;
    }
  }
  const auto m = static_cast<Eigen::Index>(keep.size());
  out.values.resize(m);
  out.vectors.resize(S.rows(), m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double mu = eig.values(keep[j]);
    out.values(j) = 1.0 / mu;
    Vector x = Y.col(keep[j]) / std::sqrt(mu);
    if (x.sum() < 0.0) x = -x;
    out.vectors.col(j) = x;
  }
  return out;
}

DenseEig dense_linear_eig(const KernelMatrix<double>& kp, const KernelMatrix<double>& kq,
                          const Vector& a, const Vector& b) {
  if (kp.r != 2.0 || kq.r != 2.0) throw ParameterError("dense_linear_eig: requires p = q = 2");
  detail::check_size<double>(a.size(), kp.size(), "dense_linear_eig a");
  detail::check_size<double>(b.size(), kp.size(), "dense_linear_eig b");
  const Matrix D = Matrix((kp.h * (a + b)).asDiagonal());
  return dense_generalized_eig(quadratic_form(kp) + quadratic_form(kq), D);
}

DenseEig dense_single_eig(const KernelMatrix<double>& k, const Vector& w) {
  detail::check_size<double>(w.size(), k.size(), "dense_single_eig");
  return dense_generalized_eig(quadratic_form(k), Matrix((k.h * w).asDiagonal()));
}

SubspaceResult subspace_grid_search(const std::function<double(const Vector&)>& quotient,
                                    Eigen::Index n, int resolution) {
  if (n < 1) throw ParameterError("subspace_grid_search: n must be positive");
  if (n > 4) throw ParameterError("subspace_grid_search: n > 4 is not supported");
  if (resolution < 2) throw ParameterError("subspace_grid_search: resolution must be >= 2");

  SubspaceResult out;
  out.minimum = std::numeric_limits<double>::infinity();
  const double dtheta = 0.5 * M_PI / (resolution - 1);
  Vector u(n);
  std::vector<int> idx(static_cast<std::size_t>(n - 1), 0);
  while (true) {
    double sin_prod = 1.0;
    for (Eigen::Index d = 0; d + 1 < n; ++d) {
      const double th = dtheta * idx[static_cast<std::size_t>(d)];
      u(d) = sin_prod * std::cos(th);
      sin_prod *= std::sin(th);
    }
    u(n - 1) = sin_prod;
    const double v = quotient(u.cwiseMax(0.0));
    ++out.evaluations;
    if (v < out.minimum) {
      out.minimum = v;
      out.argmin = u.cwiseMax(0.0);
    }
    std::size_t d = 0;
    while (d < idx.size() && ++idx[d] == resolution) idx[d++] = 0;
    if (d == idx.size()) break;
  }
  return out;
}

Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& u, double step) {
  Vector g(u.size());
  Vector y = u;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    y(i) = u(i) + step;
    const double fp = f(y);
    y(i) = u(i) - step;
    const double fm = f(y);
    y(i) = u(i);
    g(i) = (fp - fm) / (2.0 * step);
  }
  return g;
}

Functional QuadraticSaddle::functional() const {
  Functional f;
  f.value = [this](const Vector& u) {
    const Vector d = u - center;
    return 0.5 * d.dot(M * d) + level;
  };
  f.gradient = [this](const Vector& u) { return Vector(M * (u - center)); };
  f.residual = [this](const Vector& u) {
    const Vector g = M * (u - center);
    return weak_residual<double>(u, g, 2.0);
  };
  return f;
}

QuadraticSaddle quadratic_saddle(const KernelMatrix<double>& kp, const KernelMatrix<double>& kq,
                                 const Vector& a, const Vector& b, double lambda) {
  const DenseEig eig = dense_linear_eig(kp, kq, a, b);
  if (eig.values.size() < 3) throw ParameterError("quadratic_saddle: need three finite modes");
  if (!(lambda > eig.values(0) && lambda < eig.values(1))) {
    throw ParameterError("quadratic_saddle: lambda must lie between the first two eigenvalues");
  }
  QuadraticSaddle qs;
  const Matrix D = Matrix((kp.h * (a + b)).asDiagonal());
  qs.M = quadratic_form(kp) + quadratic_form(kq) - lambda * D;

  const Vector e1 = eig.vectors.col(0);
  const Vector w1 = 0.3 * eig.vectors.col(1);
  const Vector w2 = -0.2 * eig.vectors.col(1) + 0.3 * eig.vectors.col(2);
  const double transverse = std::max(w1.dot(qs.M * w1), w2.dot(qs.M * w2));
  // Both endpoints end up at least 1/2 below the saddle level.
  const double tau = std::sqrt(2.0 * (transverse + 1.0) / (lambda - eig.values(0)));
  qs.level = 1.0;
  qs.center = tau * e1 - w1;
  qs.start = Vector::Zero(e1.size());
  qs.end = qs.center + tau * e1 + w2;
  return qs;
}

// ---------------------------------------------------------------------------
// Inequality suites

namespace {

double phi(double t, double p) { return signed_pow(t, p); }

struct Sampler {
  std::mt19937_64 rng;
  std::cauchy_distribution<double> cauchy{0.0, 1.0};
  std::normal_distribution<double> normal{0.0, 1.0};
  std::uniform_real_distribution<double> unit{0.0, 1.0};
  explicit Sampler(unsigned seed) : rng(seed) {}
};

void record_margin(InequalityReport& r, double margin) {
  if (margin < -1e-12) ++r.violations;
  r.worst_slack = std::min(r.worst_slack, margin);
}

// margin = (rhs - lhs) / |rhs|, 0 when both vanish.
double relative_margin(double lhs, double rhs) {
  if (rhs == 0.0) return lhs == 0.0 ? 0.0 : -1.0;
  return (rhs - lhs) / std::abs(rhs);
}

InequalityReport vec_ratio_suite(const std::string& name, long samples, unsigned seed,
                                 const std::function<double(double, double)>& ratio) {
  InequalityReport r;
  r.name = name;
  r.samples = samples;
  Sampler s(seed);
  std::vector<double> ratios;
  ratios.reserve(static_cast<std::size_t>(samples));
  double sup = 0.0;
  for (long i = 0; i < samples; ++i) {
    const double xi = s.cauchy(s.rng);
    const double eta = s.cauchy(s.rng);
    if (xi == eta) {
      ratios.push_back(0.0);
      continue;
    }
    const double v = ratio(xi, eta);
    ratios.push_back(v);
    if (std::isfinite(v)) sup = std::max(sup, v);
  }
  r.estimated_constant = sup;
  // Against the estimated constant the margin is nonnegative by construction;
  // non-finite ratios count as violations.
  for (double v : ratios) record_margin(r, std::isfinite(v) ? (sup - v) / sup : -1.0);
  return r;
}

InequalityReport hidden_convexity(long samples, unsigned seed, double p, double q) {
  InequalityReport r;
  r.name = "hidden_convexity";
  r.samples = samples;
  r.estimated_constant = std::numeric_limits<double>::quiet_NaN();
  Sampler s(seed);
  auto mean_power = [](double x, double y, double e) {
    return std::pow(0.5 * (std::pow(x, e) + std::pow(y, e)), 1.0 / e);
  };
  auto check = [&](double w_exp, double test_exp, double ux, double uy, double vx, double vy) {
    const double wx = mean_power(ux, vx, w_exp);
    const double wy = mean_power(uy, vy, w_exp);
    const double lhs = std::pow(std::abs(wx - wy), test_exp);
    const double rhs =
        0.5 * std::pow(std::abs(ux - uy), test_exp) + 0.5 * std::pow(std::abs(vx - vy), test_exp);
    return relative_margin(lhs, rhs);
  };
  for (long i = 0; i < samples; ++i) {
    const double ux = std::abs(s.cauchy(s.rng));
    const double uy = std::abs(s.cauchy(s.rng));
    const double vx = std::abs(s.cauchy(s.rng));
    const double vy = std::abs(s.cauchy(s.rng));
    double m = check(p, p, ux, uy, vx, vy);
    m = std::min(m, check(q, q, ux, uy, vx, vy));
    m = std::min(m, check(q, p, ux, uy, vx, vy));
    record_margin(r, m);
  }
  return r;
}

InequalityReport modulus_contraction(long samples, unsigned seed, const FracParams& params,
                                     Eigen::Index n) {
  InequalityReport r;
  r.name = "modulus_contraction";
  r.samples = samples;
  r.estimated_constant = std::numeric_limits<double>::quiet_NaN();
  const DomainGrid grid = build_grid(0.0, 1.0, n);
  const auto kp = build_kernel<double>(grid, params.alpha, params.p);
  const auto kq = build_kernel<double>(grid, params.beta, params.q, ExponentCheck::none);
  Sampler s(seed);
  Vector u(n);
  for (long i = 0; i < samples; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) u(j) = s.normal(s.rng);
    const Vector m = u.cwiseAbs();
    const double mp = relative_margin(seminorm_pow<double>(m, kp), seminorm_pow<double>(u, kp));
    const double mq = relative_margin(seminorm_pow<double>(m, kq), seminorm_pow<double>(u, kq));
    record_margin(r, std::min(mp, mq));
  }
  return r;
}

InequalityReport holder_interpolation(long samples, unsigned seed, const FracParams& params,
                                      Eigen::Index n) {
  InequalityReport r;
  r.name = "holder_interpolation";
  r.samples = samples;
  r.estimated_constant = std::numeric_limits<double>::quiet_NaN();
  const double p = params.p;
  const double pstar = params.p_alpha_star();
  if (!std::isfinite(pstar)) throw RegimeError("holder_interpolation: needs alpha p < 1");
  const double t_max = std::sqrt((p - params.q) / p);
  if (!(t_max > 0.0)) throw ParameterError("holder_interpolation: needs q < p");
  const DomainGrid grid = build_grid(0.0, 1.0, n);
  Sampler s(seed);
  Vector a(n);
  Vector u(n);
  for (long i = 0; i < samples; ++i) {
    double t = 0.0;
    while (t == 0.0) t = t_max * s.unit(s.rng);
    const double sexp = interpolation_exponent(params, t);
    const double scale = std::exp(s.normal(s.rng));
    for (Eigen::Index j = 0; j < n; ++j) {
      a(j) = s.unit(s.rng);
      u(j) = scale * std::abs(s.normal(s.rng));
    }
    const double lhs = weighted_power<double>(u, a, p, grid.h);
    const double top = weighted_power<double>(u, a, pstar, grid.h);
    const double low = weighted_power<double>(u, a, sexp, grid.h);
    const double rhs = std::pow(top, p * t / pstar) * std::pow(low, p * (1.0 - t) / sexp);
    record_margin(r, relative_margin(lhs, rhs));
  }
  return r;
}

}  // namespace

std::vector<std::string> inequality_suite_names() {
  return {"vec_p_ge_2", "vec_p_le_2", "hidden_convexity", "modulus_contraction",
          "holder_interpolation"};
}

InequalityReport inequality_suite(const std::string& name, long samples, unsigned seed,
                                  const SuiteOptions& options) {
  if (samples < 1) throw ParameterError("inequality_suite: samples must be positive");
  if (name == "vec_p_ge_2") {
    const double p = options.p_ge;
    if (!(p >= 2.0)) throw ParameterError("vec_p_ge_2: needs p >= 2");
    return vec_ratio_suite(name, samples, seed, [p](double x, double y) {
      return std::pow(std::abs(x - y), p) / ((phi(x, p) - phi(y, p)) * (x - y));
    });
  }
  if (name == "vec_p_le_2") {
    const double p = options.p_le;
    if (!(p > 1.0 && p <= 2.0)) throw ParameterError("vec_p_le_2: needs 1 < p <= 2");
    return vec_ratio_suite(name, samples, seed, [p](double x, double y) {
      return (x - y) * (x - y) * std::pow(x * x + y * y, 0.5 * (p - 2.0)) /
             ((phi(x, p) - phi(y, p)) * (x - y));
    });
  }
  if (name == "hidden_convexity") {
    return hidden_convexity(samples, seed, options.params.p, options.params.q);
  }
  if (name == "modulus_contraction") {
    return modulus_contraction(samples, seed, options.params, options.grid_n);
  }
  if (name == "holder_interpolation") {
    return holder_interpolation(samples, seed, options.params, options.grid_n);
  }
  throw ParameterError("inequality_suite: unknown suite '" + name + "'");
}

}  // namespace fracpq
