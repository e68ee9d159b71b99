#include <doctest.h>

#include <cmath>

#include "fracpq/eigensolver.hpp"
#include "fracpq/oracle.hpp"

using namespace fracpq;

namespace {

WeightField ones(const DomainGrid& g) { return sample_weight(g, [](double) { return 1.0; }); }

BoundedProblem default_problem(Eigen::Index n = 64) {
  FracParams params;  // alpha 0.3, beta 0.5, p 3, q 2
  const DomainGrid g = build_grid(0.0, 1.0, n);
  return make_bounded_problem(g, params, ones(g),
                              sample_weight(g, [](double x) { return 0.3 + std::cos(2 * M_PI * x); }));
}

BoundedProblem linear_problem(Eigen::Index n) {
  FracParams params;
  params.alpha = 0.4;
  params.beta = 0.4;
  params.p = 2.0;
  params.q = 2.0;
  const DomainGrid g = build_grid(0.0, 1.0, n);
  return make_bounded_problem(g, params, ones(g), ones(g));
}

}  // namespace

TEST_CASE("single operator r = 2 matches the dense eigenvalue") {
  const DomainGrid g = build_grid(0.0, 1.0, 32);
  const auto k = build_kernel(g, 0.4, 2.0);
  const EigResult e = principal_single(k, ones(g), 2.0);
  const DenseEig dense = dense_single_eig(k, Vector::Ones(32));
  CHECK(e.converged);
  CHECK(e.lambda == doctest::Approx(dense.values(0)).epsilon(1e-6));
  CHECK((e.u.array() >= 0.0).all());
  CHECK(weighted_power<double>(e.u, Vector::Ones(32), 2.0, g.h) == doctest::Approx(1.0));
  CHECK(eigen_residual(k, Vector::Ones(32), e.u, e.lambda) <= 1e-5);
}

TEST_CASE("single operator r = 3 on three cells matches grid search") {
  const DomainGrid g = build_grid(0.0, 1.0, 3);
  const auto k = build_kernel(g, 0.3, 3.0);
  const Vector w = Vector::Ones(3);
  const EigResult e = principal_single(k, ones(g), 3.0);
  const auto search =
      subspace_grid_search([&](const Vector& u) { return single_quotient(k, w, u); }, 3, 201);
  CHECK(e.converged);
  CHECK(e.lambda <= search.minimum * (1.0 + 1e-9));
  CHECK(std::abs(e.lambda - search.minimum) <= 1e-3 * e.lambda);
}

TEST_CASE("quotients are scale invariant or not as expected") {
  const BoundedProblem pb = default_problem(16);
  Vector u = Vector::Ones(16);
  CHECK(single_quotient(pb.kp, pb.a.values, 3.0 * u) ==
        doctest::Approx(single_quotient(pb.kp, pb.a.values, u)));
  CHECK(combined_quotient(pb, 3.0 * u) != doctest::Approx(combined_quotient(pb, u)));
  CHECK(std::isinf(single_quotient(pb.kp, -Vector::Ones(16), u)));
}

TEST_CASE("linear case: threshold equals the dense combined eigenvalue") {
  const BoundedProblem pb = linear_problem(24);
  const ThresholdReport r = check_min_formula(pb);
  const DenseEig dense = dense_linear_eig(pb.kp, pb.kq, pb.a.values, pb.b.values);
  CHECK(r.converged);
  CHECK(r.argmin_side == ArgminSide::both);
  CHECK(r.lambda_1p == doctest::Approx(r.lambda_1q).epsilon(1e-8));
  CHECK(r.lambda_star == doctest::Approx(dense.values(0)).epsilon(1e-6));
  CHECK(r.formula_holds);
}

TEST_CASE("threshold is the smaller single eigenvalue") {
  const BoundedProblem pb = default_problem();
  const ThresholdReport r = check_min_formula(pb);
  CHECK(r.converged);
  CHECK(r.formula_holds);
  CHECK(r.argmin_side == ArgminSide::p);
  CHECK(r.lambda_1p < r.lambda_1q);
  CHECK(r.relative_gap <= 1e-3);
  CHECK(r.lambda_star >= r.lambda_1p * (1.0 - 1e-9));
  CHECK(r.eig_star.ray_escape);
  CHECK(to_string(r.argmin_side) == "p");
}

TEST_CASE("quotient along a ray approaches the p eigenvalue from above") {
  const BoundedProblem pb = default_problem(32);
  const EigResult ep = principal_single(pb.kp, pb.a, 3.0);
  double prev = std::numeric_limits<double>::infinity();
  for (double t : {1.0, 10.0, 100.0, 1e4}) {
    const double v = combined_quotient(pb, t * ep.u);
    CHECK(v < prev);
    CHECK(v > ep.lambda);
    prev = v;
  }
  CHECK(prev == doctest::Approx(ep.lambda).epsilon(1e-3));
}

TEST_CASE("simplicity probes") {
  const BoundedProblem lin = linear_problem(16);
  // Angle error ~ residual / spectral gap: run each start until the quotient
  // stalls at rounding level instead of stopping at the default 1e-10 decrease.
  SolverOptions tight;
  tight.tol_quotient = 1e-14;
  const SimplicityReport s2 = simplicity_probe(lin.kp, lin.a, 2.0, 6, tight);
  CHECK(s2.all_converged);
  CHECK(s2.max_deviation <= 1e-6);

  const BoundedProblem pb = default_problem(32);
  const SimplicityReport s3 = simplicity_probe(pb.kp, pb.a, 3.0, 10);
  CHECK(s3.simple);
  CHECK(s3.all_nonnegative);
  CHECK(s3.max_deviation <= 1e-4);
}

TEST_CASE("scaled starts give identical normalized results") {
  const DomainGrid g = build_grid(0.0, 1.0, 16);
  const auto k = build_kernel(g, 0.3, 3.0);
  Vector start(16);
  for (Eigen::Index i = 0; i < 16; ++i) start(i) = 1.0 + 0.1 * i;
  SolverOptions opts;
  const EigResult a = principal_single(k, ones(g), 3.0, opts, start);
  const EigResult b = principal_single(k, ones(g), 3.0, opts, Vector(7.0 * start));
  CHECK(aligned_deviation(a.u, b.u) <= 1e-8);
  CHECK(a.lambda == doctest::Approx(b.lambda).epsilon(1e-10));
}

TEST_CASE("aligned deviation") {
  Vector u(3), v(3);
  u << 1, 2, 3;
  CHECK(aligned_deviation(u, 4.0 * u) <= 1e-15);
  v << 3, 2, 1;
  CHECK(aligned_deviation(u, v) > 0.1);
}

TEST_CASE("whole-space exponents") {
  FracParams p;
  p.alpha = 0.3;
  p.beta = 0.4;
  p.p = 2.5;
  p.q = 2.0;
  p.regime = Regime::whole_space;
  const double t = default_interpolation_t(p);
  CHECK(t == doctest::Approx(0.5 * std::sqrt(0.2)));
  const double s = interpolation_exponent(p, t);
  CHECK((p.p - t) / p.p_alpha_star() + p.p * (1.0 - t) / s == doctest::Approx(1.0));
  CHECK(default_decay_exponent(p, t) == doctest::Approx(1.7487).epsilon(1e-4));
  CHECK(decaying_weight(2.0)(1.0) == doctest::Approx(0.25));
}

TEST_CASE("truncated whole-space eigenvalue decreases with the radius") {
  FracParams p;
  p.alpha = 0.3;
  p.beta = 0.4;
  p.p = 2.5;
  p.q = 2.0;
  p.regime = Regime::whole_space;
  RnOptions o;
  o.radii = {1.0, 2.0};
  o.cells_per_unit = 8.0;
  const RnResult r = rn_principal(p, {}, o);
  REQUIRE(r.entries.size() == 2);
  CHECK(r.monotone);
  CHECK(r.entries[1].eig.lambda < r.entries[0].eig.lambda);
  for (const auto& e : r.entries) {
    CHECK(e.eig.converged);
    CHECK(e.eig.lambda >= e.single_lower_bound * (1.0 - 1e-6));
  }
  CHECK(r.entries[0].n == 16);

  p.q = p.p;
  CHECK_THROWS_AS(rn_principal(p, {}, o), RegimeError);
}
