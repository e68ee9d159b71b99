#include <doctest.h>

#include <cmath>
#include <random>

#include "fracpq/energy.hpp"

using namespace fracpq;

namespace {

Vector random_vector(Eigen::Index n, unsigned seed, bool positive) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Vector u(n);
  for (auto& x : u) x = positive ? 0.2 + std::abs(g(rng)) : g(rng);
  return u;
}

BoundedProblem problem(double p, double q, Eigen::Index n = 12) {
  FracParams params;
  params.alpha = 0.3;
  params.beta = 0.4;
  params.p = p;
  params.q = q;
  const DomainGrid g = build_grid(0.0, 1.0, n);
  return make_bounded_problem(g, params, sample_weight(g, [](double) { return 1.0; }),
                              sample_weight(g, [](double x) { return 0.3 + std::cos(2 * M_PI * x); }));
}

template <typename F>
Vector central_difference(F f, const Vector& u) {
  Vector g(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double e = 1e-6 * std::max(1.0, std::abs(u(i)));
    Vector up = u, dn = u;
    up(i) += e;
    dn(i) -= e;
    g(i) = (f(up) - f(dn)) / (2 * e);
  }
  return g;
}

}  // namespace

TEST_CASE("seminorm of a single bump on two cells") {
  const DomainGrid g = build_grid(0.0, 1.0, 2);
  const auto k = build_kernel(g, 0.5, 2.0, ExponentCheck::none);
  Vector u(2);
  u << 1.0, 0.0;
  // 2 K_01 |1|^2 + 2 h tau_0, K_01 = 1, h = 0.5
  CHECK(seminorm_pow(u, k) == doctest::Approx(2 * 1.0 + 2 * 0.5 * k.tail(0)));
}

TEST_CASE("seminorm is r-homogeneous and even") {
  const DomainGrid g = build_grid(0.0, 1.0, 16);
  for (double r : {1.5, 2.0, 3.0}) {
    const auto k = build_kernel(g, 0.3, r);
    const Vector u = random_vector(16, 3, false);
    const double base = seminorm_pow(u, k);
    CHECK(base > 0.0);
    CHECK(seminorm_pow<double>(2.5 * u, k) == doctest::Approx(std::pow(2.5, r) * base));
    CHECK(seminorm_pow<double>(-u, k) == doctest::Approx(base));
  }
}

TEST_CASE("Euler identity for the operator") {
  const DomainGrid g = build_grid(0.0, 1.0, 16);
  for (double r : {1.5, 2.0, 2.5, 3.0}) {
    const auto k = build_kernel(g, 0.25, r);
    const Vector u = random_vector(16, 5, false);
    CHECK(u.dot(frac_laplacian_apply(u, k)) == doctest::Approx(seminorm_pow(u, k)));
  }
}

TEST_CASE("operator is the gradient of [u]^r / r") {
  const DomainGrid g = build_grid(0.0, 1.0, 10);
  for (double r : {2.0, 3.0, 1.6}) {
    const auto k = build_kernel(g, 0.3, r);
    const Vector u = random_vector(10, 9, true);
    const Vector fd = central_difference([&](const Vector& v) { return seminorm_pow(v, k) / r; }, u);
    const Vector an = frac_laplacian_apply(u, k);
    CHECK((fd - an).norm() <= 1e-6 * an.norm());
  }
}

TEST_CASE("grad_J matches finite differences") {
  for (auto [p, q] : {std::pair{3.0, 2.0}, std::pair{2.5, 1.5}, std::pair{2.0, 2.0}}) {
    const BoundedProblem pb = problem(p, q);
    const Vector u = random_vector(pb.size(), 17, true);
    const double lambda = 7.0;
    const Vector fd = central_difference([&](const Vector& v) { return evaluate_J(pb, v, lambda); }, u);
    const Vector an = grad_J(pb, u, lambda);
    CHECK((fd - an).norm() <= 1e-6 * std::max(1.0, an.norm()));
  }
}

TEST_CASE("energy report is consistent") {
  const BoundedProblem pb = problem(3.0, 2.0);
  const Vector u = random_vector(pb.size(), 1, false);
  const auto e = evaluate_energies(pb, u, 4.0);
  CHECK(e.phi == doctest::Approx(e.seminorm_p / 3.0 + e.seminorm_q / 2.0));
  CHECK(e.psi == doctest::Approx(e.psi_a / 3.0 + e.psi_b / 2.0));
  CHECK(e.J == doctest::Approx(e.phi - 4.0 * e.psi));
  CHECK(evaluate_J(pb, u, 4.0) == doctest::Approx(e.J));
  CHECK(evaluate_J(pb, Vector::Zero(pb.size()), 4.0) == 0.0);
  CHECK(leading_norm(pb.kp, u) == doctest::Approx(std::cbrt(e.seminorm_p)));
}

TEST_CASE("whole-space functional I and its gradient") {
  FracParams params;
  params.alpha = 0.3;
  params.beta = 0.4;
  params.p = 2.5;
  params.q = 2.0;
  params.regime = Regime::whole_space;
  const DomainGrid g = build_grid(-2.0, 2.0, 16);
  const WholeSpaceProblem ws = make_whole_space_problem(
      g, params, sample_weight(g, [](double x) { return 1.0 / (1.0 + x * x); }));
  const Vector u = random_vector(16, 23, true);
  const double lambda = 3.0;
  const double expect = seminorm_pow(u, ws.kp) / 2.5 + seminorm_pow(u, ws.kq) / 2.0 -
                        lambda / 2.5 * weighted_power<double>(u, ws.a.values, 2.5, g.h);
  CHECK(evaluate_I(ws, u, lambda) == doctest::Approx(expect));
  const Vector fd = central_difference([&](const Vector& v) { return evaluate_I(ws, v, lambda); }, u);
  CHECK((fd - grad_I(ws, u, lambda)).norm() <= 1e-6 * std::max(1.0, fd.norm()));
}

TEST_CASE("long double evaluation agrees with double") {
  const BoundedProblem pb = problem(3.0, 2.0, 20);
  const Vector u = random_vector(pb.size(), 31, false);
  const auto kpl = kernel_cast<long double>(pb.kp);
  const auto kql = kernel_cast<long double>(pb.kq);
  const Vec<long double> ul = u.cast<long double>();
  const auto el = evaluate_energies<long double>(ul, pb.a.values.cast<long double>(),
                                                 pb.b.values.cast<long double>(), kpl, kql, 5.0L);
  const auto ed = evaluate_energies(pb, u, 5.0);
  CHECK(static_cast<double>(el.J) == doctest::Approx(ed.J).epsilon(1e-12));
  const Vector gl = grad_J<long double>(ul, pb.a.values.cast<long double>(),
                                        pb.b.values.cast<long double>(), kpl, kql, 5.0L)
                        .cast<double>();
  CHECK((gl - grad_J(pb, u, 5.0)).norm() <= 1e-12 * gl.norm());
}

TEST_CASE("weak residual normalization") {
  Vector u(3), g(3);
  u << 0.5, -0.2, 0.1;
  g << 1e-3, -4e-3, 2e-3;
  CHECK(weak_residual<double>(u, g, 3.0) == doctest::Approx(4e-3));
  u *= 10.0;  // ||u||_inf = 5, scale 25
  CHECK(weak_residual<double>(u, g, 3.0) == doctest::Approx(4e-3 / 25.0));
}

TEST_CASE("problem assembly errors") {
  FracParams params;
  const DomainGrid g = build_grid(0.0, 1.0, 8);
  const WeightField one = sample_weight(g, [](double) { return 1.0; });
  const WeightField neg = sample_weight(g, [](double) { return -1.0; });
  CHECK_THROWS_AS(make_bounded_problem(g, params, neg, one), InfeasibleError);
  CHECK_THROWS_AS(make_bounded_problem(g, params, one, neg), InfeasibleError);
  const WeightField short_w{Vector::Ones(5)};
  CHECK_THROWS_AS(make_bounded_problem(g, params, short_w, one), DimensionError);
  params.q = 4.0;
  CHECK_THROWS_AS(make_bounded_problem(g, params, one, one), ParameterError);

  // The (beta, q) operator may be supercritical on a bounded domain.
  FracParams loose;
  loose.alpha = 0.3;
  loose.beta = 0.6;
  loose.p = 3.0;
  loose.q = 2.0;
  CHECK_NOTHROW(make_bounded_problem(g, loose, one, one));

  const BoundedProblem pb = make_bounded_problem(g, FracParams{}, one, one);
  CHECK_THROWS_AS(evaluate_J(pb, Vector::Ones(7), 1.0), DimensionError);
}

TEST_CASE("seminorm refinement differences shrink") {
  std::vector<double> values;
  for (Eigen::Index n : {16, 32, 64, 128, 256}) {
    const DomainGrid g = build_grid(0.0, 1.0, n);
    const auto k = build_kernel(g, 0.3, 2.5);
    Vector u(n);
    for (Eigen::Index i = 0; i < n; ++i) u(i) = std::sin(M_PI * g.nodes(i));
    values.push_back(seminorm_pow(u, k));
  }
  for (std::size_t i = 2; i < values.size(); ++i) {
    CHECK(std::abs(values[i] - values[i - 1]) < std::abs(values[i - 1] - values[i - 2]));
  }
  CHECK(std::abs(values[4] - values[3]) < 0.05 * values[3]);
}

TEST_CASE("constant function only sees the exterior tail") {
  const DomainGrid g = build_grid(0.0, 1.0, 4);
  const auto k = build_kernel(g, 0.4, 2.0);
  const Vector u = Vector::Constant(4, 1.5);
  // Pairs vanish; both orderings of Omega x complement contribute.
  CHECK(seminorm_pow(u, k) == doctest::Approx(2.0 * 1.5 * 1.5 * g.h * k.tail.sum()));
  CHECK(seminorm_pow<double>(Vector::Zero(4), k) == 0.0);
}
