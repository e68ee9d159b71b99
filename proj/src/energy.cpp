#include "fracpq/energy.hpp"

namespace fracpq {

BoundedProblem make_bounded_problem(const DomainGrid& grid, const FracParams& params,
                                    WeightField a, WeightField b) {
  params.validate();
  if (params.regime != Regime::bounded_domain) {
    throw RegimeError("make_bounded_problem: params.regime must be bounded_domain");
  }
  detail::check_size<double>(a.size(), grid.n, "weight a");
  detail::check_size<double>(b.size(), grid.n, "weight b");
  if (!a.values.allFinite() || !b.values.allFinite()) {
    throw ParameterError("weights must be finite");
  }
  if (!a.has_positive_part() || !b.has_positive_part()) {
    throw InfeasibleError(
        "weight positivity violated: a and b must be positive on a set of "
        "positive measure");
  }
  BoundedProblem problem;
  problem.grid = grid;
  problem.params = params;
  problem.a = std::move(a);
  problem.b = std::move(b);
  problem.kp = build_kernel<double>(grid, params.alpha, params.p, ExponentCheck::subcritical);
  problem.kq = build_kernel<double>(grid, params.beta, params.q, ExponentCheck::none);
  return problem;
}

WholeSpaceProblem make_whole_space_problem(const DomainGrid& grid, const FracParams& params,
                                           WeightField a) {
  params.validate();
  if (params.regime != Regime::whole_space) {
    throw RegimeError("make_whole_space_problem: params.regime must be whole_space");
  }
  detail::check_size<double>(a.size(), grid.n, "weight a");
  if (!a.values.allFinite()) throw ParameterError("weight a must be finite");
  if (!a.is_nonnegative()) {
    throw ParameterError("whole_space regime requires a >= 0");
  }
  if (!a.has_positive_part()) throw InfeasibleError("weight a vanishes identically");
  WholeSpaceProblem problem;
  problem.grid = grid;
  problem.params = params;
  problem.a = std::move(a);
  problem.kp = build_kernel<double>(grid, params.alpha, params.p, ExponentCheck::subcritical);
  problem.kq = build_kernel<double>(grid, params.beta, params.q, ExponentCheck::none);
  return problem;
}

EnergyReport<double> evaluate_energies(const BoundedProblem& problem, const Vector& u,
                                       double lambda) {
  return evaluate_energies<double>(u, problem.a.values, problem.b.values, problem.kp,
                                   problem.kq, lambda);
}

double evaluate_J(const BoundedProblem& problem, const Vector& u, double lambda) {
  return evaluate_energies(problem, u, lambda).J;
}

Vector grad_J(const BoundedProblem& problem, const Vector& u, double lambda) {
  return grad_J<double>(u, problem.a.values, problem.b.values, problem.kp, problem.kq, lambda);
}

double evaluate_I(const WholeSpaceProblem& problem, const Vector& u, double lambda) {
  return evaluate_I<double>(u, problem.a.values, problem.kp, problem.kq, lambda);
}

Vector grad_I(const WholeSpaceProblem& problem, const Vector& u, double lambda) {
  return grad_I<double>(u, problem.a.values, problem.kp, problem.kq, lambda);
}

double weak_residual(const BoundedProblem& problem, const Vector& u, double lambda) {
  return weak_residual<double>(u, grad_J(problem, u, lambda), problem.params.p);
}

double weak_residual(const WholeSpaceProblem& problem, const Vector& u, double lambda) {
  return weak_residual<double>(u, grad_I(problem, u, lambda), problem.params.p);
}

double leading_norm(const KernelMatrix<double>& kp, const Vector& u) {
  return std::pow(seminorm_pow<double>(u, kp), 1.0 / kp.r);
}

}  // namespace fracpq
