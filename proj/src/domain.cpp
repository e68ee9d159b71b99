#include "fracpq/domain.hpp"

#include <sstream>

namespace fracpq {

DomainGrid build_grid(double lo, double hi, Eigen::Index n) {
  if (!(std::isfinite(lo) && std::isfinite(hi)) || !(lo < hi)) {
    std::ostringstream msg;
    msg << "build_grid: need lo < hi, got lo=" << lo << " hi=" << hi;
    throw ParameterError(msg.str());
  }
  if (n < 2) {
    throw ParameterError("build_grid: need n >= 2 cells, got " + std::to_string(n));
  }
  DomainGrid grid;
  grid.lo = lo;
  grid.hi = hi;
  grid.n = n;
  grid.h = (hi - lo) / static_cast<double>(n);
  grid.nodes.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    // Measure from the nearer endpoint so the layout reflects exactly.
    if (2 * i < n) {
      grid.nodes(i) = lo + (static_cast<double>(i) + 0.5) * grid.h;
    } else {
      grid.nodes(i) = hi - (static_cast<double>(n - 1 - i) + 0.5) * grid.h;
    }
  }
  return grid;
}

std::string to_string(Regime regime) {
  return regime == Regime::bounded_domain ? "bounded_domain" : "whole_space";
}

Regime regime_from_string(const std::string& name) {
  if (name == "bounded_domain" || name == "bounded") return Regime::bounded_domain;
  if (name == "whole_space" || name == "rn") return Regime::whole_space;
  throw ParameterError("unknown regime '" + name + "'");
}

namespace {
double critical_exponent(double r, double s) {
  constexpr double kDim = 1.0;
  if (kDim > r * s) return kDim * r / (kDim - r * s);
  return std::numeric_limits<double>::infinity();
}
}  // namespace

double FracParams::p_alpha_star() const { return critical_exponent(p, alpha); }
double FracParams::q_beta_star() const { return critical_exponent(q, beta); }

std::string FracParams::order_label() const {
  if (alpha < beta) return "alpha<beta";
  if (alpha > beta) return "alpha>beta";
  return "alpha=beta";
}

void FracParams::validate() const {
  auto in_unit = [](double v) { return std::isfinite(v) && v > 0.0 && v < 1.0; };
  if (!in_unit(alpha) || !in_unit(beta)) {
    throw ParameterError("fractional orders must lie in (0,1)");
  }
  if (!(std::isfinite(p) && std::isfinite(q)) || !(q > 1.0) || !(q <= p)) {
    throw ParameterError("exponents must satisfy 1 < q <= p");
  }
  if (alpha * p >= 1.0) {
    throw RegimeError("alpha*p >= N=1: supercritical leading operator is not supported");
  }
  if (regime == Regime::whole_space) {
    if (!(q < p)) throw RegimeError("whole_space regime requires q < p");
    if (!(p < q_beta_star())) throw RegimeError("whole_space regime requires p < q*_beta");
  }
}

WeightField make_weight(Vector values) {
  if (!values.allFinite()) throw ParameterError("weight field has non-finite entries");
  return WeightField{std::move(values)};
}

WeightField sample_weight(const DomainGrid& grid,
                          const std::function<double(double)>& profile) {
  Vector values(grid.n);
  for (Eigen::Index i = 0; i < grid.n; ++i) values(i) = profile(grid.nodes(i));
  return make_weight(std::move(values));
}

void check_kernel_exponents(double s, double r, ExponentCheck check) {
  if (!(s > 0.0 && s < 1.0)) throw ParameterError("kernel order s must lie in (0,1)");
  if (!(r > 1.0) || !std::isfinite(r)) throw ParameterError("kernel exponent r must exceed 1");
  if (check == ExponentCheck::subcritical && s * r >= 1.0) {
    std::ostringstream msg;
    msg << "s*r = " << s * r << " >= N = 1 (supercritical kernel rejected)";
    throw RegimeError(msg.str());
  }
}

}  // namespace fracpq
