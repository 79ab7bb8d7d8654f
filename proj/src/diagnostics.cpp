#include "exactpen/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "exactpen/errors.hpp"

namespace exactpen {

namespace {

void require_plain_setting(const ProblemInstance& inst, const char* what) {
  if (inst.has_inequalities() || !inst.box_is_infinite()) {
    throw InvalidArgument(std::string(what) + " is only checked with B absent and an infinite box");
  }
}

Eigen::VectorXd bridge_weights(const Eigen::VectorXd& x, double p) {
  Eigen::VectorXd w(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) w[i] = x[i] == 0.0 ? 0.0 : p * std::pow(std::abs(x[i]), p);
  return w;
}

}  // namespace

KktReport kkt_residual_constrained(const ProblemInstance& inst, const Regularizer& reg, const Eigen::VectorXd& x,
                                   double boundary_tol) {
  require_plain_setting(inst, "KKT residual");
  const double p = reg.bridge_exponent();
  if (!x.allFinite()) throw InvalidArgument("x must be finite");

  const Eigen::VectorXd r = inst.residual(x);
  const Eigen::VectorXd v = x.cwiseProduct(inst.A().transpose() * r);
  const Eigen::VectorXd w = bridge_weights(x, p);

  KktReport report;
  report.cq_value = v.norm();
  report.support_size = static_cast<int>((x.array() != 0.0).count());
  report.boundary = r.norm() >= inst.sigma() - boundary_tol;
  if (!report.boundary) {
    report.residual_norm = w.norm();
    return report;
  }
  const double vv = v.squaredNorm();
  report.multiplier = vv > 0.0 ? std::max(0.0, -v.dot(w) / vv) : 0.0;
  report.residual_norm = (report.multiplier * v + w).norm();
  return report;
}

double penalized_stationarity_residual(const ProblemInstance& inst, const Regularizer& reg,
                                       const Eigen::VectorXd& x, double lambda) {
  require_plain_setting(inst, "penalized stationarity");
  const double p = reg.bridge_exponent();
  const Eigen::VectorXd r = inst.residual(x);
  const Eigen::VectorXd v = 2.0 * lambda * x.cwiseProduct(inst.A().transpose() * r);
  const Eigen::VectorXd w = bridge_weights(x, p);

  const double rn = r.norm();
  const double sigma = inst.sigma();
  double nu;
  if (rn < sigma * (1.0 - kBoundaryRelTol)) {
    nu = 0.0;
  } else if (rn > sigma * (1.0 + kBoundaryRelTol)) {
    nu = 1.0;
  } else {
    const double vv = v.squaredNorm();
    nu = vv > 0.0 ? std::clamp(-v.dot(w) / vv, 0.0, 1.0) : 0.0;
  }
  return (nu * v + w).lpNorm<Eigen::Infinity>();
}

double penalized_objective(const ProblemInstance& inst, const Regularizer& reg, const Eigen::VectorXd& x,
                           double lambda) {
  return lambda * constraint_violation(inst, x) + phi_value(reg, x);
}

MagnitudeBound nonzero_magnitude_bound(const ProblemInstance& inst, const Regularizer& reg,
                                       const Eigen::VectorXd& x, double lambda, const Eigen::VectorXd& x_reference) {
  require_plain_setting(inst, "magnitude bound");
  const double p = reg.bridge_exponent();
  if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
  const double F_ref = penalized_objective(inst, reg, x_reference, lambda);
  if (penalized_objective(inst, reg, x, lambda) > F_ref) {
    throw PreconditionViolation("magnitude bound needs F_lambda(x) <= F_lambda(x_reference)");
  }
  const double sigma = inst.sigma();
  const double denom = 2.0 * std::sqrt(lambda) * spectral_norm_A(inst) * std::sqrt(F_ref + lambda * sigma * sigma);
  const double bound = std::pow(p / denom, 1.0 / (1.0 - p));
  bool ok = true;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0 && std::abs(x[i]) < bound * (1.0 - 1e-6)) ok = false;
  }
  return {bound, ok};
}

CurvatureResult example1_curvature(const Regularizer& family, double a, double gamma) {
  if (!(a > 0.0)) throw InvalidArgument("a must be positive");
  if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidArgument("gamma must lie in (0,1)");
  const double t_star = (1.0 - gamma) * a;
  const double slope = family.derivative(t_star);
  return {slope / (2.0 * gamma * a), slope / (gamma * a) + family.second_derivative(t_star)};
}

double smoothed_abs(double mu, double t) {
  const double a = std::abs(t);
  return a >= mu ? a : t * t / (2.0 * mu) + 0.5 * mu;
}

double smoothed_bridge(double mu, double p, const Eigen::VectorXd& x) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) total += std::pow(smoothed_abs(mu, x[i]), p);
  return total;
}

ApproximationCheck epsilon_approximation_check(double mu, double p, const Eigen::VectorXd& x,
                                               const Eigen::VectorXd& y) {
  if (!(mu > 0.0)) throw InvalidArgument("mu must be positive");
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("p must lie in (0,1)");
  if (x.size() != y.size()) throw InvalidArgument("x and y must have equal length");
  const Regularizer bridge = Regularizer::bridge(p);
  const double smoothed_x = smoothed_bridge(mu, p, x);
  const double gap = smoothed_x - phi_value(bridge, x);
  const double distance = (x - y).norm();
  if (distance == 0.0) return {gap, std::nullopt};
  const double n = static_cast<double>(x.size());
  const double lip = std::sqrt(n) * p * std::pow(mu, p - 1.0);
  return {gap, std::abs(smoothed_x - smoothed_bridge(mu, p, y)) / (lip * distance)};
}

ProjectionBound projection_epsilon_bound_check(const ProblemInstance& inst, double p, double lambda,
                                               const Eigen::VectorXd& x_lambda, const Eigen::VectorXd& x_tilde) {
  if (!(inst.sigma() > 0.0)) throw InvalidArgument("projection bound requires sigma > 0");
  if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
  if (constraint_violation(inst, x_tilde) > kFeasibilityTol) throw InvalidArgument("x_tilde must be feasible");
  const Regularizer bridge = Regularizer::bridge(p);
  const Eigen::VectorXd projected = project_onto_residual_set(inst, x_lambda);
  const double lhs = phi_value(bridge, projected) - phi_value(bridge, x_lambda);
  const double C = pseudo_inverse_norm(inst) / inst.sigma();
  const double n = static_cast<double>(inst.cols());
  const double rhs = std::pow(n, 1.0 - 0.5 * p) * std::pow(C * phi_value(bridge, x_tilde) / lambda, p);
  return {lhs, rhs};
}

}  // namespace exactpen
