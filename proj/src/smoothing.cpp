#include "exactpen/smoothing.hpp"

#include <algorithm>
#include <cmath>

#include "exactpen/errors.hpp"

namespace exactpen {

SmoothedPenaltyParams::SmoothedPenaltyParams(double lambda, double mu) : lambda_(lambda), mu_(mu) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be positive");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw InvalidArgument("mu must be positive");
}

double h_value(const SmoothedPenaltyParams& params, double s) {
  if (s <= 0.0) return 0.0;
  if (s < params.mu()) return params.lambda() * s * s / (2.0 * params.mu());
  return params.lambda() * (s - 0.5 * params.mu());
}

double h_prime(const SmoothedPenaltyParams& params, double s) {
  return params.lambda() * std::clamp(s / params.mu(), 0.0, 1.0);
}

double f_smooth_value(const ProblemInstance& inst, const SmoothedPenaltyParams& params,
                      const Eigen::Ref<const Eigen::VectorXd>& x) {
  const double s = inst.residual(x).squaredNorm() - inst.sigma() * inst.sigma();
  double total = h_value(params, s);
  if (inst.has_inequalities()) {
    const Eigen::VectorXd slack = inst.B() * x - inst.h();
    for (Eigen::Index i = 0; i < slack.size(); ++i) total += h_value(params, slack[i]);
  }
  return total;
}

double f_smooth_value_and_gradient(const ProblemInstance& inst, const SmoothedPenaltyParams& params,
                                   const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::VectorXd& grad) {
  const Eigen::VectorXd r = inst.residual(x);
  const double s = r.squaredNorm() - inst.sigma() * inst.sigma();
  double total = h_value(params, s);
  const double weight = 2.0 * h_prime(params, s);
  if (weight != 0.0) {
    grad.noalias() = inst.A().transpose() * (weight * r);
  } else {
    grad.setZero(inst.cols());
  }
  if (inst.has_inequalities()) {
    const Eigen::VectorXd slack = inst.B() * x - inst.h();
    Eigen::VectorXd coeff(slack.size());
    for (Eigen::Index i = 0; i < slack.size(); ++i) {
      total += h_value(params, slack[i]);
      coeff[i] = h_prime(params, slack[i]);
    }
    grad.noalias() += inst.B().transpose() * coeff;
  }
  return total;
}

Eigen::VectorXd f_smooth_gradient(const ProblemInstance& inst, const SmoothedPenaltyParams& params,
                                  const Eigen::Ref<const Eigen::VectorXd>& x) {
  Eigen::VectorXd grad(inst.cols());
  f_smooth_value_and_gradient(inst, params, x, grad);
  return grad;
}

}  // namespace exactpen
