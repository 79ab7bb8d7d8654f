#pragma once

#include <Eigen/Core>

#include "exactpen/problem.hpp"

namespace exactpen {

/// Penalty weight and smoothing width of h_{lambda,mu}, the mu-smoothing of
/// s -> lambda * max(s, 0).
class SmoothedPenaltyParams {
 public:
  SmoothedPenaltyParams(double lambda, double mu);

  double lambda() const { return lambda_; }
  double mu() const { return mu_; }

 private:
  double lambda_;
  double mu_;
};

/// h(s) = lambda * max_{0<=t<=1} (s t - mu t^2 / 2):
///   0 for s <= 0, lambda s^2 / (2 mu) on (0, mu), lambda (s - mu/2) for s >= mu.
double h_value(const SmoothedPenaltyParams& params, double s);

/// h'(s) = lambda * clamp(s / mu, 0, 1).
double h_prime(const SmoothedPenaltyParams& params, double s);

/// f(x) = h(||Ax-b||^2 - sigma^2) + sum_i h([Bx-h]_i).
double f_smooth_value(const ProblemInstance& inst, const SmoothedPenaltyParams& params,
                      const Eigen::Ref<const Eigen::VectorXd>& x);

/// grad f(x) = 2 h'(||Ax-b||^2 - sigma^2) A^T (Ax-b) + B^T h'(Bx-h).
Eigen::VectorXd f_smooth_gradient(const ProblemInstance& inst, const SmoothedPenaltyParams& params,
                                  const Eigen::Ref<const Eigen::VectorXd>& x);

/// Value and gradient sharing the residual computation.
double f_smooth_value_and_gradient(const ProblemInstance& inst, const SmoothedPenaltyParams& params,
                                   const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::VectorXd& grad);

}  // namespace exactpen
