#pragma once

#include <Eigen/Core>
#include <optional>

#include "exactpen/problem.hpp"
#include "exactpen/regularizer.hpp"

namespace exactpen {

/// Relative tolerance on ||Ax - b|| vs sigma when deciding the boundary case.
inline constexpr double kBoundaryRelTol = 1e-9;

/// KKT certificate for min ||x||_p^p s.t. ||Ax - b|| <= sigma (B absent, no box):
///   0 = multiplier * Diag(x) A^T (Ax - b) + p |x|^p.
struct KktReport {
  double residual_norm = 0.0;
  double multiplier = 0.0;
  double cq_value = 0.0;  // ||Diag(x) A^T (Ax - b)||
  bool boundary = false;
  int support_size = 0;
};

/// Fits the multiplier by clamped one-dimensional least squares on the
/// boundary and returns ||p|x|^p|| in the interior.
KktReport kkt_residual_constrained(const ProblemInstance& inst, const Regularizer& reg, const Eigen::VectorXd& x,
                                   double boundary_tol);

/// ||2 nu lambda Diag(x) A^T (Ax - b) + p |x|^p||_inf with nu = 0, fitted in
/// [0,1], or 1 for residual below, at, or above sigma.
double penalized_stationarity_residual(const ProblemInstance& inst, const Regularizer& reg,
                                       const Eigen::VectorXd& x, double lambda);

struct MagnitudeBound {
  double bound;
  bool ok;
};

/// Lower bound on the nonzero magnitudes of a stationary point of
/// F_lambda = lambda (||Ax-b||^2 - sigma^2)_+ + ||x||_p^p, given a reference
/// x_ref with F_lambda(x) <= F_lambda(x_ref).
MagnitudeBound nonzero_magnitude_bound(const ProblemInstance& inst, const Regularizer& reg,
                                       const Eigen::VectorXd& x, double lambda, const Eigen::VectorXd& x_reference);

/// Nonsmooth penalized objective lambda * violation(x) + Phi(x).
double penalized_objective(const ProblemInstance& inst, const Regularizer& reg, const Eigen::VectorXd& x,
                           double lambda);

struct CurvatureResult {
  double lambda_star;
  double curvature;
};

/// For min phi(t) s.t. |t - a| <= gamma a, the quadratic-penalty weight that
/// makes t* = (1 - gamma) a stationary and the second derivative of
/// lambda* (t - a)^2 + phi(t) there. Negative curvature means no quadratic
/// penalty weight turns t* into a local minimizer.
CurvatureResult example1_curvature(const Regularizer& family, double a, double gamma);

/// psi_mu(t): |t| for |t| >= mu, t^2/(2 mu) + mu/2 otherwise.
double smoothed_abs(double mu, double t);
/// sum_i psi_mu(x_i)^p.
double smoothed_bridge(double mu, double p, const Eigen::VectorXd& x);

struct ApproximationCheck {
  double gap;        // Psi_mu(x) - ||x||_p^p, expected in [0, n (mu/2)^p]
  // |Psi_mu(x) - Psi_mu(y)| / (sqrt(n) p mu^{p-1} ||x - y||), expected <= 1.
  // Empty when x == y.
  std::optional<double> lip_ratio;
};

ApproximationCheck epsilon_approximation_check(double mu, double p, const Eigen::VectorXd& x,
                                               const Eigen::VectorXd& y);

struct ProjectionBound {
  double lhs;  // Phi(P_S(x_lambda)) - Phi(x_lambda)
  double rhs;  // n^{1 - p/2} (C Phi(x_tilde) / lambda)^p,  C = ||A^+|| / sigma
};

ProjectionBound projection_epsilon_bound_check(const ProblemInstance& inst, double p, double lambda,
                                               const Eigen::VectorXd& x_lambda, const Eigen::VectorXd& x_tilde);

}  // namespace exactpen
