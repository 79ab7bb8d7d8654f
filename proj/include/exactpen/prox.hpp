#pragma once

#include <Eigen/Core>
#include <vector>

#include "exactpen/regularizer.hpp"

namespace exactpen {

/// One coordinate of the proximal subproblem
///   q(t) = (L/2) (t - anchor)^2 + phi(t),  lower <= t <= upper.
struct ScalarProxQuery {
  double anchor;
  double L;
  Regularizer reg;
  double lower;
  double upper;
};

/// Vector proximal subproblem; the anchor is the gradient-step point
/// x - grad f(x) / L. Empty bounds mean an infinite box.
struct ProxQuery {
  Eigen::VectorXd anchor;
  double L;
  Regularizer reg;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

/// q(t) for a single coordinate.
double prox_objective(const ScalarProxQuery& query, double t);

/// Global minimizer of q over [lower, upper]. Among equal minima the candidate
/// of smallest magnitude wins, so zero is preferred and returned bitwise.
double prox_scalar(const ScalarProxQuery& query);

/// Coordinatewise prox_scalar.
Eigen::VectorXd prox_step(const ProxQuery& query);

/// q(t) minus the minimum of q over the lattice {lower + k grid_step} (or a
/// window-anchored lattice when lower is infinite) restricted to
/// [lower, upper] and to anchor +- 2 (1 + |anchor|), plus the point 0 when it
/// lies in the box.
double prox_gap_oracle(const ScalarProxQuery& query, double t, double grid_step);

/// Real roots of c2 t^2 + c1 t + c0 (degree drops when leading terms vanish).
std::vector<double> real_roots_quadratic(double c2, double c1, double c0);
/// Real roots of c3 t^3 + c2 t^2 + c1 t + c0, each polished by Newton.
std::vector<double> real_roots_cubic(double c3, double c2, double c1, double c0);

/// Local minimizer of (L/2)(t - a)^2 + t^p on t > 0 for a > 0, when one exists.
/// Uses the trigonometric half-thresholding root for p = 1/2 and safeguarded
/// Newton otherwise. Returns a negative value when no interior minimizer exists.
double bridge_positive_root(double a, double L, double p);

}  // namespace exactpen
