#include "exactpen/theory.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "exactpen/diagnostics.hpp"
#include "exactpen/problem.hpp"
#include "exactpen/regularizer.hpp"
#include "exactpen/rng.hpp"
#include "exactpen/smoothing.hpp"

namespace exactpen {

namespace {

void record(PropertyResult& result, double excess, double slack) {
  ++result.samples;
  if (excess > slack || std::isnan(excess)) {
    ++result.violations;
  }
  if (std::isnan(excess)) {
    result.worst_excess = excess;
  } else if (!std::isnan(result.worst_excess)) {
    result.worst_excess = std::max(result.worst_excess, excess);
  }
}

Eigen::VectorXd random_vector(Rng& rng, Eigen::Index n, double scale) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * rng.normal();
  return v;
}

Eigen::MatrixXd random_orthonormal_rows(Rng& rng, Eigen::Index m, Eigen::Index n) {
  Eigen::MatrixXd G(n, m);
  for (Eigen::Index j = 0; j < m; ++j) G.col(j) = random_vector(rng, n, 1.0);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, m);
  return Q.transpose();
}

ProblemInstance random_orthonormal_instance(Rng& rng, Eigen::Index m, Eigen::Index n) {
  ProblemInstance::Data data;
  data.A = random_orthonormal_rows(rng, m, n);
  const Eigen::VectorXd x0 = random_vector(rng, n, 1.0);
  const Eigen::VectorXd noise = random_vector(rng, m, 1.0);
  data.b = data.A * x0 + noise;
  data.sigma = rng.uniform(0.1, 1.0) * noise.norm();
  data.feasible_point = data.A.transpose() * data.b;
  return ProblemInstance(std::move(data));
}

void classify_curvature(PropertyResult& result, const Regularizer& reg, double a, double gamma, double threshold_value,
                        double gap) {
  // threshold_value < 0 predicts negative curvature.
  if (std::abs(threshold_value) <= gap) return;
  const double curvature = example1_curvature(reg, a, gamma).curvature;
  ++result.samples;
  const bool predicted_negative = threshold_value < 0.0;
  const bool observed_negative = curvature < 0.0;
  if (predicted_negative != observed_negative) {
    ++result.violations;
    result.worst_excess = std::max(result.worst_excess, std::abs(curvature));
  }
}

}  // namespace

PropertyResult check_holder(const TheoryOptions& options) {
  PropertyResult result{.name = "holder"};
  Rng rng(options.seed, 1);
  for (long k = 0; k < options.holder_samples; ++k) {
    const double p = 0.1 * static_cast<double>(1 + k % 9);
    const double scale = std::pow(10.0, rng.uniform(-3.0, 3.0));
    const double s = scale * rng.uniform();
    const double t = scale * rng.uniform();
    const double lhs = std::abs(std::pow(s, p) - std::pow(t, p));
    const double rhs = std::pow(std::abs(s - t), p);
    record(result, lhs - rhs, options.slack * std::max(1.0, rhs));
  }
  return result;
}

std::vector<PropertyResult> check_curvature_signs(const TheoryOptions& options) {
  PropertyResult bridge{.name = "curvature_bridge"};
  PropertyResult fraction{.name = "curvature_fraction"};
  PropertyResult logistic{.name = "curvature_logistic"};
  const double gap = options.curvature_boundary_gap;
  const std::vector<double> anchors{0.25, 0.5, 1.0, 2.0, 4.0};
  const std::vector<double> alphas{0.5, 1.0, 2.0, 5.0};
  for (int gi = 1; gi < 100; ++gi) {
    const double gamma = 0.01 * gi;
    for (int pi = 1; pi < 20; ++pi) {
      const double p = 0.05 * pi;
      for (double a : anchors) {
        classify_curvature(bridge, Regularizer::bridge(p), a, gamma, p - (2.0 - 1.0 / gamma), gap);
      }
    }
    for (double alpha : alphas) {
      for (double a : anchors) {
        classify_curvature(fraction, Regularizer::fraction(alpha), a, gamma, 1.0 + (1.0 - 3.0 * gamma) * alpha * a, gap);
        classify_curvature(logistic, Regularizer::logistic(alpha), a, gamma, 1.0 + (1.0 - 2.0 * gamma) * alpha * a, gap);
      }
    }
  }
  return {bridge, fraction, logistic};
}

PropertyResult check_epsilon_approximation(const TheoryOptions& options) {
  PropertyResult result{.name = "epsilon_approximation"};
  Rng rng(options.seed, 2);
  for (long k = 0; k < options.approximation_samples; ++k) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.below(8));
    const double p = rng.uniform(0.05, 0.95);
    const double mu = std::pow(10.0, rng.uniform(-3.0, 0.0));
    // Mix coordinates inside and outside the smoothing window.
    Eigen::VectorXd x = random_vector(rng, n, rng.uniform() < 0.5 ? mu : 1.0);
    Eigen::VectorXd y = x + random_vector(rng, n, rng.uniform() < 0.5 ? mu : 0.1);
    if (rng.uniform() < 0.1) x[0] = 0.0;
    const ApproximationCheck check = epsilon_approximation_check(mu, p, x, y);
    const double cap = static_cast<double>(n) * std::pow(mu / 2.0, p);
    const double excess_low = -check.gap;
    const double excess_high = check.gap - cap;
    const double excess_lip = check.lip_ratio ? *check.lip_ratio - 1.0 : 0.0;
    record(result, std::max({excess_low, excess_high, excess_lip}), options.slack * std::max(1.0, cap));
  }
  return result;
}

PropertyResult check_distance_bound(const TheoryOptions& options) {
  PropertyResult result{.name = "distance_bound"};
  Rng rng(options.seed, 3);
  long drawn = 0;
  while (result.samples < options.distance_samples) {
    const Eigen::Index m = 2 + static_cast<Eigen::Index>(rng.below(6));
    const Eigen::Index n = m + static_cast<Eigen::Index>(rng.below(6));
    const ProblemInstance inst = random_orthonormal_instance(rng, m, n);
    for (int j = 0; j < 10 && result.samples < options.distance_samples; ++j) {
      ++drawn;
      const Eigen::VectorXd x = random_vector(rng, n, std::pow(10.0, rng.uniform(-1.0, 1.0)));
      if (residual_violation(inst, x) <= 0.0) continue;
      const DistanceBound db = distance_bound_check(inst, x);
      record(result, db.dist - db.bound, options.slack * std::max(1.0, db.bound));
    }
  }
  std::ostringstream os;
  os << drawn << " points drawn";
  result.detail = os.str();
  return result;
}

PropertyResult check_sandwich(const TheoryOptions& options) {
  PropertyResult result{.name = "sandwich"};
  Rng rng(options.seed, 4);
  long k = 0;
  while (k < options.sandwich_samples) {
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(rng.below(4));
    const Eigen::Index n = m + static_cast<Eigen::Index>(rng.below(4));
    const Eigen::Index l = static_cast<Eigen::Index>(rng.below(4));
    ProblemInstance::Data data;
    data.A = random_vector(rng, m * n, 1.0).reshaped(m, n);
    data.feasible_point = random_vector(rng, n, 1.0);
    data.b = data.A * data.feasible_point + random_vector(rng, m, 0.1);
    data.sigma = (data.A * data.feasible_point - data.b).norm() + rng.uniform();
    if (l > 0) {
      data.B = Eigen::MatrixXd(random_vector(rng, l * n, 1.0).reshaped(l, n));
      data.h = Eigen::VectorXd(*data.B * data.feasible_point + rng.uniform() * Eigen::VectorXd::Ones(l));
    }
    const ProblemInstance inst(std::move(data));
    for (int j = 0; j < 50 && k < options.sandwich_samples; ++j, ++k) {
      const SmoothedPenaltyParams params(std::pow(10.0, rng.uniform(-2.0, 3.0)), std::pow(10.0, rng.uniform(-4.0, 1.0)));
      const Eigen::VectorXd x = random_vector(rng, n, std::pow(10.0, rng.uniform(-1.0, 0.5)));
      const double f = f_smooth_value(inst, params, x);
      const double penalty = params.lambda() * constraint_violation(inst, x);
      const double slack_width = static_cast<double>(l + 1) * params.lambda() * params.mu() / 2.0;
      const double scale = std::max(1.0, penalty);
      const double excess = std::max({-f, f - penalty, penalty - (f + slack_width)});
      record(result, excess, options.slack * scale);
    }
  }
  return result;
}

PropertyResult check_h_lipschitz(const TheoryOptions& options) {
  PropertyResult result{.name = "h_lipschitz"};
  Rng rng(options.seed, 5);
  for (long k = 0; k < options.lipschitz_samples; ++k) {
    const SmoothedPenaltyParams params(std::pow(10.0, rng.uniform(-2.0, 3.0)), std::pow(10.0, rng.uniform(-4.0, 1.0)));
    const double width = 3.0 * params.mu();
    const double s1 = rng.uniform(-width, width);
    const double s2 = rng.uniform() < 0.5 ? rng.uniform(-width, width) : s1 + rng.uniform(-0.1, 0.1) * params.mu();
    const double lhs = std::abs(h_prime(params, s1) - h_prime(params, s2));
    const double rhs = params.lambda() / params.mu() * std::abs(s1 - s2);
    record(result, lhs - rhs, options.slack * std::max(1.0, params.lambda()));
  }
  return result;
}

std::vector<PropertyResult> run_theory_suite(const TheoryOptions& options) {
  std::vector<PropertyResult> results;
  results.push_back(check_holder(options));
  for (auto& r : check_curvature_signs(options)) results.push_back(std::move(r));
  results.push_back(check_epsilon_approximation(options));
  results.push_back(check_distance_bound(options));
  results.push_back(check_sandwich(options));
  results.push_back(check_h_lipschitz(options));
  return results;
}

}  // namespace exactpen
