#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace exactpen {

struct PropertyResult {
  std::string name;
  long samples = 0;
  long violations = 0;
  double worst_excess = 0.0;  // largest amount by which a bound was exceeded
  std::string detail;

  bool passed() const { return violations == 0 && samples > 0; }
};

struct TheoryOptions {
  std::uint64_t seed = 7;
  long holder_samples = 10000;
  long approximation_samples = 10000;
  long distance_samples = 1000;
  long sandwich_samples = 10000;
  long lipschitz_samples = 10000;
  /// Points closer than this to a sign threshold are skipped.
  double curvature_boundary_gap = 1e-10;
  double slack = 1e-12;
};

/// |s^p - t^p| <= |s - t|^p for s, t >= 0 and p on {0.1, ..., 0.9}.
PropertyResult check_holder(const TheoryOptions& options);
/// Sign of the curvature at t* against the closed-form threshold, for the
/// bridge, fraction and logistic families on a parameter grid.
std::vector<PropertyResult> check_curvature_signs(const TheoryOptions& options);
/// 0 <= Psi_mu(x) - ||x||_p^p <= n (mu/2)^p and the Lipschitz ratio <= 1.
PropertyResult check_epsilon_approximation(const TheoryOptions& options);
/// dist(x, S) <= (||A^+|| / sigma) (||Ax-b||^2 - sigma^2)_+ at infeasible points.
PropertyResult check_distance_bound(const TheoryOptions& options);
/// 0 <= f <= lambda * violation <= f + (l+1) lambda mu / 2.
PropertyResult check_sandwich(const TheoryOptions& options);
/// |h'(s1) - h'(s2)| <= (lambda / mu) |s1 - s2|.
PropertyResult check_h_lipschitz(const TheoryOptions& options);

std::vector<PropertyResult> run_theory_suite(const TheoryOptions& options = {});

}  // namespace exactpen
