#include "exactpen/prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "exactpen/errors.hpp"

namespace exactpen {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Bracket floor and iteration cap for the safeguarded Newton solve.
constexpr double kRootFloor = 1e-12;
constexpr int kMaxRootIterations = 200;

double sign(double t) { return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0); }

double eval_poly(const double* c, int degree, double t) {
  double v = c[degree];
  for (int k = degree - 1; k >= 0; --k) v = v * t + c[k];
  return v;
}

double eval_poly_derivative(const double* c, int degree, double t) {
  double v = degree * c[degree];
  for (int k = degree - 1; k >= 1; --k) v = v * t + k * c[k];
  return v;
}

// A few Newton steps, each kept only if it reduces |p(t)|.
double polish(const double* c, int degree, double t) {
  for (int it = 0; it < 4; ++it) {
    const double value = eval_poly(c, degree, t);
    const double slope = eval_poly_derivative(c, degree, t);
    if (value == 0.0 || slope == 0.0) break;
    const double next = t - value / slope;
    if (!(std::abs(eval_poly(c, degree, next)) < std::abs(value))) break;
    t = next;
  }
  return t;
}

void validate(const ScalarProxQuery& query) {
  if (!(query.L > 0.0) || !std::isfinite(query.L)) throw InvalidArgument("prox weight L must be positive and finite");
  if (!std::isfinite(query.anchor)) throw InvalidArgument("prox anchor must be finite");
  if (std::isnan(query.lower) || std::isnan(query.upper) || query.lower > query.upper) {
    throw InvalidArgument("prox box must satisfy lower <= upper");
  }
}

// Stationary points of q on the side sign(anchor), where every interior local
// minimizer lives: on the opposite side q is monotone toward 0.
template <class Push>
void push_stationary_candidates(const ScalarProxQuery& query, Push&& push) {
  const double a = query.anchor;
  const double L = query.L;
  if (a == 0.0) return;
  const double s = sign(a);
  const double abs_a = std::abs(a);
  std::visit(
      [&](const auto& family) {
        using F = std::decay_t<decltype(family)>;
        if constexpr (std::is_same_v<F, L1>) {
          if (abs_a > 1.0 / L) push(s * (abs_a - 1.0 / L));
        } else if constexpr (std::is_same_v<F, BridgeP>) {
          const double r = bridge_positive_root(abs_a, L, family.p);
          if (r > 0.0) push(s * r);
        } else if constexpr (std::is_same_v<F, Fraction>) {
          // L (t - a)(1 + alpha t)^2 + alpha = 0 for t > 0.
          const double al = family.alpha;
          for (double r : real_roots_cubic(L * al * al, L * (2.0 * al - abs_a * al * al),
                                           L * (1.0 - 2.0 * abs_a * al), al - L * abs_a)) {
            if (r > 0.0) push(s * r);
          }
        } else if constexpr (std::is_same_v<F, Logistic>) {
          // L (t - a)(1 + alpha t) + alpha = 0 for t > 0.
          const double al = family.alpha;
          for (double r : real_roots_quadratic(L * al, L * (1.0 - al * abs_a), al - L * abs_a)) {
            if (r > 0.0) push(s * r);
          }
        }
      },
      query.reg.family());
}

}  // namespace

std::vector<double> real_roots_quadratic(double c2, double c1, double c0) {
  if (c2 == 0.0) {
    if (c1 == 0.0) return {};
    return {-c0 / c1};
  }
  const double disc = c1 * c1 - 4.0 * c2 * c0;
  if (disc < 0.0) return {};
  // Cancellation-free form.
  const double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
  std::vector<double> roots;
  roots.push_back(q / c2);
  if (q != 0.0) roots.push_back(c0 / q);
  const double coeffs[3] = {c0, c1, c2};
  for (double& r : roots) r = polish(coeffs, 2, r);
  return roots;
}

std::vector<double> real_roots_cubic(double c3, double c2, double c1, double c0) {
  if (c3 == 0.0) return real_roots_quadratic(c2, c1, c0);
  const double a = c2 / c3;
  const double b = c1 / c3;
  const double c = c0 / c3;
  // t = y - a/3 gives y^3 + p y + q = 0.
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double shift = -a / 3.0;
  const double disc = 0.25 * q * q + p * p * p / 27.0;
  std::vector<double> roots;
  if (disc > 0.0) {
    const double sq = std::sqrt(disc);
    roots.push_back(std::cbrt(-0.5 * q + sq) + std::cbrt(-0.5 * q - sq) + shift);
  } else if (p == 0.0) {
    roots.push_back(shift);
  } else {
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(1.5 * q / p * std::sqrt(-3.0 / p), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) {
      roots.push_back(m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0) + shift);
    }
  }
  const double coeffs[4] = {c0, c1, c2, c3};
  for (double& r : roots) r = polish(coeffs, 3, r);
  return roots;
}

double bridge_positive_root(double a, double L, double p) {
  if (!(a > 0.0)) return -1.0;
  const auto slope = [&](double t) { return L * (t - a) + p * std::pow(t, p - 1.0); };
  const auto curvature = [&](double t) { return L + p * (p - 1.0) * std::pow(t, p - 2.0); };

  if (p == 0.5) {
    // Half-thresholding root of (t - a)^2 + (2/L) sqrt(t).
    const double weight = 2.0 / L;
    const double arg = weight / 8.0 * std::pow(a / 3.0, -1.5);
    if (arg > 1.0) return -1.0;
    const double phase = std::acos(arg);
    double t = 2.0 / 3.0 * a * (1.0 + std::cos(2.0 * std::numbers::pi / 3.0 - 2.0 / 3.0 * phase));
    const double g = slope(t);
    const double next = t - g / curvature(t);
    if (next > 0.0 && std::abs(slope(next)) < std::abs(g)) t = next;
    return t;
  }

  // q' is convex on (0, inf) with its minimum at turning; the local minimizer of
  // q is the larger root, bracketed by [turning, a].
  const double turning = std::pow(p * (1.0 - p) / L, 1.0 / (2.0 - p));
  if (turning >= a) return -1.0;
  if (slope(turning) >= 0.0) return -1.0;
  double lo = std::max(turning, kRootFloor);
  double hi = a;
  double t = hi;
  const double tol = 1e-14 * L * (1.0 + a);
  for (int it = 0; it < kMaxRootIterations; ++it) {
    const double g = slope(t);
    if (std::abs(g) <= tol) break;
    if (g > 0.0) {
      hi = t;
    } else {
      lo = t;
    }
    double next = t - g / curvature(t);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == t) break;
    t = next;
  }
  return t;
}

double prox_objective(const ScalarProxQuery& query, double t) {
  const double d = t - query.anchor;
  return 0.5 * query.L * d * d + query.reg.scalar(t);
}

double prox_scalar(const ScalarProxQuery& query) {
  validate(query);
  const double lo = query.lower;
  const double hi = query.upper;

  // At most: zero, three stationary points, two endpoints.
  double candidates[6];
  int count = 0;
  const auto push = [&](double t) { candidates[count++] = std::clamp(t, lo, hi); };

  if (lo <= 0.0 && 0.0 <= hi) candidates[count++] = 0.0;
  push_stationary_candidates(query, push);
  if (std::isfinite(lo)) candidates[count++] = lo;
  if (std::isfinite(hi)) candidates[count++] = hi;

  std::stable_sort(candidates, candidates + count,
                   [](double x, double y) { return std::abs(x) < std::abs(y); });
  double best = candidates[0];
  double best_value = prox_objective(query, best);
  for (int k = 1; k < count; ++k) {
    const double value = prox_objective(query, candidates[k]);
    if (value < best_value) {
      best_value = value;
      best = candidates[k];
    }
  }
  return best == 0.0 ? 0.0 : best;
}

Eigen::VectorXd prox_step(const ProxQuery& query) {
  const Eigen::Index n = query.anchor.size();
  const bool bounded = query.lower.size() != 0 || query.upper.size() != 0;
  if (bounded && (query.lower.size() != n || query.upper.size() != n)) {
    throw InvalidArgument("prox box bounds have wrong length");
  }
  Eigen::VectorXd out(n);
  ScalarProxQuery scalar{0.0, query.L, query.reg, -kInf, kInf};
  for (Eigen::Index i = 0; i < n; ++i) {
    scalar.anchor = query.anchor[i];
    if (bounded) {
      scalar.lower = query.lower[i];
      scalar.upper = query.upper[i];
    }
    out[i] = prox_scalar(scalar);
  }
  return out;
}

double prox_gap_oracle(const ScalarProxQuery& query, double t, double grid_step) {
  validate(query);
  if (!(grid_step > 0.0) || !std::isfinite(grid_step)) throw InvalidArgument("grid_step must be positive");
  const double half_width = 2.0 * (1.0 + std::abs(query.anchor));
  const double window_lo = std::max(query.lower, query.anchor - half_width);
  const double window_hi = std::min(query.upper, query.anchor + half_width);

  double best = kInf;
  if (query.lower <= 0.0 && 0.0 <= query.upper) best = prox_objective(query, 0.0);
  if (window_lo <= window_hi) {
    if (!std::isfinite(window_lo) || !std::isfinite(window_hi)) {
      throw InvalidArgument("prox gap oracle grid range is not finite");
    }
    const double origin = std::isfinite(query.lower) ? query.lower : window_lo;
    const auto first = static_cast<long long>(std::ceil((window_lo - origin) / grid_step));
    const auto last = static_cast<long long>(std::floor((window_hi - origin) / grid_step));
    for (long long k = first; k <= last; ++k) {
      best = std::min(best, prox_objective(query, origin + static_cast<double>(k) * grid_step));
    }
  }
  if (!std::isfinite(best)) throw InvalidArgument("prox gap oracle grid is empty");
  return prox_objective(query, t) - best;
}

}  // namespace exactpen
