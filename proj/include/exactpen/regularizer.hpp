#pragma once

#include <Eigen/Core>
#include <string>
#include <variant>

namespace exactpen {

/// Bridge penalty |t|^p with 0 < p < 1.
struct BridgeP {
  double p;
};

struct L1 {};

/// Fraction penalty alpha|t| / (1 + alpha|t|).
struct Fraction {
  double alpha;
};

/// Logistic penalty log(1 + alpha|t|).
struct Logistic {
  double alpha;
};

/// Separable penalty Phi(x) = sum_i phi(x_i). All families satisfy phi(0) = 0,
/// phi(-t) = phi(t) and are nondecreasing on [0, inf).
class Regularizer {
 public:
  using Family = std::variant<BridgeP, L1, Fraction, Logistic>;

  Regularizer(Family family);  // NOLINT: implicit from a family is intended

  static Regularizer bridge(double p) { return Regularizer(BridgeP{p}); }
  static Regularizer l1() { return Regularizer(L1{}); }
  static Regularizer fraction(double alpha) { return Regularizer(Fraction{alpha}); }
  static Regularizer logistic(double alpha) { return Regularizer(Logistic{alpha}); }

  const Family& family() const { return family_; }
  bool is_bridge() const { return std::holds_alternative<BridgeP>(family_); }
  bool is_l1() const { return std::holds_alternative<L1>(family_); }
  /// Exponent p for the bridge family; throws InvalidArgument otherwise.
  double bridge_exponent() const;

  /// phi(t) for a scalar.
  double scalar(double t) const;
  /// phi'(t); rejects t == 0 where the subdifferential is unbounded (bridge)
  /// or an interval.
  double derivative(double t) const;
  /// phi''(t) for t != 0.
  double second_derivative(double t) const;
  /// Half-width of the subdifferential at 0 (infinite for bridge).
  double subgradient_bound_at_zero() const;

  std::string name() const;

 private:
  Family family_;
};

/// Phi(x) = sum_i phi(x_i).
double phi_value(const Regularizer& reg, const Eigen::Ref<const Eigen::VectorXd>& x);

/// phi'(t), t != 0.
double phi_derivative(const Regularizer& reg, double t);

/// Parse "bridge:0.5", "l1", "fraction:2", "logistic:1".
Regularizer parse_regularizer(const std::string& text);

}  // namespace exactpen
