#include "exactpen/regularizer.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "exactpen/errors.hpp"

namespace exactpen {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double sign(double t) { return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0); }

}  // namespace

Regularizer::Regularizer(Family family) : family_(family) {
  std::visit(Overloaded{
                 [](const BridgeP& f) {
                   if (!(f.p > 0.0 && f.p < 1.0)) {
                     throw InvalidArgument("bridge exponent must lie in (0,1)");
                   }
                 },
                 [](const L1&) {},
                 [](const Fraction& f) {
                   if (!(f.alpha > 0.0)) throw InvalidArgument("fraction alpha must be positive");
                 },
                 [](const Logistic& f) {
                   if (!(f.alpha > 0.0)) throw InvalidArgument("logistic alpha must be positive");
                 },
             },
             family_);
}

double Regularizer::bridge_exponent() const {
  if (const auto* b = std::get_if<BridgeP>(&family_)) return b->p;
  throw InvalidArgument("operation requires a bridge regularizer, got " + name());
}

double Regularizer::scalar(double t) const {
  const double a = std::abs(t);
  return std::visit(Overloaded{
                        [a](const BridgeP& f) { return a == 0.0 ? 0.0 : std::pow(a, f.p); },
                        [a](const L1&) { return a; },
                        [a](const Fraction& f) { return f.alpha * a / (1.0 + f.alpha * a); },
                        [a](const Logistic& f) { return std::log1p(f.alpha * a); },
                    },
                    family_);
}

double Regularizer::derivative(double t) const {
  if (t == 0.0) {
    throw InvalidArgument("phi is not differentiable at 0");
  }
  const double a = std::abs(t);
  const double s = sign(t);
  return std::visit(Overloaded{
                        [&](const BridgeP& f) { return f.p * s * std::pow(a, f.p - 1.0); },
                        [&](const L1&) { return s; },
                        [&](const Fraction& f) {
                          const double d = 1.0 + f.alpha * a;
                          return s * f.alpha / (d * d);
                        },
                        [&](const Logistic& f) { return s * f.alpha / (1.0 + f.alpha * a); },
                    },
                    family_);
}

double Regularizer::second_derivative(double t) const {
  if (t == 0.0) {
    throw InvalidArgument("phi is not twice differentiable at 0");
  }
  const double a = std::abs(t);
  return std::visit(Overloaded{
                        [&](const BridgeP& f) { return f.p * (f.p - 1.0) * std::pow(a, f.p - 2.0); },
                        [&](const L1&) { return 0.0; },
                        [&](const Fraction& f) {
                          const double d = 1.0 + f.alpha * a;
                          return -2.0 * f.alpha * f.alpha / (d * d * d);
                        },
                        [&](const Logistic& f) {
                          const double d = 1.0 + f.alpha * a;
                          return -f.alpha * f.alpha / (d * d);
                        },
                    },
                    family_);
}

double Regularizer::subgradient_bound_at_zero() const {
  return std::visit(Overloaded{
                        [](const BridgeP&) { return std::numeric_limits<double>::infinity(); },
                        [](const L1&) { return 1.0; },
                        [](const Fraction& f) { return f.alpha; },
                        [](const Logistic& f) { return f.alpha; },
                    },
                    family_);
}

std::string Regularizer::name() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const BridgeP& f) { os << "bridge:" << f.p; },
                 [&](const L1&) { os << "l1"; },
                 [&](const Fraction& f) { os << "fraction:" << f.alpha; },
                 [&](const Logistic& f) { os << "logistic:" << f.alpha; },
             },
             family_);
  return os.str();
}

double phi_value(const Regularizer& reg, const Eigen::Ref<const Eigen::VectorXd>& x) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) total += reg.scalar(x[i]);
  return total;
}

double phi_derivative(const Regularizer& reg, double t) { return reg.derivative(t); }

Regularizer parse_regularizer(const std::string& text) {
  const auto colon = text.find(':');
  const std::string family = text.substr(0, colon);
  const auto parameter = [&]() {
    if (colon == std::string::npos) throw InvalidArgument("regularizer '" + text + "' needs a parameter");
    return std::stod(text.substr(colon + 1));
  };
  if (family == "bridge") return Regularizer::bridge(parameter());
  if (family == "l1") return Regularizer::l1();
  if (family == "fraction") return Regularizer::fraction(parameter());
  if (family == "logistic") return Regularizer::logistic(parameter());
  throw InvalidArgument("unknown regularizer family '" + family + "'");
}

}  // namespace exactpen
