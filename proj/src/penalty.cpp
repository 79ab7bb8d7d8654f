#include "exactpen/penalty.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "exactpen/errors.hpp"
#include "exactpen/prox.hpp"
#include "exactpen/smoothing.hpp"

namespace exactpen {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string annotate(const char* what, int k, double lambda) {
  std::ostringstream os;
  os << what << " (outer iteration " << k << ", lambda=" << lambda << ")";
  return os.str();
}

// Everything that differs between the exact and the quadratic penalty: the
// smooth part as a function of (lambda, mu).
struct SmoothModel {
  std::function<double(double lambda, double mu, const Eigen::VectorXd& x, Eigen::VectorXd& grad)> value_and_gradient;
};

SmoothModel exact_model(const ProblemInstance& inst) {
  return {[&inst](double lambda, double mu, const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    return f_smooth_value_and_gradient(inst, SmoothedPenaltyParams(lambda, mu), x, grad);
  }};
}

SmoothModel quadratic_model(const ProblemInstance& inst) {
  return {[&inst](double lambda, double, const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    const Eigen::VectorXd r = inst.residual(x);
    grad.noalias() = inst.A().transpose() * (2.0 * lambda * r);
    return lambda * r.squaredNorm();
  }};
}

SolveReport run_driver(const ProblemInstance& inst, const Regularizer& reg, const PenaltySchedule& schedule,
                       const NpgConfig& npg_config, const Eigen::VectorXd& x0, Method method,
                       const SmoothModel& model, const StationarityMeasure& measure) {
  schedule.validate();
  npg_config.validate();
  if (x0.size() != inst.cols()) throw InvalidArgument("x0 has wrong length");
  if (!x0.allFinite() || !inst.in_box(x0)) throw InvalidArgument("x0 must be finite and lie in the box");

  const auto started = std::chrono::steady_clock::now();
  SolveReport report;
  report.method = method;

  const Eigen::VectorXd& lower = inst.lower();
  const Eigen::VectorXd& upper = inst.upper();
  const bool boxed = !inst.box_is_infinite();
  const Eigen::VectorXd no_bound;

  CompositeProblem problem;
  problem.nonsmooth_value = [&](const Eigen::VectorXd& x) {
    if (boxed && !inst.in_box(x)) return kInf;
    return phi_value(reg, x);
  };
  problem.prox = [&](const Eigen::VectorXd& anchor, double L) {
    return prox_step(ProxQuery{anchor, L, reg, boxed ? lower : no_bound, boxed ? upper : no_bound});
  };

  double lambda = schedule.lambda0;
  double mu = schedule.mu0;
  double eps = schedule.eps0;
  Eigen::VectorXd x = x0;
  Eigen::VectorXd scratch(inst.cols());
  problem.smooth_value_and_gradient = [&](const Eigen::VectorXd& z, Eigen::VectorXd& grad) {
    return model.value_and_gradient(lambda, mu, z, grad);
  };
  const auto penalized = [&](const Eigen::VectorXd& z) {
    return model.value_and_gradient(lambda, mu, z, scratch) + phi_value(reg, z);
  };

  // One inner solve at the current (lambda, mu) and tolerance level, warm
  // started from x (or x_feas when that is better); updates x.
  const auto inner_solve = [&](int k, double level) {
    OuterIterate record;
    record.lambda = lambda;
    record.mu = mu;
    record.eps = level;
    record.feasible_F = penalized(inst.feasible_point());
    record.start_F = penalized(x);
    if (record.start_F > record.feasible_F) {
      x = inst.feasible_point();
      record.start_F = record.feasible_F;
      record.restarted_from_feasible = true;
    }
    const double stationarity_tol = std::pow(level, schedule.stationarity_exponent);
    const double fchange_tol = std::min(std::pow(level, schedule.fchange_exponent), schedule.fchange_cap);
    const NpgStopRule stop = [&](const NpgState& state) {
      const double change =
          std::abs(state.objective - state.previous_objective) / std::max(1.0, std::abs(state.objective));
      if (change > fchange_tol) return false;
      return measure(state.x, state.gradient) <= stationarity_tol;
    };
    NpgResult inner;
    try {
      inner = npg_solve(problem, x, npg_config, stop);
    } catch (const LineSearchStall& e) {
      throw LineSearchStall(annotate(e.what(), k, lambda));
    } catch (const NonFiniteObjective& e) {
      throw NonFiniteObjective(annotate(e.what(), k, lambda));
    }
    x = inner.x_final;
    Eigen::VectorXd grad(inst.cols());
    const double smooth = model.value_and_gradient(lambda, mu, x, grad);
    record.inner_iterations = inner.iterations;
    record.inner_converged = inner.termination_reason == NpgTermination::StoppingRuleMet;
    record.stationarity_residual = measure(x, grad);
    record.feasibility_violation = constraint_violation(inst, x);
    record.Phi_value = phi_value(reg, x);
    record.F_value = smooth + record.Phi_value;
    return record;
  };

  for (int k = 0; k < schedule.max_outer; ++k) {
    const OuterIterate record = inner_solve(k, eps);
    report.per_outer.push_back(record);
    report.outer_iterations = k + 1;
    if (std::max(record.feasibility_violation, schedule.outer_eps_weight * eps) <= schedule.outer_tolerance) {
      report.converged = true;
      break;
    }
    lambda *= schedule.rho;
    mu *= schedule.theta;
    eps = std::max(schedule.theta * eps, schedule.eps_floor);
  }

  if (report.converged && schedule.final_polish && eps > schedule.eps_floor) {
    const Eigen::VectorXd unpolished = x;
    try {
      report.polish = inner_solve(report.outer_iterations, schedule.eps_floor);
      report.polish_accepted =
          report.polish->inner_converged && report.polish->feasibility_violation <= schedule.outer_tolerance;
    } catch (const std::runtime_error&) {
      report.polish_accepted = false;
    }
    if (!report.polish_accepted) x = unpolished;
  }
  report.x_final = x;
  report.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  if (!report.converged) throw MaxOuterExceeded(std::move(report));
  return report;
}

StationarityMeasure default_measure(const Regularizer& reg, const ProblemInstance& inst) {
  if (reg.is_bridge()) {
    return [reg](const Eigen::VectorXd& x, const Eigen::VectorXd& g) { return bridge_scaled_stationarity(reg, x, g); };
  }
  return [reg, &inst](const Eigen::VectorXd& x, const Eigen::VectorXd& g) {
    return subdifferential_distance(reg, inst, x, g);
  };
}

}  // namespace

void PenaltySchedule::validate() const {
  if (!(lambda0 > 0.0 && mu0 > 0.0 && eps0 > 0.0)) throw InvalidArgument("lambda0, mu0, eps0 must be positive");
  if (!(rho > 1.0)) throw InvalidArgument("rho must exceed 1");
  if (!(theta > 0.0 && theta < 1.0)) throw InvalidArgument("theta must lie in (0,1)");
  if (!(eps_floor > 0.0)) throw InvalidArgument("eps_floor must be positive");
  if (!(outer_tolerance > 0.0)) throw InvalidArgument("outer_tolerance must be positive");
  if (max_outer <= 0) throw InvalidArgument("max_outer must be positive");
}

std::string to_string(Method method) {
  switch (method) {
    case Method::ExactPenalty:
      return "exact";
    case Method::InexactPenalty:
      return "inexact";
    case Method::L1Baseline:
      return "l1";
  }
  return "unknown";
}

Method parse_method(const std::string& text) {
  if (text == "exact") return Method::ExactPenalty;
  if (text == "inexact") return Method::InexactPenalty;
  if (text == "l1") return Method::L1Baseline;
  throw InvalidArgument("unknown method '" + text + "' (expected exact, inexact or l1)");
}

MaxOuterExceeded::MaxOuterExceeded(SolveReport report)
    : std::runtime_error("penalty schedule exhausted after " + std::to_string(report.outer_iterations) +
                         " outer iterations without meeting the outer tolerance"),
      report_(std::move(report)) {}

double bridge_scaled_stationarity(const Regularizer& reg, const Eigen::VectorXd& x, const Eigen::VectorXd& g) {
  const double p = reg.bridge_exponent();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) continue;
    worst = std::max(worst, std::abs(x[i] * g[i] + p * std::pow(std::abs(x[i]), p)));
  }
  return worst;
}

double subdifferential_distance(const Regularizer& reg, const ProblemInstance& inst, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& g) {
  const double bound = reg.subgradient_bound_at_zero();
  if (!std::isfinite(bound)) {
    throw InvalidArgument("subdifferential distance needs a regularizer with bounded subgradients at 0");
  }
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double lo = g[i];
    double hi = g[i];
    if (x[i] == 0.0) {
      lo -= bound;
      hi += bound;
    } else {
      const double d = reg.derivative(x[i]);
      lo += d;
      hi += d;
    }
    if (x[i] == inst.lower()[i]) lo = -kInf;
    if (x[i] == inst.upper()[i]) hi = kInf;
    const double distance = lo > 0.0 ? lo : (hi < 0.0 ? -hi : 0.0);
    worst = std::max(worst, distance);
  }
  return worst;
}

SolveReport exact_penalty_solve(const ProblemInstance& inst, const Regularizer& reg, const PenaltySchedule& schedule,
                                const NpgConfig& npg_config, const Eigen::VectorXd& x0,
                                const StationarityMeasure& measure) {
  return run_driver(inst, reg, schedule, npg_config, x0, Method::ExactPenalty, exact_model(inst),
                    measure ? measure : default_measure(reg, inst));
}

SolveReport inexact_penalty_solve(const ProblemInstance& inst, const Regularizer& reg,
                                  const PenaltySchedule& schedule, const NpgConfig& npg_config,
                                  const Eigen::VectorXd& x0, const StationarityMeasure& measure) {
  if (inst.has_inequalities()) throw InvalidArgument("the quadratic penalty has no inequality term; B must be absent");
  return run_driver(inst, reg, schedule, npg_config, x0, Method::InexactPenalty, quadratic_model(inst),
                    measure ? measure : default_measure(reg, inst));
}

SolveReport l1_baseline_solve(const ProblemInstance& inst, const PenaltySchedule& schedule,
                              const NpgConfig& npg_config, const Eigen::VectorXd& x0) {
  if (inst.has_inequalities()) throw InvalidArgument("the l1 baseline requires B to be absent");
  const Regularizer reg = Regularizer::l1();
  return run_driver(inst, reg, schedule, npg_config, x0, Method::L1Baseline, exact_model(inst),
                    default_measure(reg, inst));
}

SolveReport solve_with_method(Method method, const ProblemInstance& inst, const Regularizer& reg,
                              const PenaltySchedule& schedule, const NpgConfig& npg_config,
                              const Eigen::VectorXd& x0) {
  switch (method) {
    case Method::ExactPenalty:
      return exact_penalty_solve(inst, reg, schedule, npg_config, x0);
    case Method::InexactPenalty:
      return inexact_penalty_solve(inst, reg, schedule, npg_config, x0);
    case Method::L1Baseline:
      return l1_baseline_solve(inst, schedule, npg_config, x0);
  }
  throw InvalidArgument("unknown method");
}

}  // namespace exactpen
